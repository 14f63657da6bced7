//! Monte Carlo ULA chains `x <- x - eps grad f(x) + sqrt(2 eps) z`.
//!
//! Chain `i` draws from a ChaCha8 stream keyed by `(seed, i)`, so results do
//! not depend on scheduling. Chains are processed in fixed blocks whose
//! statistics are merged in block order; output is bit-identical across
//! thread counts.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::gaussian::GaussianMeasure;
use crate::linalg;
use crate::targets::Target;

const BLOCK: usize = 1024;

/// Minimum sample count for [`estimate_grad_moment`].
pub const MIN_MOMENT_SAMPLES: usize = 10_000;

/// Isotropic Gaussian initialization `N(mean, sd^2 I)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InitSpec {
    pub mean: DVector<f64>,
    pub sd: f64,
}

impl InitSpec {
    /// `N(x*, I/L)` from the target's stationary point and smoothness.
    pub fn for_target(target: &Target) -> Result<Self> {
        let mean = target
            .stationary_point()
            .cloned()
            .ok_or_else(|| invalid("init", "target has no stationary point; locate one first"))?;
        Ok(InitSpec {
            mean,
            sd: (1.0 / target.smoothness()).sqrt(),
        })
    }
}

/// Fixed histogram bins `[lo, hi)` split into `bins` equal cells (1D only).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramSpec {
    pub lo: f64,
    pub hi: f64,
    pub bins: usize,
}

impl HistogramSpec {
    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.bins as f64
    }

    pub fn edges(&self) -> Vec<f64> {
        (0..=self.bins).map(|i| self.lo + self.width() * i as f64).collect()
    }

    fn bin(&self, x: f64) -> Option<usize> {
        if !(x >= self.lo) || x >= self.hi {
            return None;
        }
        Some((((x - self.lo) / self.width()) as usize).min(self.bins - 1))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    pub eps: f64,
    pub steps: usize,
    pub chains: usize,
    pub seed: u64,
    pub init: InitSpec,
    pub histogram: Option<HistogramSpec>,
    /// Keep every chain's final iterate in the summary.
    pub keep_final: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub spec: HistogramSpec,
    pub counts: Vec<u64>,
    /// All samples, including those outside `[lo, hi)`.
    pub total: u64,
}

impl Histogram {
    /// Fraction of all samples per bin.
    pub fn probabilities(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64 / self.total as f64).collect()
    }

    /// Total variation distance to bin masses `p` (which should sum to at most 1),
    /// counting out-of-range samples and missing mass.
    pub fn total_variation(&self, p: &[f64]) -> f64 {
        let probs = self.probabilities();
        let inside: f64 = probs.iter().zip(p).map(|(a, b)| (a - b).abs()).sum();
        let out_emp = 1.0 - probs.iter().sum::<f64>();
        let out_ref = 1.0 - p.iter().sum::<f64>();
        0.5 * (inside + (out_emp - out_ref).abs())
    }
}

/// Empirical statistics at one recorded step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSummary {
    pub step: usize,
    pub mean: DVector<f64>,
    /// Unbiased empirical covariance.
    pub covariance: DMatrix<f64>,
    pub histogram: Option<Histogram>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainSummary {
    pub dim: usize,
    pub chains: usize,
    pub records: Vec<StepSummary>,
    /// Final iterates, row-major `chains x dim`, when requested.
    pub final_samples: Option<Vec<f64>>,
}

impl ChainSummary {
    pub fn at(&self, step: usize) -> Option<&StepSummary> {
        self.records.iter().find(|r| r.step == step)
    }

    /// CSV with one row per recorded step: mean, covariance (row-major) and
    /// histogram counts when present.
    pub fn to_csv(&self) -> String {
        let n = self.dim;
        let mut cols = vec!["step".to_string()];
        cols.extend((0..n).map(|i| format!("mean_{i}")));
        cols.extend((0..n).flat_map(|i| (0..n).map(move |j| format!("cov_{i}_{j}"))));
        let bins = self
            .records
            .first()
            .and_then(|r| r.histogram.as_ref())
            .map(|h| h.counts.len())
            .unwrap_or(0);
        cols.extend((0..bins).map(|b| format!("hist_{b}")));
        let mut out = format!(
            "# step: ULA iteration; mean_i, cov_i_j: empirical moments over {} chains; hist_b: counts per fixed bin\n{}\n",
            self.chains,
            cols.join(",")
        );
        for r in &self.records {
            let mut row = vec![r.step.to_string()];
            row.extend(r.mean.iter().map(|v| format!("{v:?}")));
            row.extend(
                (0..n)
                    .flat_map(|i| (0..n).map(move |j| (i, j)))
                    .map(|(i, j)| format!("{:?}", r.covariance[(i, j)])),
            );
            if let Some(h) = &r.histogram {
                row.extend(h.counts.iter().map(|c| c.to_string()));
            }
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

/// Streaming mean and co-moment with a deterministic pairwise merge.
#[derive(Debug, Clone)]
struct Moments {
    count: f64,
    mean: Vec<f64>,
    m2: Vec<f64>,
    hist: Vec<u64>,
    hist_total: u64,
}

impl Moments {
    fn new(n: usize, bins: usize) -> Self {
        Moments {
            count: 0.0,
            mean: vec![0.0; n],
            m2: vec![0.0; n * n],
            hist: vec![0; bins],
            hist_total: 0,
        }
    }

    fn push(&mut self, x: &[f64], hist: Option<&HistogramSpec>, delta: &mut [f64]) {
        let n = x.len();
        self.count += 1.0;
        for i in 0..n {
            delta[i] = x[i] - self.mean[i];
            self.mean[i] += delta[i] / self.count;
        }
        for i in 0..n {
            let after = x[i] - self.mean[i];
            for j in 0..n {
                self.m2[j * n + i] += delta[j] * after;
            }
        }
        if let Some(spec) = hist {
            self.hist_total += 1;
            if let Some(b) = spec.bin(x[0]) {
                self.hist[b] += 1;
            }
        }
    }

    fn merge(&mut self, other: &Moments) {
        if other.count == 0.0 {
            return;
        }
        let n = self.mean.len();
        let total = self.count + other.count;
        let delta: Vec<f64> = (0..n).map(|i| other.mean[i] - self.mean[i]).collect();
        let w = self.count * other.count / total;
        for i in 0..n {
            for j in 0..n {
                self.m2[i * n + j] += other.m2[i * n + j] + delta[i] * delta[j] * w;
            }
            self.mean[i] += delta[i] * other.count / total;
        }
        self.count = total;
        for (a, b) in self.hist.iter_mut().zip(&other.hist) {
            *a += b;
        }
        self.hist_total += other.hist_total;
    }

    fn finish(self, step: usize, spec: Option<&HistogramSpec>) -> StepSummary {
        let n = self.mean.len();
        let denom = if self.count > 1.0 { self.count - 1.0 } else { 1.0 };
        let cov = DMatrix::from_row_slice(n, n, &self.m2) / denom;
        StepSummary {
            step,
            mean: DVector::from_vec(self.mean),
            covariance: linalg::symmetrize(&cov),
            histogram: spec.map(|s| Histogram {
                spec: *s,
                counts: self.hist,
                total: self.hist_total,
            }),
        }
    }
}

fn validate(target: &Target, cfg: &ChainConfig, record_at: &[usize]) -> Result<()> {
    if !(cfg.eps >= 0.0) || !cfg.eps.is_finite() {
        return Err(invalid(
            "eps",
            format!("must be finite and nonnegative, got {}", cfg.eps),
        ));
    }
    if cfg.chains == 0 {
        return Err(invalid("chains", "need at least one chain"));
    }
    if !(cfg.init.sd >= 0.0) || !cfg.init.sd.is_finite() {
        return Err(invalid(
            "init.sd",
            format!("must be finite and nonnegative, got {}", cfg.init.sd),
        ));
    }
    linalg::check_dim(target.dimension(), cfg.init.mean.len())?;
    if let Some(&bad) = record_at.iter().find(|&&s| s > cfg.steps) {
        return Err(invalid(
            "record_at",
            format!("step {bad} exceeds the run length {}", cfg.steps),
        ));
    }
    if let Some(h) = &cfg.histogram {
        if target.dimension() != 1 {
            return Err(invalid("histogram", "histograms are only recorded for 1D targets"));
        }
        if h.bins == 0 || !(h.hi > h.lo) {
            return Err(invalid("histogram", format!("need bins > 0 and lo < hi, got {h:?}")));
        }
    }
    Ok(())
}

struct BlockResult {
    moments: Vec<Moments>,
    finals: Vec<f64>,
}

fn run_block(
    target: &Target,
    cfg: &ChainConfig,
    records: &[usize],
    chains: std::ops::Range<usize>,
) -> Result<BlockResult> {
    let n = target.dimension();
    let bins = cfg.histogram.map(|h| h.bins).unwrap_or(0);
    let hist = cfg.histogram.as_ref();
    let mut moments: Vec<Moments> = records.iter().map(|_| Moments::new(n, bins)).collect();
    let mut finals = Vec::with_capacity(if cfg.keep_final { chains.len() * n } else { 0 });
    let mut x = vec![0.0; n];
    let mut g = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    let noise = (2.0 * cfg.eps).sqrt();
    for chain in chains {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(chain as u64);
        for (xi, m) in x.iter_mut().zip(cfg.init.mean.iter()) {
            let z: f64 = rng.sample(StandardNormal);
            *xi = m + cfg.init.sd * z;
        }
        let mut next_record = 0;
        for step in 0..=cfg.steps {
            if step > 0 {
                target.gradient_into(&x, &mut g);
                for (xi, gi) in x.iter_mut().zip(&g) {
                    let z: f64 = rng.sample(StandardNormal);
                    *xi += -cfg.eps * gi + noise * z;
                }
                if !x.iter().all(|v| v.is_finite()) {
                    return Err(Error::NonFinite { chain, step });
                }
            }
            while next_record < records.len() && records[next_record] == step {
                moments[next_record].push(&x, hist, &mut scratch);
                next_record += 1;
            }
        }
        if cfg.keep_final {
            finals.extend_from_slice(&x);
        }
    }
    Ok(BlockResult { moments, finals })
}

/// Runs `cfg.chains` independent ULA chains and summarizes them at the
/// requested steps (step 0 is the initialization draw).
pub fn run_chains(target: &Target, cfg: &ChainConfig, record_at: &[usize]) -> Result<ChainSummary> {
    validate(target, cfg, record_at)?;
    let mut records = record_at.to_vec();
    records.sort_unstable();
    records.dedup();
    let blocks: Vec<std::ops::Range<usize>> = (0..cfg.chains)
        .step_by(BLOCK)
        .map(|start| start..(start + BLOCK).min(cfg.chains))
        .collect();
    let results: Vec<Result<BlockResult>> = blocks
        .into_par_iter()
        .map(|range| run_block(target, cfg, &records, range))
        .collect();
    let n = target.dimension();
    let bins = cfg.histogram.map(|h| h.bins).unwrap_or(0);
    let mut total: Vec<Moments> = records.iter().map(|_| Moments::new(n, bins)).collect();
    let mut finals = Vec::new();
    for block in results {
        let block = block?;
        for (acc, m) in total.iter_mut().zip(&block.moments) {
            acc.merge(m);
        }
        finals.extend(block.finals);
    }
    Ok(ChainSummary {
        dim: n,
        chains: cfg.chains,
        records: total
            .into_iter()
            .zip(&records)
            .map(|(m, &s)| m.finish(s, cfg.histogram.as_ref()))
            .collect(),
        final_samples: cfg.keep_final.then_some(finals),
    })
}

/// `count` exact draws from a Gaussian, row-major, via Cholesky factor.
pub fn sample_gaussian(law: &GaussianMeasure, count: usize, seed: u64) -> Result<Vec<f64>> {
    let n = law.dim();
    let chol = law
        .covariance()
        .clone()
        .cholesky()
        .ok_or_else(|| invalid("covariance", "Cholesky factorization failed"))?;
    let l = chol.l();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count * n);
    let mut z = DVector::zeros(n);
    for _ in 0..count {
        for zi in z.iter_mut() {
            *zi = rng.sample(StandardNormal);
        }
        let x = law.mean() + &l * &z;
        out.extend(x.iter());
    }
    Ok(out)
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Estimates `E|grad f|^2` from row-major samples, with a jackknife
/// standard error.
pub fn estimate_grad_moment(target: &Target, samples: &[f64]) -> Result<Estimate> {
    let n = target.dimension();
    if n == 0 || !samples.len().is_multiple_of(n) {
        return Err(invalid(
            "samples",
            format!("length {} is not a multiple of the dimension {n}", samples.len()),
        ));
    }
    let count = samples.len() / n;
    if count < MIN_MOMENT_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_MOMENT_SAMPLES,
            got: count,
        });
    }
    let mut g = vec![0.0; n];
    let values: Vec<f64> = samples
        .chunks_exact(n)
        .map(|x| {
            target.gradient_into(x, &mut g);
            g.iter().map(|v| v * v).sum()
        })
        .collect();
    let total: f64 = values.iter().sum();
    let m = count as f64;
    let value = total / m;
    let leave_one_out = values.iter().map(|v| (total - v) / (m - 1.0));
    let spread: f64 = leave_one_out.map(|t| (t - value) * (t - value)).sum();
    Ok(Estimate {
        value,
        std_error: ((m - 1.0) / m * spread).sqrt(),
        samples: count,
    })
}

/// Final iterates of a summary, as samples for [`estimate_grad_moment`].
pub fn final_samples(summary: &ChainSummary) -> Result<&[f64]> {
    summary
        .final_samples
        .as_deref()
        .ok_or_else(|| invalid("summary", "final samples were not kept; set keep_final"))
}
