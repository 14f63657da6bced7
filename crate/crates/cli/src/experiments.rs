use anyhow::{bail, Context as _, Result};
use langevin_core::bounds::{
    self, fmt_f64, kl_step_cap, kl_ula_bound, kl_ula_bound_with, langevin_kl_rate, plan_kl, renyi_ld_rate,
    renyi_pi_burn_in, renyi_ula_lsi_bound, renyi_ula_pi_bound,
};
use langevin_core::functionals::{fisher_grid, kl_gaussian, kl_grid, renyi_gaussian, renyi_grid};
use langevin_core::gaussian::{ou_flow_gaussian, ula_stationary_gaussian, ula_trajectory};
use langevin_core::grid1d::{
    discretize, discretize_target, fokker_planck_step, max_fokker_planck_dt, ula_density_step,
};
use langevin_core::isoperimetry::gaussian_exact_constant;
use langevin_core::linalg::min_max_eigen;
use langevin_core::sampler::{estimate_grad_moment, final_samples, run_chains};
use langevin_core::targets::find_stationary_point;
use langevin_core::{
    BoundReport, ChainConfig, DVector, GaussianMeasure, GaussianTargetSpec, GrowthFunction, HistogramSpec, InitSpec,
    RenyiOrder, Target,
};

use crate::config::{Experiment, Flow, GridDynamics, Kind, Tolerances};
use crate::report::{num, Plot, Table};

const MAX_LISTED_VIOLATIONS: usize = 5;

#[derive(Debug, Clone, Copy, Default)]
pub struct Options {
    pub tolerances: Tolerances,
    /// Evaluate the KL bound even when `eps` exceeds its step-size cap.
    pub unchecked_step_size: bool,
}

/// Everything an experiment produces; the caller decides where files go.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub name: String,
    pub kind: Kind,
    pub csv: String,
    pub plot: Option<Plot>,
    /// Additional CSV files as `(suffix, contents)`.
    pub extra: Vec<(String, String)>,
    pub checked: usize,
    pub violations: usize,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

impl Outcome {
    fn new(exp: &Experiment) -> Self {
        Outcome {
            name: exp.name.clone(),
            kind: exp.kind,
            csv: String::new(),
            plot: None,
            extra: Vec::new(),
            checked: 0,
            violations: 0,
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: Option<bool>, describe: impl FnOnce() -> String) {
        match ok {
            Some(true) => self.checked += 1,
            Some(false) => {
                self.checked += 1;
                self.violations += 1;
                if self.failures.len() < MAX_LISTED_VIOLATIONS {
                    self.failures.push(describe());
                }
            }
            None => {}
        }
    }

    fn record(&mut self, rep: &BoundReport, at: &str) {
        let observed = rep.observed().map(|o| fmt_f64(o.value())).unwrap_or_default();
        let bound = fmt_f64(rep.bound.value());
        self.check(rep.satisfied(), || format!("{at}: observed {observed} > bound {bound}"));
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

pub fn run(exp: &Experiment, opts: &Options) -> Result<Outcome> {
    let out = match exp.kind {
        Kind::VerifyKl => verify_kl(exp, opts),
        Kind::VerifyRenyiLsi => verify_renyi(exp, opts, false),
        Kind::VerifyRenyiPi => verify_renyi(exp, opts, true),
        Kind::GaussianTrack => gaussian_track(exp, opts),
        Kind::GridEvolve => grid_evolve(exp, opts),
        Kind::Sample => sample(exp),
        Kind::Plan => plan(exp),
        Kind::BoundsTable => bounds_table(exp),
    };
    out.with_context(|| format!("experiment `{}` ({})", exp.name, exp.kind.name()))
}

fn gaussian_setup(exp: &Experiment) -> Result<(GaussianTargetSpec, GaussianMeasure, GaussianMeasure)> {
    let spec = exp.require("target", &exp.target)?.gaussian_spec()?;
    let nu = GaussianMeasure::from_target(&spec);
    let (_, l) = spec.spectrum_bounds();
    let rho0 = match &exp.init {
        Some(init) => {
            if init.mean.len() != spec.dim() {
                bail!(
                    "init mean has length {}, target dimension is {}",
                    init.mean.len(),
                    spec.dim()
                );
            }
            GaussianMeasure::isotropic(DVector::from_vec(init.mean.clone()), init.var)?
        }
        None => GaussianMeasure::isotropic(spec.mean.clone(), 1.0 / l)?,
    };
    Ok((spec, nu, rho0))
}

fn orders(exp: &Experiment, default: &[f64]) -> Result<Vec<RenyiOrder>> {
    let qs = exp.q.clone().unwrap_or_else(|| default.to_vec());
    qs.into_iter().map(|q| Ok(RenyiOrder::new(q)?)).collect()
}

fn verify_kl(exp: &Experiment, opts: &Options) -> Result<Outcome> {
    let (spec, nu, rho0) = gaussian_setup(exp)?;
    let (alpha, l) = spec.spectrum_bounds();
    let n = spec.dim();
    let eps = exp.require("eps", &exp.eps)?;
    let steps = exp.require("steps", &exp.steps)?;
    let laws = ula_trajectory(&rho0, &spec, eps, steps as usize)?;
    let h0 = kl_gaussian(&rho0, &nu)?.value();
    let bias_term = 8.0 * eps * n as f64 * l * l / alpha;
    let bias = match ula_stationary_gaussian(&spec, eps) {
        Ok(limit) => format!(
            "biased limit KL(nu_eps | nu) = {} against the O(eps) term 8 eps n L^2 / alpha = {}",
            num(kl_gaussian(&limit, &nu)?.value()),
            num(bias_term)
        ),
        Err(_) => format!("ULA has no stationary law at eps = {}", num(eps)),
    };
    let mut out = Outcome::new(exp);
    let mut table = Table::new(
        format!(
            "verify-kl: alpha = {}, L = {}, n = {n}, eps = {}, H0 = {}\n\
             k: iteration; H_exact: KL(rho_k | nu) of the exact ULA law; bound: e^(-alpha eps k) H0 + 8 eps n L^2 / alpha; satisfied: H_exact <= bound + {}\n{bias}",
            num(alpha),
            num(l),
            num(eps),
            num(h0),
            num(opts.tolerances.bound_slack)
        ),
        &["k", "H_exact", "bound", "satisfied"],
    );
    let (mut observed, mut bounds) = (Vec::new(), Vec::new());
    for (k, law) in laws.iter().enumerate() {
        let h = kl_gaussian(law, &nu)?;
        let rep = kl_ula_bound_with(alpha, l, n, eps, k as u64, h0, !opts.unchecked_step_size)?
            .with_observed(h, opts.tolerances.bound_slack);
        out.record(&rep, &format!("k = {k}"));
        table.push(vec![k.to_string(), num(h.value()), num(rep.bound.value()), sat(&rep)]);
        observed.push((k as f64, h.value()));
        bounds.push((k as f64, rep.bound.value()));
    }
    out.notes.push(bias);
    out.csv = table.to_csv();
    out.plot = Some(
        Plot::new(format!("{}: KL along ULA", exp.name), "k", "KL")
            .series("H_exact", observed)
            .series("bound", bounds),
    );
    Ok(out)
}

fn sat(rep: &BoundReport) -> String {
    rep.satisfied().map(|s| s.to_string()).unwrap_or_default()
}

fn verify_renyi(exp: &Experiment, opts: &Options, poincare: bool) -> Result<Outcome> {
    let (spec, nu, rho0) = gaussian_setup(exp)?;
    let (_, l) = spec.spectrum_bounds();
    let n = spec.dim();
    let eps = exp.require("eps", &exp.eps)?;
    let steps = exp.require("steps", &exp.steps)?;
    let qs = orders(exp, &[2.0])?;
    let limit = ula_stationary_gaussian(&spec, eps)?;
    let beta = match exp.beta {
        Some(b) => b,
        None => gaussian_exact_constant(min_max_eigen(limit.covariance()).1),
    };
    let laws = ula_trajectory(&rho0, &spec, eps, steps as usize)?;
    let label = if poincare {
        "verify-renyi-pi"
    } else {
        "verify-renyi-lsi"
    };
    let formula = if poincare {
        "((q - 1/2)/(q - 1)) e^(-beta eps (k - k0)/(2q)) + g(eps) for k >= k0"
    } else {
        "((q - 1/2)/(q - 1)) R_2q(rho_0 | nu_eps) e^(-beta eps k/(2q)) + g(eps)"
    };
    let mut out = Outcome::new(exp);
    let mut header = format!(
        "{label}: L = {}, n = {n}, eps = {}, beta = {}\n\
         q: Renyi order; k: iteration; R_exact: R_q(rho_k | nu) of the exact ULA law; bound: {formula}; satisfied: R_exact <= bound + {}",
        num(l),
        num(eps),
        num(beta),
        num(opts.tolerances.bound_slack)
    );
    let mut table_rows = Vec::new();
    let mut plot = Plot::new(format!("{}: Renyi divergence along ULA", exp.name), "k", "R_q");
    for q in qs {
        let qv = q.value();
        if !(qv > 1.0) {
            bail!("Renyi orders must exceed 1, got {qv}");
        }
        let bias_order = RenyiOrder::new(2.0 * qv - 1.0)?;
        let g = match exp.growth {
            Some(gc) => GrowthFunction::new(gc.c, gc.p)?,
            None => GrowthFunction::gaussian(n, l, bias_order.value(), eps)
                .context("default Gaussian growth function is undefined here; set `growth`")?,
        };
        let bias_truth = renyi_gaussian(&limit, &nu, bias_order)?;
        let r0 = renyi_gaussian(&rho0, &limit, RenyiOrder::new(2.0 * qv)?)?;
        if r0.is_infinite() {
            bail!("R_2q(rho_0 | nu_eps) is infinite for q = {qv}; start closer to the target");
        }
        let mut r0_used = r0.value();
        let mut extra = String::new();
        if poincare && r0_used < 1.0 {
            r0_used = 1.0;
            extra = " (raised to 1, the smallest start the burn-in formula accepts)".to_string();
        }
        let note = format!(
            "q = {qv}: R_2q(rho_0 | nu_eps) = {}{extra}; bias R_(2q-1)(nu_eps | nu) = {} against g(eps) = {}",
            num(r0.value()),
            num(bias_truth.value()),
            num(g.eval(eps))
        );
        header.push('\n');
        header.push_str(&note);
        out.notes.push(note);
        let first = if poincare {
            renyi_pi_burn_in(beta, qv, eps, r0_used).max(0.0).ceil() as u64
        } else {
            0
        };
        let (mut observed, mut bounds) = (Vec::new(), Vec::new());
        for k in first..=steps {
            let rq = renyi_gaussian(&laws[k as usize], &nu, q)?;
            let rep = if poincare {
                renyi_ula_pi_bound(beta, l, qv, eps, k, r0_used, &g)?
            } else {
                renyi_ula_lsi_bound(beta, l, qv, eps, k, r0_used, &g)?
            }
            .with_observed(rq, opts.tolerances.bound_slack);
            out.record(&rep, &format!("q = {qv}, k = {k}"));
            table_rows.push(vec![
                num(qv),
                k.to_string(),
                num(rq.value()),
                num(rep.bound.value()),
                sat(&rep),
            ]);
            observed.push((k as f64, rq.value()));
            bounds.push((k as f64, rep.bound.value()));
        }
        plot = plot
            .series(format!("R_exact q={qv}"), observed)
            .series(format!("bound q={qv}"), bounds);
    }
    let mut table = Table::new(header, &["q", "k", "R_exact", "bound", "satisfied"]);
    table.rows = table_rows;
    out.csv = table.to_csv();
    out.plot = Some(plot);
    Ok(out)
}

fn gaussian_track(exp: &Experiment, opts: &Options) -> Result<Outcome> {
    let (spec, nu, rho0) = gaussian_setup(exp)?;
    let qs = orders(exp, &[2.0])?;
    let mut out = Outcome::new(exp);
    match exp.flow.unwrap_or(Flow::Ula) {
        Flow::Ula => {
            if exp.t_max.is_some() || exp.points.is_some() {
                bail!("`t_max` and `points` apply only with flow = \"langevin\"");
            }
            let eps = exp.require("eps", &exp.eps)?;
            let steps = exp.require("steps", &exp.steps)?;
            let laws = ula_trajectory(&rho0, &spec, eps, steps as usize)?;
            let mut cols = vec!["k".to_string(), "mean_error".into(), "cov_trace".into(), "kl".into()];
            cols.extend(qs.iter().map(|q| format!("renyi_{}", q.value())));
            let mut table = Table {
                comment: format!(
                    "gaussian-track (ULA, eps = {}): k: iteration; mean_error: |m_k - m|; cov_trace: trace of Sigma_k; kl: KL(rho_k | nu); renyi_q: R_q(rho_k | nu)",
                    num(eps)
                ),
                columns: cols,
                rows: Vec::new(),
            };
            let mut kl_series = Vec::new();
            for (k, law) in laws.iter().enumerate() {
                let h = kl_gaussian(law, &nu)?.value();
                let mut row = vec![
                    k.to_string(),
                    num((law.mean() - nu.mean()).norm()),
                    num(law.covariance().trace()),
                    num(h),
                ];
                for &q in &qs {
                    row.push(num(renyi_gaussian(law, &nu, q)?.value()));
                }
                table.push(row);
                kl_series.push((k as f64, h));
            }
            out.csv = table.to_csv();
            out.plot = Some(Plot::new(format!("{}: exact ULA law", exp.name), "k", "KL").series("kl", kl_series));
        }
        Flow::Langevin => {
            if exp.eps.is_some() || exp.steps.is_some() {
                bail!("`eps` and `steps` apply only with flow = \"ula\"");
            }
            let t_max = exp.require("t_max", &exp.t_max)?;
            let points = exp.points.unwrap_or(200).max(2);
            let (alpha, _) = spec.spectrum_bounds();
            let h0 = kl_gaussian(&rho0, &nu)?.value();
            let r0: Vec<f64> = qs
                .iter()
                .map(|&q| Ok(renyi_gaussian(&rho0, &nu, q)?.value()))
                .collect::<Result<_>>()?;
            if let Some(i) = r0.iter().position(|r| r.is_infinite()) {
                bail!("R_q(rho_0 | nu) is infinite for q = {}", qs[i].value());
            }
            let mut cols = vec!["t".to_string(), "H_exact".into(), "H_bound".into()];
            for q in &qs {
                cols.push(format!("R{}_exact", q.value()));
                cols.push(format!("R{}_bound", q.value()));
            }
            cols.push("satisfied".into());
            let mut table = Table {
                comment: format!(
                    "gaussian-track (Langevin flow, alpha = {}): t: time; H_exact, H_bound: KL(rho_t | nu) and e^(-2 alpha t) H0; Rq_exact, Rq_bound: R_q(rho_t | nu) and e^(-2 alpha t/q) R_q(rho_0 | nu); satisfied: every exact value <= its bound + {}",
                    num(alpha),
                    num(opts.tolerances.bound_slack)
                ),
                columns: cols,
                rows: Vec::new(),
            };
            let (mut hs, mut hb) = (Vec::new(), Vec::new());
            for i in 0..points {
                let t = t_max * (i as f64 / (points - 1) as f64);
                let law = ou_flow_gaussian(&rho0, &spec, t)?;
                let h = kl_gaussian(&law, &nu)?;
                let rep = langevin_kl_rate(alpha, t, h0)?.with_observed(h, opts.tolerances.bound_slack);
                let mut ok = rep.satisfied() == Some(true);
                let mut row = vec![num(t), num(h.value()), num(rep.bound.value())];
                out.record(&rep, &format!("KL at t = {t}"));
                for (j, &q) in qs.iter().enumerate() {
                    let r = renyi_gaussian(&law, &nu, q)?;
                    let rr = renyi_ld_rate(alpha, q.value(), t, r0[j])?.with_observed(r, opts.tolerances.bound_slack);
                    out.record(&rr, &format!("R_{} at t = {t}", q.value()));
                    ok &= rr.satisfied() == Some(true);
                    row.push(num(r.value()));
                    row.push(num(rr.bound.value()));
                }
                row.push(ok.to_string());
                table.push(row);
                hs.push((t, h.value()));
                hb.push((t, rep.bound.value()));
            }
            out.csv = table.to_csv();
            out.plot = Some(
                Plot::new(format!("{}: KL along Langevin flow", exp.name), "t", "KL")
                    .series("H_exact", hs)
                    .series("bound", hb),
            );
        }
    }
    Ok(out)
}

/// Center `x*` of the default start `N(x*, I/L)`; targets that do not carry
/// it get gradient descent from the all-ones point.
fn default_center(target: &Target) -> Result<DVector<f64>> {
    if let Some(x) = target.stationary_point() {
        return Ok(x.clone());
    }
    let x0 = DVector::from_element(target.dimension(), 1.0);
    Ok(find_stationary_point(target, &x0, 1e-10)?)
}

fn grid_evolve(exp: &Experiment, opts: &Options) -> Result<Outcome> {
    let target = exp.require("target", &exp.target)?.build()?;
    if target.dimension() != 1 {
        bail!("grid-evolve needs a 1D target, got dimension {}", target.dimension());
    }
    let grid = exp.require("grid", &exp.grid)?;
    let (m0, v0) = match &exp.init {
        Some(init) if init.mean.len() == 1 => (init.mean[0], init.var),
        Some(_) => bail!("init mean must have length 1"),
        None => (default_center(&target)?[0], 1.0 / target.smoothness()),
    };
    if !(v0 > 0.0) {
        bail!("init var must be positive");
    }
    let normal = move |x: f64| (-(x - m0).powi(2) / (2.0 * v0)).exp() / (2.0 * std::f64::consts::PI * v0).sqrt();
    let mut rho = discretize(normal, grid.lo, grid.hi, grid.m)?;
    let nu = discretize_target(&target, grid.lo, grid.hi, grid.m)?;
    let qs = orders(exp, &[])?;
    let mut cols = vec!["step".to_string(), "t".into(), "kl".into(), "fisher".into()];
    cols.extend(qs.iter().map(|q| format!("renyi_{}", q.value())));
    let measure = |rho: &langevin_core::GridDensity1D| -> Result<Vec<f64>> {
        let mut v = vec![kl_grid(rho, &nu)?.value(), fisher_grid(rho, &nu)?.value()];
        for &q in &qs {
            v.push(renyi_grid(rho, &nu, q)?.value());
        }
        Ok(v)
    };
    let mut out = Outcome::new(exp);
    let mut series = Vec::new();
    let mut rows = Vec::new();
    let describe = "step: iteration; t: elapsed time; kl: KL(rho | nu); fisher: relative Fisher information; renyi_q: R_q(rho | nu)";
    let comment = match exp.dynamics.unwrap_or(GridDynamics::FokkerPlanck) {
        GridDynamics::FokkerPlanck => {
            if exp.eps.is_some() || exp.steps.is_some() {
                bail!("`eps` and `steps` apply only with dynamics = \"ula\"");
            }
            let t_max = exp.require("t_max", &exp.t_max)?;
            let max_dt = max_fokker_planck_dt(&rho, &target);
            let dt_req = exp.dt.unwrap_or(max_dt);
            let total = (t_max / dt_req).ceil().max(1.0) as usize;
            let dt = t_max / total as f64;
            let points = exp.points.unwrap_or(101).clamp(2, total + 1);
            let mut report_at: Vec<usize> = (0..points).map(|i| i * total / (points - 1)).collect();
            report_at.dedup();
            let mut next = report_at.iter().peekable();
            let mut prev = measure(&rho)?;
            let mut interval_ok = true;
            cols.push("dissipative".into());
            for step in 0..=total {
                if step > 0 {
                    rho = fokker_planck_step(&rho, &target, dt)?;
                    let cur = measure(&rho)?;
                    let ok = cur[0] <= prev[0] + opts.tolerances.dissipation_slack;
                    out.check(Some(ok), || {
                        format!("step {step}: KL rose from {} to {}", num(prev[0]), num(cur[0]))
                    });
                    interval_ok &= ok;
                    prev = cur;
                }
                if next.peek() == Some(&&step) {
                    next.next();
                    let t = step as f64 * dt;
                    let mut row = vec![step.to_string(), num(t)];
                    row.extend(prev.iter().map(|&v| num(v)));
                    row.push(interval_ok.to_string());
                    rows.push(row);
                    series.push((t, prev[0]));
                    interval_ok = true;
                }
            }
            format!(
                "grid-evolve (Fokker-Planck, dt = {}, {} nodes on [{}, {}]): {describe}; dissipative: KL nonincreasing (slack {}) at every step since the previous row",
                num(dt),
                grid.m,
                num(grid.lo),
                num(grid.hi),
                num(opts.tolerances.dissipation_slack)
            )
        }
        GridDynamics::Ula => {
            if exp.t_max.is_some() || exp.dt.is_some() || exp.points.is_some() {
                bail!("`t_max`, `dt` and `points` apply only with dynamics = \"fokker-planck\"");
            }
            let eps = exp.require("eps", &exp.eps)?;
            let steps = exp.require("steps", &exp.steps)?;
            for k in 0..=steps {
                if k > 0 {
                    rho = ula_density_step(&rho, &target, eps)?;
                }
                let vals = measure(&rho)?;
                let mut row = vec![k.to_string(), num(eps * k as f64)];
                row.extend(vals.iter().map(|&v| num(v)));
                rows.push(row);
                series.push((eps * k as f64, vals[0]));
            }
            format!(
                "grid-evolve (ULA, eps = {}, {} nodes on [{}, {}]): {describe}",
                num(eps),
                grid.m,
                num(grid.lo),
                num(grid.hi)
            )
        }
    };
    let table = Table {
        comment,
        columns: cols,
        rows,
    };
    out.csv = table.to_csv();
    out.extra.push(("density".into(), rho.to_csv()));
    out.plot = Some(Plot::new(format!("{}: KL on the grid", exp.name), "t", "KL").series("kl", series));
    Ok(out)
}

fn sample(exp: &Experiment) -> Result<Outcome> {
    let target = exp.require("target", &exp.target)?.build()?;
    let n = target.dimension();
    let eps = exp.require("eps", &exp.eps)?;
    let steps = exp.require("steps", &exp.steps)? as usize;
    let init = match &exp.init {
        Some(i) => {
            if i.mean.len() != n {
                bail!("init mean has length {}, target dimension is {n}", i.mean.len());
            }
            InitSpec {
                mean: DVector::from_vec(i.mean.clone()),
                sd: i.var.sqrt(),
            }
        }
        None => InitSpec {
            mean: default_center(&target)?,
            sd: (1.0 / target.smoothness()).sqrt(),
        },
    };
    let histogram = exp.histogram.map(|h| HistogramSpec {
        lo: h.lo,
        hi: h.hi,
        bins: h.bins,
    });
    let cfg = ChainConfig {
        eps,
        steps,
        chains: exp.chains.unwrap_or(10_000),
        seed: exp.seed.unwrap_or(0),
        init,
        histogram,
        keep_final: true,
    };
    let record = exp.record.clone().unwrap_or_else(|| vec![0, steps]);
    let summary = run_chains(&target, &cfg, &record)?;
    let mut out = Outcome::new(exp);
    match estimate_grad_moment(&target, final_samples(&summary)?) {
        Ok(est) => out.notes.push(format!(
            "E|grad f|^2 at step {steps}: {} +- {} (stationary value under nu is at most nL = {})",
            num(est.value),
            num(est.std_error),
            num(n as f64 * target.smoothness())
        )),
        Err(e) => out.notes.push(format!("gradient moment not estimated: {e}")),
    }
    out.csv = summary.to_csv();
    let mean: Vec<(f64, f64)> = summary.records.iter().map(|r| (r.step as f64, r.mean[0])).collect();
    let var: Vec<(f64, f64)> = summary
        .records
        .iter()
        .map(|r| (r.step as f64, r.covariance[(0, 0)]))
        .collect();
    if mean.len() > 1 {
        out.plot = Some(
            Plot::new(format!("{}: empirical moments", exp.name), "step", "coordinate 0")
                .series("mean", mean)
                .series("variance", var),
        );
    }
    Ok(out)
}

fn plan(exp: &Experiment) -> Result<Outcome> {
    let alpha = exp.require("alpha", &exp.alpha)?;
    let l = exp.require("L", &exp.smoothness)?;
    let n = exp.require("n", &exp.n)?;
    let delta = exp.require("delta", &exp.delta)?;
    let h0 = exp.require("h0", &exp.h0)?;
    let p = plan_kl(alpha, l, n, delta, h0)?;
    let rep = kl_ula_bound(alpha, l, n, p.eps, p.k, h0)?;
    let ok = rep.bound.value() <= delta;
    let mut out = Outcome::new(exp);
    out.check(Some(ok), || {
        format!("planned bound {} exceeds delta {}", num(rep.bound.value()), num(delta))
    });
    out.notes
        .push(format!("plan: eps = {}, k = {} ({})", num(p.eps), p.k, p.regime));
    let mut table = Table::new(
        "plan: KL step-size plan; eps, k: planned step size and iteration count; bound: KL bound at (eps, k); satisfied: bound <= delta",
        &["alpha", "L", "n", "delta", "H0", "eps", "k", "bound", "satisfied"],
    );
    table.push(vec![
        num(alpha),
        num(l),
        n.to_string(),
        num(delta),
        num(h0),
        num(p.eps),
        p.k.to_string(),
        num(rep.bound.value()),
        ok.to_string(),
    ]);
    out.csv = table.to_csv();
    Ok(out)
}

fn bounds_table(exp: &Experiment) -> Result<Outcome> {
    let alpha = exp.require("alpha", &exp.alpha)?;
    let l = exp.require("L", &exp.smoothness)?;
    let n = exp.require("n", &exp.n)?;
    let h0 = exp.require("h0", &exp.h0)?;
    let ks = exp.require("k_list", &exp.k_list)?;
    let eps_list = exp.eps_list.clone().unwrap_or_else(|| vec![kl_step_cap(alpha, l)]);
    let mut reports = Vec::new();
    let mut plot = Plot::new(format!("{}: KL bound", exp.name), "k", "bound");
    for &eps in &eps_list {
        let mut series = Vec::new();
        for &k in &ks {
            let rep = bounds::kl_ula_bound(alpha, l, n, eps, k, h0)?;
            series.push((k as f64, rep.bound.value()));
            reports.push(rep);
        }
        plot = plot.series(format!("eps={}", num(eps)), series);
    }
    let mut out = Outcome::new(exp);
    let mut csv = String::from(
        "# bounds-table: KL bound e^(-alpha eps k) H0 + 8 eps n L^2 / alpha per (eps, k); observed and satisfied stay empty\n",
    );
    if let Some(first) = reports.first() {
        csv.push_str(&first.csv_header());
        csv.push('\n');
    }
    for r in &reports {
        csv.push_str(&r.to_csv_row());
        csv.push('\n');
    }
    out.csv = csv;
    out.plot = Some(plot);
    Ok(out)
}
