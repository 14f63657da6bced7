use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use langevin_core::bounds::DEFAULT_TOL;
use langevin_core::targets::{make_gaussian_target, make_mixture_target, MixtureComponent};
use langevin_core::{DMatrix, DVector, GaussianTargetSpec, MixtureTargetSpec, Target};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub output_dir: Option<PathBuf>,
    #[serde(default = "yes")]
    pub plots: bool,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, rename = "experiment")]
    pub experiments: Vec<Experiment>,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Slack in `observed <= bound + bound_slack`.
    #[serde(default = "default_slack")]
    pub bound_slack: f64,
    /// Allowed KL increase per Fokker-Planck step.
    #[serde(default = "default_dissipation")]
    pub dissipation_slack: f64,
}

fn default_slack() -> f64 {
    DEFAULT_TOL
}

fn default_dissipation() -> f64 {
    1e-10
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            bound_slack: default_slack(),
            dissipation_slack: default_dissipation(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    VerifyKl,
    VerifyRenyiLsi,
    VerifyRenyiPi,
    GaussianTrack,
    GridEvolve,
    Sample,
    Plan,
    BoundsTable,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::VerifyKl => "verify-kl",
            Kind::VerifyRenyiLsi => "verify-renyi-lsi",
            Kind::VerifyRenyiPi => "verify-renyi-pi",
            Kind::GaussianTrack => "gaussian-track",
            Kind::GridEvolve => "grid-evolve",
            Kind::Sample => "sample",
            Kind::Plan => "plan",
            Kind::BoundsTable => "bounds-table",
        }
    }

    fn allowed(self) -> &'static [&'static str] {
        match self {
            Kind::VerifyKl => &["target", "init", "eps", "steps"],
            Kind::VerifyRenyiLsi | Kind::VerifyRenyiPi => &["target", "init", "eps", "steps", "q", "beta", "growth"],
            Kind::GaussianTrack => &["target", "init", "eps", "steps", "q", "flow", "t_max", "points"],
            Kind::GridEvolve => &[
                "target", "init", "eps", "steps", "q", "grid", "dynamics", "t_max", "points", "dt",
            ],
            Kind::Sample => &[
                "target",
                "init",
                "eps",
                "steps",
                "chains",
                "seed",
                "record",
                "histogram",
            ],
            Kind::Plan => &["alpha", "L", "n", "delta", "h0"],
            Kind::BoundsTable => &["alpha", "L", "n", "h0", "eps_list", "k_list"],
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Experiment {
    pub name: String,
    pub kind: Kind,
    pub plot: Option<bool>,
    pub target: Option<TargetConfig>,
    pub init: Option<InitConfig>,
    pub eps: Option<f64>,
    pub steps: Option<u64>,
    pub q: Option<Vec<f64>>,
    pub beta: Option<f64>,
    pub growth: Option<GrowthConfig>,
    pub flow: Option<Flow>,
    pub t_max: Option<f64>,
    pub points: Option<usize>,
    pub dt: Option<f64>,
    pub grid: Option<GridConfig>,
    pub dynamics: Option<GridDynamics>,
    pub chains: Option<usize>,
    pub seed: Option<u64>,
    pub record: Option<Vec<usize>>,
    pub histogram: Option<HistogramConfig>,
    pub alpha: Option<f64>,
    #[serde(rename = "L")]
    pub smoothness: Option<f64>,
    pub n: Option<usize>,
    pub delta: Option<f64>,
    pub h0: Option<f64>,
    pub eps_list: Option<Vec<f64>>,
    pub k_list: Option<Vec<u64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flow {
    Ula,
    Langevin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridDynamics {
    FokkerPlanck,
    Ula,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetType {
    Gaussian,
    Mixture,
    DoubleWell,
}

/// Gaussian targets take either `n` and `alpha` (isotropic) or `mean` and
/// `precision`; mixtures take `components`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetConfig {
    #[serde(rename = "type")]
    pub kind: TargetType,
    pub n: Option<usize>,
    pub alpha: Option<f64>,
    pub mean: Option<Vec<f64>>,
    pub precision: Option<Vec<Vec<f64>>>,
    pub components: Option<Vec<ComponentConfig>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentConfig {
    pub weight: f64,
    pub mean: Vec<f64>,
    pub variance: Option<f64>,
    pub covariance: Option<Vec<Vec<f64>>>,
}

/// Initial law `N(mean, var I)`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitConfig {
    pub mean: Vec<f64>,
    pub var: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthConfig {
    pub c: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub lo: f64,
    pub hi: f64,
    pub m: usize,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HistogramConfig {
    pub lo: f64,
    pub hi: f64,
    pub bins: usize,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| {
            let (line, col) = e.span().map(|s| line_col(text, s.start)).unwrap_or((1, 1));
            anyhow::anyhow!("{origin}:{line}:{col}: {}", e.message())
        })?;
        cfg.validate().with_context(|| format!("invalid config {origin}"))?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        let t = &self.tolerances;
        if !(t.bound_slack > 0.0) || !(t.dissipation_slack > 0.0) {
            bail!("tolerances must be positive");
        }
        let mut names = std::collections::HashSet::new();
        for e in &self.experiments {
            if e.name.is_empty()
                || !e
                    .name
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
            {
                bail!(
                    "experiment name `{}` must be nonempty and use only [A-Za-z0-9_-]",
                    e.name
                );
            }
            if !names.insert(e.name.as_str()) {
                bail!("duplicate experiment name `{}`", e.name);
            }
            let allowed = e.kind.allowed();
            if let Some(key) = e.present_keys().into_iter().find(|k| !allowed.contains(k)) {
                bail!(
                    "experiment `{}`: key `{key}` does not apply to kind `{}`",
                    e.name,
                    e.kind.name()
                );
            }
        }
        Ok(())
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.len() - before.rfind('\n').map(|i| i + 1).unwrap_or(0) + 1;
    (line, col)
}

impl Experiment {
    fn present_keys(&self) -> Vec<&'static str> {
        let flags = [
            ("target", self.target.is_some()),
            ("init", self.init.is_some()),
            ("eps", self.eps.is_some()),
            ("steps", self.steps.is_some()),
            ("q", self.q.is_some()),
            ("beta", self.beta.is_some()),
            ("growth", self.growth.is_some()),
            ("flow", self.flow.is_some()),
            ("t_max", self.t_max.is_some()),
            ("points", self.points.is_some()),
            ("dt", self.dt.is_some()),
            ("grid", self.grid.is_some()),
            ("dynamics", self.dynamics.is_some()),
            ("chains", self.chains.is_some()),
            ("seed", self.seed.is_some()),
            ("record", self.record.is_some()),
            ("histogram", self.histogram.is_some()),
            ("alpha", self.alpha.is_some()),
            ("L", self.smoothness.is_some()),
            ("n", self.n.is_some()),
            ("delta", self.delta.is_some()),
            ("h0", self.h0.is_some()),
            ("eps_list", self.eps_list.is_some()),
            ("k_list", self.k_list.is_some()),
        ];
        flags.into_iter().filter(|&(_, set)| set).map(|(k, _)| k).collect()
    }

    pub fn require<T: Clone>(&self, key: &str, v: &Option<T>) -> Result<T> {
        v.clone()
            .with_context(|| format!("experiment `{}` ({}) needs `{key}`", self.name, self.kind.name()))
    }
}

impl TargetConfig {
    pub fn build(&self) -> Result<Target> {
        match self.kind {
            TargetType::Gaussian => Ok(make_gaussian_target(&self.gaussian_spec()?)?),
            TargetType::DoubleWell => Ok(make_mixture_target(&MixtureTargetSpec::double_well())?),
            TargetType::Mixture => {
                let comps = self.components.as_ref().context("mixture target needs `components`")?;
                let components = comps
                    .iter()
                    .map(|c| {
                        let d = c.mean.len();
                        let covariance = match (&c.variance, &c.covariance) {
                            (Some(v), None) => DMatrix::identity(d, d) * *v,
                            (None, Some(m)) => matrix(m, "covariance")?,
                            _ => bail!("each mixture component needs exactly one of `variance` or `covariance`"),
                        };
                        Ok(MixtureComponent {
                            weight: c.weight,
                            mean: DVector::from_vec(c.mean.clone()),
                            covariance,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(make_mixture_target(&MixtureTargetSpec { components })?)
            }
        }
    }

    pub fn gaussian_spec(&self) -> Result<GaussianTargetSpec> {
        if self.kind != TargetType::Gaussian {
            bail!("this experiment needs a Gaussian target");
        }
        match (self.n, self.alpha, &self.mean, &self.precision) {
            (Some(n), Some(alpha), None, None) => Ok(GaussianTargetSpec::isotropic(n, alpha)?),
            (None, None, Some(mean), Some(p)) => Ok(GaussianTargetSpec::new(
                DVector::from_vec(mean.clone()),
                matrix(p, "precision")?,
            )?),
            _ => bail!("Gaussian target needs either `n` and `alpha`, or `mean` and `precision`"),
        }
    }
}

fn matrix(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        bail!("`{what}` must be a nonempty square matrix");
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}
