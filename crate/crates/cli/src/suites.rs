use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// KL bound along exact Gaussian ULA and Langevin flow, planner, bound table.
    Kl,
    /// Rényi bounds under LSI and Poincaré for the biased limit.
    Renyi,
    /// Fokker-Planck and ULA density evolution on a 1D grid.
    Grid,
    /// Monte Carlo ULA chains on the double-well mixture.
    Sampler,
    /// Every suite above.
    All,
}

const KL: &str = r#"
[[experiment]]
name = "kl-scalar"
kind = "verify-kl"
eps = 0.25
steps = 200
target = { type = "gaussian", n = 1, alpha = 1.0 }
init = { mean = [3.0], var = 2.0 }

[[experiment]]
name = "kl-correlated"
kind = "verify-kl"
eps = 0.05
steps = 1000
target = { type = "gaussian", mean = [0.0, 1.0], precision = [[1.0, 0.2], [0.2, 2.0]] }
init = { mean = [2.0, -1.0], var = 0.5 }

[[experiment]]
name = "langevin-flow"
kind = "gaussian-track"
flow = "langevin"
t_max = 5.0
points = 200
q = [2.0, 4.0]
target = { type = "gaussian", n = 3, alpha = 0.5 }
init = { mean = [1.0, 0.0, -1.0], var = 1.5 }

[[experiment]]
name = "kl-plan"
kind = "plan"
alpha = 1.0
L = 1.0
n = 1
delta = 0.1
h0 = 1.0

[[experiment]]
name = "kl-bound-table"
kind = "bounds-table"
alpha = 0.5
L = 1.0
n = 10
h0 = 5.0
eps_list = [0.125, 0.0625, 0.03125]
k_list = [0, 10, 100, 1000, 10000]
"#;

const RENYI: &str = r#"
[[experiment]]
name = "renyi-lsi"
kind = "verify-renyi-lsi"
eps = 0.05
steps = 600
q = [2.0, 4.0]
target = { type = "gaussian", n = 2, alpha = 1.0 }
init = { mean = [1.5, -1.0], var = 0.8 }

[[experiment]]
name = "renyi-pi"
kind = "verify-renyi-pi"
eps = 0.05
steps = 1500
q = [2.0, 3.0]
target = { type = "gaussian", n = 2, alpha = 1.0 }
init = { mean = [2.0, -1.5], var = 0.8 }
"#;

const GRID: &str = r#"
[[experiment]]
name = "fokker-planck-double-well"
kind = "grid-evolve"
dynamics = "fokker-planck"
t_max = 2.0
points = 101
q = [2.0]
target = { type = "double-well" }
grid = { lo = -10.0, hi = 10.0, m = 801 }
init = { mean = [3.0], var = 0.5 }

[[experiment]]
name = "ula-grid-gaussian"
kind = "grid-evolve"
dynamics = "ula"
eps = 0.1
steps = 100
target = { type = "gaussian", n = 1, alpha = 1.0 }
grid = { lo = -12.0, hi = 12.0, m = 1201 }
init = { mean = [2.0], var = 0.5 }
"#;

const SAMPLER: &str = r#"
[[experiment]]
name = "double-well-chains"
kind = "sample"
eps = 0.01
steps = 1000
chains = 20000
seed = 7
record = [0, 10, 100, 1000]
target = { type = "double-well" }
init = { mean = [0.0], var = 1.0 }
histogram = { lo = -8.0, hi = 8.0, bins = 64 }
"#;

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Kl => "kl",
            Suite::Renyi => "renyi",
            Suite::Grid => "grid",
            Suite::Sampler => "sampler",
            Suite::All => "all",
        }
    }

    pub fn config_text(self) -> String {
        match self {
            Suite::Kl => KL.to_string(),
            Suite::Renyi => RENYI.to_string(),
            Suite::Grid => GRID.to_string(),
            Suite::Sampler => SAMPLER.to_string(),
            Suite::All => [KL, RENYI, GRID, SAMPLER].concat(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Config;

    #[test]
    fn every_suite_parses() {
        for s in Suite::value_variants() {
            let cfg = Config::parse(&s.config_text(), s.name()).unwrap();
            assert!(!cfg.experiments.is_empty());
        }
    }
}
