use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("matrix is not symmetric positive definite: eigenvalue {eigenvalue:e} at index {index}")]
    NotPositiveDefinite { index: usize, eigenvalue: f64 },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("singular linear map (|det| = {det:e})")]
    SingularMap { det: f64 },

    #[error("step size {eps} outside the admissible window: {window}")]
    StepSizeWindow { eps: f64, window: String },

    #[error("gradient descent hit the iteration cap {iterations}; last gradient norm {grad_norm:e}")]
    NoConvergence {
        iterations: usize,
        last: Vec<f64>,
        grad_norm: f64,
    },

    #[error("computation produced NaN in {context}")]
    NotANumber { context: &'static str },

    #[error("negative divergence {value:e} beyond rounding tolerance")]
    NegativeDivergence { value: f64 },

    #[error("undefined extended-real operation: {0}")]
    Indeterminate(&'static str),

    #[error("grids do not match: {0}")]
    GridMismatch(String),

    #[error("tail mass estimate {estimate:e} exceeds 1e-10; enlarge the domain [{lo}, {hi}]")]
    TailMass { estimate: f64, lo: f64, hi: f64 },

    #[error("time step {dt:e} violates stability; admissible dt <= {max_dt:e}")]
    Cfl { dt: f64, max_dt: f64 },

    #[error("chain {chain} produced a non-finite iterate at step {step}")]
    NonFinite { chain: usize, step: usize },

    #[error("isoperimetry rule `{rule}` not applicable: {reason}")]
    Rule { rule: &'static str, reason: String },

    #[error("cannot parse derivation line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("iteration {k} is below the burn-in threshold k0 = {k0}")]
    BelowBurnIn { k: u64, k0: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidArgument {
        name,
        reason: reason.into(),
    }
}
