//! Numerical laboratory for the Unadjusted Langevin Algorithm: exact Gaussian
//! dynamics, divergence functionals, a 1D density-evolution engine,
//! isoperimetry certificates, convergence bounds and a Monte Carlo sampler.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bounds;
pub mod divergence;
pub mod error;
pub mod functionals;
pub mod gaussian;
pub mod grid1d;
pub mod isoperimetry;
pub mod linalg;
pub mod sampler;
pub mod targets;

pub use bounds::{BoundReport, GrowthFunction, Regime, StepPlan};
pub use divergence::Divergence;
pub use error::{Error, Result};
pub use functionals::RenyiOrder;
pub use gaussian::GaussianMeasure;
pub use grid1d::GridDensity1D;
pub use isoperimetry::{InequalityKind, IsoperimetryCert};
pub use sampler::{ChainConfig, ChainSummary, HistogramSpec, InitSpec};
pub use targets::{GaussianTargetSpec, MixtureTargetSpec, Target};

pub use nalgebra::{DMatrix, DVector};
