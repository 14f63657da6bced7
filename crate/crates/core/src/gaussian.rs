//! Exact evolution of Gaussian laws under ULA, Langevin (Ornstein–Uhlenbeck)
//! flow and heat flow for quadratic targets.

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Error, Result};
use crate::linalg::{self, check_dim};
use crate::targets::GaussianTargetSpec;

/// `N(mean, covariance)` with a symmetric positive definite covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMeasure {
    mean: DVector<f64>,
    covariance: DMatrix<f64>,
}

impl GaussianMeasure {
    pub fn new(mean: DVector<f64>, covariance: DMatrix<f64>) -> Result<Self> {
        check_dim(mean.len(), covariance.nrows())?;
        linalg::spd_eigen(&covariance)?;
        Ok(GaussianMeasure {
            mean,
            covariance: linalg::symmetrize(&covariance),
        })
    }

    /// `N(mean, var * I)`.
    pub fn isotropic(mean: DVector<f64>, var: f64) -> Result<Self> {
        let n = mean.len();
        Self::new(mean, DMatrix::identity(n, n) * var)
    }

    /// 1D `N(mean, var)`.
    pub fn scalar(mean: f64, var: f64) -> Result<Self> {
        Self::new(DVector::from_element(1, mean), DMatrix::from_element(1, 1, var))
    }

    /// The target itself, `N(m, P^-1)`.
    pub fn from_target(spec: &GaussianTargetSpec) -> Self {
        GaussianMeasure {
            mean: spec.mean.clone(),
            covariance: spec.covariance(),
        }
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    // Internal constructor for results of exact updates; re-symmetrizes.
    fn from_parts(mean: DVector<f64>, cov: DMatrix<f64>) -> Self {
        GaussianMeasure {
            mean,
            covariance: linalg::symmetrize(&cov),
        }
    }

    /// Componentwise max distance between two laws.
    pub fn max_abs_diff(&self, other: &GaussianMeasure) -> f64 {
        (&self.mean - &other.mean)
            .amax()
            .max((&self.covariance - &other.covariance).amax())
    }
}

/// Raised (not returned as an error) when a ULA step size makes the linear
/// recursion expansive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityWarning {
    pub eps: f64,
    /// `2 / lambda_max(P)`.
    pub limit: f64,
}

/// A ULA step result with an optional divergence flag.
#[derive(Debug, Clone, PartialEq)]
pub struct UlaStep {
    pub law: GaussianMeasure,
    pub warning: Option<StabilityWarning>,
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(invalid(
            "eps",
            format!("step size must be finite and nonnegative, got {eps}"),
        ));
    }
    Ok(())
}

/// Law of `x - eps grad f(x) + sqrt(2 eps) z` for `x ~ law`:
/// mean `m + (I - eps P)(mu - m)`, covariance `(I - eps P) S (I - eps P) + 2 eps I`.
pub fn ula_step_gaussian(law: &GaussianMeasure, target: &GaussianTargetSpec, eps: f64) -> Result<UlaStep> {
    check_eps(eps)?;
    let n = law.dim();
    check_dim(n, target.dim())?;
    let contraction = DMatrix::identity(n, n) - &target.precision * eps;
    let mean = &target.mean + &contraction * (&law.mean - &target.mean);
    let cov = &contraction * &law.covariance * &contraction + DMatrix::identity(n, n) * (2.0 * eps);
    let (_, lmax) = target.spectrum_bounds();
    let limit = 2.0 / lmax;
    Ok(UlaStep {
        law: GaussianMeasure::from_parts(mean, cov),
        warning: (eps >= limit).then_some(StabilityWarning { eps, limit }),
    })
}

/// Stationary law of ULA: mean `m` and the solution of
/// `S = (I - eps P) S (I - eps P) + 2 eps I`, which in the eigenbasis of `P`
/// is diagonal with entries `2 eps / (1 - (1 - eps p_i)^2)`.
pub fn ula_stationary_gaussian(target: &GaussianTargetSpec, eps: f64) -> Result<GaussianMeasure> {
    let eig = linalg::spd_eigen(&target.precision)?;
    let lmax = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    if !(eps > 0.0) || eps >= 2.0 / lmax {
        return Err(Error::StepSizeWindow {
            eps,
            window: format!("0 < eps < 2/lambda_max(P) = {}", 2.0 / lmax),
        });
    }
    // 1 - (1 - eps p)^2 = eps p (2 - eps p)
    let cov = linalg::sym_apply(&eig, |p| 2.0 / (p * (2.0 - eps * p)));
    Ok(GaussianMeasure::from_parts(target.mean.clone(), cov))
}

/// Exact Ornstein–Uhlenbeck law at time `t`:
/// mean `m + e^{-Pt}(mu0 - m)`, covariance `e^{-Pt} S0 e^{-Pt} + P^{-1}(I - e^{-2Pt})`.
pub fn ou_flow_gaussian(law0: &GaussianMeasure, target: &GaussianTargetSpec, t: f64) -> Result<GaussianMeasure> {
    if !(t >= 0.0) {
        return Err(invalid("t", format!("time must be nonnegative, got {t}")));
    }
    check_dim(law0.dim(), target.dim())?;
    let eig = linalg::spd_eigen(&target.precision)?;
    let decay = linalg::sym_apply(&eig, |p| (-p * t).exp());
    // (1 - e^{-2pt}) / p, written with exp_m1 for small pt
    let fill = linalg::sym_apply(&eig, |p| -(-2.0 * p * t).exp_m1() / p);
    let mean = &target.mean + &decay * (&law0.mean - &target.mean);
    let cov = &decay * &law0.covariance * &decay + fill;
    Ok(GaussianMeasure::from_parts(mean, cov))
}

/// Convolution with `N(0, 2t I)`.
pub fn heat_flow_gaussian(law: &GaussianMeasure, t: f64) -> Result<GaussianMeasure> {
    if !(t >= 0.0) {
        return Err(invalid("t", format!("time must be nonnegative, got {t}")));
    }
    let n = law.dim();
    Ok(GaussianMeasure::from_parts(
        law.mean.clone(),
        &law.covariance + DMatrix::identity(n, n) * (2.0 * t),
    ))
}

/// Law of `A x + b`.
pub fn affine_pushforward_gaussian(
    law: &GaussianMeasure,
    a: &DMatrix<f64>,
    b: &DVector<f64>,
) -> Result<GaussianMeasure> {
    check_dim(law.dim(), a.ncols())?;
    check_dim(a.nrows(), a.ncols())?;
    check_dim(a.nrows(), b.len())?;
    let det = a.determinant();
    if !(det.abs() > 1e-300) {
        return Err(Error::SingularMap { det });
    }
    Ok(GaussianMeasure::from_parts(
        a * &law.mean + b,
        a * &law.covariance * a.transpose(),
    ))
}

/// The exact law `rho_k` of the `k`-th ULA iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianChainState {
    pub step_index: u64,
    pub law: GaussianMeasure,
}

impl GaussianChainState {
    pub fn new(law: GaussianMeasure) -> Self {
        GaussianChainState { step_index: 0, law }
    }

    pub fn advance(&mut self, target: &GaussianTargetSpec, eps: f64) -> Result<Option<StabilityWarning>> {
        let step = ula_step_gaussian(&self.law, target, eps)?;
        self.law = step.law;
        self.step_index += 1;
        Ok(step.warning)
    }
}

/// Exact laws `rho_0, ..., rho_k`.
pub fn ula_trajectory(
    law0: &GaussianMeasure,
    target: &GaussianTargetSpec,
    eps: f64,
    steps: usize,
) -> Result<Vec<GaussianMeasure>> {
    let mut out = Vec::with_capacity(steps + 1);
    let mut state = GaussianChainState::new(law0.clone());
    out.push(state.law.clone());
    for _ in 0..steps {
        state.advance(target, eps)?;
        out.push(state.law.clone());
    }
    Ok(out)
}
