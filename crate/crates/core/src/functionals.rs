//! KL, Rényi, Fisher and Rényi-information functionals and the Wasserstein-2
//! distance: closed forms for Gaussian pairs, trapezoidal quadrature for 1D
//! grid densities.
//!
//! Notation: `H = KL(rho | nu)`, `F_q = int rho^q nu^(1-q)`,
//! `R_q = ln F_q / (q - 1)`, `J = int rho |grad ln(rho/nu)|^2` and
//! `G_q = int nu (rho/nu)^q |grad ln(rho/nu)|^2`.

use nalgebra::{DMatrix, DVector};

use crate::divergence::Divergence;
use crate::error::{invalid, Error, Result};
use crate::gaussian::GaussianMeasure;
use crate::grid1d::{trapezoid, GridDensity1D};
use crate::linalg::{self, check_dim};

/// Relative eigenvalue floor under which a mixed covariance counts as singular.
pub const PD_RELATIVE_TOL: f64 = 1e-12;

/// Rényi order `q > 0`; `q = 1` is the KL limit.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RenyiOrder(f64);

impl RenyiOrder {
    pub const KL: RenyiOrder = RenyiOrder(1.0);

    pub fn new(q: f64) -> Result<Self> {
        if !(q > 0.0) || !q.is_finite() {
            return Err(invalid(
                "q",
                format!("Renyi order must be finite and positive, got {q}"),
            ));
        }
        Ok(RenyiOrder(q))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_kl(self) -> bool {
        self.0 == 1.0
    }
}

impl TryFrom<f64> for RenyiOrder {
    type Error = Error;

    fn try_from(q: f64) -> Result<Self> {
        RenyiOrder::new(q)
    }
}

fn gaussian_tol(n: usize) -> f64 {
    1e-10 * n.max(1) as f64
}

fn check_pair(rho: &GaussianMeasure, nu: &GaussianMeasure) -> Result<()> {
    check_dim(nu.dim(), rho.dim())
}

/// `KL(rho | nu)` for Gaussians.
pub fn kl_gaussian(rho: &GaussianMeasure, nu: &GaussianMeasure) -> Result<Divergence> {
    check_pair(rho, nu)?;
    let n = rho.dim();
    let nu_eig = linalg::spd_eigen(nu.covariance())?;
    let rho_eig = linalg::spd_eigen(rho.covariance())?;
    let nu_inv = linalg::spd_inverse(&nu_eig);
    let delta = nu.mean() - rho.mean();
    let trace = (&nu_inv * rho.covariance()).trace();
    let quad = delta.dot(&(&nu_inv * &delta));
    let log_det = linalg::log_det_spd(&nu_eig) - linalg::log_det_spd(&rho_eig);
    Divergence::clipped(0.5 * (trace - n as f64 + quad + log_det), gaussian_tol(n))
}

/// Mixed covariance `q S_nu + (1 - q) S_rho` when it is positive definite.
fn mixed_covariance(
    rho: &GaussianMeasure,
    nu: &GaussianMeasure,
    q: f64,
) -> Option<nalgebra::SymmetricEigen<f64, nalgebra::Dyn>> {
    let s = nu.covariance() * q + rho.covariance() * (1.0 - q);
    let eig = nalgebra::SymmetricEigen::new(linalg::symmetrize(&s));
    let lo = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    if lo <= PD_RELATIVE_TOL * hi {
        None
    } else {
        Some(eig)
    }
}

/// `R_q(rho | nu)` for Gaussians; `+inf` when the mixed covariance
/// `q S_nu + (1 - q) S_rho` is not positive definite.
pub fn renyi_gaussian(rho: &GaussianMeasure, nu: &GaussianMeasure, q: RenyiOrder) -> Result<Divergence> {
    if q.is_kl() {
        return kl_gaussian(rho, nu);
    }
    check_pair(rho, nu)?;
    let q = q.value();
    let Some(mixed) = mixed_covariance(rho, nu, q) else {
        return Ok(Divergence::INFINITY);
    };
    let rho_eig = linalg::spd_eigen(rho.covariance())?;
    let nu_eig = linalg::spd_eigen(nu.covariance())?;
    let delta = rho.mean() - nu.mean();
    let quad = delta.dot(&(linalg::spd_inverse(&mixed) * &delta));
    let log_ratio =
        linalg::log_det_spd(&mixed) - (1.0 - q) * linalg::log_det_spd(&rho_eig) - q * linalg::log_det_spd(&nu_eig);
    let value = 0.5 * q * quad - log_ratio / (2.0 * (q - 1.0));
    Divergence::clipped(value, gaussian_tol(rho.dim()))
}

/// `F_q = exp((q - 1) R_q)`, possibly `+inf`.
pub fn renyi_f_gaussian(rho: &GaussianMeasure, nu: &GaussianMeasure, q: RenyiOrder) -> Result<f64> {
    let r = renyi_gaussian(rho, nu, q)?;
    Ok(f_from_r(r, q))
}

fn f_from_r(r: Divergence, q: RenyiOrder) -> f64 {
    if q.is_kl() {
        return 1.0;
    }
    if r.is_infinite() {
        return if q.value() > 1.0 { f64::INFINITY } else { 0.0 };
    }
    ((q.value() - 1.0) * r.value()).exp()
}

/// Relative Fisher information `J(rho | nu)` for Gaussians.
pub fn fisher_gaussian(rho: &GaussianMeasure, nu: &GaussianMeasure) -> Result<Divergence> {
    renyi_info_ratio_gaussian(rho, nu, RenyiOrder::KL)
}

/// `G_q / F_q`: the expectation of `|grad ln(rho/nu)|^2` under the escort
/// law `rho^q nu^(1-q) / F_q`, itself Gaussian with precision
/// `A_q = q A_rho + (1 - q) A_nu`. `+inf` when `A_q` is not positive definite.
pub fn renyi_info_ratio_gaussian(rho: &GaussianMeasure, nu: &GaussianMeasure, q: RenyiOrder) -> Result<Divergence> {
    check_pair(rho, nu)?;
    let n = rho.dim();
    let q = q.value();
    let a_rho = linalg::spd_inverse(&linalg::spd_eigen(rho.covariance())?);
    let a_nu = linalg::spd_inverse(&linalg::spd_eigen(nu.covariance())?);
    let a_q = linalg::symmetrize(&(&a_rho * q + &a_nu * (1.0 - q)));
    let eig = nalgebra::SymmetricEigen::new(a_q);
    let lo = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    if lo <= PD_RELATIVE_TOL * hi {
        return Ok(Divergence::INFINITY);
    }
    let cov_q = linalg::spd_inverse(&eig);
    let shift = &a_rho * rho.mean() * q + &a_nu * nu.mean() * (1.0 - q);
    let m_q = &cov_q * shift;
    let b_mat: DMatrix<f64> = &a_nu - &a_rho;
    let b_vec: DVector<f64> = &a_rho * rho.mean() - &a_nu * nu.mean();
    let drift = &b_mat * m_q + b_vec;
    let value = drift.norm_squared() + (&b_mat * cov_q * b_mat.transpose()).trace();
    Divergence::clipped(value, gaussian_tol(n))
}

/// Rényi information `G_q(rho | nu)` for Gaussians; `q = 1` is [`fisher_gaussian`].
pub fn renyi_info_gaussian(rho: &GaussianMeasure, nu: &GaussianMeasure, q: RenyiOrder) -> Result<Divergence> {
    let ratio = renyi_info_ratio_gaussian(rho, nu, q)?;
    if q.is_kl() || ratio.is_infinite() || ratio == Divergence::ZERO {
        return Ok(ratio);
    }
    let f = renyi_f_gaussian(rho, nu, q)?;
    Divergence::new(ratio.value() * f)
}

/// Wasserstein-2 distance between Gaussians.
pub fn w2_gaussian(rho: &GaussianMeasure, nu: &GaussianMeasure) -> Result<f64> {
    check_pair(rho, nu)?;
    let root_nu = linalg::sym_function(nu.covariance(), |l| l.max(0.0).sqrt());
    let inner = &root_nu * rho.covariance() * &root_nu;
    let cross = linalg::sym_function(&inner, |l| l.max(0.0).sqrt());
    let bures = (rho.covariance() + nu.covariance() - cross * 2.0).trace();
    let sq = (rho.mean() - nu.mean()).norm_squared() + bures;
    Ok(sq.max(0.0).sqrt())
}

fn check_grids(rho: &GridDensity1D, nu: &GridDensity1D) -> Result<()> {
    if !rho.same_grid(nu) {
        return Err(Error::GridMismatch(format!(
            "rho on [{}, {}] with {} points, nu on [{}, {}] with {} points",
            rho.lo(),
            rho.hi(),
            rho.len(),
            nu.lo(),
            nu.hi(),
            nu.len()
        )));
    }
    if let Some(i) = nu.values().iter().position(|&v| !(v > 0.0)) {
        return Err(invalid(
            "nu",
            format!(
                "reference density must be positive on the grid; value {} at node {i}",
                nu.values()[i]
            ),
        ));
    }
    Ok(())
}

/// Grid KL divergence.
pub fn kl_grid(rho: &GridDensity1D, nu: &GridDensity1D) -> Result<Divergence> {
    check_grids(rho, nu)?;
    let integrand: Vec<f64> = rho
        .values()
        .iter()
        .zip(nu.values())
        .map(|(&r, &n)| if r > 0.0 { r * (r / n).ln() } else { 0.0 })
        .collect();
    Divergence::new(trapezoid(&integrand, rho.spacing()))
}

/// Grid `F_q = int rho^q nu^(1-q)`.
pub fn renyi_f_grid(rho: &GridDensity1D, nu: &GridDensity1D, q: RenyiOrder) -> Result<f64> {
    check_grids(rho, nu)?;
    let q = q.value();
    let integrand: Vec<f64> = rho
        .values()
        .iter()
        .zip(nu.values())
        .map(|(&r, &n)| if r > 0.0 { n * (r / n).powf(q) } else { 0.0 })
        .collect();
    Ok(trapezoid(&integrand, rho.spacing()))
}

/// Grid Rényi divergence.
pub fn renyi_grid(rho: &GridDensity1D, nu: &GridDensity1D, q: RenyiOrder) -> Result<Divergence> {
    if q.is_kl() {
        return kl_grid(rho, nu);
    }
    let f = renyi_f_grid(rho, nu, q)?;
    if f.is_infinite() {
        return Ok(Divergence::INFINITY);
    }
    Divergence::new(f.ln() / (q.value() - 1.0))
}

/// `G_q / F_q` on the grid.
pub fn renyi_info_ratio_grid(rho: &GridDensity1D, nu: &GridDensity1D, q: RenyiOrder) -> Result<Divergence> {
    let g = renyi_info_grid(rho, nu, q)?;
    if q.is_kl() {
        return Ok(g);
    }
    let f = renyi_f_grid(rho, nu, q)?;
    Divergence::new(g.value() / f)
}

/// Grid Rényi information, written as `(4/q^2) int nu |d/dx (rho/nu)^(q/2)|^2`
/// with central differences (one-sided at the endpoints).
pub fn renyi_info_grid(rho: &GridDensity1D, nu: &GridDensity1D, q: RenyiOrder) -> Result<Divergence> {
    check_grids(rho, nu)?;
    let q = q.value();
    let h = rho.spacing();
    let m = rho.len();
    let w: Vec<f64> = rho
        .values()
        .iter()
        .zip(nu.values())
        .map(|(&r, &n)| (r / n).powf(0.5 * q))
        .collect();
    let integrand: Vec<f64> = (0..m)
        .map(|i| {
            let d = if i == 0 {
                (w[1] - w[0]) / h
            } else if i == m - 1 {
                (w[m - 1] - w[m - 2]) / h
            } else {
                (w[i + 1] - w[i - 1]) / (2.0 * h)
            };
            nu.values()[i] * d * d
        })
        .collect();
    Divergence::new(4.0 / (q * q) * trapezoid(&integrand, h))
}

/// Grid relative Fisher information.
pub fn fisher_grid(rho: &GridDensity1D, nu: &GridDensity1D) -> Result<Divergence> {
    renyi_info_grid(rho, nu, RenyiOrder::KL)
}

/// `ln max rho/nu` over grid nodes; a diagnostic for `R_inf`.
pub fn renyi_inf_grid(rho: &GridDensity1D, nu: &GridDensity1D) -> Result<Divergence> {
    check_grids(rho, nu)?;
    let sup = rho
        .values()
        .iter()
        .zip(nu.values())
        .map(|(&r, &n)| r / n)
        .fold(0.0f64, f64::max);
    Divergence::clipped(sup.ln(), 1e-8)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::ula_stationary_gaussian;
    use crate::grid1d::discretize;
    use crate::targets::GaussianTargetSpec;
    use std::f64::consts::{LN_2, PI};

    fn q(v: f64) -> RenyiOrder {
        RenyiOrder::new(v).unwrap()
    }

    fn normal(mean: f64, var: f64) -> impl Fn(f64) -> f64 {
        move |x| (-(x - mean).powi(2) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
    }

    #[test]
    fn identical_measures_are_zero() {
        let a = GaussianMeasure::new(
            DVector::from_vec(vec![1.0, -2.0]),
            DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.0]),
        )
        .unwrap();
        assert_eq!(kl_gaussian(&a, &a).unwrap().value(), 0.0);
        for qq in [0.5, 1.5, 2.0, 7.0] {
            assert!(renyi_gaussian(&a, &a, q(qq)).unwrap().value() < 1e-12);
            assert!(renyi_info_gaussian(&a, &a, q(qq)).unwrap().value() < 1e-12);
        }
        assert!(fisher_gaussian(&a, &a).unwrap().value() < 1e-12);
        assert!(w2_gaussian(&a, &a).unwrap() < 1e-7);
    }

    #[test]
    fn ula_bias_in_kl() {
        let spec = GaussianTargetSpec::isotropic(1, 1.0).unwrap();
        let nu = GaussianMeasure::from_target(&spec);
        let nu_eps = ula_stationary_gaussian(&spec, 0.5).unwrap();
        assert!((nu_eps.covariance()[(0, 0)] - 4.0 / 3.0).abs() < 1e-14);
        let h = kl_gaussian(&nu_eps, &nu).unwrap().value();
        assert!((h - 0.5 * (1.0 / 3.0 + 0.75f64.ln())).abs() < 1e-14);
        assert!(h <= 1.0 / 36.0);
    }

    #[test]
    fn renyi_threshold_and_value() {
        let rho = GaussianMeasure::scalar(0.0, 2.0).unwrap();
        let nu = GaussianMeasure::scalar(0.0, 1.0).unwrap();
        assert!(renyi_gaussian(&rho, &nu, q(2.0)).unwrap().is_infinite());
        assert!(renyi_gaussian(&rho, &nu, q(3.0)).unwrap().is_infinite());
        let r = renyi_gaussian(&rho, &nu, q(1.5)).unwrap().value();
        assert!((r - 0.5 * LN_2).abs() < 1e-14);
        assert!(renyi_info_gaussian(&rho, &nu, q(2.0)).unwrap().is_infinite());
    }

    #[test]
    fn renyi_of_ula_bias() {
        let (alpha, eps) = (1.0, 0.5);
        let spec = GaussianTargetSpec::isotropic(3, alpha).unwrap();
        let nu = GaussianMeasure::from_target(&spec);
        let nu_eps = ula_stationary_gaussian(&spec, eps).unwrap();
        let c = 1.0 - eps * alpha / 2.0;
        for qq in [1.2, 2.0, 3.5] {
            let expected = 3.0 / (2.0 * (qq - 1.0)) * (qq * c.ln() - (1.0 - qq * eps * alpha / 2.0).ln());
            let got = renyi_gaussian(&nu_eps, &nu, q(qq)).unwrap().value();
            assert!((got - expected).abs() < 1e-12, "q={qq}: {got} vs {expected}");
        }
        assert!(renyi_gaussian(&nu_eps, &nu, q(4.0)).unwrap().is_infinite());
    }

    #[test]
    fn fisher_matches_renyi_info_at_one() {
        let rho = GaussianMeasure::scalar(0.3, 2.0).unwrap();
        let nu = GaussianMeasure::scalar(0.0, 1.0).unwrap();
        let j = fisher_gaussian(&rho, &nu).unwrap().value();
        // (1 - 1/2)^2 * 2 + 0.3^2
        assert!((j - (0.5 + 0.09)).abs() < 1e-14);
        assert_eq!(renyi_info_gaussian(&rho, &nu, RenyiOrder::KL).unwrap().value(), j);
    }

    #[test]
    fn w2_examples() {
        let a = GaussianMeasure::scalar(1.0, 1.0).unwrap();
        let b = GaussianMeasure::scalar(0.0, 1.0).unwrap();
        assert!((w2_gaussian(&a, &b).unwrap() - 1.0).abs() < 1e-14);
        let c = GaussianMeasure::new(
            DVector::from_vec(vec![1.0, 2.0]),
            DMatrix::from_diagonal(&DVector::from_vec(vec![4.0, 0.25])),
        )
        .unwrap();
        let d = GaussianMeasure::new(
            DVector::from_vec(vec![0.0, 0.0]),
            DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 9.0])),
        )
        .unwrap();
        let expected = 5.0 + (2.0f64 - 1.0).powi(2) + (0.5f64 - 3.0).powi(2);
        assert!((w2_gaussian(&c, &d).unwrap().powi(2) - expected).abs() < 1e-12);
    }

    #[test]
    fn order_validation() {
        assert!(RenyiOrder::new(0.0).is_err());
        assert!(RenyiOrder::new(f64::NAN).is_err());
        assert!(RenyiOrder::try_from(2.0).is_ok());
    }

    #[test]
    fn grid_identity_is_zero() {
        let nu = discretize(normal(0.0, 1.0), -10.0, 10.0, 1001).unwrap();
        assert!(kl_grid(&nu, &nu).unwrap().value() < 1e-10);
        assert!(renyi_grid(&nu, &nu, q(2.0)).unwrap().value() < 1e-10);
        assert!(fisher_grid(&nu, &nu).unwrap().value() < 1e-10);
        assert!(renyi_inf_grid(&nu, &nu).unwrap().value() < 1e-10);
    }

    #[test]
    fn grid_kl_matches_closed_form() {
        let rho = discretize(normal(0.0, 2.0), -12.0, 12.0, 4001).unwrap();
        let nu = discretize(normal(0.0, 1.0), -12.0, 12.0, 4001).unwrap();
        let exact = kl_gaussian(
            &GaussianMeasure::scalar(0.0, 2.0).unwrap(),
            &GaussianMeasure::scalar(0.0, 1.0).unwrap(),
        )
        .unwrap();
        assert!((kl_grid(&rho, &nu).unwrap().value() - exact.value()).abs() < 1e-6);
    }

    #[test]
    fn grid_renyi_increases_in_q() {
        let rho = discretize(normal(0.5, 1.5), -12.0, 12.0, 2001).unwrap();
        let nu = discretize(normal(0.0, 1.0), -12.0, 12.0, 2001).unwrap();
        let vals: Vec<f64> = [0.5, 1.0, 1.5, 2.0, 3.0]
            .iter()
            .map(|&qq| renyi_grid(&rho, &nu, q(qq)).unwrap().value())
            .collect();
        assert!(vals.windows(2).all(|w| w[0] < w[1]), "{vals:?}");
    }

    #[test]
    fn grid_mismatch_rejected() {
        let a = discretize(normal(0.0, 1.0), -10.0, 10.0, 1001).unwrap();
        let b = discretize(normal(0.0, 1.0), -10.0, 10.0, 1003).unwrap();
        assert!(matches!(kl_grid(&a, &b), Err(Error::GridMismatch(_))));
    }
}
