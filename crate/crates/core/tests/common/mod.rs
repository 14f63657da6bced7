#![allow(dead_code)]

use langevin_core::{DMatrix, DVector, GaussianMeasure};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal_vec(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> DVector<f64> {
    DVector::from_fn(n, |_, _| scale * rng.sample::<f64, _>(StandardNormal))
}

pub fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    m.qr().q()
}

/// `Q diag(eigs) Q^T` with eigenvalues uniform in `[lo, hi]`.
pub fn random_spd(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> DMatrix<f64> {
    let q = random_orthogonal(rng, n);
    let d = DVector::from_fn(n, |_, _| rng.gen_range(lo..=hi));
    let m = &q * DMatrix::from_diagonal(&d) * q.transpose();
    (&m + m.transpose()) * 0.5
}

/// Symmetric matrix with prescribed extreme eigenvalues `lo` and `hi`.
pub fn spd_with_extremes(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> DMatrix<f64> {
    let q = random_orthogonal(rng, n);
    let d = DVector::from_fn(n, |i, _| match i {
        0 => lo,
        1 => hi,
        _ => rng.gen_range(lo..=hi),
    });
    let d = if n == 1 { DVector::from_element(1, lo) } else { d };
    let m = &q * DMatrix::from_diagonal(&d) * q.transpose();
    (&m + m.transpose()) * 0.5
}

pub fn random_gaussian(rng: &mut ChaCha8Rng, n: usize, mean_scale: f64, lo: f64, hi: f64) -> GaussianMeasure {
    let mean = normal_vec(rng, n, mean_scale);
    GaussianMeasure::new(mean, random_spd(rng, n, lo, hi)).unwrap()
}

pub fn normal_pdf(mean: f64, var: f64) -> impl Fn(f64) -> f64 {
    move |x| (-(x - mean).powi(2) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
}

/// Gauss–Hermite rule for weight `exp(-x^2)` by the Golub–Welsch eigenproblem.
pub fn gauss_hermite(points: usize) -> (Vec<f64>, Vec<f64>) {
    let mut jacobi = DMatrix::zeros(points, points);
    for i in 1..points {
        let b = (i as f64 / 2.0).sqrt();
        jacobi[(i, i - 1)] = b;
        jacobi[(i - 1, i)] = b;
    }
    let eig = jacobi.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..points)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], std::f64::consts::PI.sqrt() * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pairs.into_iter().unzip()
}

/// `E g(X)` for `X ~ N(mean, var)` by Gauss–Hermite quadrature.
pub fn gh_expect(rule: &(Vec<f64>, Vec<f64>), mean: f64, var: f64, g: impl Fn(f64) -> f64) -> f64 {
    let s = (2.0 * var).sqrt();
    rule.0
        .iter()
        .zip(&rule.1)
        .map(|(&y, &w)| w * g(mean + s * y))
        .sum::<f64>()
        / std::f64::consts::PI.sqrt()
}
