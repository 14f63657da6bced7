mod common;

use common::{gauss_hermite, gh_expect, normal_pdf};
use langevin_core::functionals::{
    fisher_gaussian, kl_gaussian, renyi_gaussian, renyi_info_gaussian, renyi_info_ratio_gaussian,
};
use langevin_core::{GaussianMeasure, RenyiOrder};

fn score(mean: f64, var: f64) -> impl Fn(f64) -> f64 {
    move |x| -(x - mean) / var
}

fn g(mean: f64, var: f64) -> GaussianMeasure {
    GaussianMeasure::scalar(mean, var).unwrap()
}

/// `(E_rho[(rho/nu)^(q-1) |d ln(rho/nu)|^2], E_rho[(rho/nu)^(q-1)])` by 200-node quadrature.
fn info_by_quadrature(rho: (f64, f64), nu: (f64, f64), q: f64) -> (f64, f64) {
    let rule = gauss_hermite(200);
    let (pr, pn) = (normal_pdf(rho.0, rho.1), normal_pdf(nu.0, nu.1));
    let (sr, sn) = (score(rho.0, rho.1), score(nu.0, nu.1));
    let ratio = |x: f64| (pr(x) / pn(x)).powf(q - 1.0);
    let g = gh_expect(&rule, rho.0, rho.1, |x| ratio(x) * (sr(x) - sn(x)).powi(2));
    let f = gh_expect(&rule, rho.0, rho.1, ratio);
    (g, f)
}

#[test]
fn gauss_hermite_rule_integrates_moments() {
    let rule = gauss_hermite(200);
    assert!((gh_expect(&rule, 0.0, 1.0, |_| 1.0) - 1.0).abs() < 1e-12);
    assert!((gh_expect(&rule, 0.0, 1.0, |x| x.powi(4)) - 3.0).abs() < 1e-10);
}

#[test]
fn fisher_matches_quadrature() {
    let (j, _) = info_by_quadrature((0.0, 2.0), (0.0, 1.0), 1.0);
    let closed = fisher_gaussian(&g(0.0, 2.0), &g(0.0, 1.0)).unwrap().value();
    assert!((closed - j).abs() < 1e-8, "{closed} vs {j}");
    let (j, _) = info_by_quadrature((0.7, 0.6), (-0.2, 1.3), 1.0);
    let closed = fisher_gaussian(&g(0.7, 0.6), &g(-0.2, 1.3)).unwrap().value();
    assert!((closed - j).abs() < 1e-8, "{closed} vs {j}");
}

#[test]
fn renyi_information_matches_quadrature() {
    for (rho, nu, q) in [
        ((0.5, 1.0), (0.0, 1.0), 2.0),
        ((0.3, 0.8), (0.0, 1.2), 3.0),
        ((-0.4, 1.1), (0.2, 0.9), 1.5),
    ] {
        let (gq, fq) = info_by_quadrature(rho, nu, q);
        let order = RenyiOrder::new(q).unwrap();
        let closed = renyi_info_gaussian(&g(rho.0, rho.1), &g(nu.0, nu.1), order)
            .unwrap()
            .value();
        assert!((closed - gq).abs() < 1e-8, "q={q}: {closed} vs {gq}");
        let ratio = renyi_info_ratio_gaussian(&g(rho.0, rho.1), &g(nu.0, nu.1), order)
            .unwrap()
            .value();
        assert!((ratio - gq / fq).abs() < 1e-8);
        let r = renyi_gaussian(&g(rho.0, rho.1), &g(nu.0, nu.1), order).unwrap().value();
        assert!(
            (r - fq.ln() / (q - 1.0)).abs() < 1e-8,
            "q={q}: {r} vs {}",
            fq.ln() / (q - 1.0)
        );
    }
}

#[test]
fn kl_matches_quadrature() {
    let rule = gauss_hermite(200);
    let (pr, pn) = (normal_pdf(0.4, 1.7), normal_pdf(-0.1, 0.9));
    let h = gh_expect(&rule, 0.4, 1.7, |x| (pr(x) / pn(x)).ln());
    let closed = kl_gaussian(&g(0.4, 1.7), &g(-0.1, 0.9)).unwrap().value();
    assert!((closed - h).abs() < 1e-10);
}

#[test]
fn renyi_below_one_matches_quadrature() {
    let rule = gauss_hermite(200);
    let (pr, pn) = (normal_pdf(1.0, 3.0), normal_pdf(0.0, 1.0));
    let q = 0.5;
    let f = gh_expect(&rule, 1.0, 3.0, |x| (pr(x) / pn(x)).powf(q - 1.0));
    let closed = renyi_gaussian(&g(1.0, 3.0), &g(0.0, 1.0), RenyiOrder::new(q).unwrap())
        .unwrap()
        .value();
    assert!((closed - f.ln() / (q - 1.0)).abs() < 1e-9);
}
