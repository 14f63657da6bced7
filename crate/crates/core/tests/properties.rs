mod common;

use common::*;
use langevin_core::bounds;
use langevin_core::functionals::{
    fisher_gaussian, kl_gaussian, renyi_gaussian, renyi_grid, renyi_info_ratio_gaussian, w2_gaussian,
};
use langevin_core::gaussian::{affine_pushforward_gaussian, ula_stationary_gaussian};
use langevin_core::grid1d::{discretize, discretize_target};
use langevin_core::isoperimetry::{self, IsoperimetryCert};
use langevin_core::targets::{make_gaussian_target, make_mixture_target};
use langevin_core::{DMatrix, DVector, Divergence, GaussianMeasure, GaussianTargetSpec, MixtureTargetSpec, RenyiOrder};
use proptest::prelude::*;
use rand::Rng;

const ORDERS: [f64; 9] = [0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 5.0, 8.0];

fn q(v: f64) -> RenyiOrder {
    RenyiOrder::new(v).unwrap()
}

fn isotropic_target(n: usize, alpha: f64) -> GaussianMeasure {
    GaussianMeasure::from_target(&GaussianTargetSpec::isotropic(n, alpha).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn renyi_gaussian_nondecreasing_in_q(seed in any::<u64>(), n in 1usize..4, i in 0usize..8, gap in 1usize..8) {
        let j = (i + gap).min(ORDERS.len() - 1);
        prop_assume!(j > i);
        let mut r = rng(seed);
        let rho = random_gaussian(&mut r, n, 1.0, 0.3, 3.0);
        let nu = random_gaussian(&mut r, n, 1.0, 0.3, 3.0);
        let lo = renyi_gaussian(&rho, &nu, q(ORDERS[i])).unwrap();
        let hi = renyi_gaussian(&rho, &nu, q(ORDERS[j])).unwrap();
        prop_assert!(lo.le_with_slack(hi, 1e-10), "R_{} = {lo} > R_{} = {hi}", ORDERS[i], ORDERS[j]);
    }

    #[test]
    fn renyi_grid_nondecreasing_in_q(mean in -2.0f64..2.0, var in 0.5f64..1.5) {
        let rho = discretize(normal_pdf(mean, var), -12.0, 12.0, 1201).unwrap();
        let well = make_mixture_target(&MixtureTargetSpec::double_well()).unwrap();
        let nu = discretize_target(&well, -12.0, 12.0, 1201).unwrap();
        let vals: Vec<Divergence> = [0.5, 1.0, 1.5, 2.0, 3.0].iter().map(|&o| renyi_grid(&rho, &nu, q(o)).unwrap()).collect();
        for w in vals.windows(2) {
            prop_assert!(w[0].le_with_slack(w[1], 1e-10), "{vals:?}");
        }
    }

    #[test]
    fn renyi_invariant_under_bijections(seed in any::<u64>(), n in 1usize..4, oi in 0usize..9) {
        let mut r = rng(seed);
        let rho = random_gaussian(&mut r, n, 1.0, 0.5, 2.0);
        let nu = random_gaussian(&mut r, n, 1.0, 0.5, 2.0);
        let a = random_orthogonal(&mut r, n) * DMatrix::from_diagonal(&DVector::from_fn(n, |_, _| r.gen_range(0.3..3.0))) * random_orthogonal(&mut r, n);
        let b = normal_vec(&mut r, n, 2.0);
        let before = renyi_gaussian(&rho, &nu, q(ORDERS[oi])).unwrap();
        let after = renyi_gaussian(
            &affine_pushforward_gaussian(&rho, &a, &b).unwrap(),
            &affine_pushforward_gaussian(&nu, &a, &b).unwrap(),
            q(ORDERS[oi]),
        )
        .unwrap();
        if before.is_infinite() {
            prop_assert!(after.is_infinite());
        } else {
            prop_assert!((before.value() - after.value()).abs() < 1e-10 * before.value().max(1.0), "{before} vs {after}");
        }
    }

    #[test]
    fn renyi_lsi_and_poincare_relations(seed in any::<u64>(), n in 1usize..4, alpha in 0.2f64..3.0, oi in 3usize..9) {
        let mut r = rng(seed);
        let nu = isotropic_target(n, alpha);
        let rho = random_gaussian(&mut r, n, 1.0 / alpha.sqrt(), 0.2 / alpha, 1.2 / alpha);
        let order = q(ORDERS[oi]);
        let rq = renyi_gaussian(&rho, &nu, order).unwrap();
        prop_assume!(rq.is_finite());
        let ratio = renyi_info_ratio_gaussian(&rho, &nu, order).unwrap().value();
        let qq = order.value();
        prop_assert!(ratio >= 2.0 * alpha / (qq * qq) * rq.value() - 1e-10);
        if qq >= 2.0 {
            prop_assert!(ratio >= 4.0 * alpha / (qq * qq) * (1.0 - (-rq.value()).exp()) - 1e-10);
        }
    }

    #[test]
    fn log_sobolev_and_talagrand(seed in any::<u64>(), n in 1usize..4) {
        let mut r = rng(seed);
        let alpha = r.gen_range(0.2..3.0);
        let top = alpha * r.gen_range(1.0..4.0);
        let p = spd_with_extremes(&mut r, n, alpha, top);
        let nu = GaussianMeasure::from_target(&GaussianTargetSpec::new(normal_vec(&mut r, n, 1.0), p).unwrap());
        let rho = random_gaussian(&mut r, n, 2.0, 0.1, 4.0);
        let h = kl_gaussian(&rho, &nu).unwrap().value();
        let j = fisher_gaussian(&rho, &nu).unwrap().value();
        let w2 = w2_gaussian(&rho, &nu).unwrap();
        prop_assert!(j >= 2.0 * alpha * h - 1e-10);
        prop_assert!(0.5 * alpha * w2 * w2 <= h + 1e-10);
    }

    #[test]
    fn gaussian_start_bounds_every_order(seed in any::<u64>(), n in 1usize..4) {
        let mut r = rng(seed);
        let p = random_spd(&mut r, n, 0.2, 5.0);
        let spec = GaussianTargetSpec::new(normal_vec(&mut r, n, 1.0), p).unwrap();
        let target = make_gaussian_target(&spec).unwrap();
        let l = target.smoothness();
        let x_star = spec.mean.clone();
        let bound = bounds::gaussian_start_bound(target.potential(x_star.as_slice()), n, l).unwrap();
        let rho0 = GaussianMeasure::isotropic(x_star, 1.0 / l).unwrap();
        let nu = GaussianMeasure::from_target(&spec);
        for o in [1.0, 2.0, 4.0, 8.0] {
            let rq = renyi_gaussian(&rho0, &nu, q(o)).unwrap();
            prop_assert!(rq.is_finite() && rq.value() <= bound + 1e-9, "q={o}: {rq} > {bound}");
        }
    }

    #[test]
    fn decomposition_holds(seed in any::<u64>(), n in 1usize..4, qi in 0usize..3) {
        let qq = [1.5, 2.0, 4.0][qi];
        let mut r = rng(seed);
        let spec = GaussianTargetSpec::new(normal_vec(&mut r, n, 1.0), random_spd(&mut r, n, 0.5, 2.0)).unwrap();
        let nu = GaussianMeasure::from_target(&spec);
        let nu_eps = ula_stationary_gaussian(&spec, 0.1).unwrap();
        let rho = random_gaussian(&mut r, n, 1.0, 0.3, 2.0);
        let lhs = renyi_gaussian(&rho, &nu, q(qq)).unwrap();
        let rhs = bounds::renyi_decomp_bound(
            renyi_gaussian(&rho, &nu_eps, q(2.0 * qq)).unwrap(),
            renyi_gaussian(&nu_eps, &nu, q(2.0 * qq - 1.0)).unwrap(),
            qq,
        )
        .unwrap();
        prop_assert!(lhs.le_with_slack(rhs, 1e-10), "{lhs} > {rhs}");
    }

    #[test]
    fn planner_meets_accuracy(alpha in 0.05f64..2.0, ratio in 1.0f64..10.0, n in 1usize..200, delta in 1e-4f64..5.0, h0 in 1e-3f64..1e4) {
        let smooth = alpha * ratio;
        let plan = bounds::plan_kl(alpha, smooth, n, delta, h0).unwrap();
        prop_assert!(plan.k >= 1);
        prop_assert!(plan.eps <= bounds::kl_step_cap(alpha, smooth));
        let rep = bounds::kl_ula_bound(alpha, smooth, n, plan.eps, plan.k, h0).unwrap();
        prop_assert!(rep.bound.value() <= delta);
    }

    #[test]
    fn certificate_text_round_trips(alpha in 0.1f64..10.0, lip in 0.1f64..5.0, t in 0.0f64..3.0, osc in 0.0f64..2.0, pi in any::<bool>()) {
        let mut cert = isoperimetry::bakry_emery(alpha).unwrap();
        cert = isoperimetry::lipschitz_pushforward(cert, lip).unwrap();
        cert = isoperimetry::gaussian_convolution(cert, t).unwrap();
        let other = isoperimetry::bakry_emery(alpha * 0.7).unwrap();
        cert = isoperimetry::tensorize(&cert, &other).unwrap();
        cert = isoperimetry::bounded_perturbation(cert, osc).unwrap();
        if pi {
            cert = isoperimetry::lsi_implies_pi(cert).unwrap();
        }
        let parsed = IsoperimetryCert::from_text(&cert.to_text()).unwrap();
        prop_assert_eq!(parsed.constant().to_bits(), cert.constant().to_bits());
        prop_assert_eq!(parsed, cert);
    }

    #[test]
    fn divergence_values_are_never_negative(v in -1.0f64..1.0) {
        match Divergence::new(v) {
            Ok(d) => prop_assert!(d.value() >= 0.0),
            Err(_) => prop_assert!(v <= -langevin_core::divergence::NEGATIVE_CLIP),
        }
    }
}

#[test]
fn kl_bound_monotone_on_lattice() {
    let alphas = [0.25, 0.5, 1.0];
    let eps_fracs = [0.1, 0.5, 1.0];
    let ns = [1usize, 3, 10];
    let ls = [1.0, 2.0, 4.0];
    let h0s = [0.0, 1.0, 10.0];
    let ks = [0u64, 100, 1000];
    let eval = |a: f64, l: f64, n: usize, e: f64, k: u64, h: f64| {
        bounds::kl_ula_bound(a, l, n, e, k, h).unwrap().bound.value()
    };
    for &a in &alphas {
        for &l in &ls {
            // eps fixed below the smallest cap in the lattice so every variation stays admissible
            let base_eps = bounds::kl_step_cap(0.25, 4.0);
            for &f in &eps_fracs {
                let e = base_eps * f;
                for &n in &ns {
                    for &h in &h0s {
                        for &k in &ks {
                            let v = eval(a, l, n, e, k, h);
                            if f < 1.0 {
                                // same horizon eps * k, larger step
                                let coarse_k = (k as f64 * f).round() as u64;
                                assert!(v <= eval(a, l, n, base_eps, coarse_k, h));
                            }
                            if n < 10 {
                                assert!(v <= eval(a, l, 10, e, k, h));
                            }
                            if l < 4.0 {
                                assert!(v <= eval(a, 4.0, n, e, k, h));
                            }
                            if h < 10.0 {
                                assert!(v <= eval(a, l, n, e, k, 10.0));
                            }
                            if k < 1000 {
                                assert!(v >= eval(a, l, n, e, 1000, h));
                            }
                            if a < 1.0 {
                                assert!(v >= eval(1.0, l, n, e, k, h));
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn telescoped_one_step_is_dominated() {
    for (alpha, l, n) in [(1.0, 1.0, 1usize), (0.3, 2.0, 4), (2.0, 2.5, 2)] {
        let eps = bounds::kl_step_cap(alpha, l);
        let h0 = 3.0;
        let mut x = h0;
        for k in 1..=2000u64 {
            x = bounds::one_step_bound(alpha, l, n, eps, x).unwrap().bound.value();
            let main = bounds::kl_ula_bound(alpha, l, n, eps, k, h0).unwrap().bound.value();
            assert!(x <= main * (1.0 + 1e-12), "k={k}: {x} > {main}");
        }
    }
}

#[test]
fn lsi_holds_for_random_gaussians() {
    let mut r = rng(42);
    for _ in 0..100 {
        let n = r.gen_range(1..=4usize);
        let alpha = r.gen_range(0.2..3.0);
        let nu = isotropic_target(n, alpha);
        let rho = random_gaussian(&mut r, n, 2.0, 0.1, 5.0);
        let h = kl_gaussian(&rho, &nu).unwrap().value();
        let j = fisher_gaussian(&rho, &nu).unwrap().value();
        assert!(j >= 2.0 * alpha * h - 1e-10);
    }
}
