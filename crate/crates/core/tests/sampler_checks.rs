use langevin_core::grid1d::{discretize_target, ula_density_fixed_point};
use langevin_core::sampler::run_chains;
use langevin_core::targets::{make_gaussian_target, make_mixture_target};
use langevin_core::{ChainConfig, DMatrix, DVector, GaussianTargetSpec, HistogramSpec, InitSpec, MixtureTargetSpec};

fn config(eps: f64, steps: usize, chains: usize, mean: DVector<f64>, sd: f64) -> ChainConfig {
    ChainConfig {
        eps,
        steps,
        chains,
        seed: 2024,
        init: InitSpec { mean, sd },
        histogram: None,
        keep_final: true,
    }
}

#[test]
fn double_well_histogram_matches_grid_fixed_point() {
    let well = make_mixture_target(&MixtureTargetSpec::double_well()).unwrap();
    let eps = 0.01;
    let start = discretize_target(&well, -10.0, 10.0, 1251).unwrap();
    let (fixed, _) = ula_density_fixed_point(&start, &well, eps, 1e-11, 50_000).unwrap();
    let spec = HistogramSpec {
        lo: -8.0,
        hi: 8.0,
        bins: 80,
    };
    let mut cfg = config(eps, 2000, 100_000, DVector::zeros(1), 1.0);
    cfg.histogram = Some(spec);
    cfg.keep_final = false;
    let summary = run_chains(&well, &cfg, &[2000]).unwrap();
    let hist = summary.at(2000).unwrap().histogram.as_ref().unwrap();
    let edges = spec.edges();
    let grid_probs: Vec<f64> = edges.windows(2).map(|w| fixed.mass_between(w[0], w[1])).collect();
    let tv = hist.total_variation(&grid_probs);
    assert!(tv < 0.03, "TV = {tv}");
}

#[test]
fn translation_equivariance() {
    let p = DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.0]);
    let shift = DVector::from_vec(vec![1.5, -0.75]);
    let base = GaussianTargetSpec::new(DVector::zeros(2), p.clone()).unwrap();
    let moved = GaussianTargetSpec::new(shift.clone(), p).unwrap();
    let cfg = config(0.1, 50, 300, DVector::from_vec(vec![0.5, 0.5]), 0.7);
    let mut cfg_moved = cfg.clone();
    cfg_moved.init.mean = &cfg.init.mean + &shift;
    let a = run_chains(&make_gaussian_target(&base).unwrap(), &cfg, &[50]).unwrap();
    let b = run_chains(&make_gaussian_target(&moved).unwrap(), &cfg_moved, &[50]).unwrap();
    let (xa, xb) = (a.final_samples.unwrap(), b.final_samples.unwrap());
    for (i, (u, v)) in xa.iter().zip(&xb).enumerate() {
        assert!((v - u - shift[i % 2]).abs() < 1e-10, "coordinate {i}: {u} vs {v}");
    }
}

#[test]
fn output_is_independent_of_thread_count() {
    let well = make_mixture_target(&MixtureTargetSpec::double_well()).unwrap();
    let mut cfg = config(0.05, 100, 5000, DVector::zeros(1), 1.0);
    cfg.histogram = Some(HistogramSpec {
        lo: -6.0,
        hi: 6.0,
        bins: 24,
    });
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_chains(&well, &cfg, &[0, 10, 100]).unwrap())
    };
    let one = run(1);
    let four = run(4);
    assert_eq!(one.to_csv(), four.to_csv());
    assert_eq!(one.final_samples, four.final_samples);
}

#[test]
fn same_seed_reproduces_and_new_seed_differs() {
    let target = make_gaussian_target(&GaussianTargetSpec::isotropic(3, 1.0).unwrap()).unwrap();
    let cfg = config(0.1, 20, 100, DVector::zeros(3), 1.0);
    let a = run_chains(&target, &cfg, &[20]).unwrap();
    let b = run_chains(&target, &cfg, &[20]).unwrap();
    assert_eq!(a.final_samples, b.final_samples);
    let mut other = cfg.clone();
    other.seed += 1;
    let c = run_chains(&target, &other, &[20]).unwrap();
    assert_ne!(a.final_samples, c.final_samples);
}
