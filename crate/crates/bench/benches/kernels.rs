use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion};
use langevin_core::functionals::{renyi_gaussian, renyi_grid};
use langevin_core::gaussian::ula_step_gaussian;
use langevin_core::grid1d::{
    discretize, discretize_target, fokker_planck_step, max_fokker_planck_dt, ula_density_step,
};
use langevin_core::sampler::run_chains;
use langevin_core::targets::{make_gaussian_target, make_mixture_target};
use langevin_core::{
    ChainConfig, DVector, GaussianMeasure, GaussianTargetSpec, InitSpec, MixtureTargetSpec, RenyiOrder,
};

fn gaussian_kernels(c: &mut Criterion) {
    let spec = GaussianTargetSpec::isotropic(50, 1.0).unwrap();
    let law = GaussianMeasure::isotropic(DVector::from_element(50, 1.0), 2.0).unwrap();
    let nu = GaussianMeasure::from_target(&spec);
    c.bench_function("ula_step_gaussian n=50", |b| {
        b.iter(|| ula_step_gaussian(black_box(&law), &spec, 0.1).unwrap())
    });
    let q = RenyiOrder::new(2.0).unwrap();
    c.bench_function("renyi_gaussian n=50", |b| {
        b.iter(|| renyi_gaussian(black_box(&law), &nu, q).unwrap())
    });
}

fn grid_kernels(c: &mut Criterion) {
    let well = make_mixture_target(&MixtureTargetSpec::double_well()).unwrap();
    let nu = discretize_target(&well, -10.0, 10.0, 1001).unwrap();
    let rho = discretize(
        |x| (-(x - 1.0f64).powi(2) / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt(),
        -10.0,
        10.0,
        1001,
    )
    .unwrap();
    let dt = max_fokker_planck_dt(&rho, &well);
    c.bench_function("fokker_planck_step m=1001", |b| {
        b.iter(|| fokker_planck_step(black_box(&rho), &well, dt).unwrap())
    });
    c.bench_function("ula_density_step m=1001", |b| {
        b.iter(|| ula_density_step(black_box(&rho), &well, 0.01).unwrap())
    });
    let q = RenyiOrder::new(2.0).unwrap();
    c.bench_function("renyi_grid m=1001", |b| {
        b.iter(|| renyi_grid(black_box(&rho), &nu, q).unwrap())
    });
}

fn sampler_kernels(c: &mut Criterion) {
    let target = make_gaussian_target(&GaussianTargetSpec::isotropic(2, 1.0).unwrap()).unwrap();
    let cfg = ChainConfig {
        eps: 0.05,
        steps: 100,
        chains: 4096,
        seed: 1,
        init: InitSpec {
            mean: DVector::zeros(2),
            sd: 1.0,
        },
        histogram: None,
        keep_final: false,
    };
    let mut group = c.benchmark_group("sampler");
    group.sample_size(20);
    group.bench_function("run_chains 4096x100 n=2", |b| {
        b.iter_batched(
            || cfg.clone(),
            |cfg| run_chains(&target, &cfg, &[100]).unwrap(),
            BatchSize::SmallInput,
        )
    });
    group.finish();
}

criterion_group!(benches, gaussian_kernels, grid_kernels, sampler_kernels);
criterion_main!(benches);
