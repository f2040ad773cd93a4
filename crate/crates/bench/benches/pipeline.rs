use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use qwsqueeze_core::sweep::{CaptionCoupling, FigureId};
use qwsqueeze_core::{
    check_stability, evaluate_point, figure_spec, integrate_to_steady_state, minimize_variance,
    run_sweep_with, solve_lyapunov, CovarianceMatrix, EffectiveCouplings, Execution, Grid,
    LinearSystem, OdeOptions, OperatingPoint, SystemParams,
};

fn caption_system() -> (SystemParams, LinearSystem) {
    let p = SystemParams::caption(0.1, 0.0);
    let sys = LinearSystem::new(&p, EffectiveCouplings::from_ratio(0.1, 0.9)).unwrap();
    (p, sys)
}

fn point_ops(c: &mut Criterion) {
    let (p, sys) = caption_system();
    c.bench_function("check_stability", |b| {
        b.iter(|| check_stability(black_box(&sys.drift)))
    });
    c.bench_function("solve_lyapunov", |b| {
        b.iter(|| solve_lyapunov(black_box(&sys.drift), black_box(&sys.diffusion)))
    });
    let block = solve_lyapunov(&sys.drift, &sys.diffusion)
        .unwrap()
        .covariance
        .mechanical_block();
    c.bench_function("minimize_variance", |b| {
        b.iter(|| minimize_variance(black_box(&block)))
    });
    let op = OperatingPoint::new(p, 0.1, 0.9);
    c.bench_function("evaluate_point", |b| {
        b.iter(|| evaluate_point(black_box(&op)))
    });
}

fn ode_oracle(c: &mut Criterion) {
    let (p, sys) = caption_system();
    let opts = OdeOptions::for_mechanical_damping(p.gamma_m);
    let mut group = c.benchmark_group("ode");
    group.sample_size(10);
    group.bench_function("integrate_to_steady_state", |b| {
        b.iter(|| {
            integrate_to_steady_state(
                &sys.drift,
                &sys.diffusion,
                &CovarianceMatrix::vacuum(),
                &opts,
            )
        })
    });
    group.finish();
}

fn sweeps(c: &mut Criterion) {
    let mut small = figure_spec(FigureId::Fig3a, CaptionCoupling::default());
    small.axis1.grid = Grid::linspace(0.0, 0.99, 20).unwrap();
    small.axis2.as_mut().unwrap().grid = Grid::linspace(0.1, 5.0, 20).unwrap();
    let fig2a = figure_spec(FigureId::Fig2a, CaptionCoupling::default());

    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    group.bench_function("fig3a_20x20_serial", |b| {
        b.iter(|| run_sweep_with(&small, Execution::serial()))
    });
    group.bench_function("fig3a_20x20_parallel", |b| {
        b.iter(|| run_sweep_with(&small, Execution::default()))
    });
    group.bench_function("fig2a", |b| {
        b.iter(|| run_sweep_with(&fig2a, Execution::default()))
    });
    group.finish();
}

criterion_group!(benches, point_ops, ode_oracle, sweeps);
criterion_main!(benches);
