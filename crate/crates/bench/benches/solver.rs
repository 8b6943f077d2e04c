use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use skyrme_core::model::{accel_into, AccelWorkspace};
use skyrme_core::{
    build_grid, cfl_dt, energy, functional_rhs, sample_initial_data, shoot_skyrmion, FunctionalKind, InitialDataSpec,
    ModelParams, Stepper, VelocityMode, VirialConfig, Weight,
};

fn models() -> [(&'static str, ModelParams); 2] {
    [
        ("skyrme", ModelParams::skyrme(1.0).unwrap()),
        ("adkins-nappi", ModelParams::adkins_nappi()),
    ]
}

fn bench_accel(c: &mut Criterion) {
    let mut group = c.benchmark_group("accel");
    for cells in [1024usize, 4096, 16384] {
        let grid = build_grid(cells, 40.0).unwrap();
        let spec = InitialDataSpec {
            velocity: VelocityMode::Outgoing,
            ..Default::default()
        };
        let state = sample_initial_data(&spec, &grid).unwrap();
        for (name, params) in models() {
            let mut ws = AccelWorkspace::new(&grid);
            let mut out = vec![0.0; grid.len()];
            group.bench_with_input(BenchmarkId::new(name, cells), &cells, |b, _| {
                b.iter(|| accel_into(black_box(&state.u), black_box(&state.ut), &grid, &params, &mut ws, &mut out))
            });
        }
    }
    group.finish();
}

fn bench_step(c: &mut Criterion) {
    let grid = build_grid(4096, 40.0).unwrap();
    let dt = cfl_dt(&grid, 0.25);
    let initial = sample_initial_data(&InitialDataSpec::default(), &grid).unwrap();
    let mut group = c.benchmark_group("rk4_step_4096");
    for (name, params) in models() {
        let mut stepper = Stepper::new(&grid, &params, 10.0);
        let mut state = initial.clone();
        group.bench_function(name, |b| {
            b.iter(|| {
                stepper.advance(&mut state, dt, 0).unwrap();
            })
        });
    }
    group.finish();
}

fn bench_diagnostics(c: &mut Criterion) {
    let grid = build_grid(4096, 40.0).unwrap();
    let params = ModelParams::skyrme(1.0).unwrap();
    let state = sample_initial_data(&InitialDataSpec::default(), &grid).unwrap();
    let virial = VirialConfig::default();
    let mut group = c.benchmark_group("diagnostics_4096");
    group.bench_function("energy", |b| b.iter(|| energy(black_box(&state), &grid, &params)));
    group.bench_function("virial_rhs", |b| {
        b.iter(|| {
            functional_rhs(
                FunctionalKind::SkyrmeVirial,
                black_box(&state),
                &grid,
                &params,
                &Weight::power(6.0),
                &virial,
            )
            .unwrap()
        })
    });
    group.finish();
}

fn bench_skyrmion(c: &mut Criterion) {
    let grid = build_grid(2048, 20.0).unwrap();
    let mut group = c.benchmark_group("skyrmion");
    group.sample_size(10);
    group.bench_function("shoot_2048", |b| b.iter(|| shoot_skyrmion(1.0, &grid, 1e-10).unwrap()));
    group.finish();
}

criterion_group!(benches, bench_accel, bench_step, bench_diagnostics, bench_skyrmion);
criterion_main!(benches);
