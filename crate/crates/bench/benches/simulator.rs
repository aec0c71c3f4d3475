use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use stefan_core::scenario::presets;
use stefan_core::sim::{cfl_max_dt, step_plant, Actuation, Integrator};
use stefan_core::{linear_initial_profile, run_scenario, Perturbation, PhysicalParams};

fn steps(c: &mut Criterion) {
    let p = PhysicalParams::zinc();
    let mut g = c.benchmark_group("step_plant");
    for n in [50usize, 200] {
        let st = linear_initial_profile(1e4, 0.01, p.tm(), n).unwrap();
        let dt = 0.4 * cfl_max_dt(&st, &p, &Perturbation::NONE, n);
        for integrator in [Integrator::Euler, Integrator::Rk2] {
            g.bench_with_input(BenchmarkId::new(format!("{integrator:?}"), n), &st, |b, st| {
                b.iter(|| step_plant(black_box(st), Actuation::neumann(2e5), &p, &Perturbation::NONE, dt, integrator))
            });
        }
    }
    g.finish();
}

fn runs(c: &mut Criterion) {
    let mut g = c.benchmark_group("closed_loop");
    g.sample_size(10);
    g.bench_function("state_feedback_n50_100s", |b| {
        let sc = presets::state_feedback(50, 100.0, 10.0);
        b.iter(|| run_scenario(black_box(&sc)).unwrap())
    });
    g.bench_function("output_feedback_n50_100s", |b| {
        let sc = presets::output_feedback(2e4, 0.001, 50, 100.0, 10.0);
        b.iter(|| run_scenario(black_box(&sc)).unwrap())
    });
    g.finish();
}

criterion_group!(benches, steps, runs);
criterion_main!(benches);
