use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hsnake_bench::{config_and_head, target};
use hsnake_core::lorentz::{self, FACTOR_TOL};
use hsnake_core::planner::{self, LiftOptions, SteerOptions};
use std::hint::black_box;

fn group_planning(c: &mut Criterion) {
    let mut g = c.benchmark_group("group");
    for n in [3, 5, 8] {
        let a = target(n, 1);
        g.bench_with_input(BenchmarkId::new("factorize", n), &a, |b, a| {
            b.iter(|| lorentz::factorize(black_box(a), FACTOR_TOL).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("plan_group_path", n), &a, |b, a| {
            b.iter(|| planner::plan_group_path(black_box(a), FACTOR_TOL).unwrap())
        });
    }
    g.finish();
}

fn config_planning(c: &mut Criterion) {
    let mut g = c.benchmark_group("config");
    g.sample_size(10);
    let (u, head) = config_and_head(3, 2);
    let a = target(3, 2);
    g.bench_function("steer_config", |b| {
        b.iter(|| planner::steer_config(black_box(&u), &a, SteerOptions::default()).unwrap())
    });
    let opts = LiftOptions {
        step: 1e-2,
        ..LiftOptions::default()
    };
    g.bench_function("horizontal_lift", |b| {
        b.iter(|| planner::horizontal_lift(black_box(&u), &head, opts).unwrap())
    });
    g.finish();
}

criterion_group!(benches, group_planning, config_planning);
criterion_main!(benches);
