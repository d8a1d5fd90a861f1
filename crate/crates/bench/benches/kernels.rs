use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use radpersist::dynamics::orbit_of_zero;
use radpersist::lumped::{build_lumped, leading_eigen};
use radpersist::montecarlo::{estimate_persistence, MCConfig};
use radpersist::spectral::{lambda_curve, quasi_stationary_cdf, solve_lambda_auto};
use radpersist::ModelParams;
use radpersist_bench::fixtures;

fn orbit(c: &mut Criterion) {
    let mut g = c.benchmark_group("orbit_of_zero");
    for (name, m) in fixtures() {
        g.bench_function(name, |b| {
            b.iter(|| orbit_of_zero(black_box(&m), 2000).unwrap())
        });
    }
    g.finish();
}

fn solve(c: &mut Criterion) {
    let mut g = c.benchmark_group("solve_lambda");
    for (name, m) in fixtures() {
        g.bench_function(name, |b| {
            b.iter(|| solve_lambda_auto(black_box(&m), 10_000).unwrap())
        });
    }
    g.finish();
}

fn lumped(c: &mut Criterion) {
    let m = ModelParams::rational(63, 100, 0.5).unwrap();
    let chain = build_lumped(&m, &orbit_of_zero(&m, 100).unwrap()).unwrap();
    c.bench_function("leading_eigen/finite_63_100", |b| {
        b.iter(|| leading_eigen(black_box(&chain.transient_block())).unwrap())
    });
}

fn cdf(c: &mut Criterion) {
    let mut g = c.benchmark_group("quasi_stationary_cdf");
    for (name, m) in fixtures() {
        let (_, sol) = solve_lambda_auto(&m, 10_000).unwrap();
        let z = 0.37 * m.ceiling();
        g.bench_with_input(BenchmarkId::from_parameter(name), &z, |b, &z| {
            b.iter(|| quasi_stationary_cdf(&m, &sol, black_box(z)).unwrap())
        });
    }
    g.finish();
}

fn curve(c: &mut Criterion) {
    let grid: Vec<(u64, u64)> = (1..=100).map(|i| (600 + i, 1000)).collect();
    c.bench_function("lambda_curve/100_points", |b| {
        b.iter(|| lambda_curve(0.5, black_box(&grid), 10_000, 2e-10))
    });
}

fn monte_carlo(c: &mut Criterion) {
    let reps = 1u64 << 20;
    let mut g = c.benchmark_group("killed_paths");
    g.throughput(Throughput::Elements(reps));
    g.sample_size(10);
    for (name, m) in [
        ("a=3/5,p=1/2", ModelParams::rational(3, 5, 0.5).unwrap()),
        ("a=2/3,p=0.3", ModelParams::rational(2, 3, 0.3).unwrap()),
    ] {
        let cfg = MCConfig::new(7, reps, 20);
        g.bench_function(name, |b| {
            b.iter(|| estimate_persistence(&m, black_box(&cfg)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, orbit, solve, lumped, cdf, curve, monte_carlo);
criterion_main!(benches);
