use criterion::{criterion_group, criterion_main, Criterion};
use sfn_core::montecarlo::estimate_outage;
use sfn_core::optimizer::{solve_evolutionary, solve_uniform_bisection};
use sfn_core::units::db_to_linear;
use sfn_core::{hypoexp_cdf, outage_probability, HypoexpSpec, PaProblem, Scenario, SimConfig};
use std::hint::black_box;

fn analytic(c: &mut Criterion) {
    let repeated = Scenario::three_station_reference(2e-6);
    let distinct = repeated.with_powers(&[12.0, 30.0, 4.0]).unwrap();
    let theta = db_to_linear(10.0);
    c.bench_function("outage/repeated_means", |b| {
        b.iter(|| outage_probability(black_box(&repeated), black_box(theta)).unwrap())
    });
    c.bench_function("outage/distinct_means", |b| {
        b.iter(|| outage_probability(black_box(&distinct), black_box(theta)).unwrap())
    });
    let spec = HypoexpSpec::new(vec![0.5, 1.0, 2.0, 4.0], vec![3, 1, 2, 4]).unwrap();
    c.bench_function("hypoexp_cdf/order_10", |b| {
        b.iter(|| hypoexp_cdf(black_box(&spec), black_box(3.0)))
    });
}

fn simulation(c: &mut Criterion) {
    let s = Scenario::three_station_reference(3e-6);
    let cfg = SimConfig::new(10_000, 1);
    let mut group = c.benchmark_group("montecarlo");
    group.sample_size(20);
    group.bench_function("outage_10k_trials", |b| {
        b.iter(|| estimate_outage(black_box(&s), 10.0, &cfg).unwrap())
    });
    group.finish();
}

fn optimization(c: &mut Criterion) {
    let problem = PaProblem::new(
        Scenario::three_station_reference(1e-6),
        db_to_linear(6.5),
        0.1,
        30.0,
    )
    .unwrap();
    let mut group = c.benchmark_group("optimizer");
    group.sample_size(10);
    group.bench_function("uniform_bisection", |b| {
        b.iter(|| solve_uniform_bisection(black_box(&problem)).unwrap())
    });
    group.bench_function("evolutionary_640", |b| {
        b.iter(|| solve_evolutionary(black_box(&problem), 640, 7).unwrap())
    });
    group.finish();
}

criterion_group!(benches, analytic, simulation, optimization);
criterion_main!(benches);
