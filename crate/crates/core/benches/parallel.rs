//! Sequential vs. rayon execution of the data-parallel workloads.
//!
//! Run with `cargo bench -p qboost`. Each group benchmarks the same input in
//! both [`Execution`] modes; build with `--no-default-features` to compare
//! against a binary without rayon at all.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qboost::adiabatic::{spectral_sweep, training_instance, uniform_grid, InstanceParams};
use qboost::boosting::{inner_loop_train, QBoostConfig, StumpPool};
use qboost::data::{generate_gaussian_mixture, split_even, SampleWeights};
use qboost::par::{set_execution, Execution};
use qboost::solvers::{solve_tabu, SolverChoice, TabuConfig, TabuParams};
use qboost::stumps::{Orders, StumpFitter};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn dictionary_fit(c: &mut Criterion) {
    let data = generate_gaussian_mixture(30, 0.95, 1000, 1).unwrap();
    let fitter = StumpFitter::new(&data, Orders::BOTH);
    let weights = SampleWeights::uniform(data.len()).unwrap();
    let mut group = c.benchmark_group("dictionary_fit_930");
    for (name, mode) in MODES {
        set_execution(mode);
        group.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| black_box(fitter.fit(&weights).unwrap())));
    }
    group.finish();
}

fn tabu_restarts(c: &mut Criterion) {
    let problem = training_instance(14, 3, InstanceParams::default()).unwrap();
    let config = TabuConfig::defaults(problem.n(), 7);
    let mut group = c.benchmark_group("tabu_10_restarts");
    for (name, mode) in MODES {
        set_execution(mode);
        group.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| black_box(solve_tabu(&problem, &config).unwrap())));
    }
    group.finish();
}

fn lambda_sweep(c: &mut Criterion) {
    let data = generate_gaussian_mixture(10, 0.95, 600, 2).unwrap();
    let split = split_even(&data, 3).unwrap();
    let pool = StumpPool::refit(&split.train, Orders::BOTH);
    let config = QBoostConfig {
        q: 16,
        solver: SolverChoice::Tabu(TabuParams::default()),
        max_iterations: 1,
        ..QBoostConfig::default()
    };
    let mut group = c.benchmark_group("inner_iteration_17_lambdas");
    group.sample_size(10);
    for (name, mode) in MODES {
        set_execution(mode);
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(inner_loop_train(&pool, &split, &config).unwrap()))
        });
    }
    group.finish();
}

fn spectral(c: &mut Criterion) {
    let problem = training_instance(8, 4, InstanceParams::default()).unwrap();
    let grid = uniform_grid(51).unwrap();
    let mut group = c.benchmark_group("spectral_sweep_n8_51");
    group.sample_size(10);
    for (name, mode) in MODES {
        set_execution(mode);
        group.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| black_box(spectral_sweep(&problem, &grid).unwrap())));
    }
    group.finish();
}

criterion_group!(benches, dictionary_fit, tabu_restarts, lambda_sweep, spectral);
criterion_main!(benches);
