use std::collections::BTreeMap;

use proptest::prelude::*;
use qboost::adiabatic::{spectral_sweep, spectral_sweep_with, uniform_grid, Eigensolver};
use qboost::boosting::{inner_loop_train, outer_loop_train, test_error, QBoostConfig, SelectionMode, StumpPool};
use qboost::data::{generate_gaussian_mixture, load_csv, save_csv, split_even};
use qboost::io::{read_model, read_qubo, write_model, write_qubo};
use qboost::qubo::{build_training_qubo, Objective, PredictionMatrix, QuboProblem};
use qboost::solvers::{solve_exhaustive, solve_tabu, SolverChoice, TabuConfig};
use qboost::stumps::Orders;

fn small_split(seed: u64) -> qboost::data::SplitDataset {
    let data = generate_gaussian_mixture(5, 0.9, 300, seed).unwrap();
    split_even(&data, seed + 1).unwrap()
}

#[test]
fn trained_model_survives_a_file_round_trip() {
    let split = small_split(3);
    let pool = StumpPool::refit(&split.train, Orders::BOTH);
    let config = QBoostConfig {
        q: 8,
        solver: SolverChoice::Exhaustive,
        ..QBoostConfig::default()
    };
    let (classifier, report) = inner_loop_train(&pool, &split, &config).unwrap();
    assert!(!classifier.is_empty() && classifier.len() <= 8);
    assert_eq!(report.test_error, test_error(&classifier, &split.test).unwrap());

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    write_model(&classifier, &path).unwrap();
    let loaded = read_model(&path).unwrap();
    assert_eq!(loaded, classifier);
    for s in split.test.samples() {
        assert_eq!(loaded.predict(&s.features), classifier.predict(&s.features));
    }
}

#[test]
fn dataset_csv_round_trip_is_exact() {
    let data = generate_gaussian_mixture(3, 0.5, 50, 9).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    save_csv(&data, &path, true).unwrap();
    assert_eq!(load_csv(&path, true).unwrap(), data);
}

#[test]
fn outer_loop_is_reproducible_and_respects_the_replace_all_default() {
    let split = small_split(5);
    let pool = StumpPool::refit(&split.train, Orders::BOTH);
    let config = QBoostConfig {
        q: 6,
        max_passes: 3,
        ..QBoostConfig::default()
    };
    assert_eq!(config.mode, SelectionMode::ReplaceAll);
    let (a, ra) = outer_loop_train(&pool, &split, &config).unwrap();
    let (b, rb) = outer_loop_train(&pool, &split, &config).unwrap();
    assert_eq!(a, b);
    // solver_time is wall clock; everything else must repeat
    let key = |r: &qboost::boosting::IterationRecord| (r.selected, r.lambda, r.objective, r.train_error, r.validation_error);
    assert_eq!(ra.records.iter().map(key).collect::<Vec<_>>(), rb.records.iter().map(key).collect::<Vec<_>>());
    // κ = scale / (T_outer + Q) with T_outer the final size
    assert!(a.kappa > 0.0 && a.kappa <= 2.0 / 6.0);
}

#[test]
fn problem_file_feeds_both_solvers() {
    let split = small_split(7);
    let pool = StumpPool::refit(&split.train, Orders::FIRST);
    let fit = pool.fit(&qboost::data::SampleWeights::uniform(split.train.len()).unwrap()).unwrap();
    let stumps: Vec<_> = fit.dictionary.stumps()[..10].to_vec();
    let h = PredictionMatrix::from_stumps(&stumps, &split.train);
    let q = build_training_qubo(&h, &split.train.labels(), 0.2, 0.5, None).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.txt");
    write_qubo(&q, &path).unwrap();
    let loaded = read_qubo(&path).unwrap();
    assert_eq!(loaded, q);
    let exact = solve_exhaustive(&loaded).unwrap();
    let tabu = solve_tabu(&loaded, &TabuConfig::defaults(loaded.n(), 1)).unwrap();
    assert!(tabu.energy >= exact.energy - 1e-9);
    assert_eq!(exact.energy, q.energy(&exact.assignment).unwrap());
}

fn arb_qubo() -> impl Strategy<Value = QuboProblem> {
    (2usize..6).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        (
            prop::collection::vec(-1.0f64..1.0, n),
            prop::collection::vec(-1.0f64..1.0, pairs),
            -2.0f64..2.0,
        )
            .prop_map(move |(linear, q, offset)| {
                let mut quad = BTreeMap::new();
                let mut k = 0;
                for i in 0..n {
                    for j in i + 1..n {
                        quad.insert((i, j), q[k]);
                        k += 1;
                    }
                }
                QuboProblem::new(linear, quad, offset).unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn iterative_spectrum_matches_the_dense_oracle(q in arb_qubo()) {
        let grid = uniform_grid(11).unwrap();
        let it = spectral_sweep(&q, &grid).unwrap();
        let dense = spectral_sweep_with(&q, &grid, Eigensolver::Dense).unwrap();
        for k in 0..grid.len() {
            prop_assert!((it.e0[k] - dense.e0[k]).abs() < 1e-8);
            prop_assert!((it.e1[k] - dense.e1[k]).abs() < 1e-8);
        }
        // the s = 1 ground energy is the QUBO optimum
        let exact = solve_exhaustive(&q).unwrap().energy;
        prop_assert!((it.e0[grid.len() - 1] - exact).abs() < 1e-9);
    }

    #[test]
    fn tabu_never_beats_the_exhaustive_optimum(q in arb_qubo(), seed in any::<u64>()) {
        let exact = solve_exhaustive(&q).unwrap();
        let tabu = solve_tabu(&q, &TabuConfig::defaults(q.n(), seed)).unwrap();
        prop_assert!(tabu.energy >= exact.energy - 1e-12);
        prop_assert!((tabu.energy - q.energy(&tabu.assignment).unwrap()).abs() < 1e-12);
    }
}
