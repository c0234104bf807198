//! Task runners. Each returns the `results` object of the metrics file and
//! writes its other artifacts into the output directory.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;
use std::time::Duration;

use qboost::adiabatic::{gap_analysis, log_mean_slope, scaling_sweep, training_instance, uniform_grid, write_curve_csv, write_scaling_csv};
use qboost::boosting::{adaboost_train, inner_loop_train, outer_loop_train, StrongClassifier, StumpPool, TrainReport};
use qboost::data::{generate_box_cluster_2d, generate_gaussian_mixture, load_csv, save_csv, split_even, Dataset, SplitDataset};
use qboost::io::{read_qubo, write_model, write_qubo};
use qboost::par;
use qboost::rng::derive_seed;
use qboost::solvers::{solve_exhaustive, SolverChoice};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Algorithm, ExperimentConfig, Source};

pub type TaskResult = Result<(Value, Timing), String>;

/// Wall-clock data, kept apart from everything reproducible.
#[derive(Debug, Default, Serialize)]
pub struct Timing {
    pub solver_time_s: Option<f64>,
}

fn context<E: std::fmt::Display>(what: &str) -> impl FnOnce(E) -> String + '_ {
    move |e| format!("{what}: {e}")
}

fn create(path: &Path) -> Result<BufWriter<File>, String> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| format!("cannot create {}: {e}", path.display()))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<(), String> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn dataset(cfg: &ExperimentConfig, overlap: f64, replica: u64) -> Result<Dataset, String> {
    let d = &cfg.data;
    let seed = derive_seed(cfg.seed, "data", replica);
    match d.source {
        Source::Gaussian => generate_gaussian_mixture(d.dim, overlap, d.samples, seed),
        Source::Box => generate_box_cluster_2d(d.samples, seed),
        Source::Csv => load_csv(d.path.as_ref().expect("validated"), d.has_header),
    }
    .map_err(context("data"))
}

fn split(cfg: &ExperimentConfig, data: &Dataset, replica: u64) -> Result<SplitDataset, String> {
    split_even(data, derive_seed(cfg.seed, "split", replica)).map_err(context("data split"))
}

fn train_one(
    cfg: &ExperimentConfig,
    split: &SplitDataset,
    algorithm: Algorithm,
    q: usize,
    replica: u64,
) -> Result<(StrongClassifier, TrainReport), String> {
    let pool = StumpPool::refit(&split.train, cfg.train.orders.orders());
    let mut qb = cfg.train.qboost.clone();
    qb.q = q;
    if let SolverChoice::Tabu(p) = &mut qb.solver {
        p.seed = derive_seed(cfg.seed, "tabu", replica);
    }
    match algorithm {
        Algorithm::QboostInner => inner_loop_train(&pool, split, &qb),
        Algorithm::QboostOuter => outer_loop_train(&pool, split, &qb),
        Algorithm::Adaboost => adaboost_train(&pool, split, &cfg.train.adaboost),
    }
    .map_err(context(algorithm.name()))
}

fn solver_seconds(report: &TrainReport) -> f64 {
    report.records.iter().map(|r| r.solver_time).sum::<Duration>().as_secs_f64()
}

fn summary(report: &TrainReport) -> Value {
    json!({
        "algorithm": report.algorithm,
        "train_error": report.train_error,
        "validation_error": report.validation_error,
        "test_error": report.test_error,
        "weak_learners": report.weak_learners,
        "iterations": report.iterations,
    })
}

pub fn gen_data(cfg: &ExperimentConfig, out: &Path) -> TaskResult {
    let data = dataset(cfg, cfg.data.overlap, 0)?;
    save_csv(&data, out.join("data.csv"), true).map_err(context("data.csv"))?;
    let results = json!({
        "samples": data.len(),
        "dim": data.dim(),
        "positives": data.count_label(1),
        "negatives": data.count_label(-1),
    });
    Ok((results, Timing::default()))
}

pub fn train(cfg: &ExperimentConfig, out: &Path) -> TaskResult {
    let data = dataset(cfg, cfg.data.overlap, 0)?;
    let split = split(cfg, &data, 0)?;
    let (classifier, report) = train_one(cfg, &split, cfg.train.algorithm, cfg.train.qboost.q, 0)?;
    write_model(&classifier, out.join("model.json")).map_err(context("model.json"))?;
    report
        .write_csv(create(&out.join("report.csv"))?)
        .map_err(context("report.csv"))?;
    let mut full = summary(&report);
    full["records"] = serde_json::to_value(&report.records).map_err(|e| e.to_string())?;
    write_json(&out.join("report.json"), &full)?;
    Ok((
        summary(&report),
        Timing {
            solver_time_s: Some(solver_seconds(&report)),
        },
    ))
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn compare(cfg: &ExperimentConfig, out: &Path) -> TaskResult {
    let algorithms = [Algorithm::QboostOuter, Algorithm::Adaboost];
    let replicas = par::map_indices(cfg.compare.replicas, |r| -> Result<Vec<TrainReport>, String> {
        let data = dataset(cfg, cfg.data.overlap, r as u64)?;
        let split = split(cfg, &data, r as u64)?;
        algorithms
            .iter()
            .map(|a| train_one(cfg, &split, *a, cfg.train.qboost.q, r as u64).map(|t| t.1))
            .collect()
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;

    let mut csv = String::from("replica,algorithm,train_error,validation_error,test_error,weak_learners,iterations\n");
    for (r, reports) in replicas.iter().enumerate() {
        for rep in reports {
            csv.push_str(&format!(
                "{r},{},{},{},{},{},{}\n",
                rep.algorithm, rep.train_error, rep.validation_error, rep.test_error, rep.weak_learners, rep.iterations
            ));
        }
    }
    std::fs::write(out.join("compare.csv"), csv).map_err(context("compare.csv"))?;

    let mut per_algorithm = serde_json::Map::new();
    for (k, a) in algorithms.iter().enumerate() {
        let errors: Vec<f64> = replicas.iter().map(|r| r[k].test_error).collect();
        let sizes: Vec<f64> = replicas.iter().map(|r| r[k].weak_learners as f64).collect();
        let (e_mean, e_std) = mean_std(&errors);
        let (s_mean, s_std) = mean_std(&sizes);
        per_algorithm.insert(
            a.name().into(),
            json!({
                "mean_test_error": e_mean,
                "std_test_error": e_std,
                "mean_weak_learners": s_mean,
                "std_weak_learners": s_std,
            }),
        );
    }
    let fewer = replicas.iter().filter(|r| r[0].weak_learners < r[1].weak_learners).count();
    let solver: f64 = replicas.iter().flatten().map(solver_seconds).sum();
    Ok((
        json!({
            "replicas": replicas.len(),
            "algorithms": per_algorithm,
            "qboost_fewer_weak_learners": fewer,
        }),
        Timing {
            solver_time_s: Some(solver),
        },
    ))
}

pub fn sweep_overlap(cfg: &ExperimentConfig, out: &Path) -> TaskResult {
    let s = &cfg.sweep;
    let mut csv =
        String::from("overlap,algorithm,q,mean_test_error,std_test_error,mean_weak_learners,std_weak_learners\n");
    let mut rows = 0;
    let mut solver = 0.0;
    for &overlap in &s.overlaps {
        // AdaBoost does not depend on Q, so it runs once per replica
        let runs = par::map_indices(s.replicas, |r| -> Result<Vec<Vec<TrainReport>>, String> {
            let data = dataset(cfg, overlap, r as u64)?;
            let split = split(cfg, &data, r as u64)?;
            let mut ada = None;
            s.algorithms
                .iter()
                .map(|a| {
                    s.q_values
                        .iter()
                        .map(|&q| match a {
                            Algorithm::Adaboost => {
                                if ada.is_none() {
                                    ada = Some(train_one(cfg, &split, *a, q, r as u64)?.1);
                                }
                                Ok(ada.clone().expect("set above"))
                            }
                            _ => train_one(cfg, &split, *a, q, r as u64).map(|t| t.1),
                        })
                        .collect()
                })
                .collect()
        })
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
        for (ai, a) in s.algorithms.iter().enumerate() {
            for (qi, q) in s.q_values.iter().enumerate() {
                let errors: Vec<f64> = runs.iter().map(|r| r[ai][qi].test_error).collect();
                let sizes: Vec<f64> = runs.iter().map(|r| r[ai][qi].weak_learners as f64).collect();
                let (e_mean, e_std) = mean_std(&errors);
                let (s_mean, s_std) = mean_std(&sizes);
                csv.push_str(&format!("{overlap},{},{q},{e_mean},{e_std},{s_mean},{s_std}\n", a.name()));
                rows += 1;
            }
        }
        solver += runs.iter().flatten().flatten().map(solver_seconds).sum::<f64>();
    }
    std::fs::write(out.join("sweep.csv"), csv).map_err(context("sweep.csv"))?;
    Ok((
        json!({ "rows": rows, "replicas": s.replicas }),
        Timing {
            solver_time_s: Some(solver),
        },
    ))
}

pub fn gap(cfg: &ExperimentConfig, out: &Path) -> TaskResult {
    let g = &cfg.gap;
    let problem = match &g.problem {
        Some(path) => read_qubo(path).map_err(context("gap.problem"))?,
        None => training_instance(g.qubits, derive_seed(cfg.seed, "gap", 0), g.instance.params())
            .map_err(context("instance"))?,
    };
    write_qubo(&problem, out.join("problem.txt")).map_err(context("problem.txt"))?;
    let grid = uniform_grid(g.grid_points).map_err(context("grid"))?;
    let (curve, curvature, report) = gap_analysis(&problem, &grid).map_err(context("eigensolver"))?;
    write_curve_csv(&curve, Some(&curvature), create(&out.join("curve.csv"))?).map_err(context("curve.csv"))?;
    let optimum = solve_exhaustive(&problem).map_err(context("exhaustive solver"))?;
    // the curvature peak is expected to bound this quantity; logged only
    let v01_bound = report.v01_at_peak.map(|v| 2.0 * v * v / report.g_min);
    Ok((
        json!({
            "qubits": problem.n(),
            "g_min": report.g_min,
            "s_at_gmin": report.s_at_gmin,
            "curvature_peak": report.curvature_peak,
            "s_at_peak": report.s_at_peak,
            "v01_at_peak": report.v01_at_peak,
            "v01_bound": v01_bound,
            "ground_energy": optimum.energy,
        }),
        Timing::default(),
    ))
}

pub fn scaling(cfg: &ExperimentConfig, out: &Path) -> TaskResult {
    let s = &cfg.scaling;
    let grid = uniform_grid(s.grid_points).map_err(context("grid"))?;
    let params = s.instance.params();
    let generator =
        |n: usize, run: usize| training_instance(n, derive_seed(cfg.seed, &format!("scaling-{n}"), run as u64), params);
    let rows = scaling_sweep(&s.qubits, generator, s.runs, &grid).map_err(context("scaling sweep"))?;
    write_scaling_csv(&rows, create(&out.join("scaling.csv"))?).map_err(context("scaling.csv"))?;
    let slope = log_mean_slope(&rows).ok();
    let table: Vec<Value> = rows.iter().map(|r| json!({ "n": r.n, "mean": r.mean, "std": r.std })).collect();
    Ok((json!({ "log_mean_slope": slope, "rows": table }), Timing::default()))
}
