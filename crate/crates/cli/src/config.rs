//! Experiment configuration: one TOML document, every key optional.

use std::path::PathBuf;

use qboost::adiabatic::{InstanceParams, MAX_QUBITS, MIN_CURVATURE_POINTS};
use qboost::boosting::{AdaBoostConfig, QBoostConfig};
use qboost::solvers::{SolverChoice, MAX_EXHAUSTIVE_VARS};
use qboost::stumps::{dictionary_size, Orders};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Root seed; every component seed is derived from it.
    pub seed: u64,
    pub out: PathBuf,
    pub data: DataConfig,
    pub train: TrainConfig,
    pub compare: CompareConfig,
    pub sweep: SweepConfig,
    pub gap: GapConfig,
    pub scaling: ScalingConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            out: PathBuf::from("out"),
            data: DataConfig::default(),
            train: TrainConfig::default(),
            compare: CompareConfig::default(),
            sweep: SweepConfig::default(),
            gap: GapConfig::default(),
            scaling: ScalingConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    Gaussian,
    Box,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataConfig {
    pub source: Source,
    /// Feature count of the Gaussian mixture; the box cluster is always 2-d.
    pub dim: usize,
    pub overlap: f64,
    /// Total samples before the even train/validation/test split.
    pub samples: usize,
    /// Required when `source = "csv"`.
    pub path: Option<PathBuf>,
    pub has_header: bool,
}

impl Default for DataConfig {
    fn default() -> Self {
        Self {
            source: Source::Gaussian,
            dim: 30,
            overlap: 0.95,
            samples: 3000,
            path: None,
            has_header: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    QboostInner,
    QboostOuter,
    Adaboost,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::QboostInner => "qboost-inner",
            Algorithm::QboostOuter => "qboost-outer",
            Algorithm::Adaboost => "adaboost",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrdersChoice {
    Both,
    First,
    Second,
}

impl OrdersChoice {
    pub fn name(self) -> &'static str {
        match self {
            OrdersChoice::Both => "both",
            OrdersChoice::First => "first",
            OrdersChoice::Second => "second",
        }
    }

    pub fn orders(self) -> Orders {
        match self {
            OrdersChoice::Both => Orders::BOTH,
            OrdersChoice::First => Orders::FIRST,
            OrdersChoice::Second => Orders::SECOND,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub algorithm: Algorithm,
    pub orders: OrdersChoice,
    /// The tabu `seed` here is replaced by one derived from the root seed.
    pub qboost: QBoostConfig,
    pub adaboost: AdaBoostConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::QboostOuter,
            orders: OrdersChoice::Both,
            qboost: QBoostConfig::default(),
            adaboost: AdaBoostConfig::default(),
        }
    }
}

/// QBoost outer loop against AdaBoost on replicas of the configured data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompareConfig {
    pub replicas: usize,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self { replicas: 5 }
    }
}

/// Gaussian-mixture test error against overlap.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub overlaps: Vec<f64>,
    pub replicas: usize,
    pub q_values: Vec<usize>,
    pub algorithms: Vec<Algorithm>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            overlaps: vec![0.8, 0.85, 0.9, 0.95, 1.0],
            replicas: 5,
            q_values: vec![32],
            algorithms: vec![Algorithm::QboostInner, Algorithm::QboostOuter, Algorithm::Adaboost],
        }
    }
}

/// Parameters of generated training instances for the spectral tasks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InstanceConfig {
    pub features: usize,
    pub samples: usize,
    pub overlap: f64,
}

impl Default for InstanceConfig {
    fn default() -> Self {
        let p = InstanceParams::default();
        Self {
            features: p.features,
            samples: p.samples,
            overlap: p.overlap,
        }
    }
}

impl InstanceConfig {
    pub fn params(self) -> InstanceParams {
        InstanceParams {
            features: self.features,
            samples: self.samples,
            overlap: self.overlap,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GapConfig {
    /// Problem file to analyze instead of a generated instance.
    pub problem: Option<PathBuf>,
    pub qubits: usize,
    pub grid_points: usize,
    pub instance: InstanceConfig,
}

impl Default for GapConfig {
    fn default() -> Self {
        Self {
            problem: None,
            qubits: 8,
            grid_points: 201,
            instance: InstanceConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScalingConfig {
    pub qubits: Vec<usize>,
    pub runs: usize,
    pub grid_points: usize,
    pub instance: InstanceConfig,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        Self {
            qubits: vec![6, 8, 10],
            runs: 5,
            grid_points: 201,
            instance: InstanceConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Task {
    GenData,
    Train,
    Compare,
    SweepOverlap,
    GapAnalysis,
    Scaling,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::GenData => "gen-data",
            Task::Train => "train",
            Task::Compare => "compare",
            Task::SweepOverlap => "sweep-overlap",
            Task::GapAnalysis => "gap-analysis",
            Task::Scaling => "scaling",
        }
    }
}

impl ExperimentConfig {
    /// Every problem with the sections `task` reads, in one list.
    pub fn validate(&self, task: Task) -> Vec<String> {
        let mut errors = Vec::new();
        match task {
            Task::GenData => {
                self.check_data(&mut errors);
            }
            Task::Train => {
                let dim = self.check_data(&mut errors);
                // AdaBoost never reads Q
                let q: &[usize] = if self.train.algorithm == Algorithm::Adaboost { &[] } else { &[self.train.qboost.q] };
                self.check_train(dim, q, &mut errors);
            }
            Task::Compare => {
                let dim = self.check_data(&mut errors);
                self.check_train(dim, &[self.train.qboost.q], &mut errors);
                if self.compare.replicas == 0 {
                    errors.push("compare.replicas must be at least 1".into());
                }
            }
            Task::SweepOverlap => {
                if self.data.source != Source::Gaussian {
                    errors.push("sweep-overlap needs data.source = \"gaussian\"".into());
                }
                self.check_data(&mut errors);
                let s = &self.sweep;
                if s.overlaps.is_empty() || s.overlaps.iter().any(|o| !(0.0..=1.0).contains(o)) {
                    errors.push("sweep.overlaps must be a non-empty list of values in [0, 1]".into());
                }
                if s.replicas == 0 {
                    errors.push("sweep.replicas must be at least 1".into());
                }
                if s.q_values.is_empty() {
                    errors.push("sweep.q_values must not be empty".into());
                }
                if s.algorithms.is_empty() {
                    errors.push("sweep.algorithms must not be empty".into());
                }
                self.check_train(Some(self.data.dim), &s.q_values, &mut errors);
            }
            Task::GapAnalysis => {
                let g = &self.gap;
                match &g.problem {
                    Some(p) if !p.is_file() => errors.push(format!("gap.problem {} does not exist", p.display())),
                    Some(_) => {}
                    None => {
                        check_qubits(g.qubits, "gap.qubits", &mut errors);
                        check_instance(&g.instance, "gap.instance", &mut errors);
                    }
                }
                check_grid(g.grid_points, "gap.grid_points", &mut errors);
            }
            Task::Scaling => {
                let s = &self.scaling;
                if s.qubits.len() < 2 {
                    errors.push("scaling.qubits needs at least two sizes".into());
                }
                for &n in &s.qubits {
                    check_qubits(n, "scaling.qubits", &mut errors);
                }
                if s.runs == 0 {
                    errors.push("scaling.runs must be at least 1".into());
                }
                check_grid(s.grid_points, "scaling.grid_points", &mut errors);
                check_instance(&s.instance, "scaling.instance", &mut errors);
            }
        }
        errors
    }

    /// Feature dimension when it can be determined.
    fn check_data(&self, errors: &mut Vec<String>) -> Option<usize> {
        let d = &self.data;
        // the even split needs at least one sample per part
        if d.source != Source::Csv && d.samples < 4 {
            errors.push(format!("data.samples = {} must be at least 4", d.samples));
        }
        match d.source {
            Source::Gaussian => {
                if d.dim == 0 {
                    errors.push("data.dim must be at least 1".into());
                }
                if !(0.0..=1.0).contains(&d.overlap) {
                    errors.push(format!("data.overlap = {} must lie in [0, 1]", d.overlap));
                }
                (d.dim > 0).then_some(d.dim)
            }
            Source::Box => Some(2),
            Source::Csv => match &d.path {
                None => {
                    errors.push("data.path is required when data.source = \"csv\"".into());
                    None
                }
                Some(p) if !p.is_file() => {
                    errors.push(format!("data.path {} does not exist", p.display()));
                    None
                }
                Some(p) => match qboost::data::load_csv(p, d.has_header) {
                    Ok(ds) if ds.len() < 3 => {
                        errors.push(format!("data.path {} has fewer than 3 samples", p.display()));
                        None
                    }
                    Ok(ds) => Some(ds.dim()),
                    Err(e) => {
                        errors.push(format!("data.path: {e}"));
                        None
                    }
                },
            },
        }
    }

    fn check_train(&self, dim: Option<usize>, q_values: &[usize], errors: &mut Vec<String>) {
        let t = &self.train;
        let qb = &t.qboost;
        let pool = dim.map(|d| dictionary_size(d, t.orders.orders()));
        for &q in q_values {
            if q == 0 {
                errors.push("Q must be at least 1".into());
            }
            if let Some(size) = pool {
                if q > size {
                    errors.push(format!(
                        "Q = {q} exceeds the dictionary size {size} (dim {}, orders {})",
                        dim.unwrap_or(0),
                        t.orders.name()
                    ));
                }
            }
            if qb.solver == SolverChoice::Exhaustive && q > MAX_EXHAUSTIVE_VARS {
                errors.push(format!("Q = {q} exceeds the exhaustive solver limit of {MAX_EXHAUSTIVE_VARS}"));
            }
        }
        if let Err(e) = qb.lambda_grid() {
            errors.push(format!("train.qboost.lambdas: {e}"));
        }
        if !(qb.scale > 0.0 && qb.scale.is_finite()) {
            errors.push(format!("train.qboost.scale = {} must be positive", qb.scale));
        }
        if qb.patience == 0 || qb.max_iterations == 0 || qb.max_passes == 0 {
            errors.push("train.qboost patience, max_iterations and max_passes must be at least 1".into());
        }
        if let SolverChoice::Tabu(p) = qb.solver {
            if p.tenure == Some(0) || p.iterations_per_var == 0 || p.restarts == 0 || p.stall_per_var == 0 {
                errors.push("train.qboost.solver.tabu counts must all be at least 1".into());
            }
        }
        if t.adaboost.patience == 0 || t.adaboost.max_rounds == 0 {
            errors.push("train.adaboost patience and max_rounds must be at least 1".into());
        }
    }
}

fn check_qubits(n: usize, key: &str, errors: &mut Vec<String>) {
    if !(1..=MAX_QUBITS).contains(&n) {
        errors.push(format!("{key} = {n} must lie in 1..={MAX_QUBITS}"));
    }
}

fn check_grid(points: usize, key: &str, errors: &mut Vec<String>) {
    if points < MIN_CURVATURE_POINTS {
        errors.push(format!("{key} = {points} must be at least {MIN_CURVATURE_POINTS}"));
    }
}

fn check_instance(i: &InstanceConfig, key: &str, errors: &mut Vec<String>) {
    if i.features == 0 {
        errors.push(format!("{key}.features must be at least 1"));
    }
    if i.samples < 2 {
        errors.push(format!("{key}.samples must be at least 2"));
    }
    if !(0.0..=1.0).contains(&i.overlap) {
        errors.push(format!("{key}.overlap = {} must lie in [0, 1]", i.overlap));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let c = ExperimentConfig::default();
        let text = toml::to_string(&c).unwrap();
        assert_eq!(toml::from_str::<ExperimentConfig>(&text).unwrap(), c);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<ExperimentConfig>("sed = 3").is_err());
        assert!(toml::from_str::<ExperimentConfig>("[train.qboost]\nqq = 3").is_err());
    }

    #[test]
    fn every_problem_is_listed() {
        let mut c = ExperimentConfig::default();
        c.data.overlap = 2.0;
        c.train.qboost.q = 5000;
        c.train.qboost.scale = -1.0;
        let errors = c.validate(Task::Train);
        assert_eq!(errors.len(), 3, "{errors:?}");
    }
}
