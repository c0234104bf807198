//! Strong-classifier training.
//!
//! - [`adaboost_train`]: discrete AdaBoost with validation early stopping
//! - [`inner_loop_train`]: QBoost with at most `Q` weak classifiers, chosen
//!   by repeated QUBO solves over candidate windows of size `Q`
//! - [`outer_loop_train`]: concatenates inner-loop runs, each optimized on
//!   top of the frozen classifier built so far
//! - [`baseline_train`]: one QUBO solve over a whole fixed dictionary

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, SampleWeights, SplitDataset};
use crate::par;
use crate::qubo::{build_threshold_qubo, build_training_qubo, Block, PredictionMatrix};
use crate::solvers::SolverChoice;
use crate::stumps::{rank_by_error, Dictionary, FittedDictionary, Orders, Stump, StumpFitter};
use crate::{Error, Result};

/// Lower clamp on AdaBoost's weighted error; upper clamp is `1 − EPS_CLAMP`.
pub const EPS_CLAMP: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedStump {
    pub stump: Stump,
    pub alpha: f64,
}

/// `sign(Σ_t α_t h_t(x) − θ)` with `sign(0) = +1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrongClassifier {
    pub terms: Vec<WeightedStump>,
    pub kappa: f64,
    pub theta: f64,
}

impl StrongClassifier {
    /// All multipliers 1, as produced by QBoost.
    pub fn unweighted(stumps: &[Stump], kappa: f64, theta: f64) -> Self {
        Self {
            terms: stumps.iter().map(|&stump| WeightedStump { stump, alpha: 1.0 }).collect(),
            kappa,
            theta,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn stumps(&self) -> impl Iterator<Item = &Stump> {
        self.terms.iter().map(|t| &t.stump)
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| t.alpha * f64::from(t.stump.predict(x)))
            .sum()
    }

    pub fn predict(&self, x: &[f64]) -> i8 {
        sign(self.score(x) - self.theta)
    }
}

#[inline]
fn sign(v: f64) -> i8 {
    if v >= 0.0 {
        1
    } else {
        -1
    }
}

fn check_dim(classifier: &StrongClassifier, data: &Dataset) -> Result<()> {
    for t in &classifier.terms {
        t.stump.evaluate(&data.samples()[0].features, data.dim())?;
    }
    Ok(())
}

/// Fraction of misclassified samples.
pub fn test_error(classifier: &StrongClassifier, data: &Dataset) -> Result<f64> {
    check_dim(classifier, data)?;
    let wrong = data
        .samples()
        .iter()
        .filter(|s| classifier.predict(&s.features) != s.label)
        .count();
    Ok(wrong as f64 / data.len() as f64)
}

fn error_rate(scores: &[f64], theta: f64, y: &[f64]) -> f64 {
    let wrong = scores
        .iter()
        .zip(y)
        .filter(|(s, y)| f64::from(sign(**s - theta)) != **y)
        .count();
    wrong as f64 / y.len() as f64
}

/// Mean unthresholded score over the training set.
pub fn compute_theta(terms: &[WeightedStump], train: &Dataset) -> f64 {
    if terms.is_empty() {
        return 0.0;
    }
    let total: f64 = train
        .samples()
        .iter()
        .map(|s| {
            terms
                .iter()
                .map(|t| t.alpha * f64::from(t.stump.predict(&s.features)))
                .sum::<f64>()
        })
        .sum();
    total / train.len() as f64
}

/// `d(s) ← d(s)·((score_s − y_s)² + 10⁻¹²/S)`, renormalized.
///
/// `scores` are mean weak-classifier outputs in `[−1, 1]`.
pub fn update_sample_weights(d: &SampleWeights, scores: &[f64], y: &[f64]) -> Result<SampleWeights> {
    if scores.len() != d.len() || y.len() != d.len() {
        return Err(Error::DimensionMismatch {
            expected: d.len(),
            actual: scores.len().min(y.len()),
        });
    }
    let eps = 1e-12 / d.len() as f64;
    let raw = d
        .as_slice()
        .iter()
        .zip(scores.iter().zip(y))
        .map(|(w, (s, y))| w * ((s - y).powi(2) + eps))
        .collect();
    SampleWeights::normalized(raw)
}

/// `2(VC_dict + 1)(T + 1)·log₂(e(T + 1))`.
pub fn vc_bound(vc_dict: usize, t: usize) -> f64 {
    let t1 = (t + 1) as f64;
    2.0 * (vc_dict as f64 + 1.0) * t1 * (std::f64::consts::E * t1).log2()
}

/// `train_error + sqrt((VC_H·ln(2S/VC_H + 1) + ln(9/δ)) / S)`.
pub fn generalization_bound(train_error: f64, vc_h: f64, samples: usize, delta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&train_error) || vc_h <= 0.0 || samples == 0 || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid("generalization bound arguments out of range"));
    }
    let s = samples as f64;
    Ok(train_error + ((vc_h * (2.0 * s / vc_h + 1.0).ln() + (9.0 / delta).ln()) / s).sqrt())
}

/// `2/N + 1/N²`: below this, the L0 penalty only prunes redundant weights.
pub fn weak_lambda_bound(n: usize) -> f64 {
    let n = n as f64;
    2.0 / n + 1.0 / (n * n)
}

/// `0` followed by 16 geometric values from `10⁻³·λ_w` to `10²·λ_w`.
pub fn default_lambda_grid(n: usize) -> Vec<f64> {
    let lw = weak_lambda_bound(n);
    std::iter::once(0.0)
        .chain((0..16).map(|k| lw * 10f64.powf(-3.0 + 5.0 * k as f64 / 15.0)))
        .collect()
}

/// Weak learners available to a trainer.
#[derive(Clone, Debug)]
pub enum StumpPool {
    /// Thresholds are refit against the current sample weights every round.
    Refit(StumpFitter),
    /// A fixed dictionary with its training-set predictions.
    Fixed {
        dictionary: Dictionary,
        predictions: PredictionMatrix,
        labels: Vec<i8>,
    },
}

impl StumpPool {
    pub fn refit(train: &Dataset, orders: Orders) -> Self {
        StumpPool::Refit(StumpFitter::new(train, orders))
    }

    pub fn fixed(dictionary: Dictionary, train: &Dataset) -> Self {
        let predictions = PredictionMatrix::from_stumps(dictionary.stumps(), train);
        let labels = train.samples().iter().map(|s| s.label).collect();
        StumpPool::Fixed {
            dictionary,
            predictions,
            labels,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            StumpPool::Refit(f) => f.len(),
            StumpPool::Fixed { dictionary, .. } => dictionary.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn fit(&self, weights: &SampleWeights) -> Result<FittedDictionary> {
        match self {
            StumpPool::Refit(f) => f.fit(weights),
            StumpPool::Fixed {
                dictionary,
                predictions,
                labels,
            } => {
                if weights.len() != labels.len() {
                    return Err(Error::DimensionMismatch {
                        expected: labels.len(),
                        actual: weights.len(),
                    });
                }
                let w = weights.as_slice();
                let errors = par::map_indices(dictionary.len(), |i| {
                    (0..labels.len())
                        .filter(|&s| predictions.get(s, i) != labels[s])
                        .map(|s| w[s])
                        .sum()
                });
                Ok(FittedDictionary {
                    dictionary: dictionary.clone(),
                    errors,
                })
            }
        }
    }
}

/// One λ value of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaResult {
    pub lambda: f64,
    pub selected: usize,
    pub objective: f64,
    pub train_error: f64,
    pub validation_error: f64,
}

/// One boosting round, inner-loop iteration, or outer-loop pass.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// Outer-loop pass (1-based); 0 for AdaBoost and plain inner loops.
    pub pass: usize,
    /// Iteration within the pass (1-based); 0 marks an outer-pass summary.
    pub iteration: usize,
    /// Weak learners in the classifier so far.
    pub total_stumps: usize,
    /// Weak learners chosen by this iteration's optimization.
    pub selected: usize,
    pub lambda: Option<f64>,
    pub objective: Option<f64>,
    pub alpha: Option<f64>,
    pub weighted_error: Option<f64>,
    pub train_error: f64,
    pub validation_error: f64,
    pub solver_evaluations: u64,
    #[serde(skip)]
    pub solver_time: Duration,
    #[serde(skip)]
    pub sweep: Vec<LambdaResult>,
}

impl IterationRecord {
    fn new(pass: usize, iteration: usize) -> Self {
        Self {
            pass,
            iteration,
            total_stumps: 0,
            selected: 0,
            lambda: None,
            objective: None,
            alpha: None,
            weighted_error: None,
            train_error: 0.0,
            validation_error: 0.0,
            solver_evaluations: 0,
            solver_time: Duration::ZERO,
            sweep: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainReport {
    pub algorithm: String,
    pub records: Vec<IterationRecord>,
    pub train_error: f64,
    pub validation_error: f64,
    pub test_error: f64,
    pub weak_learners: usize,
    /// Boosting rounds for AdaBoost; inner iterations summed over passes for QBoost.
    pub iterations: usize,
    pub wall_time: Duration,
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

impl TrainReport {
    /// One row per record; timing is left out so the file is reproducible.
    pub fn write_csv(&self, mut out: impl std::io::Write) -> Result<()> {
        writeln!(
            out,
            "pass,iteration,total_stumps,selected,lambda,objective,alpha,weighted_error,train_error,validation_error,solver_evaluations"
        )?;
        for r in &self.records {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                r.pass,
                r.iteration,
                r.total_stumps,
                r.selected,
                opt(r.lambda),
                opt(r.objective),
                opt(r.alpha),
                opt(r.weighted_error),
                r.train_error,
                r.validation_error,
                r.solver_evaluations
            )?;
        }
        Ok(())
    }

    fn finish(
        algorithm: &str,
        records: Vec<IterationRecord>,
        classifier: &StrongClassifier,
        split: &SplitDataset,
        iterations: usize,
        start: Instant,
    ) -> Result<Self> {
        Ok(Self {
            algorithm: algorithm.to_string(),
            records,
            train_error: test_error(classifier, &split.train)?,
            validation_error: test_error(classifier, &split.validation)?,
            test_error: test_error(classifier, &split.test)?,
            weak_learners: classifier.len(),
            iterations,
            wall_time: start.elapsed(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdaBoostConfig {
    /// Stop when validation error has not improved for this many rounds.
    pub patience: usize,
    /// Hard cap on rounds.
    pub max_rounds: usize,
}

impl Default for AdaBoostConfig {
    fn default() -> Self {
        Self {
            patience: 400,
            max_rounds: 20_000,
        }
    }
}

fn check_split(split: &SplitDataset) -> Result<()> {
    let dim = split.train.dim();
    for d in [&split.validation, &split.test] {
        if d.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: d.dim(),
            });
        }
    }
    Ok(())
}

fn predictions(stump: &Stump, data: &Dataset) -> Vec<f64> {
    data.samples().iter().map(|s| f64::from(stump.predict(&s.features))).collect()
}

/// Discrete AdaBoost. Each round picks the stump with the smallest weighted
/// error `ε_t` (clamped to `[10⁻¹², 1 − 10⁻¹²]`), sets
/// `α_t = ½·ln((1 − ε_t)/ε_t)` and reweights `d(s) ∝ d(s)·exp(−α_t y_s h_t(x_s))`.
///
/// Stops when validation error has not improved for `patience` rounds, when
/// no stump beats chance, or after a perfect round. The returned classifier
/// is truncated at the round with the lowest validation error (earliest on
/// ties) and has `θ = 0`.
pub fn adaboost_train(
    pool: &StumpPool,
    split: &SplitDataset,
    config: &AdaBoostConfig,
) -> Result<(StrongClassifier, TrainReport)> {
    let start = Instant::now();
    if pool.is_empty() {
        return Err(Error::invalid("empty dictionary"));
    }
    if config.patience == 0 {
        return Err(Error::invalid("patience must be positive"));
    }
    check_split(split)?;
    let y_train = split.train.labels();
    let y_val = split.validation.labels();
    let mut d = SampleWeights::uniform(split.train.len())?;
    let mut train_scores = vec![0.0; y_train.len()];
    let mut val_scores = vec![0.0; y_val.len()];
    let mut terms: Vec<WeightedStump> = Vec::new();
    let mut records = Vec::new();
    let mut best = (f64::INFINITY, 0usize);
    let mut since_best = 0;
    for round in 1..=config.max_rounds {
        let fit = pool.fit(&d)?;
        let pick = rank_by_error(&fit.errors, 1, &BTreeSet::new())?[0];
        let eps = fit.errors[pick];
        if eps >= 0.5 {
            break;
        }
        let clamped = eps.clamp(EPS_CLAMP, 1.0 - EPS_CLAMP);
        let alpha = 0.5 * ((1.0 - clamped) / clamped).ln();
        let stump = fit.dictionary.stumps()[pick];

        let h_train = predictions(&stump, &split.train);
        let raw = d
            .as_slice()
            .iter()
            .zip(h_train.iter().zip(&y_train))
            .map(|(w, (h, y))| w * (-alpha * y * h).exp())
            .collect();
        d = SampleWeights::normalized(raw)?;
        for (acc, h) in train_scores.iter_mut().zip(&h_train) {
            *acc += alpha * h;
        }
        for (acc, s) in val_scores.iter_mut().zip(split.validation.samples()) {
            *acc += alpha * f64::from(stump.predict(&s.features));
        }
        terms.push(WeightedStump { stump, alpha });

        let mut rec = IterationRecord::new(0, round);
        rec.total_stumps = terms.len();
        rec.selected = 1;
        rec.alpha = Some(alpha);
        rec.weighted_error = Some(eps);
        rec.train_error = error_rate(&train_scores, 0.0, &y_train);
        rec.validation_error = error_rate(&val_scores, 0.0, &y_val);
        if rec.validation_error < best.0 {
            best = (rec.validation_error, round);
            since_best = 0;
        } else {
            since_best += 1;
        }
        records.push(rec);
        if eps <= EPS_CLAMP || since_best >= config.patience {
            break;
        }
    }
    let rounds = records.len();
    terms.truncate(best.1);
    let classifier = StrongClassifier {
        terms,
        kappa: 1.0,
        theta: 0.0,
    };
    let report = TrainReport::finish("adaboost", records, &classifier, split, rounds, start)?;
    Ok((classifier, report))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionMode {
    /// Keep the previous selection as candidates and fill the free slots.
    Augment,
    /// Draw a fresh best-`Q` candidate set every iteration.
    #[default]
    ReplaceAll,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QBoostConfig {
    /// Variables per optimization.
    pub q: usize,
    /// λ values to sweep; `None` uses [`default_lambda_grid`] for `Q`.
    pub lambdas: Option<Vec<f64>>,
    pub solver: SolverChoice,
    pub mode: SelectionMode,
    /// κ = scale / (number of summed classifiers).
    pub scale: f64,
    /// Iterations (inner) or passes (outer) without strict validation improvement.
    pub patience: usize,
    pub max_iterations: usize,
    pub max_passes: usize,
}

impl Default for QBoostConfig {
    fn default() -> Self {
        Self {
            q: 32,
            lambdas: None,
            solver: SolverChoice::default(),
            mode: SelectionMode::default(),
            scale: 2.0,
            patience: 2,
            max_iterations: 50,
            max_passes: 200,
        }
    }
}

impl QBoostConfig {
    /// λ values in ascending order.
    pub fn lambda_grid(&self) -> Result<Vec<f64>> {
        let mut grid = self.lambdas.clone().unwrap_or_else(|| default_lambda_grid(self.q));
        if grid.is_empty() {
            return Err(Error::invalid("lambda list is empty"));
        }
        if grid.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
            return Err(Error::invalid("lambdas must be finite and non-negative"));
        }
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        Ok(grid)
    }

    fn validate(&self, pool: &StumpPool) -> Result<()> {
        if self.q == 0 || self.q > pool.len() {
            return Err(Error::invalid(format!(
                "Q = {} must be between 1 and the dictionary size {}",
                self.q,
                pool.len()
            )));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::invalid("scale must be positive"));
        }
        if self.patience == 0 || self.max_iterations == 0 || self.max_passes == 0 {
            return Err(Error::invalid("patience and iteration caps must be positive"));
        }
        Ok(())
    }
}

/// A partial classifier that stays fixed while an inner loop runs.
struct Frozen<'a> {
    train: &'a [f64],
    validation: &'a [f64],
    count: usize,
}

struct InnerOutcome {
    stumps: Vec<Stump>,
    records: Vec<IterationRecord>,
}

struct SweepPoint {
    result: LambdaResult,
    weights: Vec<bool>,
    evaluations: u64,
    time: Duration,
}

/// Algorithm 1 body, optionally on top of a frozen prefix.
fn run_inner(
    pool: &StumpPool,
    split: &SplitDataset,
    config: &QBoostConfig,
    lambdas: &[f64],
    frozen: &Frozen<'_>,
    initial: SampleWeights,
    pass: usize,
) -> Result<InnerOutcome> {
    let y_train = split.train.labels();
    let y_val = split.validation.labels();
    let kappa = config.scale / (frozen.count + config.q) as f64;
    let mut d = initial;
    let mut retained: Vec<(usize, Stump)> = Vec::new();
    let mut records = Vec::new();
    let mut best: Option<(f64, Vec<Stump>)> = None;
    let mut since_best = 0;

    for iteration in 1..=config.max_iterations {
        let fit = pool.fit(&d)?;
        let mut candidates: Vec<(usize, Stump)> = match config.mode {
            SelectionMode::ReplaceAll => Vec::new(),
            SelectionMode::Augment => retained.clone(),
        };
        let exclude: BTreeSet<usize> = candidates.iter().map(|c| c.0).collect();
        let fresh = rank_by_error(&fit.errors, config.q - candidates.len(), &exclude)?;
        candidates.extend(fresh.into_iter().map(|i| (i, fit.dictionary.stumps()[i])));
        let stumps: Vec<Stump> = candidates.iter().map(|c| c.1).collect();
        let h_train = PredictionMatrix::from_stumps(&stumps, &split.train);
        let h_val = PredictionMatrix::from_stumps(&stumps, &split.validation);

        let sweep = par::map_slice(lambdas, |&lambda| -> Result<SweepPoint> {
            let qubo = build_training_qubo(&h_train, &y_train, kappa, lambda, Some(frozen.train))?;
            let sol = config.solver.solve(&qubo)?;
            let train_sum: Vec<f64> = h_train
                .scores(&sol.assignment)
                .iter()
                .zip(frozen.train)
                .map(|(a, f)| a + f)
                .collect();
            let val_sum: Vec<f64> = h_val
                .scores(&sol.assignment)
                .iter()
                .zip(frozen.validation)
                .map(|(a, f)| a + f)
                .collect();
            let selected = sol.assignment.iter().filter(|b| **b).count();
            // objective recomputed from the integer scores, independent of variable order
            let objective = train_sum
                .iter()
                .zip(&y_train)
                .map(|(a, y)| (kappa * a - y).powi(2))
                .sum::<f64>()
                + lambda * selected as f64;
            Ok(SweepPoint {
                result: LambdaResult {
                    lambda,
                    selected,
                    objective,
                    train_error: error_rate(&train_sum, 0.0, &y_train),
                    validation_error: error_rate(&val_sum, 0.0, &y_val),
                },
                weights: sol.assignment,
                evaluations: sol.evaluations,
                time: sol.wall_time,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

        // smallest validation error, ties to the smaller λ
        let chosen = sweep
            .iter()
            .enumerate()
            .min_by(|a, b| {
                a.1.result
                    .validation_error
                    .total_cmp(&b.1.result.validation_error)
                    .then(a.0.cmp(&b.0))
            })
            .map(|(i, _)| i)
            .expect("non-empty sweep");
        let point = &sweep[chosen];
        let selected: Vec<(usize, Stump)> = candidates
            .iter()
            .zip(&point.weights)
            .filter(|(_, on)| **on)
            .map(|(c, _)| *c)
            .collect();

        let total = frozen.count + selected.len();
        let mean_scores: Vec<f64> = if total == 0 {
            vec![0.0; y_train.len()]
        } else {
            h_train
                .scores(&point.weights)
                .iter()
                .zip(frozen.train)
                .map(|(a, f)| (a + f) / total as f64)
                .collect()
        };
        d = update_sample_weights(&d, &mean_scores, &y_train)?;

        let mut rec = IterationRecord::new(pass, iteration);
        rec.total_stumps = total;
        rec.selected = selected.len();
        rec.lambda = Some(point.result.lambda);
        rec.objective = Some(point.result.objective);
        rec.train_error = point.result.train_error;
        rec.validation_error = point.result.validation_error;
        rec.solver_evaluations = sweep.iter().map(|p| p.evaluations).sum();
        rec.solver_time = sweep.iter().map(|p| p.time).sum();
        rec.sweep = sweep.iter().map(|p| p.result.clone()).collect();
        let val = rec.validation_error;
        records.push(rec);

        if best.as_ref().is_none_or(|b| val < b.0) {
            best = Some((val, selected.iter().map(|c| c.1).collect()));
            since_best = 0;
        } else {
            since_best += 1;
        }
        retained = selected;
        if since_best >= config.patience {
            break;
        }
    }
    Ok(InnerOutcome {
        stumps: best.map(|b| b.1).unwrap_or_default(),
        records,
    })
}

/// QBoost inner loop: at most `Q` weak classifiers in the final classifier.
pub fn inner_loop_train(
    pool: &StumpPool,
    split: &SplitDataset,
    config: &QBoostConfig,
) -> Result<(StrongClassifier, TrainReport)> {
    let start = Instant::now();
    config.validate(pool)?;
    check_split(split)?;
    let lambdas = config.lambda_grid()?;
    let zeros_train = vec![0.0; split.train.len()];
    let zeros_val = vec![0.0; split.validation.len()];
    let frozen = Frozen {
        train: &zeros_train,
        validation: &zeros_val,
        count: 0,
    };
    let outcome = run_inner(
        pool,
        split,
        config,
        &lambdas,
        &frozen,
        SampleWeights::uniform(split.train.len())?,
        0,
    )?;
    let kappa = config.scale / config.q as f64;
    let mut classifier = StrongClassifier::unweighted(&outcome.stumps, kappa, 0.0);
    classifier.theta = compute_theta(&classifier.terms, &split.train);
    let iterations = outcome.records.len();
    let report = TrainReport::finish("qboost-inner", outcome.records, &classifier, split, iterations, start)?;
    Ok((classifier, report))
}

/// QBoost outer loop: repeatedly runs the inner loop against the frozen
/// classifier built so far, with `κ = scale / (T_outer + Q)`, and appends the
/// selected weak classifiers.
pub fn outer_loop_train(
    pool: &StumpPool,
    split: &SplitDataset,
    config: &QBoostConfig,
) -> Result<(StrongClassifier, TrainReport)> {
    let start = Instant::now();
    config.validate(pool)?;
    check_split(split)?;
    let lambdas = config.lambda_grid()?;
    let y_train = split.train.labels();
    let y_val = split.validation.labels();
    let mut d_outer = SampleWeights::uniform(split.train.len())?;
    let mut stumps: Vec<Stump> = Vec::new();
    let mut f_train = vec![0.0; y_train.len()];
    let mut f_val = vec![0.0; y_val.len()];
    let mut records = Vec::new();
    let mut best = (f64::INFINITY, 0usize);
    let mut since_best = 0;
    let mut inner_iterations = 0;

    for pass in 1..=config.max_passes {
        let frozen = Frozen {
            train: &f_train,
            validation: &f_val,
            count: stumps.len(),
        };
        let inner = run_inner(pool, split, config, &lambdas, &frozen, d_outer.clone(), pass)?;
        inner_iterations += inner.records.len();
        let evaluations = inner.records.iter().map(|r| r.solver_evaluations).sum();
        let solver_time = inner.records.iter().map(|r| r.solver_time).sum();
        records.extend(inner.records);
        if inner.stumps.is_empty() {
            // the next pass would see identical inputs
            break;
        }
        for h in &inner.stumps {
            for (acc, s) in f_train.iter_mut().zip(split.train.samples()) {
                *acc += f64::from(h.predict(&s.features));
            }
            for (acc, s) in f_val.iter_mut().zip(split.validation.samples()) {
                *acc += f64::from(h.predict(&s.features));
            }
        }
        stumps.extend(&inner.stumps);
        let t_outer = stumps.len() as f64;
        let mean: Vec<f64> = f_train.iter().map(|f| f / t_outer).collect();
        d_outer = update_sample_weights(&d_outer, &mean, &y_train)?;

        let mut rec = IterationRecord::new(pass, 0);
        rec.total_stumps = stumps.len();
        rec.selected = inner.stumps.len();
        rec.train_error = error_rate(&f_train, 0.0, &y_train);
        rec.validation_error = error_rate(&f_val, 0.0, &y_val);
        rec.solver_evaluations = evaluations;
        rec.solver_time = solver_time;
        let val = rec.validation_error;
        records.push(rec);
        if val < best.0 {
            best = (val, stumps.len());
            since_best = 0;
        } else {
            since_best += 1;
        }
        if since_best >= config.patience {
            break;
        }
    }
    stumps.truncate(best.1);
    let kappa = config.scale / (stumps.len() + config.q) as f64;
    let mut classifier = StrongClassifier::unweighted(&stumps, kappa, 0.0);
    classifier.theta = compute_theta(&classifier.terms, &split.train);
    let report = TrainReport::finish("qboost-outer", records, &classifier, split, inner_iterations, start)?;
    Ok((classifier, report))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BaselineConfig {
    pub lambdas: Option<Vec<f64>>,
    pub solver: SolverChoice,
    pub scale: f64,
    /// Optimize the global threshold as binary-expanded bits instead of
    /// setting it to the mean training score.
    pub co_optimize_theta: bool,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            lambdas: None,
            solver: SolverChoice::default(),
            scale: 2.0,
            co_optimize_theta: false,
        }
    }
}

/// One optimization over every weak classifier of a fixed dictionary, with
/// λ chosen on the validation set.
pub fn baseline_train(
    dictionary: &Dictionary,
    split: &SplitDataset,
    config: &BaselineConfig,
) -> Result<(StrongClassifier, TrainReport)> {
    let start = Instant::now();
    if dictionary.is_empty() {
        return Err(Error::invalid("empty dictionary"));
    }
    check_split(split)?;
    let n = dictionary.len();
    let lambdas = QBoostConfig {
        q: n,
        lambdas: config.lambdas.clone(),
        ..QBoostConfig::default()
    }
    .lambda_grid()?;
    let kappa = config.scale / n as f64;
    let y = split.train.labels();
    let h = PredictionMatrix::from_stumps(dictionary.stumps(), &split.train);
    let runs = par::map_slice(&lambdas, |&lambda| -> Result<(StrongClassifier, IterationRecord)> {
        let (weights, theta, energy, sol) = if config.co_optimize_theta {
            let (qubo, layout) = build_threshold_qubo(&h, &y, kappa, lambda)?;
            let sol = config.solver.solve(&qubo)?;
            let bits = layout.slice(Block::ThresholdBits, &sol.assignment);
            let k = bits.len() - 1;
            let value: f64 = bits
                .iter()
                .enumerate()
                .filter(|(_, b)| **b)
                .map(|(i, _)| (1u64 << i) as f64)
                .sum();
            let theta = value - ((1u64 << k) - 1) as f64;
            (layout.slice(Block::Weights, &sol.assignment).to_vec(), Some(theta), sol.energy, sol)
        } else {
            let qubo = build_training_qubo(&h, &y, kappa, lambda, None)?;
            let sol = config.solver.solve(&qubo)?;
            (sol.assignment.clone(), None, sol.energy, sol)
        };
        let chosen: Vec<Stump> = dictionary
            .stumps()
            .iter()
            .zip(&weights)
            .filter(|(_, on)| **on)
            .map(|(s, _)| *s)
            .collect();
        let mut classifier = StrongClassifier::unweighted(&chosen, kappa, 0.0);
        classifier.theta = theta.unwrap_or_else(|| compute_theta(&classifier.terms, &split.train));
        let mut rec = IterationRecord::new(0, 1);
        rec.total_stumps = chosen.len();
        rec.selected = chosen.len();
        rec.lambda = Some(lambda);
        rec.objective = Some(energy);
        rec.train_error = test_error(&classifier, &split.train)?;
        rec.validation_error = test_error(&classifier, &split.validation)?;
        rec.solver_evaluations = sol.evaluations;
        rec.solver_time = sol.wall_time;
        Ok((classifier, rec))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let best = runs
        .iter()
        .enumerate()
        .min_by(|a, b| {
            a.1 .1
                .validation_error
                .total_cmp(&b.1 .1.validation_error)
                .then(a.0.cmp(&b.0))
        })
        .map(|(i, _)| i)
        .expect("non-empty sweep");
    let classifier = runs[best].0.clone();
    let mut record = runs[best].1.clone();
    record.sweep = runs
        .iter()
        .map(|(_, r)| LambdaResult {
            lambda: r.lambda.unwrap_or(0.0),
            selected: r.selected,
            objective: r.objective.unwrap_or(0.0),
            train_error: r.train_error,
            validation_error: r.validation_error,
        })
        .collect();
    let report = TrainReport::finish("qboost-baseline", vec![record], &classifier, split, 1, start)?;
    Ok((classifier, report))
}
