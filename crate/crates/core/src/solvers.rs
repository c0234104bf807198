//! Exact and heuristic minimization of binary objectives.

use std::time::{Duration, Instant};

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::par;
use crate::qubo::{Objective, PseudoBooleanProblem, QuboProblem};
use crate::rng::rng_from_seed;
use crate::{Error, Result};

/// Cost guard for enumeration.
pub const MAX_EXHAUSTIVE_VARS: usize = 25;

/// Full re-evaluation interval for incrementally maintained energies.
const RESYNC_INTERVAL: u64 = 1024;

#[derive(Clone, Debug, PartialEq)]
pub struct SolverResult {
    pub assignment: Vec<bool>,
    pub energy: f64,
    pub evaluations: u64,
    pub wall_time: Duration,
}

/// Objectives whose single-bit flips can be scored without a full pass.
trait FlipDelta: Objective {
    fn flip_delta(&self, x: &[bool], bit: usize) -> f64;

    /// Upper bound on |energy|, used to scale tie tolerances.
    fn magnitude(&self) -> f64;
}

impl FlipDelta for QuboProblem {
    fn flip_delta(&self, x: &[bool], bit: usize) -> f64 {
        self.delta_unchecked(x, bit)
    }

    fn magnitude(&self) -> f64 {
        self.offset().abs()
            + self.linear().iter().map(|v| v.abs()).sum::<f64>()
            + self.quadratic().values().map(|v| v.abs()).sum::<f64>()
    }
}

/// Pseudo-Boolean problem with terms indexed by variable.
struct IndexedPb<'a> {
    problem: &'a PseudoBooleanProblem,
    by_var: Vec<Vec<(&'a [usize], f64)>>,
}

impl<'a> IndexedPb<'a> {
    fn new(problem: &'a PseudoBooleanProblem) -> Self {
        let mut by_var = vec![Vec::new(); problem.n()];
        for (key, c) in problem.terms() {
            for &v in key {
                by_var[v].push((key.as_slice(), *c));
            }
        }
        Self { problem, by_var }
    }
}

impl Objective for IndexedPb<'_> {
    fn num_vars(&self) -> usize {
        self.problem.n()
    }

    fn energy_unchecked(&self, x: &[bool]) -> f64 {
        self.problem.energy_unchecked(x)
    }
}

impl FlipDelta for IndexedPb<'_> {
    fn flip_delta(&self, x: &[bool], bit: usize) -> f64 {
        let field: f64 = self.by_var[bit]
            .iter()
            .filter(|(key, _)| key.iter().all(|&v| v == bit || x[v]))
            .map(|(_, c)| c)
            .sum();
        if x[bit] {
            -field
        } else {
            field
        }
    }

    fn magnitude(&self) -> f64 {
        self.problem.offset().abs() + self.problem.terms().values().map(|v| v.abs()).sum::<f64>()
    }
}

/// Global minimum by enumeration; ties go to the lexicographically smallest
/// assignment (bit 0 most significant).
pub fn solve_exhaustive(problem: &QuboProblem) -> Result<SolverResult> {
    enumerate(problem)
}

pub fn solve_exhaustive_pb(problem: &PseudoBooleanProblem) -> Result<SolverResult> {
    enumerate(&IndexedPb::new(problem))
}

fn enumerate<P: FlipDelta>(problem: &P) -> Result<SolverResult> {
    let n = problem.num_vars();
    if n > MAX_EXHAUSTIVE_VARS {
        return Err(Error::TooLarge {
            what: "exhaustive search",
            n,
            limit: MAX_EXHAUSTIVE_VARS,
        });
    }
    let start = Instant::now();
    let tol = 1e-12 * (1.0 + problem.magnitude());
    // the first `prefix` variables are fixed per chunk; each chunk walks the
    // remaining ones in lexicographic order
    let prefix = n.min(6).min(n.saturating_sub(10));
    let suffix = n - prefix;
    let chunks = par::map_indices(1 << prefix, |c| {
        let mut x: Vec<bool> = (0..n)
            .map(|i| i < prefix && (c >> (prefix - 1 - i)) & 1 == 1)
            .collect();
        let mut energy = problem.energy_unchecked(&x);
        let mut best = (energy, x.clone());
        for step in 1..(1u64 << suffix) {
            // binary increment over the suffix; variable n−1 is the lowest bit
            let mut i = n - 1;
            while x[i] {
                energy += problem.flip_delta(&x, i);
                x[i] = false;
                i -= 1;
            }
            energy += problem.flip_delta(&x, i);
            x[i] = true;
            if step % RESYNC_INTERVAL == 0 {
                energy = problem.energy_unchecked(&x);
            }
            if energy < best.0 - tol {
                best = (energy, x.clone());
            }
        }
        best
    });
    let mut best: Option<(f64, Vec<bool>)> = None;
    for (_, x) in chunks {
        let e = problem.energy_unchecked(&x);
        if best.as_ref().is_none_or(|b| e < b.0 - tol) {
            best = Some((e, x));
        }
    }
    let (energy, assignment) = best.expect("at least one chunk");
    Ok(SolverResult {
        assignment,
        energy,
        evaluations: 1u64 << n,
        wall_time: start.elapsed(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TabuConfig {
    pub tenure: usize,
    pub max_iterations: usize,
    pub restarts: usize,
    pub seed: u64,
    pub stall_limit: usize,
}

impl TabuConfig {
    /// tenure = min(20, ⌈n/4⌉), 200·n iterations, 10 restarts, stall after 50·n.
    pub fn defaults(n: usize, seed: u64) -> Self {
        let n = n.max(1);
        Self {
            tenure: 20.min(n.div_ceil(4)),
            max_iterations: 200 * n,
            restarts: 10,
            seed,
            stall_limit: 50 * n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tenure == 0 || self.max_iterations == 0 || self.restarts == 0 || self.stall_limit == 0 {
            return Err(Error::invalid("tabu counts must all be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub restart: usize,
    pub iteration: usize,
    pub incumbent: f64,
}

struct RestartOutcome {
    energy: f64,
    assignment: Vec<bool>,
    evaluations: u64,
    trace: Vec<TraceRow>,
}

fn tabu_restart(problem: &QuboProblem, config: &TabuConfig, restart: usize, trace: bool) -> RestartOutcome {
    let n = problem.n();
    let tol = 1e-12 * (1.0 + problem.magnitude());
    let mut rng = rng_from_seed(config.seed.wrapping_add(restart as u64));
    let mut x: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
    let mut energy = problem.energy_unchecked(&x);
    let mut delta: Vec<f64> = (0..n).map(|j| problem.delta_unchecked(&x, j)).collect();
    let mut tabu_until = vec![0usize; n];
    let mut best = (energy, x.clone());
    let mut stall = 0;
    let mut evaluations = n as u64;
    let mut rows = Vec::new();
    for it in 1..=config.max_iterations {
        // best admissible flip; a tabu flip is admissible when it beats the incumbent
        let mut pick: Option<usize> = None;
        let mut fallback = 0;
        for j in 0..n {
            if delta[j] < delta[fallback] {
                fallback = j;
            }
            let admissible = tabu_until[j] <= it || energy + delta[j] < best.0 - tol;
            if admissible && pick.is_none_or(|p| delta[j] < delta[p]) {
                pick = Some(j);
            }
        }
        let j = pick.unwrap_or(fallback);
        evaluations += n as u64;

        energy += delta[j];
        let was_on = x[j];
        x[j] = !was_on;
        delta[j] = -delta[j];
        let sign = if was_on { -1.0 } else { 1.0 };
        for &(k, q) in problem.neighbors(j) {
            delta[k] += if x[k] { -q * sign } else { q * sign };
        }
        tabu_until[j] = it + config.tenure;

        if (it as u64).is_multiple_of(RESYNC_INTERVAL) {
            energy = problem.energy_unchecked(&x);
            for (k, d) in delta.iter_mut().enumerate() {
                *d = problem.delta_unchecked(&x, k);
            }
        }
        if energy < best.0 - tol {
            best = (energy, x.clone());
            stall = 0;
        } else {
            stall += 1;
        }
        if trace {
            rows.push(TraceRow {
                restart,
                iteration: it,
                incumbent: best.0,
            });
        }
        if stall >= config.stall_limit {
            break;
        }
    }
    RestartOutcome {
        energy: problem.energy_unchecked(&best.1),
        assignment: best.1,
        evaluations,
        trace: rows,
    }
}

fn run_tabu(problem: &QuboProblem, config: &TabuConfig, trace: bool) -> Result<(SolverResult, Vec<TraceRow>)> {
    config.validate()?;
    if problem.n() == 0 {
        return Err(Error::invalid("tabu search needs at least one variable"));
    }
    let start = Instant::now();
    let outcomes = par::map_indices(config.restarts, |r| tabu_restart(problem, config, r, trace));
    let evaluations = outcomes.iter().map(|o| o.evaluations).sum();
    let mut rows = Vec::new();
    let mut best: Option<RestartOutcome> = None;
    for mut o in outcomes {
        rows.append(&mut o.trace);
        if best.as_ref().is_none_or(|b| o.energy < b.energy) {
            best = Some(o);
        }
    }
    let best = best.expect("restarts >= 1");
    Ok((
        SolverResult {
            assignment: best.assignment,
            energy: best.energy,
            evaluations,
            wall_time: start.elapsed(),
        },
        rows,
    ))
}

/// Single-bit-flip tabu search with best-improvement moves and aspiration.
///
/// Restart `i` starts from a random assignment drawn with seed `seed + i`;
/// the result is the lowest-energy restart (earliest on ties).
pub fn solve_tabu(problem: &QuboProblem, config: &TabuConfig) -> Result<SolverResult> {
    run_tabu(problem, config, false).map(|(r, _)| r)
}

/// [`solve_tabu`] plus the per-iteration incumbent energy of every restart.
pub fn solve_tabu_traced(problem: &QuboProblem, config: &TabuConfig) -> Result<(SolverResult, Vec<TraceRow>)> {
    run_tabu(problem, config, true)
}

/// Writes `restart,iteration,incumbent` rows.
pub fn write_trace_csv(rows: &[TraceRow], mut out: impl std::io::Write) -> Result<()> {
    writeln!(out, "restart,iteration,incumbent")?;
    for r in rows {
        writeln!(out, "{},{},{}", r.restart, r.iteration, r.incumbent)?;
    }
    Ok(())
}

/// Tabu settings that scale with problem size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TabuParams {
    pub seed: u64,
    /// Overrides the size-dependent tenure.
    pub tenure: Option<usize>,
    pub iterations_per_var: usize,
    pub restarts: usize,
    pub stall_per_var: usize,
}

impl Default for TabuParams {
    fn default() -> Self {
        Self {
            seed: 0,
            tenure: None,
            iterations_per_var: 200,
            restarts: 10,
            stall_per_var: 50,
        }
    }
}

impl TabuParams {
    pub fn config(&self, n: usize) -> TabuConfig {
        let base = TabuConfig::defaults(n, self.seed);
        TabuConfig {
            tenure: self.tenure.unwrap_or(base.tenure),
            max_iterations: self.iterations_per_var * n.max(1),
            restarts: self.restarts,
            seed: self.seed,
            stall_limit: self.stall_per_var * n.max(1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverChoice {
    Exhaustive,
    Tabu(TabuParams),
}

impl Default for SolverChoice {
    fn default() -> Self {
        SolverChoice::Tabu(TabuParams::default())
    }
}

impl SolverChoice {
    pub fn solve(&self, problem: &QuboProblem) -> Result<SolverResult> {
        match self {
            SolverChoice::Exhaustive => solve_exhaustive(problem),
            SolverChoice::Tabu(p) => solve_tabu(problem, &p.config(problem.n())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SolverChoice::Exhaustive => "exhaustive",
            SolverChoice::Tabu(_) => "tabu",
        }
    }
}
