//! Training objectives as explicit binary optimization problems.
//!
//! All builders take a prediction matrix `H` (`S × N`, entries ±1) whose
//! column `i` holds weak classifier `h_i` evaluated on every training
//! sample, and labels `y ∈ {−1, +1}^S`.

use std::collections::BTreeMap;
use std::ops::Range;

use crate::data::Dataset;
use crate::par;
use crate::stumps::Stump;
use crate::{Error, Result};

/// `⌈log₂ n⌉` for `n ≥ 1`.
pub fn ceil_log2(n: usize) -> u32 {
    assert!(n >= 1);
    usize::BITS - (n - 1).leading_zeros()
}

/// Row-major `S × N` matrix of weak-classifier outputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredictionMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i8>,
}

impl PredictionMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<i8>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        if let Some(v) = data.iter().find(|v| **v != 1 && **v != -1) {
            return Err(Error::invalid(format!("prediction entries must be ±1, got {v}")));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<i8>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                expected: cols,
                actual: r.len(),
            });
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    /// Evaluates every stump on every sample.
    pub fn from_stumps(stumps: &[Stump], data: &Dataset) -> Self {
        let rows = par::map_slice(data.samples(), |s| {
            stumps.iter().map(|h| h.predict(&s.features)).collect::<Vec<i8>>()
        });
        Self {
            rows: data.len(),
            cols: stumps.len(),
            data: rows.concat(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, s: usize, i: usize) -> i8 {
        self.data[s * self.cols + i]
    }

    pub fn row(&self, s: usize) -> &[i8] {
        &self.data[s * self.cols..(s + 1) * self.cols]
    }

    /// `Σ_i w_i H_{si}` for every sample.
    pub fn scores(&self, w: &[bool]) -> Vec<f64> {
        (0..self.rows)
            .map(|s| {
                self.row(s)
                    .iter()
                    .zip(w)
                    .filter(|(_, on)| **on)
                    .map(|(h, _)| f64::from(*h))
                    .sum()
            })
            .collect()
    }
}

fn check_labels(h: &PredictionMatrix, y: &[f64]) -> Result<()> {
    if y.len() != h.rows() {
        return Err(Error::DimensionMismatch {
            expected: h.rows(),
            actual: y.len(),
        });
    }
    if y.iter().any(|v| *v != 1.0 && *v != -1.0) {
        return Err(Error::invalid("labels must be ±1"));
    }
    if h.cols() == 0 {
        return Err(Error::invalid("prediction matrix has no columns"));
    }
    Ok(())
}

/// Evaluates a binary objective at an assignment.
pub trait Objective: Sync {
    fn num_vars(&self) -> usize;

    /// Energy without the length check.
    fn energy_unchecked(&self, x: &[bool]) -> f64;

    fn energy(&self, x: &[bool]) -> Result<f64> {
        if x.len() != self.num_vars() {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars(),
                actual: x.len(),
            });
        }
        Ok(self.energy_unchecked(x))
    }
}

/// `offset + Σ_i linear_i·x_i + Σ_{i<j} quadratic_ij·x_i·x_j` over `x ∈ {0,1}ⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuboProblem {
    n: usize,
    linear: Vec<f64>,
    quadratic: BTreeMap<(usize, usize), f64>,
    offset: f64,
    neighbors: Vec<Vec<(usize, f64)>>,
}

impl QuboProblem {
    pub fn new(
        linear: Vec<f64>,
        quadratic: BTreeMap<(usize, usize), f64>,
        offset: f64,
    ) -> Result<Self> {
        let n = linear.len();
        if !offset.is_finite() || linear.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("coefficients must be finite"));
        }
        let mut neighbors = vec![Vec::new(); n];
        for (&(i, j), &q) in &quadratic {
            if !(i < j && j < n) {
                return Err(Error::invalid(format!("quadratic key ({i}, {j}) must satisfy i < j < {n}")));
            }
            if !q.is_finite() {
                return Err(Error::invalid("coefficients must be finite"));
            }
            neighbors[i].push((j, q));
            neighbors[j].push((i, q));
        }
        Ok(Self {
            n,
            linear,
            quadratic,
            offset,
            neighbors,
        })
    }

    /// A problem with no coefficients at all.
    pub fn zero(n: usize) -> Self {
        Self::new(vec![0.0; n], BTreeMap::new(), 0.0).expect("valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    pub fn quadratic(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.quadratic
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// `(j, q_ij)` for every quadratic term touching `i`.
    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.neighbors[i]
    }

    /// Every coefficient multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.linear.iter().map(|v| v * factor).collect(),
            self.quadratic.iter().map(|(k, v)| (*k, v * factor)).collect(),
            self.offset * factor,
        )
    }

    #[inline]
    pub(crate) fn delta_unchecked(&self, x: &[bool], bit: usize) -> f64 {
        let field = self.linear[bit]
            + self.neighbors[bit]
                .iter()
                .filter(|(j, _)| x[*j])
                .map(|(_, q)| q)
                .sum::<f64>();
        if x[bit] {
            -field
        } else {
            field
        }
    }

    /// `energy(flip(x, bit)) − energy(x)` in O(degree of `bit`).
    pub fn incremental_delta(&self, x: &[bool], bit: usize) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: x.len(),
            });
        }
        if bit >= self.n {
            return Err(Error::invalid(format!("bit {bit} out of range for n = {}", self.n)));
        }
        Ok(self.delta_unchecked(x, bit))
    }
}

impl Objective for QuboProblem {
    fn num_vars(&self) -> usize {
        self.n
    }

    fn energy_unchecked(&self, x: &[bool]) -> f64 {
        let lin: f64 = self
            .linear
            .iter()
            .zip(x)
            .filter(|(_, on)| **on)
            .map(|(c, _)| c)
            .sum();
        let quad: f64 = self
            .quadratic
            .iter()
            .filter(|((i, j), _)| x[*i] && x[*j])
            .map(|(_, q)| q)
            .sum();
        self.offset + lin + quad
    }
}

/// Multilinear polynomial over binary variables with terms of degree ≤ 4.
#[derive(Clone, Debug, PartialEq)]
pub struct PseudoBooleanProblem {
    n: usize,
    terms: BTreeMap<Vec<usize>, f64>,
    offset: f64,
}

impl PseudoBooleanProblem {
    pub const MAX_DEGREE: usize = 4;

    pub fn new(n: usize, terms: BTreeMap<Vec<usize>, f64>, offset: f64) -> Result<Self> {
        if !offset.is_finite() {
            return Err(Error::invalid("coefficients must be finite"));
        }
        for (key, c) in &terms {
            if key.is_empty() || key.len() > Self::MAX_DEGREE {
                return Err(Error::invalid(format!("term {key:?} has unsupported degree")));
            }
            if !key.windows(2).all(|w| w[0] < w[1]) || key[key.len() - 1] >= n {
                return Err(Error::invalid(format!("term {key:?} must be strictly increasing and < {n}")));
            }
            if !c.is_finite() {
                return Err(Error::invalid("coefficients must be finite"));
            }
        }
        Ok(Self { n, terms, offset })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<Vec<usize>, f64> {
        &self.terms
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    /// Converts to a QUBO when no term exceeds degree 2.
    pub fn to_qubo(&self) -> Result<QuboProblem> {
        let mut linear = vec![0.0; self.n];
        let mut quadratic = BTreeMap::new();
        for (key, c) in &self.terms {
            match key.as_slice() {
                [i] => linear[*i] += c,
                [i, j] => *quadratic.entry((*i, *j)).or_insert(0.0) += c,
                _ => return Err(Error::invalid("problem has terms of degree > 2")),
            }
        }
        QuboProblem::new(linear, quadratic, self.offset)
    }
}

impl From<&QuboProblem> for PseudoBooleanProblem {
    fn from(q: &QuboProblem) -> Self {
        let mut terms: BTreeMap<Vec<usize>, f64> = q
            .linear
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(i, c)| (vec![i], *c))
            .collect();
        terms.extend(q.quadratic.iter().map(|(&(i, j), c)| (vec![i, j], *c)));
        Self {
            n: q.n,
            terms,
            offset: q.offset,
        }
    }
}

impl Objective for PseudoBooleanProblem {
    fn num_vars(&self) -> usize {
        self.n
    }

    fn energy_unchecked(&self, x: &[bool]) -> f64 {
        self.offset
            + self
                .terms
                .iter()
                .filter(|(k, _)| k.iter().all(|i| x[*i]))
                .map(|(_, c)| c)
                .sum::<f64>()
    }
}

/// Semantic role of a block of variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Block {
    /// `w_i`, one per weak classifier.
    Weights,
    /// Bits of the binary-expanded global threshold.
    ThresholdBits,
    /// Bits of the per-sample label magnitudes `ȳ_s`, sample-major.
    LabelBits,
    /// `e_s`: sample is flagged as misclassified.
    ErrorBits,
    /// `e_s⁺`: sample is classified correctly.
    CorrectBits,
    /// `e_s⁻`: sample is misclassified.
    WrongBits,
}

/// Contiguous, disjoint index ranges covering `[0, n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariableLayout {
    blocks: Vec<(Block, Range<usize>)>,
}

impl VariableLayout {
    fn from_sizes(sizes: &[(Block, usize)]) -> Self {
        let mut start = 0;
        let blocks = sizes
            .iter()
            .map(|&(b, len)| {
                let r = start..start + len;
                start += len;
                (b, r)
            })
            .collect();
        Self { blocks }
    }

    pub fn blocks(&self) -> &[(Block, Range<usize>)] {
        &self.blocks
    }

    pub fn range(&self, block: Block) -> Option<Range<usize>> {
        self.blocks.iter().find(|(b, _)| *b == block).map(|(_, r)| r.clone())
    }

    pub fn num_vars(&self) -> usize {
        self.blocks.last().map_or(0, |(_, r)| r.end)
    }

    /// The values of one block within a full assignment.
    pub fn slice<'a>(&self, block: Block, x: &'a [bool]) -> &'a [bool] {
        self.range(block).map_or(&[], |r| &x[r])
    }
}

/// Accumulates a multilinear polynomial, folding `x² = x`.
#[derive(Clone, Debug, Default)]
struct PolyBuilder {
    terms: BTreeMap<Vec<usize>, f64>,
    offset: f64,
}

impl PolyBuilder {
    fn add(&mut self, vars: &[usize], c: f64) {
        if c == 0.0 {
            return;
        }
        let mut key = vars.to_vec();
        key.sort_unstable();
        key.dedup();
        if key.is_empty() {
            self.offset += c;
        } else {
            *self.terms.entry(key).or_insert(0.0) += c;
        }
    }

    /// Adds `(constant + Σ coef·x_var)²`.
    fn add_squared_affine(&mut self, constant: f64, terms: &[(usize, f64)]) {
        self.offset += constant * constant;
        for (a, &(i, ci)) in terms.iter().enumerate() {
            self.add(&[i], ci * ci + 2.0 * constant * ci);
            for &(j, cj) in &terms[a + 1..] {
                self.add(&[i, j], 2.0 * ci * cj);
            }
        }
    }

    /// Adds the product of two polynomials given as `(monomial, coef)` lists.
    fn add_product(&mut self, lhs: &[(Vec<usize>, f64)], rhs: &[(Vec<usize>, f64)], scale: f64) {
        for (a, ca) in lhs {
            for (b, cb) in rhs {
                let vars: Vec<usize> = a.iter().chain(b).copied().collect();
                self.add(&vars, scale * ca * cb);
            }
        }
    }

    fn into_pseudo_boolean(self, n: usize) -> Result<PseudoBooleanProblem> {
        PseudoBooleanProblem::new(n, self.terms, self.offset)
    }

    fn into_qubo(self, n: usize) -> Result<QuboProblem> {
        self.into_pseudo_boolean(n)?.to_qubo()
    }
}

/// `Σ_s (κ·(F_s + Σ_i w_i H_si) − y_s)² + λ·Σ_i w_i`.
///
/// Coefficients come from the correlation sums `C_ij = Σ_s H_si H_sj` and
/// `b_i = Σ_s H_si (κF_s − y_s)`:
///
/// ```text
/// linear_i    = κ²·S + 2κ·b_i + λ
/// quadratic_ij = 2κ²·C_ij            (i < j)
/// offset      = Σ_s (κF_s − y_s)²
/// ```
///
/// `frozen_scores` holds `F_s`, the summed outputs of an already-fixed
/// partial classifier (zero when absent).
pub fn build_training_qubo(
    h: &PredictionMatrix,
    y: &[f64],
    kappa: f64,
    lambda: f64,
    frozen_scores: Option<&[f64]>,
) -> Result<QuboProblem> {
    check_labels(h, y)?;
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::invalid("kappa must be positive"));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid("lambda must be non-negative"));
    }
    if let Some(f) = frozen_scores {
        if f.len() != h.rows() {
            return Err(Error::DimensionMismatch {
                expected: h.rows(),
                actual: f.len(),
            });
        }
    }
    let (s_count, n) = (h.rows(), h.cols());
    let base: Vec<f64> = (0..s_count)
        .map(|s| kappa * frozen_scores.map_or(0.0, |f| f[s]) - y[s])
        .collect();
    let offset: f64 = base.iter().map(|r| r * r).sum();

    // column-major copy so each correlation is a contiguous dot product
    let columns: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..s_count).map(|s| f64::from(h.get(s, i))).collect())
        .collect();
    let rows = par::map_indices(n, |i| {
        let ci = &columns[i];
        let target: f64 = ci.iter().zip(&base).map(|(a, b)| a * b).sum();
        let corr: Vec<f64> = columns[i + 1..]
            .iter()
            .map(|cj| ci.iter().zip(cj).map(|(a, b)| a * b).sum())
            .collect();
        (target, corr)
    });
    let k2 = kappa * kappa;
    let mut linear = Vec::with_capacity(n);
    let mut quadratic = BTreeMap::new();
    for (i, (target, corr)) in rows.into_iter().enumerate() {
        linear.push(k2 * s_count as f64 + 2.0 * kappa * target + lambda);
        for (off, c) in corr.into_iter().enumerate() {
            if c != 0.0 {
                quadratic.insert((i, i + 1 + off), 2.0 * k2 * c);
            }
        }
    }
    QuboProblem::new(linear, quadratic, offset)
}

/// Training objective with the global threshold co-optimized as
/// `⌈log₂N⌉ + 1` binary-expanded bits:
///
/// ```text
/// Σ_s (κ·(Σ_i w_i h_i(x_s) − Σ_k Θ_k 2^k + 2^⌈log₂N⌉ − 1) − y_s)² + λ·Σ_i w_i
/// ```
pub fn build_threshold_qubo(
    h: &PredictionMatrix,
    y: &[f64],
    kappa: f64,
    lambda: f64,
) -> Result<(QuboProblem, VariableLayout)> {
    check_labels(h, y)?;
    if !(kappa > 0.0 && kappa.is_finite()) || !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid("kappa must be positive and lambda non-negative"));
    }
    let n = h.cols();
    let bits = ceil_log2(n) as usize;
    let layout = VariableLayout::from_sizes(&[(Block::Weights, n), (Block::ThresholdBits, bits + 1)]);
    let shift = ((1u64 << bits) - 1) as f64;
    let mut poly = PolyBuilder::default();
    let mut terms: Vec<(usize, f64)> = Vec::with_capacity(n + bits + 1);
    for s in 0..h.rows() {
        terms.clear();
        terms.extend((0..n).map(|i| (i, kappa * f64::from(h.get(s, i)))));
        terms.extend((0..=bits).map(|k| (n + k, -kappa * (1u64 << k) as f64)));
        poly.add_squared_affine(kappa * shift - y[s], &terms);
    }
    for i in 0..n {
        poly.add(&[i], lambda);
    }
    Ok((poly.into_qubo(layout.num_vars())?, layout))
}

/// Layout shared by the 0-1-loss objectives: `N` weights, `K = ⌈log₂N⌉`
/// label bits per sample, then the per-sample indicator blocks.
fn zero_one_layout(n: usize, samples: usize, indicators: &[Block]) -> (VariableLayout, usize) {
    let bits = ceil_log2(n) as usize;
    let mut sizes = vec![(Block::Weights, n), (Block::LabelBits, samples * bits)];
    sizes.extend(indicators.iter().map(|b| (*b, samples)));
    (VariableLayout::from_sizes(&sizes), bits)
}

/// 0-1-loss objective with error bits, in its expanded quadratic form.
///
/// ```text
/// Σ_s [ (A_s − y_s ȳ_s)² + N²·(A_s − y_s ȳ_s + y_s N e_s)² ] + λ·Σ_i w_i
/// A_s = Σ_i w_i h_i(x_s),   ȳ_s = 1 + Σ_{k<K} ȳ_{k,s} 2^k
/// ```
///
/// Expanding gives
///
/// ```text
/// (1+N²)Σ_ij w_i w_j Corr(h_i,h_j) + (1+N²)Σ_s ȳ_s² + N⁴Σ_s e_s
///   − 2(1+N²)Σ_is w_i y_s h_i(x_s) ȳ_s + 2N³Σ_is w_i e_s y_s h_i(x_s)
///   − 2N³Σ_s e_s ȳ_s + λΣ_i w_i
/// ```
///
/// which is what this builder assembles term by term. The `N²`/`N⁴`
/// multipliers are kept as they are.
pub fn build_zero_one_qubo_v1(
    h: &PredictionMatrix,
    y: &[f64],
    lambda: f64,
) -> Result<(QuboProblem, VariableLayout)> {
    check_labels(h, y)?;
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid("lambda must be non-negative"));
    }
    let (n, samples) = (h.cols(), h.rows());
    let (layout, bits) = zero_one_layout(n, samples, &[Block::ErrorBits]);
    let label_start = n;
    let error_start = n + samples * bits;
    let nf = n as f64;
    let a = 1.0 + nf * nf;
    let n3 = nf * nf * nf;
    let n4 = n3 * nf;
    let bit = |s: usize, k: usize| label_start + s * bits + k;
    let pow2 = |k: usize| (1u64 << k) as f64;

    let mut poly = PolyBuilder::default();
    // (1+N²) Σ_ij w_i w_j Corr(h_i, h_j)
    for i in 0..n {
        poly.add(&[i], a * samples as f64);
        for j in i + 1..n {
            let corr: f64 = (0..samples).map(|s| f64::from(h.get(s, i) * h.get(s, j))).sum();
            poly.add(&[i, j], 2.0 * a * corr);
        }
    }
    for s in 0..samples {
        let e = error_start + s;
        // (1+N²) ȳ_s² with ȳ_† = 1
        poly.add(&[], a);
        for k in 0..bits {
            poly.add(&[bit(s, k)], a * 2.0 * pow2(k));
            for k2 in 0..bits {
                poly.add(&[bit(s, k), bit(s, k2)], a * pow2(k + k2));
            }
        }
        // N⁴ e_s
        poly.add(&[e], n4);
        for i in 0..n {
            let yh = y[s] * f64::from(h.get(s, i));
            // −2(1+N²) w_i y_s h_i ȳ_s
            poly.add(&[i], -2.0 * a * yh);
            for k in 0..bits {
                poly.add(&[i, bit(s, k)], -2.0 * a * yh * pow2(k));
            }
            // 2N³ w_i e_s y_s h_i
            poly.add(&[i, e], 2.0 * n3 * yh);
        }
        // −2N³ e_s ȳ_s
        poly.add(&[e], -2.0 * n3);
        for k in 0..bits {
            poly.add(&[e, bit(s, k)], -2.0 * n3 * pow2(k));
        }
    }
    for i in 0..n {
        poly.add(&[i], lambda);
    }
    Ok((poly.into_qubo(layout.num_vars())?, layout))
}

/// 0-1-loss objective with correct/wrong indicator bits:
///
/// ```text
/// Σ_s [ (A_s − (e_s⁺ − e_s⁻)·y_s·ȳ_s)² + e_s⁻ ] + λ·Σ_i w_i
/// ```
///
/// Kept in higher-order form. Products such as `w_i e_s⁺ ȳ_{k,s}` are
/// cubic, and `e_s⁺ e_s⁻ ȳ_{k,s} ȳ_{k',s}` (from `(e⁺ − e⁻)²ȳ²`) is quartic.
pub fn build_zero_one_objective_v2(
    h: &PredictionMatrix,
    y: &[f64],
    lambda: f64,
) -> Result<(PseudoBooleanProblem, VariableLayout)> {
    check_labels(h, y)?;
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid("lambda must be non-negative"));
    }
    let (n, samples) = (h.cols(), h.rows());
    let (layout, bits) = zero_one_layout(n, samples, &[Block::CorrectBits, Block::WrongBits]);
    let label_start = n;
    let plus_start = n + samples * bits;
    let minus_start = plus_start + samples;

    let mut poly = PolyBuilder::default();
    for s in 0..samples {
        let (ep, em) = (plus_start + s, minus_start + s);
        // ȳ_s = 1 + Σ_k ȳ_{k,s} 2^k
        let mut ybar: Vec<(Vec<usize>, f64)> = vec![(vec![], 1.0)];
        ybar.extend((0..bits).map(|k| (vec![label_start + s * bits + k], (1u64 << k) as f64)));
        // residual R_s = A_s − y_s (e⁺ − e⁻) ȳ_s
        let mut residual: Vec<(Vec<usize>, f64)> =
            (0..n).map(|i| (vec![i], f64::from(h.get(s, i)))).collect();
        for (mono, c) in &ybar {
            let mut with_plus = mono.clone();
            with_plus.push(ep);
            residual.push((with_plus, -y[s] * c));
            let mut with_minus = mono.clone();
            with_minus.push(em);
            residual.push((with_minus, y[s] * c));
        }
        poly.add_product(&residual, &residual, 1.0);
        poly.add(&[em], 1.0);
    }
    for i in 0..n {
        poly.add(&[i], lambda);
    }
    Ok((poly.into_pseudo_boolean(layout.num_vars())?, layout))
}
