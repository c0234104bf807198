//! Decision-stump dictionary.
//!
//! A stump thresholds one feature (`order 1`) or the raw product of two
//! features (`order 2`), optionally negated:
//!
//! ```text
//! h¹⁺(x) = sign( x_l     − Θ)     h¹⁻(x) = sign(−x_l     − Θ)
//! h²⁺(x) = sign( x_i·x_j − Θ)     h²⁻(x) = sign(−x_i·x_j − Θ)
//! ```
//!
//! with `sign(0) = +1`. Thresholds are fit to minimize weighted training
//! error over the midpoints between consecutive distinct projection values,
//! plus one value below the minimum and one above the maximum.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, SampleWeights};
use crate::par;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Projection {
    Single(usize),
    /// Indices satisfy `i < j`.
    Pair(usize, usize),
}

impl Projection {
    pub fn order(self) -> u8 {
        match self {
            Projection::Single(_) => 1,
            Projection::Pair(..) => 2,
        }
    }

    #[inline]
    pub fn value(self, x: &[f64]) -> f64 {
        match self {
            Projection::Single(l) => x[l],
            Projection::Pair(i, j) => x[i] * x[j],
        }
    }

    fn max_index(self) -> usize {
        match self {
            Projection::Single(l) => l,
            Projection::Pair(_, j) => j,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    #[inline]
    fn apply(self, v: f64) -> f64 {
        match self {
            Polarity::Positive => v,
            Polarity::Negative => -v,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Polarity::Positive => '+',
            Polarity::Negative => '-',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stump {
    pub projection: Projection,
    pub polarity: Polarity,
    pub threshold: f64,
}

impl Stump {
    pub fn new(projection: Projection, polarity: Polarity, threshold: f64) -> Result<Self> {
        if let Projection::Pair(i, j) = projection {
            if i >= j {
                return Err(Error::invalid(format!("pair indices must satisfy i < j, got ({i}, {j})")));
            }
        }
        if !threshold.is_finite() {
            return Err(Error::invalid("threshold must be finite"));
        }
        Ok(Self {
            projection,
            polarity,
            threshold,
        })
    }

    pub fn order(&self) -> u8 {
        self.projection.order()
    }

    /// Output in {−1, +1}. Indexing panics if `x` is too short; use
    /// [`Stump::evaluate`] for a checked call.
    #[inline]
    pub fn predict(&self, x: &[f64]) -> i8 {
        if self.polarity.apply(self.projection.value(x)) - self.threshold >= 0.0 {
            1
        } else {
            -1
        }
    }

    pub fn evaluate(&self, x: &[f64], dim: usize) -> Result<i8> {
        if x.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: x.len(),
            });
        }
        if self.projection.max_index() >= dim {
            return Err(Error::invalid("stump feature index exceeds dimension"));
        }
        Ok(self.predict(x))
    }
}

impl fmt::Display for Stump {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.projection {
            Projection::Single(l) => write!(f, "h1{}[{l}]", self.polarity.symbol())?,
            Projection::Pair(i, j) => write!(f, "h2{}[{i},{j}]", self.polarity.symbol())?,
        }
        write!(f, " >= {}", self.threshold)
    }
}

/// Which stump orders a dictionary contains.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orders {
    pub first: bool,
    pub second: bool,
}

impl Orders {
    pub const BOTH: Orders = Orders {
        first: true,
        second: true,
    };
    pub const FIRST: Orders = Orders {
        first: true,
        second: false,
    };
    pub const SECOND: Orders = Orders {
        first: false,
        second: true,
    };
}

impl Default for Orders {
    fn default() -> Self {
        Self::BOTH
    }
}

pub fn dictionary_size(dim: usize, orders: Orders) -> usize {
    let mut n = 0;
    if orders.first {
        n += 2 * dim;
    }
    if orders.second {
        n += dim * dim.saturating_sub(1);
    }
    n
}

/// Projections of the enabled orders, singles first, pairs in ascending
/// lexicographic order.
pub fn projections(dim: usize, orders: Orders) -> Vec<Projection> {
    let mut out = Vec::new();
    if orders.first {
        out.extend((0..dim).map(Projection::Single));
    }
    if orders.second {
        for i in 0..dim {
            out.extend((i + 1..dim).map(|j| Projection::Pair(i, j)));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dictionary {
    stumps: Vec<Stump>,
    dim: usize,
}

impl Dictionary {
    /// A dictionary from an explicit stump list, e.g. a curated one.
    pub fn new(stumps: Vec<Stump>, dim: usize) -> Result<Self> {
        if let Some(s) = stumps.iter().find(|s| s.projection.max_index() >= dim) {
            return Err(Error::invalid(format!("stump {s} exceeds dimension {dim}")));
        }
        Ok(Self { stumps, dim })
    }

    pub fn stumps(&self) -> &[Stump] {
        &self.stumps
    }

    pub fn get(&self, index: usize) -> Option<&Stump> {
        self.stumps.get(index)
    }

    pub fn len(&self) -> usize {
        self.stumps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stumps.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// A dictionary together with each stump's weighted error under the
/// weights it was fit against.
#[derive(Clone, Debug)]
pub struct FittedDictionary {
    pub dictionary: Dictionary,
    pub errors: Vec<f64>,
}

/// Threshold minimizing weighted error for one signed projection.
///
/// `sorted` yields `(value, sample)` in ascending value order. Returns
/// `(threshold, error)`; ties go to the smallest threshold.
fn sweep_threshold<I>(sorted: I, weights: &[f64], labels: &[i8]) -> (f64, f64)
where
    I: Iterator<Item = (f64, usize)> + Clone,
{
    // threshold below the minimum: everything predicts +1
    let mut err: f64 = labels
        .iter()
        .zip(weights)
        .filter(|(y, _)| **y < 0)
        .map(|(_, w)| w)
        .sum();
    let mut iter = sorted.clone().peekable();
    let Some(&(min, _)) = iter.peek() else {
        return (0.0, err);
    };
    // (threshold, running error, samples below the threshold)
    let mut best = (min - 1.0, err, 0usize);
    let mut below = 0;
    while let Some((v, s)) = iter.next() {
        below += 1;
        err += if labels[s] > 0 { weights[s] } else { -weights[s] };
        match iter.peek() {
            Some(&(next, _)) if next == v => continue,
            Some(&(next, _)) => {
                let mut t = v + (next - v) / 2.0;
                if t <= v {
                    t = next;
                }
                if err < best.1 {
                    best = (t, err, below);
                }
            }
            None => {
                if err < best.1 {
                    best = (v + 1.0, err, below);
                }
            }
        }
    }
    // re-sum at the winning split so the running total's round-off does not leak out
    let exact = sorted
        .enumerate()
        .filter(|(i, (_, s))| (*i < best.2) == (labels[*s] > 0))
        .map(|(_, (_, s))| weights[s])
        .sum();
    (best.0, exact)
}

/// Candidate thresholds for a set of signed projection values.
pub fn candidate_thresholds(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    let Some((&lo, &hi)) = v.first().zip(v.last()) else {
        return Vec::new();
    };
    let mut out = Vec::with_capacity(v.len() + 1);
    out.push(lo - 1.0);
    for w in v.windows(2) {
        let mut t = w[0] + (w[1] - w[0]) / 2.0;
        if t <= w[0] {
            t = w[1];
        }
        out.push(t);
    }
    out.push(hi + 1.0);
    out
}

#[derive(Clone, Debug)]
struct SortedProjection {
    values: Vec<f64>,
    samples: Vec<u32>,
}

impl SortedProjection {
    fn new(projection: Projection, data: &Dataset) -> Self {
        let mut pairs: Vec<(f64, u32)> = data
            .samples()
            .iter()
            .enumerate()
            .map(|(i, s)| (projection.value(&s.features), i as u32))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let (values, samples) = pairs.into_iter().unzip();
        Self { values, samples }
    }

    fn fit(&self, polarity: Polarity, weights: &[f64], labels: &[i8]) -> (f64, f64) {
        let idx = |s: &u32| *s as usize;
        match polarity {
            Polarity::Positive => sweep_threshold(
                self.values.iter().copied().zip(self.samples.iter().map(idx)),
                weights,
                labels,
            ),
            Polarity::Negative => sweep_threshold(
                self.values
                    .iter()
                    .rev()
                    .map(|v| -v)
                    .zip(self.samples.iter().rev().map(idx)),
                weights,
                labels,
            ),
        }
    }
}

/// Presorted projections of one training set, for repeated refits under
/// changing sample weights.
#[derive(Clone, Debug)]
pub struct StumpFitter {
    dim: usize,
    orders: Orders,
    projections: Vec<Projection>,
    sorted: Vec<SortedProjection>,
    labels: Vec<i8>,
}

impl StumpFitter {
    pub fn new(train: &Dataset, orders: Orders) -> Self {
        let projections = projections(train.dim(), orders);
        let sorted = par::map_slice(&projections, |p| SortedProjection::new(*p, train));
        Self {
            dim: train.dim(),
            orders,
            projections,
            sorted,
            labels: train.samples().iter().map(|s| s.label).collect(),
        }
    }

    pub fn len(&self) -> usize {
        2 * self.projections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projections.is_empty()
    }

    pub fn fit(&self, weights: &SampleWeights) -> Result<FittedDictionary> {
        if weights.len() != self.labels.len() {
            return Err(Error::DimensionMismatch {
                expected: self.labels.len(),
                actual: weights.len(),
            });
        }
        let w = weights.as_slice();
        let fits = par::map_slice(&self.sorted, |sp| {
            [
                sp.fit(Polarity::Positive, w, &self.labels),
                sp.fit(Polarity::Negative, w, &self.labels),
            ]
        });
        Ok(assemble(self.dim, self.orders, &self.projections, &fits))
    }
}

/// Lays out per-projection fits in dictionary order: order-1 positive,
/// order-1 negative, order-2 positive, order-2 negative.
fn assemble(
    dim: usize,
    orders: Orders,
    projections: &[Projection],
    fits: &[[(f64, f64); 2]],
) -> FittedDictionary {
    let mut stumps = Vec::with_capacity(2 * projections.len());
    let mut errors = Vec::with_capacity(2 * projections.len());
    for order in [1u8, 2] {
        for (pi, polarity) in [(0usize, Polarity::Positive), (1, Polarity::Negative)] {
            for (p, fit) in projections.iter().zip(fits) {
                if p.order() == order {
                    let (threshold, err) = fit[pi];
                    stumps.push(Stump {
                        projection: *p,
                        polarity,
                        threshold,
                    });
                    errors.push(err);
                }
            }
        }
    }
    debug_assert_eq!(stumps.len(), dictionary_size(dim, orders));
    FittedDictionary {
        dictionary: Dictionary { stumps, dim },
        errors,
    }
}

/// Fits one stump per (projection, polarity) against `weights`.
pub fn build_dictionary(
    train: &Dataset,
    weights: &SampleWeights,
    orders: Orders,
) -> Result<FittedDictionary> {
    if weights.len() != train.len() {
        return Err(Error::DimensionMismatch {
            expected: train.len(),
            actual: weights.len(),
        });
    }
    let projections = projections(train.dim(), orders);
    let labels: Vec<i8> = train.samples().iter().map(|s| s.label).collect();
    let w = weights.as_slice();
    // sort and discard per projection; a StumpFitter would hold every sort in memory
    let fits = par::map_slice(&projections, |p| {
        let sp = SortedProjection::new(*p, train);
        [
            sp.fit(Polarity::Positive, w, &labels),
            sp.fit(Polarity::Negative, w, &labels),
        ]
    });
    Ok(assemble(train.dim(), orders, &projections, &fits))
}

pub fn weighted_error(stump: &Stump, data: &Dataset, weights: &SampleWeights) -> Result<f64> {
    if weights.len() != data.len() {
        return Err(Error::DimensionMismatch {
            expected: data.len(),
            actual: weights.len(),
        });
    }
    if stump.projection.max_index() >= data.dim() {
        return Err(Error::invalid("stump feature index exceeds dimension"));
    }
    Ok(data
        .samples()
        .iter()
        .zip(weights.as_slice())
        .filter(|(s, _)| stump.predict(&s.features) != s.label)
        .map(|(_, w)| w)
        .sum())
}

/// Indices of the `k` smallest errors outside `exclude`; ties by index.
pub fn rank_by_error(errors: &[f64], k: usize, exclude: &BTreeSet<usize>) -> Result<Vec<usize>> {
    let mut pool: Vec<usize> = (0..errors.len()).filter(|i| !exclude.contains(i)).collect();
    if k > pool.len() {
        return Err(Error::invalid(format!(
            "cannot select {k} stumps from {} available",
            pool.len()
        )));
    }
    pool.sort_by(|&a, &b| errors[a].total_cmp(&errors[b]).then(a.cmp(&b)));
    pool.truncate(k);
    Ok(pool)
}

/// The `k` non-excluded stumps with the smallest weighted error, as
/// dictionary indices.
pub fn select_top_k(
    dictionary: &Dictionary,
    data: &Dataset,
    weights: &SampleWeights,
    k: usize,
    exclude: &BTreeSet<usize>,
) -> Result<Vec<usize>> {
    let errors = par::map_slice(dictionary.stumps(), |s| weighted_error(s, data, weights))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    rank_by_error(&errors, k, exclude)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{generate_gaussian_mixture, Sample};
    use proptest::prelude::*;

    fn dataset(rows: &[(&[f64], i8)]) -> Dataset {
        Dataset::new(
            rows.iter()
                .map(|(x, y)| Sample::new(x.to_vec(), *y).unwrap())
                .collect(),
        )
        .unwrap()
    }

    fn brute_error(stump: &Stump, data: &Dataset, w: &[f64]) -> f64 {
        let mut e = 0.0;
        for (s, wi) in data.samples().iter().zip(w) {
            let arg = match (stump.projection, stump.polarity) {
                (Projection::Single(l), Polarity::Positive) => s.features[l],
                (Projection::Single(l), Polarity::Negative) => -s.features[l],
                (Projection::Pair(i, j), Polarity::Positive) => s.features[i] * s.features[j],
                (Projection::Pair(i, j), Polarity::Negative) => -(s.features[i] * s.features[j]),
            } - stump.threshold;
            let h = if arg >= 0.0 { 1 } else { -1 };
            if h != s.label {
                e += wi;
            }
        }
        e
    }

    #[test]
    fn sizes() {
        assert_eq!(dictionary_size(30, Orders::BOTH), 930);
        assert_eq!(dictionary_size(96, Orders::BOTH), 9312);
        assert_eq!(dictionary_size(1, Orders::BOTH), 2);
        assert_eq!(dictionary_size(5, Orders::FIRST), 10);
        assert_eq!(dictionary_size(5, Orders::SECOND), 20);
    }

    #[test]
    fn evaluate_examples() {
        let x = [2.0, 3.0, 0.5];
        let s = Stump::new(Projection::Single(2), Polarity::Positive, 0.0).unwrap();
        assert_eq!(s.evaluate(&x, 3).unwrap(), 1);
        let s = Stump::new(Projection::Pair(0, 1), Polarity::Negative, 0.0).unwrap();
        assert_eq!(s.evaluate(&x, 3).unwrap(), -1);
        let s = Stump::new(Projection::Single(0), Polarity::Positive, 2.0).unwrap();
        assert_eq!(s.evaluate(&x, 3).unwrap(), 1);
        assert!(s.evaluate(&x[..2], 3).is_err());
        assert!(Stump::new(Projection::Pair(1, 1), Polarity::Positive, 0.0).is_err());
    }

    #[test]
    fn two_dim_dictionary_has_six_stumps_in_block_order() {
        let d = generate_gaussian_mixture(2, 0.5, 40, 1).unwrap();
        let w = SampleWeights::uniform(40).unwrap();
        let fit = build_dictionary(&d, &w, Orders::BOTH).unwrap();
        let kinds: Vec<(Projection, Polarity)> = fit
            .dictionary
            .stumps()
            .iter()
            .map(|s| (s.projection, s.polarity))
            .collect();
        use Polarity::*;
        use Projection::*;
        assert_eq!(
            kinds,
            vec![
                (Single(0), Positive),
                (Single(1), Positive),
                (Single(0), Negative),
                (Single(1), Negative),
                (Pair(0, 1), Positive),
                (Pair(0, 1), Negative),
            ]
        );
    }

    #[test]
    fn separable_feature_gets_zero_error_threshold_in_the_gap() {
        let d = dataset(&[
            (&[-2.0], -1),
            (&[-0.5], -1),
            (&[-1.0], -1),
            (&[0.25], 1),
            (&[1.5], 1),
        ]);
        let w = SampleWeights::uniform(5).unwrap();
        let fit = build_dictionary(&d, &w, Orders::FIRST).unwrap();
        let pos = fit.dictionary.stumps()[0];
        assert!(pos.threshold > -0.5 && pos.threshold < 0.25);
        assert_eq!(fit.errors[0], 0.0);
        // brute force over every candidate threshold finds nothing better
        let best = candidate_thresholds(&[-2.0, -0.5, -1.0, 0.25, 1.5])
            .into_iter()
            .map(|t| {
                let s = Stump::new(Projection::Single(0), Polarity::Positive, t).unwrap();
                brute_error(&s, &d, w.as_slice())
            })
            .fold(f64::INFINITY, f64::min);
        assert_eq!(best, 0.0);
    }

    #[test]
    fn rebuild_is_deterministic() {
        let d = generate_gaussian_mixture(4, 0.9, 200, 2).unwrap();
        let w = SampleWeights::uniform(200).unwrap();
        let a = build_dictionary(&d, &w, Orders::BOTH).unwrap();
        let b = build_dictionary(&d, &w, Orders::BOTH).unwrap();
        assert_eq!(a.dictionary, b.dictionary);
        let c = StumpFitter::new(&d, Orders::BOTH).fit(&w).unwrap();
        assert_eq!(a.dictionary, c.dictionary);
        assert_eq!(a.errors, c.errors);
    }

    #[test]
    fn weighted_error_extremes() {
        let d = dataset(&[(&[1.0], 1), (&[-1.0], -1), (&[2.0], 1)]);
        let w = SampleWeights::uniform(3).unwrap();
        let good = Stump::new(Projection::Single(0), Polarity::Positive, 0.0).unwrap();
        let bad = Stump::new(Projection::Single(0), Polarity::Negative, 0.0).unwrap();
        assert_eq!(weighted_error(&good, &d, &w).unwrap(), 0.0);
        assert!((weighted_error(&bad, &d, &w).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn top_k_examples() {
        let d = generate_gaussian_mixture(3, 0.8, 60, 4).unwrap();
        let w = SampleWeights::uniform(60).unwrap();
        let dict = build_dictionary(&d, &w, Orders::BOTH).unwrap().dictionary;
        let all = select_top_k(&dict, &d, &w, dict.len(), &BTreeSet::new()).unwrap();
        let errors: Vec<f64> = dict
            .stumps()
            .iter()
            .map(|s| brute_error(s, &d, w.as_slice()))
            .collect();
        for pair in all.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            assert!(errors[a] < errors[b] || (errors[a] == errors[b] && a < b));
        }
        assert!(select_top_k(&dict, &d, &w, dict.len() + 1, &BTreeSet::new()).is_err());
        let exclude: BTreeSet<usize> = [0, 1].into();
        assert!(select_top_k(&dict, &d, &w, dict.len() - 1, &exclude).is_err());

        // identical errors fall back to dictionary order
        assert_eq!(rank_by_error(&[0.3; 6], 3, &BTreeSet::new()).unwrap(), vec![0, 1, 2]);
        assert_eq!(rank_by_error(&[0.3; 6], 3, &[1].into()).unwrap(), vec![0, 2, 3]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn fitted_thresholds_are_optimal_on_their_grid(
            seed in 0u64..1000,
            raw in prop::collection::vec(0.01f64..1.0, 25),
        ) {
            let d = generate_gaussian_mixture(3, 0.9, 25, seed).unwrap();
            let w = SampleWeights::normalized(raw).unwrap();
            let fit = build_dictionary(&d, &w, Orders::BOTH).unwrap();
            for (stump, err) in fit.dictionary.stumps().iter().zip(&fit.errors) {
                let direct = brute_error(stump, &d, w.as_slice());
                prop_assert!((direct - err).abs() < 1e-12);
                let values: Vec<f64> = d.samples().iter()
                    .map(|s| stump.polarity.apply(stump.projection.value(&s.features)))
                    .collect();
                for t in candidate_thresholds(&values) {
                    let alt = Stump { threshold: t, ..*stump };
                    prop_assert!(brute_error(&alt, &d, w.as_slice()) >= direct - 1e-12);
                }
            }
        }

        #[test]
        fn negated_output_complements_error(
            seed in 0u64..1000,
            idx in 0usize..12,
            raw in prop::collection::vec(0.01f64..1.0, 30),
        ) {
            let d = generate_gaussian_mixture(3, 0.5, 30, seed).unwrap();
            let w = SampleWeights::normalized(raw).unwrap();
            let stump = build_dictionary(&d, &w, Orders::BOTH).unwrap().dictionary.stumps()[idx];
            let err = weighted_error(&stump, &d, &w).unwrap();
            let negated: f64 = d.samples().iter().zip(w.as_slice())
                .filter(|(s, _)| -stump.predict(&s.features) != s.label)
                .map(|(_, wi)| wi)
                .sum();
            prop_assert!((err + negated - 1.0).abs() < 1e-12);
            prop_assert_eq!(stump.predict(&d.samples()[0].features), stump.predict(&d.samples()[0].features));
        }

        #[test]
        fn top_k_matches_full_sort(seed in 0u64..500, k in 1usize..=5) {
            let d = generate_gaussian_mixture(3, 0.9, 40, seed).unwrap();
            let w = SampleWeights::uniform(40).unwrap();
            let dict = build_dictionary(&d, &w, Orders::BOTH).unwrap().dictionary;
            let got = select_top_k(&dict, &d, &w, k, &BTreeSet::new()).unwrap();
            let mut oracle: Vec<(f64, usize)> = dict.stumps().iter().enumerate()
                .map(|(i, s)| (brute_error(s, &d, w.as_slice()), i))
                .collect();
            oracle.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let want: Vec<usize> = oracle.iter().take(k).map(|p| p.1).collect();
            prop_assert_eq!(got, want);
        }
    }
}
