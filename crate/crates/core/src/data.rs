//! Labeled datasets, synthetic generators, splits and sample weights.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::rng::rng_from_seed;
use crate::{Error, Result};

/// Mean separation at overlap 0 for the Gaussian mixture.
pub const MAX_SEPARATION: f64 = 8.0;
/// Mean separation at overlap 1; Bayes error Φ(−Δ/2) ≈ 0.05.
pub const FULL_OVERLAP_SEPARATION: f64 = 3.29;

/// Inner box of the box-cluster dataset, `[-INNER, INNER]²`.
pub const BOX_INNER: f64 = 1.0;
/// Negatives are excluded from `[-BOX_MARGIN, BOX_MARGIN]²`.
pub const BOX_MARGIN: f64 = 1.2;
/// Negatives are drawn from `[-BOX_OUTER, BOX_OUTER]²`.
pub const BOX_OUTER: f64 = 3.0;

#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub features: Vec<f64>,
    pub label: i8,
}

impl Sample {
    pub fn new(features: Vec<f64>, label: i8) -> Result<Self> {
        if label != 1 && label != -1 {
            return Err(Error::invalid(format!("label must be -1 or +1, got {label}")));
        }
        if let Some(v) = features.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite feature value {v}")));
        }
        Ok(Self { features, label })
    }

    #[inline]
    pub fn y(&self) -> f64 {
        f64::from(self.label)
    }
}

/// A non-empty list of samples sharing one feature dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    samples: Vec<Sample>,
    dim: usize,
}

impl Dataset {
    pub fn new(samples: Vec<Sample>) -> Result<Self> {
        let first = samples.first().ok_or(Error::NoSamples)?;
        let dim = first.features.len();
        if dim == 0 {
            return Err(Error::invalid("feature dimension must be positive"));
        }
        if let Some(bad) = samples.iter().find(|s| s.features.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: bad.features.len(),
            });
        }
        Ok(Self { samples, dim })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn labels(&self) -> Vec<f64> {
        self.samples.iter().map(Sample::y).collect()
    }

    /// Samples at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let samples = indices
            .iter()
            .map(|&i| {
                self.samples
                    .get(i)
                    .cloned()
                    .ok_or_else(|| Error::invalid(format!("sample index {i} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(samples)
    }

    pub fn count_label(&self, label: i8) -> usize {
        self.samples.iter().filter(|s| s.label == label).count()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SplitDataset {
    pub train: Dataset,
    pub validation: Dataset,
    pub test: Dataset,
}

/// Index sets produced by [`split_indices`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
}

/// A probability distribution over training samples.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleWeights(Vec<f64>);

impl SampleWeights {
    pub const SUM_TOLERANCE: f64 = 1e-9;

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::NoSamples);
        }
        Ok(Self(vec![1.0 / n as f64; n]))
    }

    /// Validates a vector that already sums to one.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::NoSamples);
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::invalid("weights must be finite and non-negative"));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > Self::SUM_TOLERANCE {
            return Err(Error::invalid(format!("weights sum to {sum}, not 1")));
        }
        Ok(Self(weights))
    }

    /// Normalizes non-negative raw weights to sum to one.
    pub fn normalized(raw: Vec<f64>) -> Result<Self> {
        if raw.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::invalid("weights must be finite and non-negative"));
        }
        let sum: f64 = raw.iter().sum();
        if sum <= 0.0 {
            return Err(Error::invalid("weights sum to zero"));
        }
        Self::new(raw.into_iter().map(|w| w / sum).collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Mean separation of the two Gaussian centers for an overlap coefficient.
pub fn separation_for_overlap(overlap: f64) -> f64 {
    MAX_SEPARATION - overlap * (MAX_SEPARATION - FULL_OVERLAP_SEPARATION)
}

/// Two unit-covariance spherical Gaussians centered at `±(Δ/2)·e₁` with
/// equiprobable labels. `Δ` shrinks linearly from [`MAX_SEPARATION`] at
/// overlap 0 to [`FULL_OVERLAP_SEPARATION`] at overlap 1.
pub fn generate_gaussian_mixture(
    dim: usize,
    overlap: f64,
    samples: usize,
    seed: u64,
) -> Result<Dataset> {
    if dim == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    if samples < 2 {
        return Err(Error::invalid("need at least 2 samples"));
    }
    if !(0.0..=1.0).contains(&overlap) {
        return Err(Error::invalid(format!("overlap {overlap} outside [0, 1]")));
    }
    let half = separation_for_overlap(overlap) / 2.0;
    let mut rng = rng_from_seed(seed);
    let out = (0..samples)
        .map(|_| {
            let label: i8 = if rng.random_bool(0.5) { 1 } else { -1 };
            let mut features: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            features[0] += half * f64::from(label);
            Sample { features, label }
        })
        .collect();
    Dataset::new(out)
}

/// Positives uniform inside `(-1, 1)²`, negatives uniform in
/// `[-3, 3]² \ [-1.2, 1.2]²`; labels equiprobable.
pub fn generate_box_cluster_2d(samples: usize, seed: u64) -> Result<Dataset> {
    if samples < 4 {
        return Err(Error::invalid("need at least 4 samples"));
    }
    let mut rng = rng_from_seed(seed);
    let out = (0..samples)
        .map(|_| {
            if rng.random_bool(0.5) {
                let features = loop {
                    let p = [
                        rng.random_range(-BOX_INNER..BOX_INNER),
                        rng.random_range(-BOX_INNER..BOX_INNER),
                    ];
                    // the half-open range can return the lower corner exactly
                    if p.iter().all(|v| v.abs() < BOX_INNER) {
                        break p;
                    }
                };
                Sample {
                    features: features.to_vec(),
                    label: 1,
                }
            } else {
                let features = loop {
                    let p = [
                        rng.random_range(-BOX_OUTER..=BOX_OUTER),
                        rng.random_range(-BOX_OUTER..=BOX_OUTER),
                    ];
                    if p.iter().any(|v| v.abs() > BOX_MARGIN) {
                        break p;
                    }
                };
                Sample {
                    features: features.to_vec(),
                    label: -1,
                }
            }
        })
        .collect();
    Dataset::new(out)
}

/// Random permutation cut into three parts whose sizes differ by at most one;
/// the larger parts come first.
pub fn split_indices(len: usize, seed: u64) -> Result<SplitIndices> {
    if len < 3 {
        return Err(Error::invalid(format!("cannot split {len} samples three ways")));
    }
    let mut order: Vec<usize> = (0..len).collect();
    order.shuffle(&mut rng_from_seed(seed));
    let base = len / 3;
    let extra = len % 3;
    let sizes = [base + usize::from(extra > 0), base + usize::from(extra > 1), base];
    let test = order.split_off(sizes[0] + sizes[1]);
    let validation = order.split_off(sizes[0]);
    Ok(SplitIndices {
        train: order,
        validation,
        test,
    })
}

pub fn split_even(dataset: &Dataset, seed: u64) -> Result<SplitDataset> {
    let idx = split_indices(dataset.len(), seed)?;
    Ok(SplitDataset {
        train: dataset.subset(&idx.train)?,
        validation: dataset.subset(&idx.validation)?,
        test: dataset.subset(&idx.test)?,
    })
}

pub fn l2_normalize(dataset: &Dataset) -> Result<Dataset> {
    let samples = dataset
        .samples()
        .iter()
        .enumerate()
        .map(|(index, s)| {
            let norm = s.features.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Err(Error::ZeroVector { index });
            }
            Ok(Sample {
                features: s.features.iter().map(|v| v / norm).collect(),
                label: s.label,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(samples)
}

/// Reads `M` feature columns followed by a label column (`-1` or `1`).
///
/// Row numbers in errors are 1-based and count the header line when present.
pub fn load_csv(path: impl AsRef<Path>, has_header: bool) -> Result<Dataset> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .from_path(path)
        .map_err(|e| csv_err(path, 0, e.to_string()))?;
    let first_row = if has_header { 2 } else { 1 };
    let mut samples = Vec::new();
    let mut width = None;
    for (i, record) in reader.records().enumerate() {
        let row = first_row + i;
        let record = record.map_err(|e| csv_err(path, row, e.to_string()))?;
        if record.len() < 2 {
            return Err(csv_err(path, row, "need at least one feature and a label".into()));
        }
        match width {
            None => width = Some(record.len()),
            Some(w) if w != record.len() => {
                return Err(csv_err(
                    path,
                    row,
                    format!("expected {w} columns, found {}", record.len()),
                ))
            }
            _ => {}
        }
        let mut values = record.iter().map(|cell| {
            cell.trim()
                .parse::<f64>()
                .map_err(|_| csv_err(path, row, format!("non-numeric cell {cell:?}")))
        });
        let features = values
            .by_ref()
            .take(record.len() - 1)
            .collect::<Result<Vec<_>>>()?;
        let label = values.next().expect("label column")?;
        let label = if label == 1.0 {
            1
        } else if label == -1.0 {
            -1
        } else {
            return Err(csv_err(path, row, format!("label {label} is not -1 or +1")));
        };
        let sample =
            Sample::new(features, label).map_err(|e| csv_err(path, row, e.to_string()))?;
        samples.push(sample);
    }
    if samples.is_empty() {
        return Err(Error::NoSamples);
    }
    Dataset::new(samples)
}

/// Writes features with shortest round-trip formatting, so a reload is exact.
pub fn save_csv(dataset: &Dataset, path: impl AsRef<Path>, write_header: bool) -> Result<()> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_path(path).map_err(|e| csv_err(path, 0, e.to_string()))?;
    let wrap = |e: csv::Error| csv_err(path, 0, e.to_string());
    if write_header {
        let mut header: Vec<String> = (0..dataset.dim()).map(|i| format!("x{i}")).collect();
        header.push("label".into());
        writer.write_record(&header).map_err(wrap)?;
    }
    for s in dataset.samples() {
        let mut row: Vec<String> = s.features.iter().map(|v| v.to_string()).collect();
        row.push(s.label.to_string());
        writer.write_record(&row).map_err(wrap)?;
    }
    writer.flush()?;
    Ok(())
}

fn csv_err(path: &Path, row: usize, message: String) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        row,
        message,
    }
}
