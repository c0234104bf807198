//! Spectra of the interpolated Hamiltonian `H(s) = (1 − s)·H_B + s·H_P`.
//!
//! `H_P` is diagonal with entry `z` equal to the problem energy of the
//! assignment encoded by `z`. Variable 0 is the most significant bit of `z`:
//! `x_i = (z >> (n − 1 − i)) & 1`.
//!
//! `H_B = Σ_i (1 − σ_i^x)/2` has the integer spectrum `0, 1, …, n`, so
//! `E0(0) = 0` and `E1(0) = 1`.
//!
//! The two lowest eigenpairs come from a thick-restarted block Davidson
//! iteration over matrix-vector products; a degenerate ground level
//! reports `E1 = E0`.
//! [`dense_lowest`] diagonalizes the full matrix and is limited to
//! [`DENSE_MAX_QUBITS`].

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng as _;
use serde::Serialize;

use crate::par;
use crate::qubo::{Objective, QuboProblem};
use crate::rng::rng_from_seed;
use crate::{Error, Result};

pub const MAX_QUBITS: usize = 14;
pub const DENSE_MAX_QUBITS: usize = 8;
/// Gap below which two levels count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;
pub const DEFAULT_GRID_POINTS: usize = 201;
pub const MIN_CURVATURE_POINTS: usize = 51;

const BLOCK: usize = 2;
const MAX_SUBSPACE: usize = 20;
const KEEP_ON_RESTART: usize = 6;
const MAX_ITERATIONS: usize = 20_000;
const RESIDUAL_TOL: f64 = 1e-8;
const START_SEED: u64 = 0x0dd5_eed5;

fn check_qubits(n: usize, limit: usize, what: &'static str) -> Result<()> {
    if n > limit {
        return Err(Error::TooLarge { what, n, limit });
    }
    Ok(())
}

/// Diagonal of `H_P`, indexed as described in the module docs.
pub fn problem_hamiltonian_diagonal(problem: &QuboProblem) -> Result<Vec<f64>> {
    let n = problem.n();
    check_qubits(n, MAX_QUBITS, "problem Hamiltonian")?;
    Ok(par::map_indices(1 << n, |z| {
        let x: Vec<bool> = (0..n).map(|i| (z >> (n - 1 - i)) & 1 == 1).collect();
        problem.energy_unchecked(&x)
    }))
}

/// `s` values `0, 1/(points−1), …, 1`.
pub fn uniform_grid(points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::invalid("a grid needs at least 2 points"));
    }
    let last = (points - 1) as f64;
    Ok((0..points).map(|i| i as f64 / last).collect())
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.first() != Some(&0.0) || grid.last() != Some(&1.0) {
        return Err(Error::invalid("s-grid must start at 0 and end at 1"));
    }
    if !grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::invalid("s-grid must be strictly increasing"));
    }
    Ok(())
}

/// `H(s)` applied implicitly.
struct Interpolated<'a> {
    diag: &'a [f64],
    n: usize,
    s: f64,
}

impl Interpolated<'_> {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Upper bound on the spectral radius.
    fn norm_bound(&self) -> f64 {
        let max_diag = self.diag.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        (1.0 - self.s) * self.n as f64 + self.s * max_diag
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let b = 1.0 - self.s;
        let shift = b * self.n as f64 / 2.0;
        for (z, out) in y.iter_mut().enumerate() {
            let mut flips = 0.0;
            for i in 0..self.n {
                flips += x[z ^ (1 << i)];
            }
            *out = (shift + self.s * self.diag[z]) * x[z] - 0.5 * b * flips;
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (y, x) in y.iter_mut().zip(x) {
        *y += alpha * x;
    }
}

/// Unit vector at the `rank`-th smallest diagonal entry plus a small random
/// part. Off-diagonal entries of `H(s)` are non-positive, so the ground state
/// is entrywise positive for `s < 1`; a positive perturbation on the first
/// vector guarantees overlap with it.
fn start_vector(diag: &[f64], rank: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng_from_seed(seed);
    let mut order: Vec<usize> = (0..diag.len()).collect();
    order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]).then(a.cmp(&b)));
    let lo = if rank == 0 { 0.0 } else { -1.0 };
    let mut v: Vec<f64> = (0..diag.len()).map(|_| 0.01 * rng.random_range(lo..1.0)).collect();
    v[order[rank]] += 1.0;
    v
}

fn orthonormalize_into(mut t: Vec<f64>, basis: &[Vec<f64>], floor: f64) -> Option<Vec<f64>> {
    // two passes of classical Gram-Schmidt
    for _ in 0..2 {
        for v in basis {
            let c = dot(&t, v);
            axpy(-c, v, &mut t);
        }
    }
    let nt = norm(&t);
    if nt <= floor {
        return None;
    }
    t.iter_mut().for_each(|v| *v /= nt);
    Some(t)
}

/// In-place unnormalized fast Walsh–Hadamard transform.
fn walsh_hadamard(v: &mut [f64]) {
    let mut h = 1;
    while h < v.len() {
        for block in v.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// Approximate inverse of `H(s) − θ` used to build new search directions.
enum Preconditioner {
    /// `diag(H) − θ`; exact at `s = 1`.
    Diagonal,
    /// `(1 − s)·H_B + s·mean(H_P) − θ`, diagonal in the Walsh basis; exact at `s = 0`.
    Walsh { mean: f64 },
}

impl Preconditioner {
    /// Picks whichever approximation drops the smaller part of `H(s)`.
    fn choose(op: &Interpolated<'_>) -> Self {
        let mean = op.diag.iter().sum::<f64>() / op.diag.len() as f64;
        let spread = op.diag.iter().fold(0.0f64, |m, d| m.max((d - mean).abs()));
        if op.s * spread < (1.0 - op.s) * op.n as f64 / 2.0 {
            Preconditioner::Walsh { mean }
        } else {
            Preconditioner::Diagonal
        }
    }

    fn apply(&self, op: &Interpolated<'_>, theta: f64, v: &[f64]) -> Vec<f64> {
        let floor = 1e-3 * op.norm_bound().max(1.0);
        let safe_inv = |m: f64| if m.abs() < floor { floor.copysign(m).recip() } else { m.recip() };
        let b = 1.0 - op.s;
        match self {
            Preconditioner::Diagonal => {
                let shift = b * op.n as f64 / 2.0;
                v.iter()
                    .zip(op.diag)
                    .map(|(x, d)| x * safe_inv(shift + op.s * d - theta))
                    .collect()
            }
            Preconditioner::Walsh { mean } => {
                let mut w = v.to_vec();
                walsh_hadamard(&mut w);
                let scale = 1.0 / v.len() as f64;
                for (k, x) in w.iter_mut().enumerate() {
                    let level = b * f64::from(k.count_ones()) + op.s * mean;
                    *x *= scale * safe_inv(level - theta);
                }
                walsh_hadamard(&mut w);
                w
            }
        }
    }
}

/// Davidson correction with the Olsen adjustment, which keeps the new
/// direction from collapsing onto `x` when the preconditioner is accurate:
/// `t = M⁻¹r − ε·M⁻¹x` with `ε = xᵀM⁻¹r / xᵀM⁻¹x`.
fn correction(pre: &Preconditioner, op: &Interpolated<'_>, theta: f64, x: &[f64], r: &[f64]) -> Vec<f64> {
    let mr = pre.apply(op, theta, r);
    let mx = pre.apply(op, theta, x);
    let denom = dot(x, &mx);
    if denom.abs() < 1e-300 {
        return mr;
    }
    let eps = dot(x, &mr) / denom;
    mr.iter().zip(&mx).map(|(a, b)| a - eps * b).collect()
}

/// Two lowest eigenpairs: `(E0, ψ0, E1, ψ1)`.
type Lowest = (f64, Vec<f64>, f64, Vec<f64>);

/// Block Davidson iteration with thick restarts. The search space starts
/// from [`BLOCK`] vectors and grows by preconditioned residuals of the
/// lowest [`BLOCK`] Ritz pairs; only the lowest two must converge. A block
/// wider than two resolves degenerate ground levels and speeds up `E1` when
/// it sits at the bottom of a tight cluster.
fn iterative_lowest(diag: &[f64], n: usize, s: f64) -> Result<Lowest> {
    let op = Interpolated { diag, n, s };
    let dim = op.dim();
    if dim < 2 {
        return Err(Error::invalid("need at least one qubit"));
    }
    let scale = op.norm_bound().max(1.0);
    let tol = RESIDUAL_TOL * scale;
    let block = BLOCK.min(dim);
    let max_dim = MAX_SUBSPACE.min(dim);
    let keep = KEEP_ON_RESTART.min(max_dim.saturating_sub(block)).max(block);
    let pre = Preconditioner::choose(&op);

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_dim);
    let mut images: Vec<Vec<f64>> = Vec::with_capacity(max_dim);
    // projected matrix, row-major max_dim × max_dim
    let mut h = vec![0.0; max_dim * max_dim];
    let push = |v: Vec<f64>, basis: &mut Vec<Vec<f64>>, images: &mut Vec<Vec<f64>>, h: &mut [f64]| {
        let mut w = vec![0.0; dim];
        op.apply(&v, &mut w);
        let k = basis.len();
        for (i, u) in basis.iter().enumerate() {
            let c = dot(u, &w);
            h[i * max_dim + k] = c;
            h[k * max_dim + i] = c;
        }
        h[k * max_dim + k] = dot(&v, &w);
        basis.push(v);
        images.push(w);
    };
    for rank in 0..block {
        if let Some(v) = orthonormalize_into(start_vector(diag, rank, START_SEED + rank as u64), &basis, 1e-12) {
            push(v, &mut basis, &mut images, &mut h);
        }
    }

    for _ in 0..MAX_ITERATIONS {
        let k = basis.len();
        let proj = DMatrix::from_fn(k, k, |i, j| h[i * max_dim + j]);
        let eig = SymmetricEigen::new(proj);
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

        let ritz = |col: usize, from: &[Vec<f64>]| {
            let mut x = vec![0.0; dim];
            for (j, v) in from.iter().enumerate() {
                axpy(eig.eigenvectors[(j, col)], v, &mut x);
            }
            x
        };
        let mut pairs = Vec::with_capacity(block);
        for &col in &order[..block.min(k)] {
            let theta = eig.eigenvalues[col];
            let x = ritz(col, &basis);
            let mut r = ritz(col, &images);
            axpy(-theta, &x, &mut r);
            let done = norm(&r) <= tol;
            pairs.push((theta, x, r, done));
        }
        if k == dim || pairs.iter().take(2).all(|p| p.3) {
            let (e0, v0) = (pairs[0].0, pairs[0].1.clone());
            let (e1, v1) = (pairs[1].0, pairs[1].1.clone());
            return Ok((e0, v0, e1.max(e0), v1));
        }

        if k + block > max_dim {
            let cols: Vec<usize> = order[..keep.min(k)].to_vec();
            let new_basis: Vec<Vec<f64>> = cols.iter().map(|&c| ritz(c, &basis)).collect();
            let new_images: Vec<Vec<f64>> = cols.iter().map(|&c| ritz(c, &images)).collect();
            h.iter_mut().for_each(|v| *v = 0.0);
            for (i, &c) in cols.iter().enumerate() {
                h[i * max_dim + i] = eig.eigenvalues[c];
            }
            basis = new_basis;
            images = new_images;
        }
        let mut grew = false;
        for (theta, x, r, done) in pairs {
            if done || basis.len() == max_dim {
                continue;
            }
            let t = correction(&pre, &op, theta, &x, &r);
            // fall back to the plain residual if the correction lies in the span
            let v = orthonormalize_into(t, &basis, 1e-3 * tol).or_else(|| orthonormalize_into(r, &basis, 1e-3 * tol));
            if let Some(v) = v {
                push(v, &mut basis, &mut images, &mut h);
                grew = true;
            }
        }
        if !grew {
            return Err(Error::NoConvergence { s });
        }
    }
    Err(Error::NoConvergence { s })
}

fn dense_matrix(diag: &[f64], n: usize, s: f64) -> DMatrix<f64> {
    let dim = diag.len();
    let b = 1.0 - s;
    let mut m = DMatrix::zeros(dim, dim);
    for z in 0..dim {
        m[(z, z)] = b * n as f64 / 2.0 + s * diag[z];
        for i in 0..n {
            m[(z, z ^ (1 << i))] = -0.5 * b;
        }
    }
    m
}

/// The two lowest eigenpairs of `H(s)` by full diagonalization.
pub fn dense_lowest(problem: &QuboProblem, s: f64) -> Result<Lowest> {
    check_qubits(problem.n(), DENSE_MAX_QUBITS, "dense diagonalization")?;
    let diag = problem_hamiltonian_diagonal(problem)?;
    dense_lowest_diag(&diag, problem.n(), s)
}

fn dense_lowest_diag(diag: &[f64], n: usize, s: f64) -> Result<Lowest> {
    if n == 0 {
        return Err(Error::invalid("need at least one qubit"));
    }
    let eig = SymmetricEigen::new(dense_matrix(diag, n, s));
    let mut order: Vec<usize> = (0..diag.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vec = |c: usize| eig.eigenvectors.column(c).iter().copied().collect::<Vec<f64>>();
    Ok((
        eig.eigenvalues[order[0]],
        vec(order[0]),
        eig.eigenvalues[order[1]],
        vec(order[1]),
    ))
}

/// Two lowest eigenvalues by full diagonalization, without eigenvectors.
pub fn dense_lowest_values(problem: &QuboProblem, s: f64) -> Result<(f64, f64)> {
    check_qubits(problem.n(), DENSE_MAX_QUBITS, "dense diagonalization")?;
    if problem.n() == 0 {
        return Err(Error::invalid("need at least one qubit"));
    }
    let diag = problem_hamiltonian_diagonal(problem)?;
    let mut values: Vec<f64> = dense_matrix(&diag, problem.n(), s)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    values.sort_by(f64::total_cmp);
    Ok((values[0], values[1]))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralCurve {
    pub s_grid: Vec<f64>,
    pub e0: Vec<f64>,
    pub e1: Vec<f64>,
    pub n_qubits: usize,
}

impl SpectralCurve {
    pub fn gaps(&self) -> Vec<f64> {
        self.e1.iter().zip(&self.e0).map(|(a, b)| a - b).collect()
    }
}

/// Which eigensolver a sweep uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Eigensolver {
    #[default]
    Iterative,
    /// Full diagonalization; at most [`DENSE_MAX_QUBITS`] qubits.
    Dense,
}

/// `E0(s)` and `E1(s)` at every grid point.
pub fn spectral_sweep(problem: &QuboProblem, s_grid: &[f64]) -> Result<SpectralCurve> {
    spectral_sweep_with(problem, s_grid, Eigensolver::Iterative)
}

pub fn spectral_sweep_with(problem: &QuboProblem, s_grid: &[f64], solver: Eigensolver) -> Result<SpectralCurve> {
    let n = problem.n();
    check_qubits(n, MAX_QUBITS, "spectral sweep")?;
    if n == 0 {
        return Err(Error::invalid("need at least one qubit"));
    }
    if solver == Eigensolver::Dense {
        check_qubits(n, DENSE_MAX_QUBITS, "dense diagonalization")?;
    }
    check_grid(s_grid)?;
    let diag = problem_hamiltonian_diagonal(problem)?;
    let levels = par::map_slice(s_grid, |&s| -> Result<(f64, f64)> {
        match solver {
            Eigensolver::Iterative => iterative_lowest(&diag, n, s).map(|l| (l.0, l.2)),
            Eigensolver::Dense => {
                let mut values: Vec<f64> = dense_matrix(&diag, n, s).symmetric_eigenvalues().iter().copied().collect();
                values.sort_by(f64::total_cmp);
                Ok((values[0], values[1]))
            }
        }
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(SpectralCurve {
        s_grid: s_grid.to_vec(),
        e0: levels.iter().map(|l| l.0).collect(),
        e1: levels.iter().map(|l| l.1).collect(),
        n_qubits: n,
    })
}

/// Smallest `E1 − E0` on the grid and its `s`; ties within
/// [`DEGENERACY_TOL`] go to the smallest `s`.
pub fn min_gap(curve: &SpectralCurve) -> (f64, f64) {
    let gaps = curve.gaps();
    let mut best = (f64::INFINITY, 0.0);
    for (g, s) in gaps.iter().zip(&curve.s_grid) {
        if *g < best.0 - DEGENERACY_TOL {
            best = (*g, *s);
        }
    }
    // a later point may undercut by less than the tolerance
    let g_min = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    (g_min.max(0.0), best.1)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Curvature {
    /// Interior grid points.
    pub s: Vec<f64>,
    /// `|E0''(s)·s²(1 − s)²|` from central second differences.
    pub values: Vec<f64>,
    pub peak: f64,
    pub s_at_peak: f64,
}

pub fn curvature_metric(curve: &SpectralCurve) -> Result<Curvature> {
    let grid = &curve.s_grid;
    if grid.len() < MIN_CURVATURE_POINTS {
        return Err(Error::invalid(format!(
            "curvature needs at least {MIN_CURVATURE_POINTS} grid points, got {}",
            grid.len()
        )));
    }
    let h = (grid[grid.len() - 1] - grid[0]) / (grid.len() - 1) as f64;
    if grid.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(1.0)) {
        return Err(Error::invalid("curvature needs a uniform s-grid"));
    }
    let mut s_out = Vec::with_capacity(grid.len() - 2);
    let mut values = Vec::with_capacity(grid.len() - 2);
    for i in 1..grid.len() - 1 {
        let second = (curve.e0[i + 1] - 2.0 * curve.e0[i] + curve.e0[i - 1]) / (h * h);
        let s = grid[i];
        s_out.push(s);
        values.push((second * s * s * (1.0 - s) * (1.0 - s)).abs());
    }
    let (idx, peak) = values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, v)| if *v > best.1 { (i, *v) } else { best });
    Ok(Curvature {
        s_at_peak: s_out[idx],
        s: s_out,
        values,
        peak,
    })
}

/// `|⟨ψ0|(H_P − H_B)|ψ1⟩|` at `s`, or `None` when the two lowest levels
/// are degenerate within [`DEGENERACY_TOL`].
pub fn v01_matrix_element(problem: &QuboProblem, s: f64) -> Result<Option<f64>> {
    let n = problem.n();
    check_qubits(n, MAX_QUBITS, "matrix element")?;
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::invalid("s must lie in [0, 1]"));
    }
    let diag = problem_hamiltonian_diagonal(problem)?;
    let (e0, v0, e1, v1) = iterative_lowest(&diag, n, s)?;
    if e1 - e0 < DEGENERACY_TOL {
        return Ok(None);
    }
    Ok(Some(matrix_element(&diag, n, &v0, &v1)))
}

fn matrix_element(diag: &[f64], n: usize, v0: &[f64], v1: &[f64]) -> f64 {
    // H_P − H_B = H(1) − H(0)
    let p = Interpolated { diag, n, s: 1.0 };
    let b = Interpolated { diag, n, s: 0.0 };
    let mut hp = vec![0.0; diag.len()];
    let mut hb = vec![0.0; diag.len()];
    p.apply(v1, &mut hp);
    b.apply(v1, &mut hb);
    (dot(v0, &hp) - dot(v0, &hb)).abs()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapReport {
    pub g_min: f64,
    pub s_at_gmin: f64,
    pub curvature_peak: f64,
    pub s_at_peak: f64,
    pub v01_at_peak: Option<f64>,
}

/// Sweep, gap, curvature and the matrix element at the curvature peak.
pub fn gap_analysis(problem: &QuboProblem, s_grid: &[f64]) -> Result<(SpectralCurve, Curvature, GapReport)> {
    let curve = spectral_sweep(problem, s_grid)?;
    let (g_min, s_at_gmin) = min_gap(&curve);
    let curvature = curvature_metric(&curve)?;
    let v01 = v01_matrix_element(problem, curvature.s_at_peak)?;
    let report = GapReport {
        g_min,
        s_at_gmin,
        curvature_peak: curvature.peak,
        s_at_peak: curvature.s_at_peak,
        v01_at_peak: v01,
    };
    Ok((curve, curvature, report))
}

/// CSV with columns `s,E0,E1,gap,curvature`; curvature is empty at the endpoints.
pub fn write_curve_csv(curve: &SpectralCurve, curvature: Option<&Curvature>, mut out: impl std::io::Write) -> Result<()> {
    writeln!(out, "s,E0,E1,gap,curvature")?;
    let last = curve.s_grid.len() - 1;
    for i in 0..=last {
        let c = match curvature {
            Some(c) if i > 0 && i < last => c.values[i - 1].to_string(),
            _ => String::new(),
        };
        writeln!(
            out,
            "{},{},{},{},{}",
            curve.s_grid[i],
            curve.e0[i],
            curve.e1[i],
            curve.e1[i] - curve.e0[i],
            c
        )?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingRow {
    pub n: usize,
    pub mean: f64,
    pub std: f64,
    pub peaks: Vec<f64>,
}

/// Mean and sample standard deviation of the curvature peak over
/// `runs_per_size` instances per size. `generator(n, run)` builds each
/// instance.
pub fn scaling_sweep<G>(qubits: &[usize], generator: G, runs_per_size: usize, s_grid: &[f64]) -> Result<Vec<ScalingRow>>
where
    G: Fn(usize, usize) -> Result<QuboProblem> + Sync,
{
    if runs_per_size == 0 {
        return Err(Error::invalid("runs_per_size must be positive"));
    }
    if let Some(&n) = qubits.iter().find(|&&n| n > MAX_QUBITS) {
        return Err(Error::TooLarge {
            what: "scaling sweep",
            n,
            limit: MAX_QUBITS,
        });
    }
    qubits
        .iter()
        .map(|&n| {
            let peaks = par::map_indices(runs_per_size, |run| -> Result<f64> {
                let problem = generator(n, run)?;
                if problem.n() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        actual: problem.n(),
                    });
                }
                Ok(curvature_metric(&spectral_sweep(&problem, s_grid)?)?.peak)
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
            let mean = peaks.iter().sum::<f64>() / peaks.len() as f64;
            let std = if peaks.len() > 1 {
                (peaks.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (peaks.len() - 1) as f64).sqrt()
            } else {
                0.0
            };
            Ok(ScalingRow { n, mean, std, peaks })
        })
        .collect()
}

pub fn write_scaling_csv(rows: &[ScalingRow], mut out: impl std::io::Write) -> Result<()> {
    writeln!(out, "n,mean,std")?;
    for r in rows {
        writeln!(out, "{},{},{}", r.n, r.mean, r.std)?;
    }
    Ok(())
}

/// Least-squares slope of `ln(mean)` against `n`.
pub fn log_mean_slope(rows: &[ScalingRow]) -> Result<f64> {
    if rows.len() < 2 || rows.iter().any(|r| r.mean <= 0.0) {
        return Err(Error::invalid("slope needs at least two rows with positive means"));
    }
    let k = rows.len() as f64;
    let xs: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.mean.ln()).collect();
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Settings for [`training_instance`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InstanceParams {
    pub features: usize,
    pub samples: usize,
    pub overlap: f64,
}

impl Default for InstanceParams {
    fn default() -> Self {
        Self {
            features: 10,
            samples: 100,
            overlap: 0.95,
        }
    }
}

/// Training objective over the `n` lowest-error stumps of a fresh Gaussian
/// mixture, with `κ = 1/n` and `λ = ½·(2/n + 1/n²)`, as a per-sample mean:
///
/// ```text
/// (1/S)·Σ_s (κ·Σ_i w_i h_i(x_s) − y_s)² + λ·Σ_i w_i
/// ```
pub fn training_instance(n: usize, seed: u64, params: InstanceParams) -> Result<QuboProblem> {
    use crate::boosting::weak_lambda_bound;
    use crate::data::{generate_gaussian_mixture, SampleWeights};
    use crate::qubo::{build_training_qubo, PredictionMatrix};
    use crate::stumps::{build_dictionary, rank_by_error, Orders};

    let data = generate_gaussian_mixture(params.features, params.overlap, params.samples, seed)?;
    let fit = build_dictionary(&data, &SampleWeights::uniform(data.len())?, Orders::BOTH)?;
    let top = rank_by_error(&fit.errors, n, &Default::default())?;
    let stumps: Vec<_> = top.iter().map(|&i| fit.dictionary.stumps()[i]).collect();
    let h = PredictionMatrix::from_stumps(&stumps, &data);
    let s = data.len() as f64;
    let lambda = 0.5 * weak_lambda_bound(n);
    build_training_qubo(&h, &data.labels(), 1.0 / n as f64, lambda * s, None)?.scaled(1.0 / s)
}
