//! Finite-difference check of the spectrum.
//!
//! `−Ψ'' + V Ψ = E Ψ` is discretized on the interior nodes `x_i = iπ/M` with
//! `Ψ(0) = Ψ(π) = 0`. The resulting symmetric tridiagonal matrix is
//! diagonalized by Sturm-sequence bisection, and two grids are combined by
//! Richardson extrapolation. None of this shares code with the AIM path.

use std::f64::consts::PI;

use thiserror::Error;

use crate::well::{potential, WellError, WellParams};

/// Smallest admissible number of intervals.
pub const MIN_INTERVALS: usize = 64;

/// Default coarse grid; the fine grid doubles it.
pub const DEFAULT_INTERVALS: usize = 1024;

const INVERSE_ITERATIONS: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("grid needs at least {MIN_INTERVALS} intervals, got {0}")]
    TooCoarse(usize),
    #[error("requested {count} eigenvalues from a {size}×{size} matrix")]
    TooMany { count: usize, size: usize },
    #[error("potential is not finite at x = {0}")]
    NonFinite(f64),
    #[error("eigensolver failed: {0}")]
    NoConvergence(String),
    #[error(transparent)]
    Well(#[from] WellError),
}

/// `M − 1` interior nodes of a uniform grid on `(0, π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdGrid {
    intervals: usize,
}

impl FdGrid {
    pub fn new(intervals: usize) -> Result<Self, OracleError> {
        if intervals < MIN_INTERVALS {
            return Err(OracleError::TooCoarse(intervals));
        }
        Ok(FdGrid { intervals })
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn spacing(&self) -> f64 {
        PI / self.intervals as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (1..self.intervals).map(|i| i as f64 * self.spacing()).collect()
    }

    /// The grid with twice as many intervals.
    pub fn refined(&self) -> FdGrid {
        FdGrid { intervals: 2 * self.intervals }
    }
}

/// A symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    /// `off[i]` couples rows `i` and `i + 1`.
    pub off: Vec<f64>,
}

impl Tridiagonal {
    pub fn size(&self) -> usize {
        self.diag.len()
    }

    /// Entry `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.abs_diff(j) {
            0 => self.diag[i],
            1 => self.off[i.min(j)],
            _ => 0.0,
        }
    }

    /// Number of eigenvalues strictly below `x` (Sturm count via LDLᵀ pivots).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..self.size() {
            let coupling = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] };
            d = self.diag[i] - x - coupling / d;
            if d == 0.0 {
                d = f64::EPSILON * (self.diag[i].abs() + x.abs()).max(1.0);
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.size();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 } + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }
}

/// Second-difference Laplacian plus the potential on the diagonal.
pub fn build_matrix(p: &WellParams, grid: &FdGrid) -> Result<Tridiagonal, OracleError> {
    let h = grid.spacing();
    let inv_h2 = 1.0 / (h * h);
    let diag = grid
        .points()
        .into_iter()
        .map(|x| {
            let v = potential(x, p)?;
            if !v.is_finite() {
                return Err(OracleError::NonFinite(x));
            }
            Ok(2.0 * inv_h2 + v)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let off = vec![-inv_h2; diag.len().saturating_sub(1)];
    Ok(Tridiagonal { diag, off })
}

/// The `count` smallest eigenvalues, ascending, by bisection on Sturm counts.
pub fn lowest_eigenvalues(op: &Tridiagonal, count: usize) -> Result<Vec<f64>, OracleError> {
    if count > op.size() {
        return Err(OracleError::TooMany { count, size: op.size() });
    }
    let (lo, hi) = op.gershgorin();
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        // the k-th eigenvalue is the smallest x with count_below(x) > k
        let (mut a, mut b) = (out.last().copied().unwrap_or(lo), hi);
        while b - a > 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(1.0) {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if op.count_below(mid) > k {
                b = mid;
            } else {
                a = mid;
            }
        }
        let e = 0.5 * (a + b);
        if !e.is_finite() {
            return Err(OracleError::NoConvergence(format!("eigenvalue {k} is not finite")));
        }
        out.push(e);
    }
    Ok(out)
}

/// Unit eigenvector for the eigenvalue `lambda` by inverse iteration.
pub fn eigenvector(op: &Tridiagonal, lambda: f64) -> Result<Vec<f64>, OracleError> {
    let n = op.size();
    let shift = lambda + 1e-10 * lambda.abs().max(1.0);
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7 + 3) % 11) as f64).collect();
    for _ in 0..INVERSE_ITERATIONS {
        v = solve_shifted(op, shift, &v)?;
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(OracleError::NoConvergence("inverse iteration diverged".into()));
        }
        v.iter_mut().for_each(|x| *x /= norm);
    }
    Ok(v)
}

/// Solves `(op − shift·I) x = rhs` with partial pivoting.
fn solve_shifted(op: &Tridiagonal, shift: f64, rhs: &[f64]) -> Result<Vec<f64>, OracleError> {
    let n = op.size();
    // rows hold (sub, diag, sup, sup2) after pivoting
    let mut a: Vec<[f64; 4]> = (0..n)
        .map(|i| {
            [
                if i > 0 { op.off[i - 1] } else { 0.0 },
                op.diag[i] - shift,
                if i + 1 < n { op.off[i] } else { 0.0 },
                0.0,
            ]
        })
        .collect();
    let mut b = rhs.to_vec();
    for i in 0..n.saturating_sub(1) {
        if a[i + 1][0].abs() > a[i][1].abs() {
            // swap rows i and i+1, shifting row i+1 into (diag, sup, sup2) form
            let next = [0.0, a[i + 1][0], a[i + 1][1], a[i + 1][2]];
            let cur = [0.0, a[i][1], a[i][2], a[i][3]];
            a[i] = next;
            a[i + 1] = [cur[1], cur[2], cur[3], 0.0];
            b.swap(i, i + 1);
        } else {
            let r = a[i + 1];
            a[i + 1] = [r[0], r[1], r[2], 0.0];
        }
        let piv = nonzero(a[i][1]);
        let m = a[i + 1][0] / piv;
        a[i + 1][0] = 0.0;
        a[i + 1][1] -= m * a[i][2];
        a[i + 1][2] -= m * a[i][3];
        b[i + 1] -= m * b[i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        if i + 1 < n {
            s -= a[i][2] * x[i + 1];
        }
        if i + 2 < n {
            s -= a[i][3] * x[i + 2];
        }
        x[i] = s / nonzero(a[i][1]);
    }
    Ok(x)
}

fn nonzero(x: f64) -> f64 {
    if x == 0.0 { f64::MIN_POSITIVE.sqrt() } else { x }
}

/// Interior sign changes, ignoring entries below `1e-8` of the largest magnitude.
pub fn node_count(v: &[f64]) -> usize {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let floor = 1e-8 * max;
    let mut last = 0.0f64;
    let mut changes = 0;
    for &x in v {
        if x.abs() <= floor {
            continue;
        }
        if last != 0.0 && (x > 0.0) != (last > 0.0) {
            changes += 1;
        }
        last = x;
    }
    changes
}

/// `(4 e_2M − e_M)/3`.
pub fn richardson(e_m: f64, e_2m: f64) -> f64 {
    if e_m == e_2m {
        return e_m;
    }
    (4.0 * e_2m - e_m) / 3.0
}

/// One level as seen by the oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleLevel {
    pub level: usize,
    pub coarse: f64,
    pub fine: f64,
    pub extrapolated: f64,
    /// Sign changes of the fine-grid eigenvector.
    pub nodes: usize,
}

/// The lowest `count` levels on grids of `intervals` and `2·intervals`.
pub fn solve(p: &WellParams, count: usize, intervals: usize) -> Result<Vec<OracleLevel>, OracleError> {
    let coarse_grid = FdGrid::new(intervals)?;
    let fine_grid = coarse_grid.refined();
    let coarse = lowest_eigenvalues(&build_matrix(p, &coarse_grid)?, count)?;
    let fine_op = build_matrix(p, &fine_grid)?;
    let fine = lowest_eigenvalues(&fine_op, count)?;
    coarse
        .into_iter()
        .zip(fine)
        .enumerate()
        .map(|(level, (c, f))| {
            let nodes = node_count(&eigenvector(&fine_op, f)?);
            Ok(OracleLevel { level, coarse: c, fine: f, extrapolated: richardson(c, f), nodes })
        })
        .collect()
}
