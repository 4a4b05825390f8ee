//! Dense symmetric factorization for exact Gaussian sampling.
//!
//! Covariance matrices of isotropic fields on point sets are often far from
//! full rank (the canonical field's matrix is a Gram matrix of rank N + 1),
//! and exactly singular matrices are routine: plain Cholesky would fail on
//! them. The workhorse here is a diagonally pivoted, rank-revealing Cholesky
//! factorization producing `B` with `B B^T = A` up to a relative tolerance;
//! sampling then needs only `rank` standard normals per draw.
//!
//! The factorization reads the matrix through a column oracle, so low-rank
//! kernels never materialize the full `n x n` matrix. If a matrix turns out
//! indefinite beyond round-off, a small diagonal jitter is added and escalated
//! up to three times before giving up.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Relative diagonal threshold below which the remaining Schur complement is
/// treated as zero (rank cut).
pub const RANK_TOLERANCE: f64 = 1e-12;

/// Relative threshold for declaring a matrix indefinite rather than
/// numerically rank-deficient.
const INDEFINITE_TOLERANCE: f64 = 1e-8;

/// Initial relative jitter added to the diagonal when the factorization
/// detects indefiniteness; escalated tenfold at most [`MAX_JITTER_RETRIES`]
/// times.
const BASE_JITTER: f64 = 1e-12;
const MAX_JITTER_RETRIES: usize = 3;

/// Read access to a symmetric matrix by diagonal and columns.
pub trait SymmetricKernel {
    fn dim(&self) -> usize;
    /// Writes the full diagonal into `out`.
    fn diagonal(&self, out: &mut [f64]);
    /// Writes column `j` into `out`.
    fn column(&self, j: usize, out: &mut [f64]);
}

impl SymmetricKernel for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn diagonal(&self, out: &mut [f64]) {
        for (i, v) in out.iter_mut().enumerate() {
            *v = self[(i, i)];
        }
    }

    fn column(&self, j: usize, out: &mut [f64]) {
        for (i, v) in out.iter_mut().enumerate() {
            *v = self[(i, j)];
        }
    }
}

/// Result of the pivoted factorization: `factor` is `n x rank` in the
/// original row order, `factor * factor^T` reproduces the input to
/// `RANK_TOLERANCE` relative accuracy, and `jitter` records any diagonal
/// regularization that was required (normally zero).
#[derive(Debug, Clone)]
pub struct PivotedFactor {
    pub factor: DMatrix<f64>,
    pub rank: usize,
    pub pivots: Vec<usize>,
    pub jitter: f64,
}

/// Rank-revealing Cholesky with diagonal pivoting.
pub fn pivoted_cholesky<K: SymmetricKernel>(kernel: &K) -> Result<PivotedFactor> {
    let n = kernel.dim();
    if n == 0 {
        return Err(Error::invalid("cannot factor an empty matrix"));
    }
    let mut jitter = 0.0;
    let mut base_scale = 0.0;
    for attempt in 0..=MAX_JITTER_RETRIES {
        match try_factor(kernel, jitter) {
            Ok(f) => return Ok(f),
            Err(FactorFailure { scale, min_diag }) => {
                if attempt == MAX_JITTER_RETRIES {
                    return Err(Error::numerical(format!(
                        "covariance factorization failed after {MAX_JITTER_RETRIES} jitter \
                         escalations; smallest eigenvalue estimate {min_diag:e}"
                    )));
                }
                base_scale = if base_scale > 0.0 { base_scale } else { scale };
                jitter = if jitter == 0.0 {
                    BASE_JITTER * base_scale
                } else {
                    jitter * 10.0
                };
            }
        }
    }
    unreachable!()
}

struct FactorFailure {
    scale: f64,
    min_diag: f64,
}

fn try_factor<K: SymmetricKernel>(
    kernel: &K,
    jitter: f64,
) -> std::result::Result<PivotedFactor, FactorFailure> {
    let n = kernel.dim();
    let mut diag = vec![0.0; n];
    kernel.diagonal(&mut diag);
    if jitter > 0.0 {
        for d in diag.iter_mut() {
            *d += jitter;
        }
    }
    let scale = diag.iter().cloned().fold(0.0f64, f64::max).max(1e-300);

    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    let mut active = vec![true; n];
    let mut col_buf = vec![0.0; n];

    loop {
        let mut best = usize::MAX;
        let mut best_val = f64::NEG_INFINITY;
        let mut min_val = f64::INFINITY;
        for j in 0..n {
            if active[j] {
                if diag[j] > best_val {
                    best_val = diag[j];
                    best = j;
                }
                min_val = min_val.min(diag[j]);
            }
        }
        if best == usize::MAX || best_val <= RANK_TOLERANCE * scale {
            // remaining mass is round-off; check nothing is badly negative
            if min_val < -INDEFINITE_TOLERANCE * scale {
                return Err(FactorFailure { scale, min_diag: min_val });
            }
            break;
        }
        if min_val < -INDEFINITE_TOLERANCE * scale {
            return Err(FactorFailure { scale, min_diag: min_val });
        }

        let p = best;
        kernel.column(p, &mut col_buf);
        if jitter > 0.0 {
            col_buf[p] += jitter;
        }
        for prev in &columns {
            let b_pk = prev[p];
            if b_pk != 0.0 {
                for i in 0..n {
                    col_buf[i] -= prev[i] * b_pk;
                }
            }
        }
        let ell = best_val.sqrt();
        let mut new_col = vec![0.0; n];
        for i in 0..n {
            if active[i] && i != p {
                let v = col_buf[i] / ell;
                new_col[i] = v;
                diag[i] -= v * v;
            }
        }
        new_col[p] = ell;
        diag[p] = 0.0;
        active[p] = false;
        pivots.push(p);
        columns.push(new_col);
        if columns.len() == n {
            break;
        }
    }

    let rank = columns.len();
    let mut factor = DMatrix::zeros(n, rank.max(1));
    for (k, col) in columns.iter().enumerate() {
        for i in 0..n {
            factor[(i, k)] = col[i];
        }
    }
    Ok(PivotedFactor { factor, rank, pivots, jitter })
}

impl PivotedFactor {
    /// `factor * g` for a standard normal vector `g` of length `rank`.
    pub fn apply(&self, g: &[f64]) -> Vec<f64> {
        let n = self.factor.nrows();
        let mut out = vec![0.0; n];
        for (k, &gk) in g.iter().enumerate().take(self.rank) {
            if gk != 0.0 {
                let col = self.factor.column(k);
                for i in 0..n {
                    out[i] += col[i] * gk;
                }
            }
        }
        out
    }
}
