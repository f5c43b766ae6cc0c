//! Sparse symmetric matrices and the iterative kernels built on them.
//!
//! Storage is the lower triangle (diagonal included) in row-compressed
//! form with sorted column indices. The mirrored upper entries are never
//! stored, so `A = Aᵀ` holds bit for bit by construction, and two matrices
//! with the same entries always have the same representation.

mod cg;
mod power;

pub use cg::{cg_solve, cg_solve_op, CgOptions};
pub use power::{min_eigenvalue, min_eigenvalue_op, spectral_norm, spectral_norm_op};

use crate::dense::{DenseMatrix, DenseSymMatrix};
use crate::error::{Error, Result};

/// Anything that acts as a symmetric linear operator on `R^n`.
pub trait SymOperator {
    fn dim(&self) -> usize;

    /// `y <- A x`. Both slices have length `dim()`.
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl SymOperator for DenseSymMatrix {
    fn dim(&self) -> usize {
        DenseSymMatrix::dim(self)
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec_into(x, y);
    }
}

/// Wraps a closure as a [`SymOperator`]. The caller vouches for symmetry.
pub struct FnOperator<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64], &mut [f64])> FnOperator<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(&[f64], &mut [f64])> SymOperator for FnOperator<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        (self.f)(x, y)
    }
}

/// Options shared by the power-type iterations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterOptions {
    /// Relative change of the eigenvalue estimate at which iteration stops.
    pub tol: f64,
    pub max_iter: usize,
    /// Seed of the pseudorandom start vector.
    pub seed: u64,
}

impl IterOptions {
    pub const DEFAULT_SEED: u64 = 0x6772_616d;

    pub fn new(tol: f64, max_iter: usize) -> Self {
        Self {
            tol,
            max_iter,
            ..Self::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

impl Default for IterOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 5000,
            seed: Self::DEFAULT_SEED,
        }
    }
}

/// Result of a power-type eigenvalue estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub iterations: usize,
    /// Relative change of the estimate in the final iteration.
    pub residual: f64,
}

/// Compressed sparse symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
    spd_asserted: bool,
}

impl SparseSymMatrix {
    /// Builds a matrix from `(row, col, value)` triplets.
    ///
    /// Entries may come from either triangle; `(i, j)` and `(j, i)` denote
    /// the same stored entry and duplicates are summed. Entries that end up
    /// exactly zero are dropped.
    pub fn from_triplets<I>(dim: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut entries: Vec<(usize, usize, f64)> = Vec::new();
        for (r, c, v) in triplets {
            if r >= dim || c >= dim {
                return Err(Error::InvalidParameter(format!(
                    "entry ({r}, {c}) outside a {dim}x{dim} matrix"
                )));
            }
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "non-finite value at ({r}, {c})"
                )));
            }
            let (r, c) = if r >= c { (r, c) } else { (c, r) };
            entries.push((r, c, v));
        }
        entries.sort_by_key(|e| (e.0, e.1));

        let mut row_ptr = vec![0usize; dim + 1];
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        let mut rows = Vec::with_capacity(entries.len());
        let mut iter = entries.into_iter().peekable();
        while let Some((r, c, mut v)) = iter.next() {
            while let Some(&(r2, c2, v2)) = iter.peek() {
                if (r2, c2) != (r, c) {
                    break;
                }
                v += v2;
                iter.next();
            }
            if v != 0.0 {
                rows.push(r);
                col_idx.push(c);
                values.push(v);
            }
        }
        for &r in &rows {
            row_ptr[r + 1] += 1;
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(Self {
            dim,
            row_ptr,
            col_idx,
            values,
            spd_asserted: false,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self::from_triplets(diag.len(), diag.iter().enumerate().map(|(i, &d)| (i, i, d)))
            .expect("diagonal entries are in range")
    }

    /// Takes every nonzero of the lower triangle of a dense symmetric matrix.
    pub fn from_dense(a: &DenseSymMatrix) -> Self {
        let n = a.dim();
        let mut trip = Vec::new();
        for i in 0..n {
            for j in 0..=i {
                let v = a[(i, j)];
                if v != 0.0 {
                    trip.push((i, j, v));
                }
            }
        }
        Self::from_triplets(n, trip).expect("dense entries are finite and in range")
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored (lower-triangle) entries.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn spd_asserted(&self) -> bool {
        self.spd_asserted
    }

    /// Records that the producer of this matrix claims it is SPD.
    pub fn with_spd_asserted(mut self, spd: bool) -> Self {
        self.spd_asserted = spd;
        self
    }

    /// Iterates the stored entries `(row, col, value)` with `col <= row`,
    /// in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1])
                .map(move |k| (r, self.col_idx[k], self.values[k]))
        })
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        if r >= self.dim {
            return 0.0;
        }
        let cols = &self.col_idx[self.row_ptr[r]..self.row_ptr[r + 1]];
        match cols.binary_search(&c) {
            Ok(k) => self.values[self.row_ptr[r] + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    /// Sum of all entries of the full (mirrored) matrix.
    pub fn total_sum(&self) -> f64 {
        self.iter()
            .map(|(r, c, v)| if r == c { v } else { 2.0 * v })
            .sum()
    }

    /// Returns `A / divisor`, entry by entry.
    pub fn divided_by(&self, divisor: f64) -> Self {
        let mut out = self.clone();
        for v in &mut out.values {
            *v /= divisor;
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        let mut y = vec![0.0; self.dim];
        self.matvec_into(x, &mut y);
        Ok(y)
    }

    /// `y <- A x` using stored and mirrored entries. Lengths are not checked.
    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for r in 0..self.dim {
            let mut acc = 0.0;
            let xr = x[r];
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.col_idx[k];
                let v = self.values[k];
                acc += v * x[c];
                if c != r {
                    y[c] += v * xr;
                }
            }
            y[r] += acc;
        }
    }

    /// `A * B` for a dense `B`, applying the operator to every column.
    pub fn mul_dense(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        if b.rows() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: b.rows(),
            });
        }
        let mut out = DenseMatrix::zeros(self.dim, b.cols());
        self.mul_dense_into(b.as_slice(), b.cols(), out.as_mut_slice());
        Ok(out)
    }

    /// `out = A * B` on row-major slices with `ncols` columns.
    pub fn mul_dense_into(&self, b: &[f64], ncols: usize, out: &mut [f64]) {
        let m = ncols;
        out.iter_mut().for_each(|v| *v = 0.0);
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.col_idx[k];
                let v = self.values[k];
                // out[r, :] += v * b[c, :]
                for j in 0..m {
                    out[r * m + j] += v * b[c * m + j];
                }
                if c != r {
                    for j in 0..m {
                        out[c * m + j] += v * b[r * m + j];
                    }
                }
            }
        }
    }

    pub fn to_dense(&self) -> DenseSymMatrix {
        let mut m = DenseMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.iter() {
            m[(r, c)] = v;
            m[(c, r)] = v;
        }
        DenseSymMatrix::new(m).expect("square by construction")
    }
}

impl SymOperator for SparseSymMatrix {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec_into(x, y);
    }
}
