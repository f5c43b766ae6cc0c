//! Seeded generators for synthetic test matrices.
//!
//! Everything here is deterministic for a given seed so that studies and
//! tests can be rerun bit for bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dense::{dot, DenseMatrix, DenseSymMatrix};
use crate::sparse::SparseSymMatrix;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Vector of standard normal samples.
pub fn random_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    (0..n).map(|_| r.sample(StandardNormal)).collect()
}

/// Haar-ish random orthogonal matrix from Gram-Schmidt (applied twice) on a
/// Gaussian matrix. Columns are the orthonormal vectors.
pub fn random_orthogonal(n: usize, seed: u64) -> DenseMatrix {
    let mut r = rng(seed);
    let mut cols: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..n).map(|_| r.sample(StandardNormal)).collect())
        .collect();
    for j in 0..n {
        for _pass in 0..2 {
            for k in 0..j {
                let (done, rest) = cols.split_at_mut(j);
                let proj = dot(&done[k], &rest[0]);
                for (x, q) in rest[0].iter_mut().zip(&done[k]) {
                    *x -= proj * q;
                }
            }
        }
        let nrm = dot(&cols[j], &cols[j]).sqrt();
        cols[j].iter_mut().for_each(|x| *x /= nrm);
    }
    DenseMatrix::from_fn(n, n, |i, j| cols[j][i])
}

/// `Q diag(spectrum) Qᵀ` with a seeded random orthogonal `Q`.
pub fn spd_with_spectrum(spectrum: &[f64], seed: u64) -> DenseSymMatrix {
    let n = spectrum.len();
    let q = random_orthogonal(n, seed);
    let scaled = DenseMatrix::from_fn(n, n, |i, j| q[(i, j)] * spectrum[j]);
    let a = scaled.matmul(&q.transpose()).expect("square");
    DenseSymMatrix::new(a).expect("square")
}

/// `n` equispaced points covering `[lo, hi]`, endpoints included.
pub fn linear_spectrum(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![hi];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Random dense SPD matrix with eigenvalues drawn uniformly from `[0.5, 5]`.
pub fn random_spd(n: usize, seed: u64) -> DenseSymMatrix {
    let mut r = rng(seed ^ 0x9e37_79b9_7f4a_7c15);
    let spectrum: Vec<f64> = (0..n).map(|_| r.random_range(0.5..5.0)).collect();
    spd_with_spectrum(&spectrum, seed)
}

/// Random dense symmetric matrix with standard normal entries.
pub fn random_symmetric(n: usize, seed: u64) -> DenseSymMatrix {
    let mut r = rng(seed);
    let mut m = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v: f64 = r.sample(StandardNormal);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    DenseSymMatrix::new(m).expect("square")
}

/// Random sparse, strictly diagonally dominant SPD matrix with about
/// `per_row` off-diagonal entries in each row of the lower triangle.
pub fn random_sparse_spd(n: usize, per_row: usize, seed: u64) -> SparseSymMatrix {
    let mut r = rng(seed);
    let mut trip = Vec::new();
    let mut row_abs = vec![0.0; n];
    for i in 1..n {
        for _ in 0..per_row.min(i) {
            let j = r.random_range(0..i);
            let v: f64 = r.random_range(-1.0..1.0);
            trip.push((i, j, v));
            row_abs[i] += v.abs();
            row_abs[j] += v.abs();
        }
    }
    for (i, s) in row_abs.iter().enumerate() {
        trip.push((i, i, s + r.random_range(0.5..1.5)));
    }
    SparseSymMatrix::from_triplets(n, trip)
        .expect("generated indices are in range")
        .with_spd_asserted(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthogonal_is_orthonormal() {
        let q = random_orthogonal(30, 4);
        let qtq = q.transpose().matmul(&q).unwrap();
        let eye = DenseMatrix::identity(30);
        assert!(qtq.sub(&eye).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn prescribed_spectrum_has_right_trace() {
        let s = linear_spectrum(0.1, 1.0, 20);
        let a = spd_with_spectrum(&s, 8);
        let trace: f64 = a.diagonal().iter().sum();
        assert!((trace - s.iter().sum::<f64>()).abs() < 1e-12);
    }

    #[test]
    fn linear_spectrum_endpoints() {
        let s = linear_spectrum(0.2, 1.0, 5);
        assert_eq!(s[0], 0.2);
        assert_eq!(s[4], 1.0);
    }
}
