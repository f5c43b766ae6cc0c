//! Dense reference computations.
//!
//! The oracle is the accuracy authority for everything in [`crate::matfun`]:
//! a cyclic Jacobi eigensolver, reference square roots built from the
//! eigendecomposition, and the relative spectral-norm error used to score
//! the expansions. All paths are dense and `O(N³)`.

use crate::dense::{DenseMatrix, DenseSymMatrix};
use crate::error::{Error, Result};
use crate::sparse::{spectral_norm_op, IterOptions, SparseSymMatrix};

const MAX_SWEEPS: usize = 100;

/// Symmetric eigendecomposition `A = V diag(values) Vᵀ`.
#[derive(Debug, Clone)]
pub struct EigDecomposition {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors, one per column, matching `values`.
    pub vectors: DenseMatrix,
}

impl EigDecomposition {
    /// `V diag(f(λ)) Vᵀ`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> DenseSymMatrix {
        let n = self.values.len();
        let fl: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        let mut out = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let s: f64 = (0..n).map(|k| v[(i, k)] * fl[k] * v[(j, k)]).sum();
                out[(i, j)] = s;
                out[(j, i)] = s;
            }
        }
        DenseSymMatrix::new(out).expect("square")
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(f64::NAN)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(f64::NAN)
    }

    /// `λ_max / λ_min`.
    pub fn condition_number(&self) -> f64 {
        self.max() / self.min()
    }
}

/// Cyclic Jacobi eigensolver.
///
/// Sweeps over all `(p, q)` pairs until the off-diagonal Frobenius mass is
/// at most `1e-14·‖A‖_F`.
pub fn eig_sym(a: &DenseSymMatrix) -> Result<EigDecomposition> {
    let n = a.dim();
    let mut m = a.as_matrix().clone();
    let mut v = DenseMatrix::identity(n);
    let fro = m.frobenius_norm();
    let target = 1e-14 * fro;

    let mut converged = n <= 1 || fro == 0.0;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NotConverged {
                what: "Jacobi eigensolver",
                iterations: sweeps,
                estimate: f64::NAN,
                residual: off_diagonal(&m) / fro,
            });
        }
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                if apq.abs() <= 1e-18 * (app * aqq).abs().sqrt() {
                    m[(p, q)] = 0.0;
                    m[(q, p)] = 0.0;
                    continue;
                }
                rotated = true;
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = m[(k, p)];
                    let akq = m[(k, q)];
                    let new_p = c * akp - s * akq;
                    let new_q = s * akp + c * akq;
                    m[(k, p)] = new_p;
                    m[(p, k)] = new_p;
                    m[(k, q)] = new_q;
                    m[(q, k)] = new_q;
                }
                m[(p, p)] = app - t * apq;
                m[(q, q)] = aqq + t * apq;
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
        converged = !rotated || off_diagonal(&m) <= target;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = DenseMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(EigDecomposition { values, vectors })
}

fn off_diagonal(m: &DenseMatrix) -> f64 {
    let n = m.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[(i, j)] * m[(i, j)];
            }
        }
    }
    s.sqrt()
}

fn spd_eig(a: &DenseSymMatrix) -> Result<EigDecomposition> {
    let eig = eig_sym(a)?;
    if !(eig.min() > 0.0) {
        return Err(Error::NotSpd(format!(
            "smallest eigenvalue is {:e}",
            eig.min()
        )));
    }
    Ok(eig)
}

/// `√A = U diag(√λ) Uᵀ` for SPD `A`.
pub fn reference_sqrt(a: &DenseSymMatrix) -> Result<DenseSymMatrix> {
    Ok(spd_eig(a)?.map(f64::sqrt))
}

/// `√A⁻¹ = U diag(1/√λ) Uᵀ` for SPD `A`.
pub fn reference_invsqrt(a: &DenseSymMatrix) -> Result<DenseSymMatrix> {
    Ok(spd_eig(a)?.map(|l| 1.0 / l.sqrt()))
}

/// Options used by the oracle's spectral norms.
pub fn oracle_norm_options() -> IterOptions {
    IterOptions::new(1e-12, 100_000)
}

/// `‖A‖₂` of a dense symmetric matrix by power iteration, falling back to
/// the Jacobi spectrum if the iteration stalls on a tight eigenvalue cluster.
pub fn spectral_norm_dense(a: &DenseSymMatrix, opts: &IterOptions) -> Result<f64> {
    match spectral_norm_op(a, opts) {
        Ok(est) => Ok(est.value),
        Err(Error::NotConverged { .. }) => {
            let eig = eig_sym(a)?;
            Ok(eig.min().abs().max(eig.max().abs()))
        }
        Err(e) => Err(e),
    }
}

/// `δ = ‖F_num − F_ref‖₂ / ‖F_ref‖₂`.
pub fn relative_error(f_num: &DenseSymMatrix, f_ref: &DenseSymMatrix) -> Result<f64> {
    relative_error_with(f_num, f_ref, &oracle_norm_options())
}

pub fn relative_error_with(
    f_num: &DenseSymMatrix,
    f_ref: &DenseSymMatrix,
    opts: &IterOptions,
) -> Result<f64> {
    if f_num.dim() != f_ref.dim() {
        return Err(Error::DimensionMismatch {
            expected: f_ref.dim(),
            found: f_num.dim(),
        });
    }
    let denom = spectral_norm_dense(f_ref, opts)?;
    if denom == 0.0 {
        return Err(Error::InvalidParameter(
            "reference matrix has zero norm".into(),
        ));
    }
    let diff = f_num.sub(f_ref)?;
    Ok(spectral_norm_dense(&diff, opts)? / denom)
}

/// Singular values, descending, by one-sided Jacobi rotations on the
/// columns of `A` (or of `Aᵀ` when `A` is wide).
pub fn singular_values(a: &DenseMatrix) -> Result<Vec<f64>> {
    let a = if a.rows() < a.cols() {
        a.transpose()
    } else {
        a.clone()
    };
    let (m, n) = (a.rows(), a.cols());
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    const MAX_SWEEPS: usize = 100;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let alpha: f64 = cols[i].iter().map(|x| x * x).sum();
                let beta: f64 = cols[j].iter().map(|x| x * x).sum();
                let gamma: f64 = cols[i].iter().zip(&cols[j]).map(|(x, y)| x * y).sum();
                if gamma == 0.0 || gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..m {
                    let (x, y) = (cols[i][k], cols[j][k]);
                    cols[i][k] = c * x - s * y;
                    cols[j][k] = s * x + c * y;
                }
            }
        }
        if !rotated {
            let mut sv: Vec<f64> = cols
                .iter()
                .map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt())
                .collect();
            sv.sort_by(|x, y| y.total_cmp(x));
            return Ok(sv);
        }
    }
    Err(Error::NotConverged {
        what: "one-sided Jacobi SVD",
        iterations: MAX_SWEEPS,
        estimate: f64::NAN,
        residual: f64::NAN,
    })
}

/// Eigenvalues of the pencil `(T, G)`, ascending, computed as the spectrum
/// of `√G⁻¹ T √G⁻¹`.
pub fn generalized_eigs(t: &DenseSymMatrix, g: &SparseSymMatrix) -> Result<Vec<f64>> {
    if t.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: t.dim(),
        });
    }
    let w = reference_invsqrt(&g.to_dense())?;
    let m = w.matmul(t)?.matmul(&w)?;
    Ok(eig_sym(&DenseSymMatrix::new(m)?)?.values)
}
