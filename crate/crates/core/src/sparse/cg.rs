use super::{SparseSymMatrix, SymOperator};
use crate::dense::{dot, norm2};
use crate::error::{Error, Result};

/// Stopping rule for conjugate gradients: `‖Ax − b‖₂ ≤ tol·‖b‖₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for CgOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 10_000,
        }
    }
}

/// Solves `A x = b` for SPD `A` by unpreconditioned conjugate gradients.
pub fn cg_solve(a: &SparseSymMatrix, b: &[f64], opts: &CgOptions) -> Result<Vec<f64>> {
    if b.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.len(),
        });
    }
    cg_solve_op(a, b, None, opts)
}

/// Conjugate gradients on any symmetric operator, optionally warm-started.
///
/// The recursively updated residual decides when to stop; the true residual
/// is then recomputed and the iteration restarted from it if the two have
/// drifted apart, so the returned `x` always meets the stated bound.
pub fn cg_solve_op<A: SymOperator + ?Sized>(
    a: &A,
    b: &[f64],
    x0: Option<&[f64]>,
    opts: &CgOptions,
) -> Result<Vec<f64>> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "CG tolerance must be positive, got {}",
            opts.tol
        )));
    }
    let n = a.dim();
    let b_norm = norm2(b);
    let mut x = match x0 {
        Some(x0) => x0.to_vec(),
        None => vec![0.0; n],
    };
    if b_norm == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let target = opts.tol * b_norm;

    let mut ap = vec![0.0; n];
    let mut r = true_residual(a, b, &x, &mut ap);
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    if rr.sqrt() <= target {
        return Ok(x);
    }

    for _ in 0..opts.max_iter {
        a.apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::NotSpd(format!(
                "conjugate gradients met non-positive curvature pᵀAp = {pap:e}"
            )));
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new = dot(&r, &r);
        if rr_new.sqrt() <= target {
            r = true_residual(a, b, &x, &mut ap);
            rr = dot(&r, &r);
            if rr.sqrt() <= target {
                return Ok(x);
            }
            p.copy_from_slice(&r);
            continue;
        }
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    let residual = norm2(&true_residual(a, b, &x, &mut ap)) / b_norm;
    Err(Error::NotConverged {
        what: "conjugate gradients",
        iterations: opts.max_iter,
        estimate: f64::NAN,
        residual,
    })
}

fn true_residual<A: SymOperator + ?Sized>(
    a: &A,
    b: &[f64],
    x: &[f64],
    scratch: &mut [f64],
) -> Vec<f64> {
    a.apply(x, scratch);
    b.iter()
        .zip(scratch.iter())
        .map(|(bi, ax)| bi - ax)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    #[test]
    fn identity_returns_rhs() {
        let a = SparseSymMatrix::identity(4);
        let b = [1.0, -2.0, 3.5, 0.25];
        let x = cg_solve(&a, &b, &CgOptions::default()).unwrap();
        assert_eq!(x, b.to_vec());
    }

    #[test]
    fn diagonal_system() {
        let a = SparseSymMatrix::from_diagonal(&[2.0, 4.0]);
        let x = cg_solve(&a, &[2.0, 4.0], &CgOptions::default()).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let a = SparseSymMatrix::from_diagonal(&[2.0, 4.0]);
        assert_eq!(
            cg_solve(&a, &[0.0, 0.0], &CgOptions::default()).unwrap(),
            vec![0.0, 0.0]
        );
    }

    #[test]
    fn random_spd_residual_bound() {
        let a = SparseSymMatrix::from_dense(&synth::random_spd(100, 5));
        let b = synth::random_vector(100, 6);
        let opts = CgOptions {
            tol: 1e-10,
            max_iter: 1000,
        };
        let x = cg_solve(&a, &b, &opts).unwrap();
        let ax = a.matvec(&x).unwrap();
        let res: f64 = ax
            .iter()
            .zip(&b)
            .map(|(u, v)| (u - v).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(res <= opts.tol * norm2(&b));
    }

    #[test]
    fn indefinite_matrix_is_reported() {
        let a = SparseSymMatrix::from_diagonal(&[1.0, -1.0]);
        let err = cg_solve(&a, &[1.0, 1.0], &CgOptions::default()).unwrap_err();
        assert!(matches!(err, Error::NotSpd(_)));
    }

    #[test]
    fn iteration_budget_exhaustion() {
        let a = SparseSymMatrix::from_diagonal(&[1.0, 10.0, 100.0, 1000.0]);
        let err = cg_solve(
            &a,
            &[1.0; 4],
            &CgOptions {
                tol: 1e-14,
                max_iter: 1,
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotConverged { residual, .. } if residual > 1e-14));
    }

    #[test]
    fn dimension_mismatch() {
        let a = SparseSymMatrix::identity(3);
        assert!(cg_solve(&a, &[1.0], &CgOptions::default()).is_err());
    }
}
