use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{cg_solve_op, CgOptions, IterOptions, NormEstimate, SparseSymMatrix, SymOperator};
use crate::dense::norm2;
use crate::error::{Error, Result};

/// Estimates `‖A‖₂` for symmetric `A` by power iteration.
pub fn spectral_norm(a: &SparseSymMatrix, opts: &IterOptions) -> Result<NormEstimate> {
    spectral_norm_op(a, opts)
}

/// Power iteration on a symmetric operator.
///
/// The tracked quantity is `ν_k = ‖A v_k‖` with unit `v_k`, i.e. the square
/// root of the Rayleigh quotient of `A²`. For symmetric `A` it converges to
/// the largest eigenvalue magnitude even when `λ` and `−λ` are both present.
pub fn spectral_norm_op<A: SymOperator + ?Sized>(
    a: &A,
    opts: &IterOptions,
) -> Result<NormEstimate> {
    check_tol(opts)?;
    let n = a.dim();
    if n == 0 {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    let mut v = start_vector(n, opts.seed);
    let mut w = vec![0.0; n];
    let mut prev = 0.0;
    let mut residual = f64::INFINITY;
    for k in 1..=opts.max_iter {
        a.apply(&v, &mut w);
        let nu = norm2(&w);
        if nu == 0.0 {
            return Ok(NormEstimate {
                value: 0.0,
                iterations: k,
                residual: 0.0,
            });
        }
        residual = (nu - prev).abs() / nu;
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / nu;
        }
        if k > 1 && residual <= opts.tol {
            return Ok(NormEstimate {
                value: nu,
                iterations: k,
                residual,
            });
        }
        prev = nu;
    }
    Err(Error::NotConverged {
        what: "power iteration",
        iterations: opts.max_iter,
        estimate: prev,
        residual,
    })
}

/// Estimates the smallest eigenvalue of SPD `A` by inverse power iteration.
pub fn min_eigenvalue(a: &SparseSymMatrix, opts: &IterOptions) -> Result<NormEstimate> {
    min_eigenvalue_op(a, opts)
}

/// Inverse power iteration with conjugate-gradient inner solves.
///
/// Each solve is warm-started from the current eigenvector estimate scaled
/// by the current eigenvalue estimate, which is close to the exact solution
/// once the iteration settles.
pub fn min_eigenvalue_op<A: SymOperator + ?Sized>(
    a: &A,
    opts: &IterOptions,
) -> Result<NormEstimate> {
    check_tol(opts)?;
    let n = a.dim();
    if n == 0 {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    let inner = CgOptions {
        tol: (opts.tol * 1e-2).max(1e-14),
        max_iter: 20 * n + 1000,
    };
    let mut v = start_vector(n, opts.seed);
    let mut prev = 0.0;
    let mut residual = f64::INFINITY;
    let mut guess: Vec<f64> = Vec::new();
    for k in 1..=opts.max_iter {
        let x0 = if k > 1 { Some(guess.as_slice()) } else { None };
        let w = cg_solve_op(a, &v, x0, &inner)?;
        let mu = norm2(&w);
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::NotSpd(
                "inverse iteration produced a degenerate iterate".into(),
            ));
        }
        let lambda = 1.0 / mu;
        residual = (lambda - prev).abs() / lambda;
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / mu;
        }
        if k > 1 && residual <= opts.tol {
            return Ok(NormEstimate {
                value: lambda,
                iterations: k,
                residual,
            });
        }
        guess = v.iter().map(|vi| vi * mu).collect();
        prev = lambda;
    }
    Err(Error::NotConverged {
        what: "inverse power iteration",
        iterations: opts.max_iter,
        estimate: prev,
        residual,
    })
}

fn check_tol(opts: &IterOptions) -> Result<()> {
    if opts.tol > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {}",
            opts.tol
        )))
    }
}

fn start_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..n)
        .map(|_| rng.random_range(0.5..1.5) * if rng.random::<bool>() { 1.0 } else { -1.0 })
        .collect();
    let nv = norm2(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    v
}
