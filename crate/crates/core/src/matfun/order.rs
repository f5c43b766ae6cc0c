use super::{cpe_coefficients, cpe_order, Evaluator, Expansion, Kind, Method, N0Class};
use crate::error::{Error, Result};

/// Highest order tried by [`search_cpe_order`].
pub const MAX_SEARCH_ORDER: usize = 400;

const SUP_SAMPLES: usize = 1000;

/// `max |p(x) − f(x)| / max |f(x)|` over `samples` equispaced points of
/// `[lo, 1]`, the scalar counterpart of the relative spectral-norm error of
/// a matrix whose spectrum fills `[lo, 1]`.
pub fn relative_sup_error(exp: &Expansion, lo: f64, samples: usize) -> f64 {
    let samples = samples.max(2);
    let (mut err, mut scale) = (0.0_f64, 0.0_f64);
    for i in 0..samples {
        let x = lo + (1.0 - lo) * i as f64 / (samples - 1) as f64;
        let f = exp.kind().eval(x);
        err = err.max((exp.eval_scalar(x) - f).abs());
        scale = scale.max(f.abs());
    }
    err / scale
}

/// Smallest CPE-1 order whose [`relative_sup_error`] on `[n0, 1]` is at
/// most `delta`.
pub fn search_cpe_order(kind: Kind, n0: f64, delta: f64, max_order: usize) -> Result<usize> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {delta}"
        )));
    }
    // Chebyshev coefficients do not depend on where the series is cut, so
    // one quadrature serves every candidate order.
    let full = cpe_coefficients(kind, n0, max_order)?.values;
    let mut best = f64::INFINITY;
    for order in 0..=max_order {
        let exp = Expansion {
            kind,
            method: Method::Cpe1,
            evaluator: Evaluator::Chebyshev {
                coeffs: full[..=order].to_vec(),
                n0,
            },
        };
        let err = relative_sup_error(&exp, n0, SUP_SAMPLES);
        if err <= delta {
            return Ok(order);
        }
        best = best.min(err);
    }
    Err(Error::NotConverged {
        what: "Chebyshev order search",
        iterations: max_order,
        estimate: best,
        residual: best,
    })
}

/// Truncation order for a Chebyshev expansion on `[n0, 1]` at tolerance
/// `delta`.
///
/// The tabulated order of the narrowest class containing `n0` is used when
/// there is one; otherwise the order is found by a scalar search.
pub fn select_cpe_order(kind: Kind, n0: f64, delta: f64) -> Result<usize> {
    if let Some(class) = N0Class::containing(n0) {
        if let Ok(Some(order)) = cpe_order(kind, class, delta) {
            return Ok(order);
        }
    }
    search_cpe_order(kind, n0, delta, MAX_SEARCH_ORDER)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn search_meets_tolerance_and_is_minimal() {
        for kind in [Kind::Sqrt, Kind::InvSqrt] {
            let order = search_cpe_order(kind, 0.1, 1e-6, 100).unwrap();
            let exp = Expansion::chebyshev(kind, 0.1, order).unwrap();
            assert!(relative_sup_error(&exp, 0.1, 1000) <= 1e-6);
            let shorter = Expansion::chebyshev(kind, 0.1, order - 1).unwrap();
            assert!(relative_sup_error(&shorter, 0.1, 1000) > 1e-6);
        }
    }

    #[test]
    fn selection_prefers_table() {
        let order = select_cpe_order(Kind::Sqrt, 0.2, 1e-4).unwrap();
        assert_eq!(
            Some(order),
            cpe_order(Kind::Sqrt, N0Class::OneE1, 1e-4).unwrap()
        );
    }

    #[test]
    fn selection_falls_back_to_search() {
        // 3e-4 is below every class bound
        let order = select_cpe_order(Kind::Sqrt, 3e-4, 1e-3).unwrap();
        let exp = Expansion::chebyshev(Kind::Sqrt, 3e-4, order).unwrap();
        assert!(relative_sup_error(&exp, 3e-4, 1000) <= 1e-3);
    }

    #[test]
    fn unreachable_tolerance_reports_best() {
        let err = search_cpe_order(Kind::InvSqrt, 1e-3, 1e-14, 5).unwrap_err();
        assert!(matches!(err, Error::NotConverged { .. }));
    }
}
