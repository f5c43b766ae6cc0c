use std::f64::consts::PI;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use super::{CoeffVector, Kind, Method};
use crate::error::{Error, Result};

/// Exact Taylor coefficients of `√x` (or `1/√x`) about `x = 1`.
///
/// These are the binomial-series coefficients `binom(±1/2, n)`, generated by
/// `c_{n+1} = c_n (a − n) / (n + 1)` with `a = 1/2` or `a = −1/2`.
pub fn tse_rationals(kind: Kind, order: usize) -> Vec<BigRational> {
    let a = match kind {
        Kind::Sqrt => BigRational::new(BigInt::one(), BigInt::from(2)),
        Kind::InvSqrt => BigRational::new(BigInt::from(-1), BigInt::from(2)),
    };
    let mut out = Vec::with_capacity(order + 1);
    let mut c = BigRational::one();
    for n in 0..=order {
        out.push(c.clone());
        let n = BigRational::from_integer(BigInt::from(n));
        c = c * (a.clone() - n.clone()) / (n + BigRational::one());
    }
    out
}

pub fn tse_coefficients(kind: Kind, order: usize) -> CoeffVector {
    CoeffVector {
        kind: Some(kind),
        method: Method::Tse,
        values: tse_rationals(kind, order)
            .iter()
            .map(|r| r.to_f64().expect("binomial coefficients are finite"))
            .collect(),
        n0: None,
    }
}

/// Padé coefficients `c_k = binom(2N+1, 2k)` for `k = 0..=N`.
///
/// With `P(x) = Σ c_k x^k` and `Q(x) = Σ c_k x^{N−k}`, `P/Q` is the
/// `[N/N]` Padé approximant of `√x` at `x = 1` and `Q/P` that of `1/√x`.
/// The same coefficients serve both functions.
pub fn pae_integers(order: usize) -> Vec<BigUint> {
    let m = 2 * order + 1;
    // binom(m, j) for all j, then keep the even ones
    let mut row = Vec::with_capacity(m + 1);
    let mut b = BigUint::one();
    row.push(b.clone());
    for j in 0..m {
        b = b * BigUint::from(m - j) / BigUint::from(j + 1);
        row.push(b.clone());
    }
    (0..=order).map(|k| row[2 * k].clone()).collect()
}

pub fn pae_coefficients(order: usize) -> CoeffVector {
    CoeffVector {
        kind: None,
        method: Method::Pae,
        values: pae_integers(order)
            .iter()
            .map(|v| v.to_f64().expect("binomials fit in f64 range"))
            .collect(),
        n0: None,
    }
}

const MAX_QUADRATURE_POINTS: usize = 1 << 24;

/// Chebyshev coefficients of `√x` or `1/√x` on `[n0, 1]`.
///
/// With `x(θ) = ((1 − n0) cos θ + (1 + n0)) / 2` the weighted integral
/// becomes `c_n = (2/π) ∫₀^π g(x(θ)) cos(nθ) dθ`, evaluated by the
/// `M`-point midpoint rule (Gauss-Chebyshev). `M` starts at
/// `64 (order + 1)` and doubles until two successive coefficient sets agree
/// to `1e-12`. The raw `c_0` is stored; evaluation halves it.
pub fn cpe_coefficients(kind: Kind, n0: f64, order: usize) -> Result<CoeffVector> {
    if !(n0 > 0.0 && n0 < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "Chebyshev interval bound n0 must lie in (0, 1), got {n0}"
        )));
    }
    let g: fn(f64) -> f64 = match kind {
        Kind::Sqrt => f64::sqrt,
        Kind::InvSqrt => |x: f64| 1.0 / x.sqrt(),
    };
    let mut m = 64 * (order + 1);
    let mut prev = chebyshev_quadrature(g, n0, order, m);
    loop {
        m *= 2;
        let next = chebyshev_quadrature(g, n0, order, m);
        let diff = prev
            .iter()
            .zip(&next)
            .fold(0.0_f64, |d, (a, b)| d.max((a - b).abs()));
        if diff <= 1e-12 {
            return Ok(CoeffVector {
                kind: Some(kind),
                method: Method::Cpe1,
                values: next,
                n0: Some(n0),
            });
        }
        if m >= MAX_QUADRATURE_POINTS {
            return Err(Error::NotConverged {
                what: "Chebyshev coefficient quadrature",
                iterations: m,
                estimate: f64::NAN,
                residual: diff,
            });
        }
        prev = next;
    }
}

fn chebyshev_quadrature(g: fn(f64) -> f64, n0: f64, order: usize, m: usize) -> Vec<f64> {
    let samples: Vec<(f64, f64)> = (0..m)
        .map(|j| {
            let theta = PI * (j as f64 + 0.5) / m as f64;
            let x = 0.5 * ((1.0 - n0) * theta.cos() + (1.0 + n0));
            (theta, g(x))
        })
        .collect();
    (0..=order)
        .map(|n| {
            let mut sum = NeumaierSum::default();
            for &(theta, gx) in &samples {
                sum.add(gx * (n as f64 * theta).cos());
            }
            2.0 * sum.total() / m as f64
        })
        .collect()
}

/// Compensated summation (Neumaier's variant of Kahan).
#[derive(Default)]
struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn tse_leading_terms() {
        let s = tse_coefficients(Kind::Sqrt, 3).values;
        assert_eq!(s, vec![1.0, 0.5, -0.125, 0.0625]);
        let i = tse_coefficients(Kind::InvSqrt, 3).values;
        assert_eq!(i, vec![1.0, -0.5, 0.375, -0.3125]);
        let r = tse_rationals(Kind::Sqrt, 9);
        assert_eq!(r[9], rat(715, 65536));
    }

    #[test]
    fn tse_high_order_does_not_overflow() {
        let r = tse_rationals(Kind::InvSqrt, 200);
        // binom(-1/2, n) = (-1)^n binom(2n, n) / 4^n, which decays like 1/sqrt(pi n)
        let v = r[200].to_f64().unwrap();
        assert!((v - 1.0 / (std::f64::consts::PI * 200.0).sqrt()).abs() < 1e-3 * v);
    }

    #[test]
    fn pae_small_orders() {
        assert_eq!(pae_coefficients(0).values, vec![1.0]);
        assert_eq!(pae_coefficients(3).values, vec![1.0, 21.0, 35.0, 7.0]);
        assert_eq!(
            pae_coefficients(9).values,
            vec![1.0, 171.0, 3876.0, 27132.0, 75582.0, 92378.0, 50388.0, 11628.0, 969.0, 19.0]
        );
    }

    #[test]
    fn pae_matches_taylor_through_order_2n() {
        // P(x)/Q(x) must reproduce the Taylor coefficients of sqrt at x = 1
        // through degree 2N. Expand both polynomials about x = 1 with exact
        // rational arithmetic and compare P against sqrt * Q.
        for order in 1..6usize {
            let c: Vec<BigRational> = pae_integers(order)
                .into_iter()
                .map(|v| BigRational::from_integer(BigInt::from(v)))
                .collect();
            let shift = |coeffs: Vec<BigRational>| -> Vec<BigRational> {
                // coefficients of p(1 + u) in powers of u
                let deg = coeffs.len() - 1;
                let mut out = vec![BigRational::from_integer(BigInt::from(0)); deg + 1];
                for (k, ck) in coeffs.iter().enumerate() {
                    let mut binom = BigRational::one();
                    for j in 0..=k {
                        out[j] += ck.clone() * binom.clone();
                        binom = binom * BigRational::from_integer(BigInt::from(k - j))
                            / BigRational::from_integer(BigInt::from(j + 1));
                    }
                }
                out
            };
            let p = shift(c.clone());
            let q = shift(c.iter().rev().cloned().collect());
            let t = tse_rationals(Kind::Sqrt, 2 * order);
            for d in 0..=2 * order {
                let mut tq = BigRational::from_integer(BigInt::from(0));
                for j in 0..=d.min(order) {
                    tq += t[d - j].clone() * q[j].clone();
                }
                let pd = if d <= order {
                    p[d].clone()
                } else {
                    BigRational::from_integer(BigInt::from(0))
                };
                assert_eq!(pd, tq, "order {order}, degree {d}");
            }
        }
    }

    #[test]
    fn cpe_rejects_bad_interval() {
        assert!(cpe_coefficients(Kind::Sqrt, 0.0, 3).is_err());
        assert!(cpe_coefficients(Kind::Sqrt, 1.0, 3).is_err());
        assert!(cpe_coefficients(Kind::Sqrt, -0.5, 3).is_err());
    }

    #[test]
    fn cpe_leading_coefficients() {
        let c = cpe_coefficients(Kind::Sqrt, 0.1, 0).unwrap();
        let t = 50720584.0 / 36057897.0;
        assert!((c.values[0] - t).abs() <= 1e-6 * t);
        let c = cpe_coefficients(Kind::InvSqrt, 0.1, 0).unwrap();
        let t = 374048017.0 / 113951175.0;
        assert!((c.values[0] - t).abs() <= 1e-6 * t);
    }

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let mut s = NeumaierSum::default();
        for x in [1.0, 1e100, 1.0, -1e100] {
            s.add(x);
        }
        assert_eq!(s.total(), 2.0);
    }
}
