//! Polynomial and rational expansions of `√X` and `√X⁻¹`.
//!
//! Every entry point scales the input first: with `s = ‖G‖₂` estimated by
//! power iteration, `X = G / s` has its spectrum in `(0, 1]` and
//!
//! ```text
//! √G   = √s · √X
//! √G⁻¹ = √X⁻¹ / √s
//! ```
//!
//! Four expansions of the scaled function are available:
//!
//! | method | approximant | evaluation |
//! |--------|-------------|------------|
//! | [`Method::Tse`]  | Taylor series about `x = 1` | Horner in `X − I` |
//! | [`Method::Cpe1`] | Chebyshev series on `[n0, 1]`, coefficients computed for the matrix | Clenshaw |
//! | [`Method::Cpe2`] | Chebyshev series with tabulated coefficients for a class of `n0` | Clenshaw |
//! | [`Method::Pae`]  | `[N/N]` Padé approximant about `x = 1` | two Horner polynomials and a solve |
//!
//! The same generic evaluator runs on scalars, vectors (`f(G)·v` without
//! densifying) and dense matrices, so all three paths perform identical
//! arithmetic on each eigencomponent.

mod coeffs;
mod order;
mod tables;

pub use coeffs::{
    cpe_coefficients, pae_coefficients, pae_integers, tse_coefficients, tse_rationals,
};
pub use order::{relative_sup_error, search_cpe_order, select_cpe_order, MAX_SEARCH_ORDER};
pub use tables::{
    cpe_order, cpe_tabulated, cpe_tabulated_rationals, N0Class, TABLE_DELTAS, TABULATED_TERMS,
};

use std::fmt;
use std::str::FromStr;

use crate::dense::{Cholesky, DenseMatrix, DenseSymMatrix};
use crate::error::{Error, Result};
use crate::sparse::{
    cg_solve_op, min_eigenvalue, spectral_norm, CgOptions, FnOperator, IterOptions, NormEstimate,
    SparseSymMatrix,
};

/// Shrink factor applied to the estimated smallest scaled eigenvalue to
/// obtain the CPE-1 interval bound, so that the true spectrum stays inside
/// `[n0, 1]`.
pub const CPE1_SAFETY: f64 = 0.99;

/// Scaled spectra narrower than this are treated as a multiple of the
/// identity.
pub const DEGENERATE_WIDTH: f64 = 1e-9;

/// CG tolerance for the Padé denominator solves in the apply path.
pub const PADE_CG_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Sqrt,
    InvSqrt,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Sqrt => "sqrt",
            Kind::InvSqrt => "invsqrt",
        }
    }

    /// The scalar function itself.
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Kind::Sqrt => x.sqrt(),
            Kind::InvSqrt => 1.0 / x.sqrt(),
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sqrt" => Ok(Kind::Sqrt),
            "invsqrt" | "isqrt" => Ok(Kind::InvSqrt),
            _ => Err(Error::InvalidParameter(format!(
                "unknown function kind {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Taylor series about `x = 1`.
    Tse,
    /// Chebyshev series with coefficients computed for the matrix at hand.
    Cpe1,
    /// Chebyshev series with tabulated coefficients.
    Cpe2,
    /// Padé approximant about `x = 1`.
    Pae,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Tse, Method::Cpe1, Method::Cpe2, Method::Pae];

    pub fn name(self) -> &'static str {
        match self {
            Method::Tse => "tse",
            Method::Cpe1 => "cpe1",
            Method::Cpe2 => "cpe2",
            Method::Pae => "pae",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tse" => Ok(Method::Tse),
            "cpe1" => Ok(Method::Cpe1),
            "cpe2" => Ok(Method::Cpe2),
            "pae" => Ok(Method::Pae),
            _ => Err(Error::InvalidParameter(format!("unknown method {s:?}"))),
        }
    }
}

/// Which expansion to use, of which function, at which order.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionSpec {
    pub method: Method,
    pub kind: Kind,
    pub order: usize,
    /// CPE-1 interval bound. `None` estimates it from the matrix.
    pub n0: Option<f64>,
    /// CPE-2 coefficient class.
    pub n0_class: Option<N0Class>,
    /// CPE-2 only: verify that the scaled spectrum respects the class bound.
    pub strict_n0: bool,
}

impl ExpansionSpec {
    pub fn new(method: Method, kind: Kind, order: usize) -> Self {
        Self {
            method,
            kind,
            order,
            n0: None,
            n0_class: None,
            strict_n0: false,
        }
    }

    pub fn tse(kind: Kind, order: usize) -> Self {
        Self::new(Method::Tse, kind, order)
    }

    pub fn cpe1(kind: Kind, order: usize) -> Self {
        Self::new(Method::Cpe1, kind, order)
    }

    pub fn cpe2(kind: Kind, class: N0Class, order: usize) -> Self {
        Self::new(Method::Cpe2, kind, order).with_n0_class(class)
    }

    pub fn pae(kind: Kind, order: usize) -> Self {
        Self::new(Method::Pae, kind, order)
    }

    pub fn with_n0(mut self, n0: f64) -> Self {
        self.n0 = Some(n0);
        self
    }

    pub fn with_n0_class(mut self, class: N0Class) -> Self {
        self.n0_class = Some(class);
        self
    }

    pub fn with_kind(mut self, kind: Kind) -> Self {
        self.kind = kind;
        self
    }

    pub fn strict(mut self, strict: bool) -> Self {
        self.strict_n0 = strict;
        self
    }
}

/// Expansion coefficients for one method, function and order.
///
/// For the Chebyshev methods `values[0]` is the raw `c_0`; evaluation
/// halves it. Padé coefficients are shared by both functions, so `kind` is
/// `None` for them.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffVector {
    pub kind: Option<Kind>,
    pub method: Method,
    pub values: Vec<f64>,
    pub n0: Option<f64>,
}

impl CoeffVector {
    pub fn order(&self) -> usize {
        self.values.len() - 1
    }
}

/// A sparse SPD matrix together with its spectral norm and scaled copy
/// `X = G / ‖G‖₂`.
#[derive(Debug, Clone)]
pub struct ScaledOperand<'a> {
    original: &'a SparseSymMatrix,
    norm: NormEstimate,
    scaled: SparseSymMatrix,
}

impl<'a> ScaledOperand<'a> {
    pub fn new(g: &'a SparseSymMatrix, opts: &IterOptions) -> Result<Self> {
        let n = g.dim();
        if n == 0 {
            return Err(Error::InvalidParameter("empty matrix".into()));
        }
        if let Some((i, d)) = g
            .diagonal()
            .into_iter()
            .enumerate()
            .find(|(_, d)| !(*d > 0.0))
        {
            return Err(Error::NotSpd(format!("diagonal entry {i} is {d:e}")));
        }
        let norm = if n == 1 {
            NormEstimate {
                value: g.get(0, 0),
                iterations: 0,
                residual: 0.0,
            }
        } else {
            spectral_norm(g, opts)?
        };
        Ok(Self {
            original: g,
            norm,
            scaled: g.divided_by(norm.value),
        })
    }

    pub fn original(&self) -> &SparseSymMatrix {
        self.original
    }

    pub fn norm(&self) -> f64 {
        self.norm.value
    }

    pub fn norm_estimate(&self) -> NormEstimate {
        self.norm
    }

    pub fn scaled(&self) -> &SparseSymMatrix {
        &self.scaled
    }

    pub fn dim(&self) -> usize {
        self.scaled.dim()
    }

    /// Smallest eigenvalue of `X`, i.e. the reciprocal condition number.
    pub fn min_scaled_eigenvalue(&self, opts: &IterOptions) -> Result<f64> {
        if self.dim() == 1 {
            return Ok(self.scaled.get(0, 0));
        }
        Ok(min_eigenvalue(&self.scaled, opts)?.value)
    }

    fn output_factor(&self, kind: Kind) -> f64 {
        let root = self.norm.value.sqrt();
        match kind {
            Kind::Sqrt => root,
            Kind::InvSqrt => 1.0 / root,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Evaluator {
    Taylor(Vec<f64>),
    Chebyshev { coeffs: Vec<f64>, n0: f64 },
    Pade(Vec<f64>),
}

/// A fully resolved expansion of the scaled function.
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    kind: Kind,
    method: Method,
    evaluator: Evaluator,
}

impl Expansion {
    pub fn taylor(kind: Kind, order: usize) -> Self {
        Self {
            kind,
            method: Method::Tse,
            evaluator: Evaluator::Taylor(tse_coefficients(kind, order).values),
        }
    }

    pub fn pade(kind: Kind, order: usize) -> Self {
        Self {
            kind,
            method: Method::Pae,
            evaluator: Evaluator::Pade(pae_coefficients(order).values),
        }
    }

    /// Chebyshev expansion with coefficients computed on `[n0, 1]`.
    pub fn chebyshev(kind: Kind, n0: f64, order: usize) -> Result<Self> {
        let c = cpe_coefficients(kind, n0, order)?;
        Ok(Self {
            kind,
            method: Method::Cpe1,
            evaluator: Evaluator::Chebyshev {
                coeffs: c.values,
                n0,
            },
        })
    }

    /// Chebyshev expansion with the first `order + 1` tabulated coefficients.
    pub fn tabulated(kind: Kind, class: N0Class, order: usize) -> Result<Self> {
        if order >= TABULATED_TERMS {
            return Err(Error::InvalidParameter(format!(
                "tabulated Chebyshev coefficients stop at order {}; got {order}",
                TABULATED_TERMS - 1
            )));
        }
        let mut c = cpe_tabulated(kind, class).values;
        c.truncate(order + 1);
        Ok(Self {
            kind,
            method: Method::Cpe2,
            evaluator: Evaluator::Chebyshev {
                coeffs: c,
                n0: class.bound(),
            },
        })
    }

    /// Resolves `spec` against a scaled operand, estimating `n0` if needed.
    pub fn build(spec: &ExpansionSpec, op: &ScaledOperand<'_>, opts: &IterOptions) -> Result<Self> {
        let kind = spec.kind;
        match spec.method {
            Method::Tse => Ok(Self::taylor(kind, spec.order)),
            Method::Pae => Ok(Self::pade(kind, spec.order)),
            Method::Cpe1 => {
                let n0 = match spec.n0 {
                    Some(n0) => n0,
                    None => {
                        let lmin = op.min_scaled_eigenvalue(opts)?;
                        if !(lmin > 0.0) {
                            return Err(Error::NotSpd(format!(
                                "estimated smallest scaled eigenvalue is {lmin:e}"
                            )));
                        }
                        if lmin >= 1.0 - DEGENERATE_WIDTH {
                            // X = I up to the estimate's accuracy; the Chebyshev
                            // interval collapses and three Taylor terms are exact.
                            let mut e = Self::taylor(kind, spec.order.min(3));
                            e.method = Method::Cpe1;
                            return Ok(e);
                        }
                        CPE1_SAFETY * lmin
                    }
                };
                Self::chebyshev(kind, n0, spec.order)
            }
            Method::Cpe2 => {
                let class = spec
                    .n0_class
                    .ok_or_else(|| Error::InvalidParameter("CPE-2 requires an n0 class".into()))?;
                if spec.strict_n0 {
                    let lmin = op.min_scaled_eigenvalue(opts)?;
                    if lmin < class.bound() {
                        return Err(Error::ClassViolation {
                            n0: lmin,
                            class_bound: class.bound(),
                        });
                    }
                }
                Self::tabulated(kind, class, spec.order)
            }
        }
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn order(&self) -> usize {
        match &self.evaluator {
            Evaluator::Taylor(c) | Evaluator::Pade(c) => c.len() - 1,
            Evaluator::Chebyshev { coeffs, .. } => coeffs.len() - 1,
        }
    }

    /// Chebyshev interval bound, if this is a Chebyshev expansion.
    pub fn n0(&self) -> Option<f64> {
        match &self.evaluator {
            Evaluator::Chebyshev { n0, .. } => Some(*n0),
            _ => None,
        }
    }

    pub fn coefficients(&self) -> &[f64] {
        match &self.evaluator {
            Evaluator::Taylor(c) | Evaluator::Pade(c) => c,
            Evaluator::Chebyshev { coeffs, .. } => coeffs,
        }
    }

    /// Evaluates the approximant of the scaled function at a scalar `x`.
    pub fn eval_scalar(&self, x: f64) -> f64 {
        let act = |b: &[f64], out: &mut [f64]| out[0] = x * b[0];
        let out = self.evaluate(&act, &[1.0], |den, num| Ok(vec![num[0] / den[0]]));
        out.expect("scalar evaluation cannot fail")[0]
    }

    /// `f(G)` as a dense matrix, including the norm rescaling.
    pub fn eval_dense(&self, op: &ScaledOperand<'_>) -> Result<DenseSymMatrix> {
        let x = op.scaled();
        let n = x.dim();
        let identity = DenseMatrix::identity(n);
        let act = |b: &[f64], out: &mut [f64]| x.mul_dense_into(b, n, out);
        let flat = self.evaluate(&act, identity.as_slice(), |den, num| {
            let den = DenseSymMatrix::new(DenseMatrix::from_row_major(n, n, den.to_vec())?)?;
            let num = DenseMatrix::from_row_major(n, n, num.to_vec())?;
            let chol = Cholesky::factor(&den)?;
            Ok(chol.solve_matrix(&num)?.as_slice().to_vec())
        })?;
        let factor = op.output_factor(self.kind);
        let m = DenseMatrix::from_row_major(n, n, flat.into_iter().map(|v| v * factor).collect())?;
        DenseSymMatrix::new(m)
    }

    /// `f(G)·v` through matrix-vector products only. The Padé denominator
    /// is inverted by conjugate gradients with the operator applied by
    /// Horner's rule.
    pub fn eval_apply(
        &self,
        op: &ScaledOperand<'_>,
        v: &[f64],
        cg: &CgOptions,
    ) -> Result<Vec<f64>> {
        let x = op.scaled();
        if v.len() != x.dim() {
            return Err(Error::DimensionMismatch {
                expected: x.dim(),
                found: v.len(),
            });
        }
        let act = |b: &[f64], out: &mut [f64]| x.matvec_into(b, out);
        let out = self.evaluate(&act, v, |_den, num| {
            let den_coeffs = self.denominator_coefficients();
            let n = x.dim();
            let den_op = FnOperator::new(n, |b: &[f64], out: &mut [f64]| {
                let unit = b.to_vec();
                let r = horner(&act, &unit, &den_coeffs);
                out.copy_from_slice(&r);
            });
            cg_solve_op(&den_op, num, None, cg)
        })?;
        let factor = op.output_factor(self.kind);
        Ok(out.into_iter().map(|v| v * factor).collect())
    }

    /// Coefficients, highest degree last, of the Padé denominator.
    fn denominator_coefficients(&self) -> Vec<f64> {
        match (&self.evaluator, self.kind) {
            (Evaluator::Pade(c), Kind::Sqrt) => c.iter().rev().copied().collect(),
            (Evaluator::Pade(c), Kind::InvSqrt) => c.clone(),
            _ => unreachable!("only Padé expansions have a denominator"),
        }
    }

    /// Runs the expansion on flat arrays. `act` applies `X`, `unit` is the
    /// image of the identity (1, `v`, or `I`), and `solve(den, num)`
    /// returns `den⁻¹·num` for the rational case.
    fn evaluate<A, S>(&self, act: &A, unit: &[f64], solve: S) -> Result<Vec<f64>>
    where
        A: Fn(&[f64], &mut [f64]),
        S: FnOnce(&[f64], &[f64]) -> Result<Vec<f64>>,
    {
        match &self.evaluator {
            Evaluator::Taylor(c) => Ok(taylor_horner(act, unit, c)),
            Evaluator::Chebyshev { coeffs, n0 } => Ok(clenshaw(act, unit, coeffs, *n0)),
            Evaluator::Pade(c) => {
                let p = horner(act, unit, c);
                let rev: Vec<f64> = c.iter().rev().copied().collect();
                let q = horner(act, unit, &rev);
                match self.kind {
                    Kind::Sqrt => solve(&q, &p),
                    Kind::InvSqrt => solve(&p, &q),
                }
            }
        }
    }
}

/// `Σ c_k (X − I)^k · unit`.
fn taylor_horner<A: Fn(&[f64], &mut [f64])>(act: &A, unit: &[f64], c: &[f64]) -> Vec<f64> {
    let last = c[c.len() - 1];
    let mut p: Vec<f64> = unit.iter().map(|u| last * u).collect();
    let mut t = vec![0.0; unit.len()];
    for &ck in c[..c.len() - 1].iter().rev() {
        act(&p, &mut t);
        for ((pi, ti), ui) in p.iter_mut().zip(&t).zip(unit) {
            *pi = (ti - *pi) + ck * ui;
        }
    }
    p
}

/// `Σ c_k X^k · unit`, coefficients lowest degree first.
fn horner<A: Fn(&[f64], &mut [f64])>(act: &A, unit: &[f64], c: &[f64]) -> Vec<f64> {
    let last = c[c.len() - 1];
    let mut p: Vec<f64> = unit.iter().map(|u| last * u).collect();
    let mut t = vec![0.0; unit.len()];
    for &ck in c[..c.len() - 1].iter().rev() {
        act(&p, &mut t);
        for ((pi, ti), ui) in p.iter_mut().zip(&t).zip(unit) {
            *pi = ti + ck * ui;
        }
    }
    p
}

/// Clenshaw's recurrence for `Σ' c_k T_k(X) · unit` with the shifted
/// Chebyshev polynomials of `[n0, 1]`; the first term is halved.
fn clenshaw<A: Fn(&[f64], &mut [f64])>(act: &A, unit: &[f64], c: &[f64], n0: f64) -> Vec<f64> {
    let len = unit.len();
    let mut b1 = vec![0.0; len];
    let mut b2 = vec![0.0; len];
    let mut t = vec![0.0; len];
    // y <- Y b with Y = (2X − (1 + n0) I) / (1 − n0)
    let shifted = |b: &[f64], t: &mut Vec<f64>| {
        act(b, t);
        for (ti, bi) in t.iter_mut().zip(b) {
            *ti = (2.0 * *ti - (1.0 + n0) * bi) / (1.0 - n0);
        }
    };
    for &ck in c[1..].iter().rev() {
        shifted(&b1, &mut t);
        for i in 0..len {
            let b0 = (2.0 * t[i] - b2[i]) + ck * unit[i];
            b2[i] = b1[i];
            b1[i] = b0;
        }
    }
    shifted(&b1, &mut t);
    let half = 0.5 * c[0];
    (0..len).map(|i| (t[i] - b2[i]) + half * unit[i]).collect()
}

/// `f(G)` as a dense matrix.
pub fn matfun_dense(
    g: &SparseSymMatrix,
    spec: &ExpansionSpec,
    opts: &IterOptions,
) -> Result<DenseSymMatrix> {
    let op = ScaledOperand::new(g, opts)?;
    Expansion::build(spec, &op, opts)?.eval_dense(&op)
}

/// `f(G)·v` without forming `f(G)`.
pub fn matfun_apply(
    g: &SparseSymMatrix,
    v: &[f64],
    spec: &ExpansionSpec,
    opts: &IterOptions,
) -> Result<Vec<f64>> {
    if v.len() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: v.len(),
        });
    }
    let op = ScaledOperand::new(g, opts)?;
    let cg = CgOptions {
        tol: PADE_CG_TOL,
        max_iter: 50 * g.dim() + 1000,
    };
    Expansion::build(spec, &op, opts)?.eval_apply(&op, v, &cg)
}

/// `√G_left⁻¹ · T · √G_right⁻¹`. The kind in `spec` is ignored.
pub fn normalize_operator(
    t: &DenseMatrix,
    g_left: &SparseSymMatrix,
    g_right: &SparseSymMatrix,
    spec: &ExpansionSpec,
    opts: &IterOptions,
) -> Result<DenseMatrix> {
    if t.rows() != g_left.dim() {
        return Err(Error::DimensionMismatch {
            expected: g_left.dim(),
            found: t.rows(),
        });
    }
    if t.cols() != g_right.dim() {
        return Err(Error::DimensionMismatch {
            expected: g_right.dim(),
            found: t.cols(),
        });
    }
    let spec = spec.clone().with_kind(Kind::InvSqrt);
    let left = matfun_dense(g_left, &spec, opts)?;
    let right = if g_left == g_right {
        left.clone()
    } else {
        matfun_dense(g_right, &spec, opts)?
    };
    left.matmul(t)?.matmul(&right)
}
