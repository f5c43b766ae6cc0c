//! Error-versus-order sweeps against the eigendecomposition oracle.

use std::fmt::Write as _;

use crate::error::Result;
use crate::matfun::{
    Expansion, ExpansionSpec, Kind, Method, N0Class, ScaledOperand, CPE1_SAFETY, DEGENERATE_WIDTH,
    TABULATED_TERMS,
};
use crate::oracle::{eig_sym, relative_error};
use crate::sparse::{IterOptions, SparseSymMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub methods: Vec<Method>,
    pub kinds: Vec<Kind>,
    pub min_order: usize,
    pub max_order: usize,
    /// Class used for CPE-2; `None` picks the narrowest class that contains
    /// the estimated scaled spectrum.
    pub n0_class: Option<N0Class>,
    pub iter: IterOptions,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            methods: Method::ALL.to_vec(),
            kinds: vec![Kind::Sqrt, Kind::InvSqrt],
            min_order: 1,
            max_order: 9,
            n0_class: None,
            iter: IterOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub method: Method,
    pub kind: Kind,
    pub order: usize,
    pub delta: f64,
}

/// Relative error of every requested expansion at every order.
///
/// CPE-2 rows stop at the last tabulated order.
pub fn convergence_study(g: &SparseSymMatrix, cfg: &StudyConfig) -> Result<Vec<ConvergenceRow>> {
    let eig = eig_sym(&g.to_dense())?;
    let op = ScaledOperand::new(g, &cfg.iter)?;
    let needs_n0 = cfg
        .methods
        .iter()
        .any(|m| *m == Method::Cpe1 || (*m == Method::Cpe2 && cfg.n0_class.is_none()));
    let lmin = if needs_n0 {
        Some(op.min_scaled_eigenvalue(&cfg.iter)?)
    } else {
        None
    };

    let mut rows = Vec::new();
    for &kind in &cfg.kinds {
        let reference = match kind {
            Kind::Sqrt => eig.map(f64::sqrt),
            Kind::InvSqrt => eig.map(|l| 1.0 / l.sqrt()),
        };
        for &method in &cfg.methods {
            for order in cfg.min_order..=cfg.max_order {
                let mut spec = ExpansionSpec::new(method, kind, order);
                match method {
                    Method::Cpe1 => {
                        let l = lmin.expect("estimated above");
                        if l < 1.0 - DEGENERATE_WIDTH {
                            spec = spec.with_n0(CPE1_SAFETY * l);
                        }
                    }
                    Method::Cpe2 => {
                        if order >= TABULATED_TERMS {
                            continue;
                        }
                        let class = cfg.n0_class.unwrap_or_else(|| {
                            N0Class::containing(lmin.expect("estimated above"))
                                .unwrap_or(N0Class::OneE3)
                        });
                        spec = spec.with_n0_class(class);
                    }
                    Method::Tse | Method::Pae => {}
                }
                let f = Expansion::build(&spec, &op, &cfg.iter)?.eval_dense(&op)?;
                rows.push(ConvergenceRow {
                    method,
                    kind,
                    order,
                    delta: relative_error(&f, &reference)?,
                });
            }
        }
    }
    Ok(rows)
}

/// CSV with a header row and 17 significant digits.
pub fn rows_to_csv(rows: &[ConvergenceRow]) -> String {
    let mut s = String::from("method,kind,order,delta\n");
    for r in rows {
        writeln!(s, "{},{},{},{:.16e}", r.method, r.kind, r.order, r.delta).unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{linear_spectrum, spd_with_spectrum};

    fn delta(rows: &[ConvergenceRow], method: Method, kind: Kind, order: usize) -> f64 {
        rows.iter()
            .find(|r| r.method == method && r.kind == kind && r.order == order)
            .unwrap()
            .delta
    }

    #[test]
    fn identity_is_reproduced() {
        let cfg = StudyConfig {
            methods: vec![Method::Tse, Method::Cpe1, Method::Pae],
            ..StudyConfig::default()
        };
        let rows = convergence_study(&SparseSymMatrix::identity(6), &cfg).unwrap();
        assert_eq!(rows.len(), 3 * 2 * 9);
        assert!(rows.iter().all(|r| r.delta <= 1e-13));
    }

    #[test]
    fn pade_beats_taylor_on_a_tenth_spectrum() {
        let g = SparseSymMatrix::from_dense(&spd_with_spectrum(&linear_spectrum(0.1, 1.0, 40), 6));
        let rows = convergence_study(&g, &StudyConfig::default()).unwrap();
        for n in 2..=9 {
            assert!(
                delta(&rows, Method::Pae, Kind::Sqrt, n)
                    <= delta(&rows, Method::Tse, Kind::Sqrt, n)
            );
        }
        assert!(
            delta(&rows, Method::Cpe1, Kind::Sqrt, 9) < delta(&rows, Method::Cpe1, Kind::Sqrt, 1)
        );
    }

    #[test]
    fn cpe_variants_agree_at_the_class_bound() {
        // after the safety shrink the CPE-1 interval starts exactly at 1e-1
        let lo = 0.1 / CPE1_SAFETY;
        let g = SparseSymMatrix::from_dense(&spd_with_spectrum(&linear_spectrum(lo, 1.0, 40), 6));
        let cfg = StudyConfig {
            methods: vec![Method::Cpe1, Method::Cpe2],
            kinds: vec![Kind::Sqrt],
            n0_class: Some(N0Class::OneE1),
            ..StudyConfig::default()
        };
        let rows = convergence_study(&g, &cfg).unwrap();
        for n in 1..=9 {
            let (a, b) = (
                delta(&rows, Method::Cpe1, Kind::Sqrt, n),
                delta(&rows, Method::Cpe2, Kind::Sqrt, n),
            );
            assert!((a - b).abs() <= 0.1 * b, "order {n}: {a:e} vs {b:e}");
        }
    }

    #[test]
    fn csv_layout() {
        let rows = [ConvergenceRow {
            method: Method::Pae,
            kind: Kind::InvSqrt,
            order: 3,
            delta: 0.1,
        }];
        assert_eq!(
            rows_to_csv(&rows),
            "method,kind,order,delta\npae,invsqrt,3,1.0000000000000001e-1\n"
        );
    }
}
