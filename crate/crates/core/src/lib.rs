//! Square roots and inverse square roots of sparse symmetric positive
//! definite matrices by truncated series expansions.
//!
//! The matrix is scaled by its spectral norm and a Taylor, Chebyshev or
//! Padé expansion of `√x` or `1/√x` is evaluated at the scaled matrix,
//! either densely ([`matfun::matfun_dense`]) or applied to a vector
//! ([`matfun::matfun_apply`]). [`gram`] assembles pyramid and RWG Gram
//! matrices on triangle meshes, and [`oracle`] provides the dense
//! eigendecomposition reference used to measure accuracy.
//!
//! ```
//! use gramroot::gram::{assemble_rwg_gram, extract_edges, TriMesh};
//! use gramroot::matfun::{matfun_dense, ExpansionSpec, Kind};
//! use gramroot::oracle::{reference_invsqrt, relative_error};
//! use gramroot::sparse::IterOptions;
//!
//! let mesh = TriMesh::icosphere(1, 1.0);
//! let g = assemble_rwg_gram(&mesh, &extract_edges(&mesh));
//! let spec = ExpansionSpec::cpe1(Kind::InvSqrt, 20);
//! let w = matfun_dense(&g, &spec, &IterOptions::default())?;
//! assert!(relative_error(&w, &reference_invsqrt(&g.to_dense())?)? < 1e-6);
//! # Ok::<(), gramroot::Error>(())
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod dense;
pub mod error;
pub mod gram;
pub mod matfun;
pub mod mm;
pub mod oracle;
pub mod sparse;
pub mod study;
pub mod synth;

pub use error::{Error, MeshError, Result};

// The guide's code blocks run as doctests.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/scaling.md")]
    pub mod scaling {}
    #[doc = include_str!("../../../book/src/expansions.md")]
    pub mod expansions {}
    #[doc = include_str!("../../../book/src/orders.md")]
    pub mod orders {}
    #[doc = include_str!("../../../book/src/gram.md")]
    pub mod gram {}
    #[doc = include_str!("../../../book/src/normalize.md")]
    pub mod normalize {}
    #[doc = include_str!("../../../book/src/accuracy.md")]
    pub mod accuracy {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
