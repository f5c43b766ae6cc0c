use std::io;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{what} did not converge after {iterations} iterations (best estimate {estimate:e}, residual {residual:e})")]
    NotConverged {
        what: &'static str,
        iterations: usize,
        estimate: f64,
        residual: f64,
    },

    #[error("matrix is not symmetric positive definite: {0}")]
    NotSpd(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no tabulated truncation order for {kind} with n0 >= {n0_class} at delta = {delta:e}")]
    Unavailable {
        kind: &'static str,
        n0_class: f64,
        delta: f64,
    },

    #[error(
        "scaled minimum eigenvalue {n0:e} lies below the tabulated class bound {class_bound:e}"
    )]
    ClassViolation { n0: f64, class_bound: f64 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid mesh: {0}")]
    Mesh(#[from] MeshError),

    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Validation failures detected while loading a triangle mesh.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("vertex index {index} out of range (mesh has {count} vertices)")]
    IndexOutOfRange { index: usize, count: usize },

    #[error("triangle {0} is degenerate (zero area or repeated vertex)")]
    Degenerate(usize),

    #[error("edge ({0}, {1}) is shared by more than two triangles")]
    NonManifold(usize, usize),

    #[error("edge ({0}, {1}) has inconsistent orientation in its adjacent triangles")]
    InconsistentOrientation(usize, usize),

    #[error("only triangular faces are supported (face {face} has {sides} vertices)")]
    NotTriangle { face: usize, sides: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
