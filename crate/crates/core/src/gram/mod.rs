//! Triangle meshes and the Gram matrices of basis functions defined on them.
//!
//! * [`assemble_pyramid_gram`]: hat functions, one per vertex.
//! * [`assemble_rwg_gram`]: RWG functions, one per interior edge.
//! * [`galerkin_transform`]: Grams of bases built as combinations of
//!   fine-mesh functions, typically on a [`barycentric_refine`]ment.

mod assemble;
mod galerkin;
mod mesh;
mod refine;
mod topology;

pub use assemble::{assemble_pyramid_gram, assemble_rwg_gram};
pub use galerkin::{galerkin_transform, CombinationMatrix};
pub use mesh::{Point, TriMesh};
pub use refine::barycentric_refine;
pub use topology::{extract_edges, Edge, EdgeTopology};
