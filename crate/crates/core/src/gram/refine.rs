use std::collections::BTreeMap;

use super::TriMesh;

/// Splits every triangle into six through its centroid and edge midpoints.
///
/// Vertex numbering: the original vertices, then one midpoint per edge in
/// sorted `(a, b)` order, then one centroid per triangle. Child triangles
/// keep the parent's orientation.
pub fn barycentric_refine(mesh: &TriMesh) -> TriMesh {
    let verts = mesh.vertices();
    let mut vertices = verts.to_vec();
    let mut mid: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for tri in mesh.triangles() {
        for k in 0..3 {
            let (u, v) = (tri[k], tri[(k + 1) % 3]);
            mid.insert((u.min(v), u.max(v)), 0);
        }
    }
    for ((a, b), slot) in mid.iter_mut() {
        let (p, q) = (verts[*a], verts[*b]);
        *slot = vertices.len();
        vertices.push([
            (p[0] + q[0]) / 2.0,
            (p[1] + q[1]) / 2.0,
            (p[2] + q[2]) / 2.0,
        ]);
    }
    let midpoint = |u: usize, v: usize| mid[&(u.min(v), u.max(v))];

    let mut triangles = Vec::with_capacity(6 * mesh.num_triangles());
    for &[a, b, c] in mesh.triangles() {
        let (p, q, r) = (verts[a], verts[b], verts[c]);
        let g = vertices.len();
        vertices.push([
            (p[0] + q[0] + r[0]) / 3.0,
            (p[1] + q[1] + r[1]) / 3.0,
            (p[2] + q[2] + r[2]) / 3.0,
        ]);
        let (ab, bc, ca) = (midpoint(a, b), midpoint(b, c), midpoint(c, a));
        triangles.extend([
            [a, ab, g],
            [ab, b, g],
            [b, bc, g],
            [bc, c, g],
            [c, ca, g],
            [ca, a, g],
        ]);
    }
    TriMesh::new(vertices, triangles).expect("refinement of a valid mesh is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gram::extract_edges;

    #[test]
    fn counts_and_area() {
        let tri = barycentric_refine(&TriMesh::single_triangle());
        assert_eq!((tri.num_vertices(), tri.num_triangles()), (7, 6));
        let tet = TriMesh::tetrahedron();
        let fine = barycentric_refine(&tet);
        assert_eq!((fine.num_vertices(), fine.num_triangles()), (14, 24));
        assert!((fine.total_area() - tet.total_area()).abs() <= 1e-12 * tet.total_area());
        assert!(fine.signed_volume() > 0.0);
    }

    #[test]
    fn refined_icosphere_edges() {
        let fine = barycentric_refine(&TriMesh::icosphere(1, 1.0));
        assert_eq!(fine.num_triangles(), 480);
        assert_eq!(extract_edges(&fine).len(), 720);
    }
}
