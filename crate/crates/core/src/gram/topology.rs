use std::collections::BTreeMap;

use super::TriMesh;

/// An interior edge and the two triangles that carry its RWG function.
///
/// `a < b`; `t_plus` is the triangle that traverses the edge from `a` to
/// `b`, and `opp_plus`, `opp_minus` are the vertices facing the edge in
/// each triangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub t_plus: usize,
    pub t_minus: usize,
    pub opp_plus: usize,
    pub opp_minus: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeTopology {
    edges: Vec<Edge>,
    boundary: usize,
}

impl EdgeTopology {
    /// Interior edges sorted by `(a, b)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn boundary_edges(&self) -> usize {
        self.boundary
    }

    /// For every triangle, the interior edges on its sides as
    /// `(edge index, +1 or −1, opposite vertex)`.
    pub fn triangle_edges(&self, num_triangles: usize) -> Vec<Vec<(usize, f64, usize)>> {
        let mut out = vec![Vec::with_capacity(3); num_triangles];
        for (n, e) in self.edges.iter().enumerate() {
            out[e.t_plus].push((n, 1.0, e.opp_plus));
            out[e.t_minus].push((n, -1.0, e.opp_minus));
        }
        out
    }
}

type Side = (usize, usize, bool);

/// Enumerates the interior edges of a validated mesh.
pub fn extract_edges(mesh: &TriMesh) -> EdgeTopology {
    // (a, b) -> [(triangle, opposite vertex, traverses a -> b)]
    let mut sides: BTreeMap<(usize, usize), Vec<Side>> = BTreeMap::new();
    for (t, tri) in mesh.triangles().iter().enumerate() {
        for k in 0..3 {
            let (u, v, w) = (tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]);
            sides
                .entry((u.min(v), u.max(v)))
                .or_default()
                .push((t, w, u < v));
        }
    }
    let mut edges = Vec::new();
    let mut boundary = 0;
    for ((a, b), adj) in sides {
        match adj.as_slice() {
            [first, second] => {
                let (plus, minus) = if first.2 {
                    (first, second)
                } else {
                    (second, first)
                };
                edges.push(Edge {
                    a,
                    b,
                    t_plus: plus.0,
                    t_minus: minus.0,
                    opp_plus: plus.1,
                    opp_minus: minus.1,
                });
            }
            _ => boundary += 1,
        }
    }
    EdgeTopology { edges, boundary }
}
