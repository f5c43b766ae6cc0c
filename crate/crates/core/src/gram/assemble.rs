use super::mesh::{dot3, sub, Point};
use super::{EdgeTopology, TriMesh};
use crate::sparse::SparseSymMatrix;

/// Symmetric 6-point rule of degree 4 on the reference triangle, as
/// `(barycentric coordinates, weight)` with weights summing to one.
#[allow(clippy::excessive_precision)]
pub(crate) fn dunavant6() -> [([f64; 3], f64); 6] {
    const A1: f64 = 0.445_948_490_915_964_886;
    const B1: f64 = 0.108_103_018_168_070_228;
    const W1: f64 = 0.223_381_589_678_011_466;
    const A2: f64 = 0.091_576_213_509_770_743;
    const B2: f64 = 0.816_847_572_980_458_514;
    const W2: f64 = 0.109_951_743_655_321_868;
    [
        ([A1, A1, B1], W1),
        ([A1, B1, A1], W1),
        ([B1, A1, A1], W1),
        ([A2, A2, B2], W2),
        ([A2, B2, A2], W2),
        ([B2, A2, A2], W2),
    ]
}

/// Mass matrix of the piecewise-linear hat functions, one per vertex.
pub fn assemble_pyramid_gram(mesh: &TriMesh) -> SparseSymMatrix {
    let mut trip = Vec::with_capacity(6 * mesh.num_triangles());
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let area = mesh.area(t);
        for i in 0..3 {
            trip.push((tri[i], tri[i], area / 6.0));
            for j in 0..i {
                trip.push((tri[i], tri[j], area / 12.0));
            }
        }
    }
    SparseSymMatrix::from_triplets(mesh.num_vertices(), trip)
        .expect("indices validated with the mesh")
        .with_spd_asserted(true)
}

/// Gram matrix of the RWG functions `±(r − p)/(2A)` on interior edges.
pub fn assemble_rwg_gram(mesh: &TriMesh, topo: &EdgeTopology) -> SparseSymMatrix {
    let rule = dunavant6();
    let per_triangle = topo.triangle_edges(mesh.num_triangles());
    let mut trip = Vec::new();
    for (t, local) in per_triangle.iter().enumerate() {
        if local.is_empty() {
            continue;
        }
        let area = mesh.area(t);
        let [v0, v1, v2] = mesh.corners(t);
        let points: Vec<(Point, f64)> = rule
            .iter()
            .map(|(l, w)| {
                let r = [0, 1, 2].map(|k| l[0] * v0[k] + l[1] * v1[k] + l[2] * v2[k]);
                (r, *w)
            })
            .collect();
        let vertices = mesh.vertices();
        for &(m, sm, pm) in local {
            for &(n, sn, pn) in local {
                if n > m {
                    continue;
                }
                let integral: f64 = points
                    .iter()
                    .map(|&(r, w)| w * dot3(sub(r, vertices[pm]), sub(r, vertices[pn])))
                    .sum::<f64>()
                    * area;
                trip.push((m, n, sm * sn * integral / (4.0 * area * area)));
            }
        }
    }
    SparseSymMatrix::from_triplets(topo.len(), trip)
        .expect("edge indices are in range")
        .with_spd_asserted(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gram::{barycentric_refine, extract_edges};
    use crate::oracle::eig_sym;

    /// `∫_T (r − p)·(r − q) dA` in closed form for a flat triangle.
    fn exact_pair(corners: [Point; 3], area: f64, p: Point, q: Point) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let w = if i == j { 2.0 } else { 1.0 };
                s += w * dot3(sub(corners[i], p), sub(corners[j], q));
            }
        }
        area / 12.0 * s
    }

    fn meshes() -> Vec<TriMesh> {
        vec![
            TriMesh::tetrahedron(),
            TriMesh::icosphere(1, 1.0),
            TriMesh::icosphere(2, 0.3),
            barycentric_refine(&TriMesh::tetrahedron()),
        ]
    }

    #[test]
    fn rule_integrates_quartics_exactly() {
        // ∫ λ1^a λ2^b λ3^c over the reference triangle, normalized by area:
        // 2 a! b! c! / (a + b + c + 2)!
        let rule = dunavant6();
        let fact = |n: u32| (1..=n).product::<u32>() as f64;
        for a in 0..=4u32 {
            for b in 0..=(4 - a) {
                for c in 0..=(4 - a - b) {
                    let q: f64 = rule
                        .iter()
                        .map(|(l, w)| {
                            w * l[0].powi(a as i32) * l[1].powi(b as i32) * l[2].powi(c as i32)
                        })
                        .sum();
                    let exact = 2.0 * fact(a) * fact(b) * fact(c) / fact(a + b + c + 2);
                    assert!((q - exact).abs() < 1e-15, "{a} {b} {c}");
                }
            }
        }
    }

    #[test]
    fn pyramid_single_triangle() {
        let g = assemble_pyramid_gram(&TriMesh::single_triangle());
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 0.5 / 6.0 } else { 0.5 / 12.0 };
                assert_eq!(g.get(i, j), want);
            }
        }
    }

    #[test]
    fn pyramid_partition_of_unity() {
        for m in meshes() {
            let g = assemble_pyramid_gram(&m);
            assert!((g.total_sum() - m.total_area()).abs() <= 1e-12 * m.total_area());
        }
    }

    #[test]
    fn rwg_unit_square() {
        let m = TriMesh::unit_square();
        let g = assemble_rwg_gram(&m, &extract_edges(&m));
        assert_eq!(g.dim(), 1);
        assert!((g.get(0, 0) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rwg_matches_closed_form() {
        let m = TriMesh::icosphere(1, 1.3);
        let topo = extract_edges(&m);
        let g = assemble_rwg_gram(&m, &topo);
        let mut want = vec![vec![0.0; topo.len()]; topo.len()];
        for (t, local) in topo.triangle_edges(m.num_triangles()).iter().enumerate() {
            let area = m.area(t);
            for &(i, si, pi) in local {
                for &(j, sj, pj) in local {
                    let v = exact_pair(m.corners(t), area, m.vertices()[pi], m.vertices()[pj]);
                    want[i][j] += si * sj * v / (4.0 * area * area);
                }
            }
        }
        for (i, row) in want.iter().enumerate() {
            for (j, w) in row.iter().enumerate() {
                assert!((g.get(i, j) - w).abs() <= 1e-13 * g.get(i, i), "({i}, {j})");
            }
        }
    }

    #[test]
    fn rwg_disjoint_edges_are_zero() {
        let m = TriMesh::icosphere(1, 1.0);
        let topo = extract_edges(&m);
        let g = assemble_rwg_gram(&m, &topo);
        let e = topo.edges();
        for (i, ei) in e.iter().enumerate() {
            for (j, ej) in e.iter().enumerate() {
                let share = [ei.t_plus, ei.t_minus]
                    .iter()
                    .any(|t| *t == ej.t_plus || *t == ej.t_minus);
                assert_eq!(g.get(i, j) != 0.0, share);
            }
        }
    }

    #[test]
    fn both_grams_are_spd() {
        for m in meshes() {
            let p = eig_sym(&assemble_pyramid_gram(&m).to_dense()).unwrap();
            assert!(p.min() > 0.0);
            let r = eig_sym(&assemble_rwg_gram(&m, &extract_edges(&m)).to_dense()).unwrap();
            assert!(r.min() > 0.0);
        }
    }

    #[test]
    fn pyramid_is_permutation_equivariant() {
        let m = TriMesh::icosphere(1, 1.0);
        let n = m.num_vertices();
        let perm: Vec<usize> = (0..n).map(|i| (5 * i + 3) % n).collect();
        let mut verts = vec![[0.0; 3]; n];
        for (i, v) in m.vertices().iter().enumerate() {
            verts[perm[i]] = *v;
        }
        let tris = m.triangles().iter().map(|t| t.map(|i| perm[i])).collect();
        let pm = TriMesh::new(verts, tris).unwrap();
        let (g, gp) = (assemble_pyramid_gram(&m), assemble_pyramid_gram(&pm));
        for i in 0..n {
            for j in 0..n {
                assert!((g.get(i, j) - gp.get(perm[i], perm[j])).abs() < 1e-15);
            }
        }
        // RWG edges are relabelled and may flip orientation; magnitudes permute
        let (rg, rgp) = (
            assemble_rwg_gram(&m, &extract_edges(&m)),
            assemble_rwg_gram(&pm, &extract_edges(&pm)),
        );
        let mut d: Vec<f64> = rg.diagonal();
        let mut dp: Vec<f64> = rgp.diagonal();
        d.sort_by(f64::total_cmp);
        dp.sort_by(f64::total_cmp);
        for (a, b) in d.iter().zip(&dp) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}
