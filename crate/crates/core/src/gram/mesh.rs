use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, MeshError, Result};

pub type Point = [f64; 3];

pub(crate) fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn dot3(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: Point, b: Point) -> Point {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Triangulated surface with consistently oriented faces.
///
/// Construction validates indices, rejects zero-area triangles, edges shared
/// by more than two faces and neighbours that traverse their common edge in
/// the same direction.
#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
}

impl TriMesh {
    pub fn new(vertices: Vec<Point>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        let count = vertices.len();
        for tri in &triangles {
            if let Some(&index) = tri.iter().find(|&&i| i >= count) {
                return Err(MeshError::IndexOutOfRange { index, count }.into());
            }
        }
        let mesh = Self {
            vertices,
            triangles,
        };
        for (t, tri) in mesh.triangles.iter().enumerate() {
            let [a, b, c] = tri.map(|i| mesh.vertices[i]);
            let longest = [sub(b, a), sub(c, b), sub(a, c)]
                .iter()
                .map(|e| dot3(*e, *e))
                .fold(0.0, f64::max);
            if tri[0] == tri[1]
                || tri[1] == tri[2]
                || tri[0] == tri[2]
                || !(mesh.area(t) > f64::EPSILON * longest)
            {
                return Err(MeshError::Degenerate(t).into());
            }
        }
        // directed half-edge -> number of uses, keyed by the sorted pair
        let mut uses: HashMap<(usize, usize), (usize, bool)> = HashMap::new();
        for tri in &mesh.triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                let forward = a < b;
                match uses.get_mut(&key) {
                    None => {
                        uses.insert(key, (1, forward));
                    }
                    Some((n, first)) => {
                        *n += 1;
                        if *n > 2 {
                            return Err(MeshError::NonManifold(key.0, key.1).into());
                        }
                        if *first == forward {
                            return Err(MeshError::InconsistentOrientation(key.0, key.1).into());
                        }
                    }
                }
            }
        }
        Ok(mesh)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn corners(&self, t: usize) -> [Point; 3] {
        self.triangles[t].map(|i| self.vertices[i])
    }

    pub fn area(&self, t: usize) -> f64 {
        let [a, b, c] = self.corners(t);
        let n = cross(sub(b, a), sub(c, a));
        0.5 * dot3(n, n).sqrt()
    }

    pub fn total_area(&self) -> f64 {
        (0..self.num_triangles()).map(|t| self.area(t)).sum()
    }

    /// Volume enclosed by a closed mesh; positive when faces point outward.
    pub fn signed_volume(&self) -> f64 {
        (0..self.num_triangles())
            .map(|t| {
                let [a, b, c] = self.corners(t);
                dot3(a, cross(b, c)) / 6.0
            })
            .sum()
    }

    /// Parses an ASCII OFF file.
    pub fn parse_off(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let parse_err = |line: usize, msg: String| Error::Parse { line, msg };

        let (line, header) = lines
            .next()
            .ok_or_else(|| parse_err(1, "empty file".into()))?;
        let mut header_tokens = header.split_whitespace();
        if header_tokens.next() != Some("OFF") {
            return Err(parse_err(
                line,
                format!("expected OFF header, found {header:?}"),
            ));
        }
        // counts may follow the keyword on the same line
        let rest: Vec<&str> = header_tokens.collect();
        let (line, counts) = if rest.is_empty() {
            let (l, c) = lines
                .next()
                .ok_or_else(|| parse_err(line, "missing counts".into()))?;
            (l, c.split_whitespace().collect::<Vec<_>>())
        } else {
            (line, rest)
        };
        if counts.len() < 2 {
            return Err(parse_err(line, "expected vertex and face counts".into()));
        }
        let count = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| parse_err(line, format!("invalid count {s:?}")))
        };
        let nv = count(counts[0])?;
        let nf = count(counts[1])?;

        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let (line, l) = lines
                .next()
                .ok_or_else(|| parse_err(line, "unexpected end of file in vertex list".into()))?;
            let xyz: Vec<f64> = l
                .split_whitespace()
                .take(3)
                .map(|s| s.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| parse_err(line, format!("invalid coordinate: {e}")))?;
            if xyz.len() != 3 || xyz.iter().any(|v| !v.is_finite()) {
                return Err(parse_err(line, "expected three finite coordinates".into()));
            }
            vertices.push([xyz[0], xyz[1], xyz[2]]);
        }

        let mut triangles = Vec::with_capacity(nf);
        for face in 0..nf {
            let (line, l) = lines
                .next()
                .ok_or_else(|| parse_err(line, "unexpected end of file in face list".into()))?;
            let idx: Vec<usize> = l
                .split_whitespace()
                .map(|s| s.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| parse_err(line, format!("invalid face index: {e}")))?;
            let sides = *idx
                .first()
                .ok_or_else(|| parse_err(line, "empty face".into()))?;
            if sides != 3 {
                return Err(MeshError::NotTriangle { face, sides }.into());
            }
            if idx.len() < 4 {
                return Err(parse_err(
                    line,
                    "face lists fewer indices than declared".into(),
                ));
            }
            triangles.push([idx[1], idx[2], idx[3]]);
        }
        Self::new(vertices, triangles)
    }

    pub fn load_off(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_off(&std::fs::read_to_string(path)?)
    }

    pub fn to_off_string(&self) -> String {
        let mut s = String::new();
        writeln!(s, "OFF").unwrap();
        writeln!(s, "{} {} 0", self.num_vertices(), self.num_triangles()).unwrap();
        for v in &self.vertices {
            writeln!(s, "{:e} {:e} {:e}", v[0], v[1], v[2]).unwrap();
        }
        for t in &self.triangles {
            writeln!(s, "3 {} {} {}", t[0], t[1], t[2]).unwrap();
        }
        s
    }

    pub fn write_off(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_off_string())?;
        Ok(())
    }

    /// Regular tetrahedron with unit edges, centred at the origin.
    pub fn tetrahedron() -> Self {
        let s = 1.0 / (2.0 * 2f64.sqrt());
        let vertices = vec![[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]];
        let triangles = vec![[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]];
        Self::new(vertices, triangles).expect("valid tetrahedron")
    }

    /// Right triangle with unit legs in the `z = 0` plane.
    pub fn single_triangle() -> Self {
        Self::new(
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
            vec![[0, 1, 2]],
        )
        .expect("valid triangle")
    }

    /// Unit square split along its diagonal into two right triangles.
    pub fn unit_square() -> Self {
        Self::new(
            vec![
                [0.0, 0.0, 0.0],
                [1.0, 0.0, 0.0],
                [1.0, 1.0, 0.0],
                [0.0, 1.0, 0.0],
            ],
            vec![[0, 1, 2], [0, 2, 3]],
        )
        .expect("valid square")
    }

    /// Icosahedron subdivided `levels` times (each face into four), with
    /// vertices projected onto the sphere of the given radius. Level `k`
    /// has `20·4^k` faces.
    pub fn icosphere(levels: usize, radius: f64) -> Self {
        let t = (1.0 + 5f64.sqrt()) / 2.0;
        let mut vertices: Vec<Point> = vec![
            [-1.0, t, 0.0],
            [1.0, t, 0.0],
            [-1.0, -t, 0.0],
            [1.0, -t, 0.0],
            [0.0, -1.0, t],
            [0.0, 1.0, t],
            [0.0, -1.0, -t],
            [0.0, 1.0, -t],
            [t, 0.0, -1.0],
            [t, 0.0, 1.0],
            [-t, 0.0, -1.0],
            [-t, 0.0, 1.0],
        ];
        let mut triangles = vec![
            [0, 11, 5],
            [0, 5, 1],
            [0, 1, 7],
            [0, 7, 10],
            [0, 10, 11],
            [1, 5, 9],
            [5, 11, 4],
            [11, 10, 2],
            [10, 7, 6],
            [7, 1, 8],
            [3, 9, 4],
            [3, 4, 2],
            [3, 2, 6],
            [3, 6, 8],
            [3, 8, 9],
            [4, 9, 5],
            [2, 4, 11],
            [6, 2, 10],
            [8, 6, 7],
            [9, 8, 1],
        ];
        let project = |p: Point| {
            let n = dot3(p, p).sqrt();
            [p[0] / n * radius, p[1] / n * radius, p[2] / n * radius]
        };
        for v in vertices.iter_mut() {
            *v = project(*v);
        }
        for _ in 0..levels {
            let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
            let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<Point>| {
                *midpoints.entry((a.min(b), a.max(b))).or_insert_with(|| {
                    let (p, q) = (vertices[a], vertices[b]);
                    vertices.push(project([
                        (p[0] + q[0]) / 2.0,
                        (p[1] + q[1]) / 2.0,
                        (p[2] + q[2]) / 2.0,
                    ]));
                    vertices.len() - 1
                })
            };
            let mut next = Vec::with_capacity(4 * triangles.len());
            for &[a, b, c] in &triangles {
                let ab = midpoint(a, b, &mut vertices);
                let bc = midpoint(b, c, &mut vertices);
                let ca = midpoint(c, a, &mut vertices);
                next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
            }
            triangles = next;
        }
        Self::new(vertices, triangles).expect("valid icosphere")
    }
}
