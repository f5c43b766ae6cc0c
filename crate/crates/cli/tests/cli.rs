use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gramroot::dense::DenseSymMatrix;
use gramroot::gram::TriMesh;
use gramroot::mm;
use gramroot::oracle::{generalized_eigs, reference_sqrt, relative_error};
use gramroot::sparse::SparseSymMatrix;
use gramroot::synth::{linear_spectrum, random_symmetric, spd_with_spectrum};
use tempfile::TempDir;

fn mesh(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/data/meshes")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gramroot"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_sparse(dir: &TempDir, name: &str, m: &SparseSymMatrix) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, mm::write_sparse_sym(m)).unwrap();
    p
}

fn csv(p: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(p)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn gram_pyramid_on_tetrahedron() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("g.mtx");
    ok(&[
        "gram",
        s(&mesh("tetrahedron.off")),
        "--basis",
        "pyramid",
        "--out",
        s(&out),
    ]);
    let g = mm::load_sparse_sym(&out).unwrap();
    assert_eq!(g.dim(), 4);
    let area = TriMesh::tetrahedron().total_area();
    assert!((g.total_sum() - area).abs() <= 1e-12 * area);
}

#[test]
fn gram_rwg_sizes() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("g.mtx");
    ok(&[
        "gram",
        s(&mesh("tetrahedron.off")),
        "--basis",
        "rwg",
        "-o",
        s(&out),
    ]);
    let g = mm::load_sparse_sym(&out).unwrap();
    assert_eq!(g.dim(), 6);
    assert!(gramroot::oracle::eig_sym(&g.to_dense()).unwrap().min() > 0.0);

    ok(&[
        "gram",
        s(&mesh("icosphere80.off")),
        "--basis",
        "rwg",
        "--refine",
        "-o",
        s(&out),
    ]);
    assert_eq!(mm::load_sparse_sym(&out).unwrap().dim(), 720);
}

#[test]
fn gram_with_combination_matrix() {
    let dir = TempDir::new().unwrap();
    let r = dir.path().join("r.mtx");
    // sums of the hat functions of vertices {1, 2} and {3, 4}
    std::fs::write(
        &r,
        "%%MatrixMarket matrix coordinate real general\n4 2 4\n1 1 1\n2 1 1\n3 2 1\n4 2 1\n",
    )
    .unwrap();
    let out = dir.path().join("g.mtx");
    ok(&[
        "gram",
        s(&mesh("tetrahedron.off")),
        "--basis",
        "pyramid",
        "--combination",
        s(&r),
        "-o",
        s(&out),
    ]);
    let g = mm::load_sparse_sym(&out).unwrap();
    assert_eq!(g.dim(), 2);
    let area = TriMesh::tetrahedron().total_area();
    assert!((g.total_sum() - area).abs() <= 1e-12 * area);
}

#[test]
fn emitted_files_round_trip_exactly() {
    let dir = TempDir::new().unwrap();
    let g = dir.path().join("g.mtx");
    ok(&[
        "gram",
        s(&mesh("icosphere80.off")),
        "--basis",
        "rwg",
        "-o",
        s(&g),
    ]);
    let text = std::fs::read_to_string(&g).unwrap();
    assert_eq!(
        mm::write_sparse_sym(&mm::read_sparse_sym(&text).unwrap()),
        text
    );
    let f = dir.path().join("f.mtx");
    ok(&[
        "sqrt",
        s(&g),
        "--method",
        "pae",
        "--order",
        "6",
        "-o",
        s(&f),
    ]);
    let text = std::fs::read_to_string(&f).unwrap();
    assert_eq!(mm::write_dense(&mm::read_dense(&text).unwrap()), text);
}

#[test]
fn sqrt_of_identity_and_scalar() {
    let dir = TempDir::new().unwrap();
    let id = write_sparse(&dir, "i.mtx", &SparseSymMatrix::identity(5));
    let out = dir.path().join("o.mtx");
    for method in ["tse", "cpe1", "pae"] {
        ok(&[
            "sqrt",
            s(&id),
            "--method",
            method,
            "--order",
            "4",
            "-o",
            s(&out),
        ]);
        let f = mm::load_dense(&out).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((f[(i, j)] - want).abs() <= 1e-13);
            }
        }
    }
    let four = write_sparse(&dir, "4.mtx", &SparseSymMatrix::from_diagonal(&[4.0]));
    ok(&[
        "sqrt",
        s(&four),
        "--method",
        "tse",
        "--order",
        "5",
        "-o",
        s(&out),
    ]);
    assert!((mm::load_dense(&out).unwrap()[(0, 0)] - 2.0).abs() <= 1e-12);
}

#[test]
fn cpe2_order_from_table() {
    let dir = TempDir::new().unwrap();
    let d = spd_with_spectrum(&linear_spectrum(0.1, 1.0, 100), 17);
    let g = write_sparse(&dir, "g.mtx", &SparseSymMatrix::from_dense(&d));
    let out = dir.path().join("s.mtx");
    let o = ok(&[
        "sqrt",
        s(&g),
        "--method",
        "cpe2",
        "--n0-class",
        "1e-1",
        "--delta",
        "1e-4",
        "-o",
        s(&out),
    ]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("order 8"));
    let f = DenseSymMatrix::new(mm::load_dense(&out).unwrap()).unwrap();
    let err = relative_error(&f, &reference_sqrt(&d).unwrap()).unwrap();
    assert!(err <= 1e-4, "{err:e}");
}

#[test]
fn convergence_csv() {
    let dir = TempDir::new().unwrap();
    let id = write_sparse(&dir, "i.mtx", &SparseSymMatrix::identity(4));
    let out = dir.path().join("c.csv");
    ok(&[
        "convergence",
        s(&id),
        "--methods",
        "tse,cpe1,pae",
        "-o",
        s(&out),
    ]);
    let rows = csv(&out);
    assert_eq!(rows.len(), 3 * 2 * 9);
    assert!(rows.iter().all(|r| r[3].parse::<f64>().unwrap() <= 1e-13));

    let diag = write_sparse(
        &dir,
        "d.mtx",
        &SparseSymMatrix::from_diagonal(&linear_spectrum(0.1, 1.0, 30)),
    );
    ok(&["convergence", s(&diag), "--kinds", "sqrt", "-o", s(&out)]);
    let rows = csv(&out);
    let delta = |m: &str, n: usize| -> f64 {
        rows.iter()
            .find(|r| r[0] == m && r[2] == n.to_string())
            .unwrap()[3]
            .parse()
            .unwrap()
    };
    for n in 2..=9 {
        assert!(delta("pae", n) <= delta("tse", n));
    }
    for m in ["tse", "cpe1", "cpe2", "pae"] {
        assert!(delta(m, 9) < delta(m, 1));
    }
}

#[test]
fn coefficient_tables() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("c.csv");
    ok(&["coeffs", "--method", "tse", "--kind", "sqrt", "-o", s(&out)]);
    let rational: Vec<String> = csv(&out).into_iter().map(|r| r[2].clone()).collect();
    assert_eq!(
        rational,
        [
            "1",
            "1/2",
            "-1/8",
            "1/16",
            "-5/128",
            "7/256",
            "-21/1024",
            "33/2048",
            "-429/32768",
            "715/65536"
        ]
    );

    ok(&["coeffs", "--method", "pae", "-o", s(&out)]);
    let ints: Vec<String> = csv(&out).into_iter().map(|r| r[2].clone()).collect();
    assert_eq!(
        ints,
        ["1", "171", "3876", "27132", "75582", "92378", "50388", "11628", "969", "19"]
    );

    ok(&[
        "coeffs",
        "--method",
        "cpe1",
        "--kind",
        "sqrt",
        "--n0",
        "0.05",
        "--order",
        "1",
        "-o",
        s(&out),
    ]);
    let c1: f64 = csv(&out)[1][1].parse().unwrap();
    let want = 35002745.0 / 95238932.0;
    assert!((c1 - want).abs() <= 1e-6 * want);
}

#[test]
fn normalize_examples() {
    let dir = TempDir::new().unwrap();
    let t = random_symmetric(12, 4);
    let tp = dir.path().join("t.mtx");
    std::fs::write(&tp, mm::write_dense(t.as_matrix())).unwrap();
    let id = write_sparse(&dir, "i.mtx", &SparseSymMatrix::identity(12));
    let out = dir.path().join("n.mtx");
    ok(&[
        "normalize",
        s(&tp),
        "--g-left",
        s(&id),
        "--method",
        "tse",
        "--order",
        "3",
        "-o",
        s(&out),
    ]);
    assert_eq!(mm::load_dense(&out).unwrap(), *t.as_matrix());

    let g = SparseSymMatrix::from_dense(&spd_with_spectrum(&linear_spectrum(0.4, 1.0, 12), 2));
    let gp = write_sparse(&dir, "g.mtx", &g);
    let gt = dir.path().join("gt.mtx");
    std::fs::write(&gt, mm::write_dense(g.to_dense().as_matrix())).unwrap();
    ok(&[
        "normalize",
        s(&gt),
        "--g-left",
        s(&gp),
        "--method",
        "pae",
        "--order",
        "12",
        "-o",
        s(&out),
    ]);
    let n = mm::load_dense(&out).unwrap();
    for i in 0..12 {
        for j in 0..12 {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((n[(i, j)] - want).abs() <= 1e-9);
        }
    }

    let sv = dir.path().join("sv.csv");
    ok(&[
        "normalize",
        s(&tp),
        "--g-left",
        s(&gp),
        "--g-right",
        s(&gp),
        "--method",
        "cpe1",
        "--order",
        "60",
        "-o",
        s(&out),
        "--singular-values",
        s(&sv),
    ]);
    let got: Vec<f64> = csv(&sv).iter().map(|r| r[1].parse().unwrap()).collect();
    let mut want: Vec<f64> = generalized_eigs(&t, &g)
        .unwrap()
        .iter()
        .map(|v| v.abs())
        .collect();
    want.sort_by(|a, b| b.total_cmp(a));
    for (a, b) in got.iter().zip(&want) {
        assert!((a - b).abs() <= 1e-8 * want[0], "{a} vs {b}");
    }
}

#[test]
fn failures_leave_no_output() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("o.mtx");
    let bad = dir.path().join("bad.off");
    std::fs::write(&bad, "OFF\n3 1 0\n0 0 0\n1 0 0\n2 0 0\n3 0 1 2\n").unwrap();
    assert_eq!(
        run(&["gram", s(&bad), "--basis", "rwg", "-o", s(&out)])
            .status
            .code(),
        Some(3)
    );

    let g = write_sparse(&dir, "g.mtx", &SparseSymMatrix::from_diagonal(&[1.0, 2.0]));
    let args = [
        "invsqrt",
        s(&g),
        "--method",
        "cpe2",
        "--n0-class",
        "1e-3",
        "--delta",
        "1e-2",
        "-o",
        s(&out),
    ];
    assert_eq!(run(&args).status.code(), Some(6));

    let neg = write_sparse(&dir, "n.mtx", &SparseSymMatrix::from_diagonal(&[1.0, -2.0]));
    assert_eq!(
        run(&[
            "sqrt",
            s(&neg),
            "--method",
            "tse",
            "--order",
            "3",
            "-o",
            s(&out)
        ])
        .status
        .code(),
        Some(4)
    );

    let strict = [
        "sqrt",
        s(&g),
        "--method",
        "cpe2",
        "--n0-class",
        "1e-1",
        "--order",
        "3",
        "--strict-n0",
        "-o",
        s(&out),
    ];
    let wide = write_sparse(&dir, "w.mtx", &SparseSymMatrix::from_diagonal(&[0.01, 1.0]));
    let mut strict = strict.to_vec();
    let wide_s = s(&wide).to_string();
    strict[1] = &wide_s;
    assert_eq!(run(&strict).status.code(), Some(4));

    assert_eq!(
        run(&[
            "sqrt",
            s(&g),
            "--method",
            "tse",
            "--order",
            "3",
            "--bogus",
            "-o",
            s(&out)
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        run(&[
            "sqrt",
            "/nonexistent.mtx",
            "--method",
            "tse",
            "--order",
            "3",
            "-o",
            s(&out)
        ])
        .status
        .code(),
        Some(1)
    );

    assert!(!out.exists());
    let leftovers: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| !n.ends_with(".mtx") && !n.ends_with(".off"))
        .collect();
    assert!(leftovers.is_empty(), "{leftovers:?}");
}
