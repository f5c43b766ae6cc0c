//! Matrix Market reading and writing.
//!
//! Sparse symmetric matrices are written as `coordinate real symmetric`
//! (lower triangle), dense results as `array real general` and combination
//! matrices as `coordinate real general`. Values use Rust's shortest
//! round-trip formatting, so reading a written file reproduces every value
//! bit for bit. Indices are 1-based on disk.

use std::fmt::Write as _;
use std::path::Path;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::gram::CombinationMatrix;
use crate::sparse::SparseSymMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    General,
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Header {
    pub format: Format,
    pub symmetry: Symmetry,
}

/// Parsed file contents before interpretation.
struct Body {
    header: Header,
    rows: usize,
    cols: usize,
    /// `(row, col, value)`, 0-based; for arrays in file order.
    entries: Vec<(usize, usize, f64)>,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse(text: &str) -> Result<Body> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, banner) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let tokens: Vec<String> = banner
        .split_whitespace()
        .map(|t| t.to_ascii_lowercase())
        .collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(
            1,
            format!("not a Matrix Market matrix header: {banner:?}"),
        ));
    }
    let format = match tokens[2].as_str() {
        "coordinate" => Format::Coordinate,
        "array" => Format::Array,
        f => return Err(parse_err(1, format!("unsupported format {f:?}"))),
    };
    if tokens[3] != "real" && tokens[3] != "integer" && tokens[3] != "double" {
        return Err(parse_err(1, format!("unsupported field {:?}", tokens[3])));
    }
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        s => return Err(parse_err(1, format!("unsupported symmetry {s:?}"))),
    };

    let mut data = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (size_line, size) = data
        .next()
        .ok_or_else(|| parse_err(1, "missing size line"))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| parse_err(size_line, format!("invalid size line: {e}")))?;
    let expected_len = if format == Format::Coordinate { 3 } else { 2 };
    if dims.len() != expected_len {
        return Err(parse_err(size_line, "wrong number of fields on size line"));
    }
    let (rows, cols) = (dims[0], dims[1]);
    if symmetry == Symmetry::Symmetric && rows != cols {
        return Err(parse_err(size_line, "symmetric matrix must be square"));
    }

    let parse_value = |line: usize, s: &str| -> Result<f64> {
        let v = s
            .parse::<f64>()
            .map_err(|e| parse_err(line, format!("invalid value {s:?}: {e}")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(parse_err(line, format!("non-finite value {s:?}")))
        }
    };

    let mut entries = Vec::new();
    match format {
        Format::Coordinate => {
            let nnz = dims[2];
            for _ in 0..nnz {
                let (line, l) = data
                    .next()
                    .ok_or_else(|| parse_err(size_line, format!("expected {nnz} entries")))?;
                let f: Vec<&str> = l.split_whitespace().collect();
                if f.len() != 3 {
                    return Err(parse_err(line, "expected `row col value`"));
                }
                let index = |s: &str, bound: usize| -> Result<usize> {
                    let i = s
                        .parse::<usize>()
                        .map_err(|e| parse_err(line, format!("invalid index {s:?}: {e}")))?;
                    if i == 0 || i > bound {
                        return Err(parse_err(line, format!("index {i} outside 1..={bound}")));
                    }
                    Ok(i - 1)
                };
                let (r, c) = (index(f[0], rows)?, index(f[1], cols)?);
                if symmetry == Symmetry::Symmetric && c > r {
                    return Err(parse_err(
                        line,
                        "symmetric files store the lower triangle only",
                    ));
                }
                entries.push((r, c, parse_value(line, f[2])?));
            }
        }
        Format::Array => {
            // column-major; symmetric arrays list the lower triangle
            let positions: Vec<(usize, usize)> = match symmetry {
                Symmetry::General => (0..cols)
                    .flat_map(|c| (0..rows).map(move |r| (r, c)))
                    .collect(),
                Symmetry::Symmetric => (0..cols)
                    .flat_map(|c| (c..rows).map(move |r| (r, c)))
                    .collect(),
            };
            for (r, c) in positions {
                let (line, l) = data
                    .next()
                    .ok_or_else(|| parse_err(size_line, "array ended early"))?;
                let f: Vec<&str> = l.split_whitespace().collect();
                if f.len() != 1 {
                    return Err(parse_err(line, "expected a single value"));
                }
                entries.push((r, c, parse_value(line, f[0])?));
            }
        }
    }
    if let Some((line, _)) = data.next() {
        return Err(parse_err(line, "unexpected data after the last entry"));
    }
    Ok(Body {
        header: Header { format, symmetry },
        rows,
        cols,
        entries,
    })
}

/// Reads a symmetric sparse matrix. Files declared `general` are accepted
/// when their entries are exactly symmetric.
pub fn read_sparse_sym(text: &str) -> Result<SparseSymMatrix> {
    let body = parse(text)?;
    if body.rows != body.cols {
        return Err(Error::InvalidParameter(format!(
            "expected a square matrix, found {}x{}",
            body.rows, body.cols
        )));
    }
    match body.header.symmetry {
        Symmetry::Symmetric => SparseSymMatrix::from_triplets(body.rows, body.entries),
        Symmetry::General => {
            let dense = to_dense(&body);
            if dense.asymmetry() != 0.0 {
                return Err(Error::InvalidParameter("matrix is not symmetric".into()));
            }
            let lower = body.entries.into_iter().filter(|&(r, c, _)| r >= c);
            // duplicates in a general file are summed, as in the symmetric case
            SparseSymMatrix::from_triplets(body.rows, lower)
        }
    }
}

fn to_dense(body: &Body) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(body.rows, body.cols);
    for &(r, c, v) in &body.entries {
        match body.header.format {
            Format::Array => m[(r, c)] = v,
            Format::Coordinate => m[(r, c)] += v,
        }
        if body.header.symmetry == Symmetry::Symmetric && r != c {
            m[(c, r)] = m[(r, c)];
        }
    }
    m
}

/// Reads any supported real matrix into dense storage.
pub fn read_dense(text: &str) -> Result<DenseMatrix> {
    Ok(to_dense(&parse(text)?))
}

pub fn read_combination(text: &str) -> Result<CombinationMatrix> {
    let body = parse(text)?;
    if body.header.format != Format::Coordinate || body.header.symmetry != Symmetry::General {
        return Err(Error::InvalidParameter(
            "combination matrices must be `coordinate real general`".into(),
        ));
    }
    CombinationMatrix::from_triplets(body.rows, body.cols, body.entries)
}

pub fn write_sparse_sym(m: &SparseSymMatrix) -> String {
    let mut s = String::new();
    writeln!(s, "%%MatrixMarket matrix coordinate real symmetric").unwrap();
    writeln!(s, "{} {} {}", m.dim(), m.dim(), m.nnz()).unwrap();
    for (r, c, v) in m.iter() {
        writeln!(s, "{} {} {:e}", r + 1, c + 1, v).unwrap();
    }
    s
}

pub fn write_dense(m: &DenseMatrix) -> String {
    let mut s = String::new();
    writeln!(s, "%%MatrixMarket matrix array real general").unwrap();
    writeln!(s, "{} {}", m.rows(), m.cols()).unwrap();
    for c in 0..m.cols() {
        for r in 0..m.rows() {
            writeln!(s, "{:e}", m[(r, c)]).unwrap();
        }
    }
    s
}

pub fn write_combination(m: &CombinationMatrix) -> String {
    let mut s = String::new();
    writeln!(s, "%%MatrixMarket matrix coordinate real general").unwrap();
    writeln!(s, "{} {} {}", m.rows(), m.cols(), m.nnz()).unwrap();
    for (r, c, v) in m.iter() {
        writeln!(s, "{} {} {:e}", r + 1, c + 1, v).unwrap();
    }
    s
}

pub fn load_sparse_sym(path: impl AsRef<Path>) -> Result<SparseSymMatrix> {
    read_sparse_sym(&std::fs::read_to_string(path)?)
}

pub fn load_dense(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    read_dense(&std::fs::read_to_string(path)?)
}

pub fn load_combination(path: impl AsRef<Path>) -> Result<CombinationMatrix> {
    read_combination(&std::fs::read_to_string(path)?)
}
