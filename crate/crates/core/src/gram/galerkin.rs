use crate::error::{Error, Result};
use crate::sparse::SparseSymMatrix;

/// Sparse `fine × dual` matrix whose columns express dual basis functions
/// as combinations of fine-mesh functions. Stored by columns.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinationMatrix {
    rows: usize,
    cols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CombinationMatrix {
    /// Builds the matrix from `(row, col, value)` entries. Duplicates are
    /// summed; every column must keep at least one nonzero.
    pub fn from_triplets<I>(rows: usize, cols: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut entries: Vec<(usize, usize, f64)> = Vec::new();
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(Error::InvalidParameter(format!(
                    "entry ({r}, {c}) outside a {rows}x{cols} combination matrix"
                )));
            }
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "non-finite entry at ({r}, {c})"
                )));
            }
            entries.push((c, r, v));
        }
        entries.sort_by_key(|e| (e.0, e.1));
        let mut col_ptr = vec![0; cols + 1];
        let mut row_idx = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (c, r, v) in entries {
            if last == Some((c, r)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            last = Some((c, r));
            row_idx.push(r);
            values.push(v);
            col_ptr[c + 1] += 1;
        }
        for c in 0..cols {
            col_ptr[c + 1] += col_ptr[c];
        }
        let m = Self {
            rows,
            cols,
            col_ptr,
            row_idx,
            values,
        };
        if let Some(c) = (0..cols).find(|&c| m.column(c).all(|(_, v)| v == 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "combination matrix column {c} is empty"
            )));
        }
        Ok(m)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, (0..n).map(|i| (i, i, 1.0))).expect("identity is valid")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn column(&self, c: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.col_ptr[c]..self.col_ptr[c + 1];
        self.row_idx[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    /// All entries as `(row, col, value)`, column by column.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.cols).flat_map(move |c| self.column(c).map(move |(r, v)| (r, c, v)))
    }

    fn dense_column(&self, c: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.rows];
        for (r, v) in self.column(c) {
            x[r] = v;
        }
        x
    }
}

/// `Rᵀ G R`, the Gram matrix of the combined basis.
pub fn galerkin_transform(
    g_fine: &SparseSymMatrix,
    r: &CombinationMatrix,
) -> Result<SparseSymMatrix> {
    if g_fine.dim() != r.rows() {
        return Err(Error::DimensionMismatch {
            expected: g_fine.dim(),
            found: r.rows(),
        });
    }
    let mut y = vec![0.0; r.rows()];
    let mut trip = Vec::new();
    for j in 0..r.cols() {
        g_fine.matvec_into(&r.dense_column(j), &mut y);
        for i in j..r.cols() {
            let v: f64 = r.column(i).map(|(k, rv)| rv * y[k]).sum();
            if v != 0.0 {
                trip.push((i, j, v));
            }
        }
    }
    let out = SparseSymMatrix::from_triplets(r.cols(), trip)?;
    Ok(out.with_spd_asserted(g_fine.spd_asserted()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::dot;
    use crate::synth::{random_sparse_spd, random_vector};

    /// Dense `Rᵀ G R` for cross-checking.
    fn dense_triple(g: &SparseSymMatrix, r: &CombinationMatrix) -> Vec<Vec<f64>> {
        let cols: Vec<Vec<f64>> = (0..r.cols()).map(|c| r.dense_column(c)).collect();
        let gr: Vec<Vec<f64>> = cols.iter().map(|c| g.matvec(c).unwrap()).collect();
        (0..r.cols())
            .map(|i| (0..r.cols()).map(|j| dot(&cols[i], &gr[j])).collect())
            .collect()
    }

    #[test]
    fn identity_leaves_gram_unchanged() {
        let g = random_sparse_spd(15, 3, 1);
        assert_eq!(
            galerkin_transform(&g, &CombinationMatrix::identity(15)).unwrap(),
            g
        );
    }

    #[test]
    fn ones_column_sums_block() {
        let g = random_sparse_spd(10, 3, 2);
        let k = [1usize, 4, 5, 8];
        let r = CombinationMatrix::from_triplets(10, 1, k.iter().map(|&i| (i, 0, 1.0))).unwrap();
        let out = galerkin_transform(&g, &r).unwrap();
        let want: f64 = k
            .iter()
            .flat_map(|&i| k.iter().map(move |&j| (i, j)))
            .map(|(i, j)| g.get(i, j))
            .sum();
        assert!((out.get(0, 0) - want).abs() < 1e-13 * want.abs());
    }

    #[test]
    fn matches_dense_triple_product() {
        let g = random_sparse_spd(20, 4, 3);
        let vals = random_vector(20 * 12, 4);
        let r = CombinationMatrix::from_triplets(
            20,
            12,
            (0..20)
                .flat_map(|i| (0..12).map(move |j| (i, j)))
                .zip(vals)
                .map(|((i, j), v)| (i, j, v)),
        )
        .unwrap();
        let out = galerkin_transform(&g, &r).unwrap();
        let want = dense_triple(&g, &r);
        for i in 0..12 {
            for j in 0..12 {
                assert!((out.get(i, j) - want[i][j]).abs() < 1e-12 * want[i][i].abs());
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(CombinationMatrix::from_triplets(3, 2, [(0, 0, 1.0)]).is_err());
        assert!(CombinationMatrix::from_triplets(3, 1, [(3, 0, 1.0)]).is_err());
        let g = SparseSymMatrix::identity(4);
        let r = CombinationMatrix::identity(3);
        assert!(matches!(
            galerkin_transform(&g, &r),
            Err(Error::DimensionMismatch {
                expected: 4,
                found: 3
            })
        ));
    }
}
