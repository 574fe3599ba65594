use nalgebra_sparse::factorization::CscCholesky;
use nalgebra_sparse::{CooMatrix, CscMatrix};

use crate::{Error, Result};

/// Symmetric sparse matrix in compressed-column form.
#[derive(Debug, Clone)]
pub struct SparseSym {
    inner: CscMatrix<f64>,
}

impl SparseSym {
    /// Sum duplicate `(row, col, value)` entries into an `n × n` matrix.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut coo = CooMatrix::new(n, n);
        for &(i, j, v) in triplets {
            if i >= n || j >= n {
                return Err(Error::InvalidParameter(format!("entry ({i}, {j}) outside {n} x {n}")));
            }
            coo.push(i, j, v);
        }
        Ok(SparseSym { inner: CscMatrix::from(&coo) })
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn nnz(&self) -> usize {
        self.inner.nnz()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.inner.get_entry(i, j).map(|e| e.into_value()).unwrap_or(0.0)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        for (j, col) in self.inner.col_iter().enumerate() {
            for (&i, &v) in col.row_indices().iter().zip(col.values()) {
                y[i] += v * x[j];
            }
        }
        y
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut out = vec![vec![0.0; n]; n];
        for (j, col) in self.inner.col_iter().enumerate() {
            for (&i, &v) in col.row_indices().iter().zip(col.values()) {
                out[i][j] += v;
            }
        }
        out
    }

    /// Largest `|a_ij - a_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (j, col) in self.inner.col_iter().enumerate() {
            for (&i, &v) in col.row_indices().iter().zip(col.values()) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Solve `A x = b` by sparse Cholesky.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.dim() {
            return Err(Error::InvalidParameter("right-hand side length mismatch".into()));
        }
        if self.dim() == 0 {
            return Ok(Vec::new());
        }
        let chol = CscCholesky::factor(&self.inner).map_err(|e| Error::LinearSolve(e.to_string()))?;
        let rhs = nalgebra_sparse::na::DMatrix::from_column_slice(b.len(), 1, b);
        let x = chol.solve(&rhs);
        let x: Vec<f64> = x.column(0).iter().copied().collect();
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::LinearSolve("non-finite solution".into()));
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_solve() {
        let n = 5;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        let a = SparseSym::from_triplets(n, &t).unwrap();
        let x = vec![1.0, -2.0, 0.5, 3.0, 0.0];
        let b = a.matvec(&x);
        let y = a.solve(&b).unwrap();
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).abs() < 1e-12);
        }
        assert_eq!(a.asymmetry(), 0.0);
    }

    #[test]
    fn duplicates_sum() {
        let a = SparseSym::from_triplets(2, &[(0, 0, 1.0), (0, 0, 2.0), (1, 1, 1.0)]).unwrap();
        assert_eq!(a.get(0, 0), 3.0);
        assert_eq!(a.get(0, 1), 0.0);
    }

    #[test]
    fn indefinite_rejected() {
        let a = SparseSym::from_triplets(2, &[(0, 0, 1.0), (1, 1, -1.0)]).unwrap();
        assert!(a.solve(&[1.0, 1.0]).is_err());
    }
}
