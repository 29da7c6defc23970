use super::operator::Preconditioner;
use crate::sparsity::CscMatrix;
use crate::{Error, Result};

/// Zero fill-in incomplete LU factorization, stored row-wise.
#[derive(Debug, Clone)]
pub struct Ilu0 {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
    diag: Vec<usize>,
}

impl Ilu0 {
    pub fn new(a: &CscMatrix) -> Result<Self> {
        let n = a.n_rows();
        if a.n_cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: a.n_cols(),
            });
        }
        // CSC of Aᵀ is CSR of A, with sorted column indices per row
        let t = a.transpose();
        let row_ptr = t.col_ptr().to_vec();
        let col_idx = t.row_idx().to_vec();
        let mut values = t.values().to_vec();
        let mut diag = vec![usize::MAX; n];
        for i in 0..n {
            for k in row_ptr[i]..row_ptr[i + 1] {
                if col_idx[k] == i {
                    diag[i] = k;
                }
            }
            if diag[i] == usize::MAX {
                return Err(Error::ZeroPivot { row: i });
            }
        }

        let mut marker = vec![usize::MAX; n];
        for i in 0..n {
            for k in row_ptr[i]..row_ptr[i + 1] {
                marker[col_idx[k]] = k;
            }
            for k in row_ptr[i]..diag[i] {
                let kc = col_idx[k];
                let pivot = values[diag[kc]];
                if pivot == 0.0 {
                    return Err(Error::ZeroPivot { row: kc });
                }
                let factor = values[k] / pivot;
                values[k] = factor;
                for kk in diag[kc] + 1..row_ptr[kc + 1] {
                    let pos = marker[col_idx[kk]];
                    if pos != usize::MAX {
                        values[pos] -= factor * values[kk];
                    }
                }
            }
            if values[diag[i]] == 0.0 {
                return Err(Error::ZeroPivot { row: i });
            }
            for k in row_ptr[i]..row_ptr[i + 1] {
                marker[col_idx[k]] = usize::MAX;
            }
        }
        Ok(Self {
            n,
            row_ptr,
            col_idx,
            values,
            diag,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `L·U·x = b` with the incomplete factors.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        for i in 0..self.n {
            let mut s = x[i];
            for k in self.row_ptr[i]..self.diag[i] {
                s -= self.values[k] * x[self.col_idx[k]];
            }
            x[i] = s;
        }
        for i in (0..self.n).rev() {
            let mut s = x[i];
            for k in self.diag[i] + 1..self.row_ptr[i + 1] {
                s -= self.values[k] * x[self.col_idx[k]];
            }
            x[i] = s / self.values[self.diag[i]];
        }
        x
    }
}

impl Preconditioner for Ilu0 {
    fn apply_inverse(&self, x: &[f64]) -> Vec<f64> {
        self.solve(x)
    }
}

pub fn ilu0(a: &CscMatrix) -> Result<Ilu0> {
    Ilu0::new(a)
}
