use super::dense::{dot, Matrix};
use crate::{Error, Result};

/// Householder QR of an `m×n` matrix with `m ≥ n`.
#[derive(Debug, Clone)]
pub struct QrFactor {
    /// Upper triangle holds `R`; below the diagonal, the Householder vectors
    /// (with implicit leading component stored in `beta`/`v0`).
    qr: Matrix,
    v0: Vec<f64>,
    beta: Vec<f64>,
    r_diag: Vec<f64>,
}

impl QrFactor {
    pub fn new(a: &Matrix) -> Result<Self> {
        let (m, n) = (a.nrows(), a.ncols());
        if m < n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: m,
            });
        }
        let tol = f64::EPSILON * a.norm_inf() * m.max(n) as f64;
        let mut qr = a.clone();
        let mut v0 = vec![0.0; n];
        let mut beta = vec![0.0; n];
        let mut r_diag = vec![0.0; n];
        for k in 0..n {
            let col = &qr.col(k)[k..];
            let scale = col.iter().fold(0.0f64, |s, v| s.max(v.abs()));
            let (alpha, b, head) = if scale == 0.0 {
                (0.0, 0.0, 0.0)
            } else {
                let norm = scale * col.iter().map(|v| (v / scale).powi(2)).sum::<f64>().sqrt();
                let x0 = col[0];
                let alpha = if x0 >= 0.0 { -norm } else { norm };
                // v = x - alpha e1, beta = 2 / vᵀv
                let head = x0 - alpha;
                let vtv = head * head + col[1..].iter().map(|v| v * v).sum::<f64>();
                (alpha, if vtv > 0.0 { 2.0 / vtv } else { 0.0 }, head)
            };
            v0[k] = head;
            beta[k] = b;
            r_diag[k] = alpha;
            if b != 0.0 {
                for j in k + 1..n {
                    let s = {
                        let cj = qr.col(j);
                        let ck = qr.col(k);
                        head * cj[k] + dot(&ck[k + 1..], &cj[k + 1..])
                    };
                    let f = b * s;
                    let vk: Vec<f64> = qr.col(k)[k + 1..].to_vec();
                    let cj = qr.col_mut(j);
                    cj[k] -= f * head;
                    for (x, v) in cj[k + 1..].iter_mut().zip(&vk) {
                        *x -= f * v;
                    }
                }
            }
            if alpha.abs() < tol || alpha == 0.0 {
                return Err(Error::RankDeficient {
                    column: k,
                    value: alpha.abs(),
                });
            }
        }
        Ok(Self {
            qr,
            v0,
            beta,
            r_diag,
        })
    }

    /// Applies `Qᵀ` to `b` in place.
    fn apply_qt(&self, b: &mut [f64]) {
        let n = self.qr.ncols();
        for k in 0..n {
            if self.beta[k] == 0.0 {
                continue;
            }
            let vk = &self.qr.col(k)[k + 1..];
            let s = self.v0[k] * b[k] + dot(vk, &b[k + 1..]);
            let f = self.beta[k] * s;
            b[k] -= f * self.v0[k];
            for (x, v) in b[k + 1..].iter_mut().zip(vk) {
                *x -= f * v;
            }
        }
    }

    /// Least-squares solution of `min ‖A·x − b‖₂`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.qr.ncols();
        let mut y = b.to_vec();
        self.apply_qt(&mut y);
        let mut x = y[..n].to_vec();
        for k in (0..n).rev() {
            let s: f64 = (k + 1..n).map(|j| self.qr[(k, j)] * x[j]).sum();
            x[k] = (x[k] - s) / self.r_diag[k];
        }
        x
    }
}

pub fn qr_solve(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    Ok(QrFactor::new(a)?.solve(b))
}
