use super::dense::{norm_inf, Matrix};
use crate::{Deadline, Error, Result};

/// LU factorization with partial pivoting, `P·A = L·U`.
#[derive(Debug, Clone)]
pub struct LuFactor {
    lu: Matrix,
    /// `perm[k]` is the original row placed at position `k`.
    perm: Vec<usize>,
    norm_1: f64,
}

impl LuFactor {
    pub fn new(a: &Matrix) -> Result<Self> {
        Self::with_deadline(a.clone(), Deadline::NONE)
    }

    /// Factorizes in place, checking `deadline` once per column.
    ///
    /// Only an exactly zero (or non-finite) pivot column is reported as
    /// [`Error::Singular`]; near-singularity shows up in
    /// [`cond_estimate`](Self::cond_estimate).
    pub fn with_deadline(mut a: Matrix, deadline: Deadline) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                found: a.ncols(),
            });
        }
        let n = a.nrows();
        let norm_1 = a.norm_1();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            if k % 16 == 0 {
                deadline.check()?;
            }
            let col = a.col(k);
            let (p, pmax) = (k..n)
                .map(|i| (i, col[i].abs()))
                .fold((k, -1.0), |best, c| if c.1 > best.1 { c } else { best });
            if !(pmax > 0.0 && pmax.is_finite()) {
                return Err(Error::Singular {
                    column: k,
                    pivot: pmax.max(0.0),
                });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let c = a.col_mut(j);
                    c.swap(p, k);
                }
            }
            let (left, right) = split_cols(&mut a, k);
            let pivot = left[k];
            for v in &mut left[k + 1..] {
                *v /= pivot;
            }
            let lcol = &left[k + 1..];
            for cj in right.chunks_exact_mut(n) {
                let akj = cj[k];
                if akj != 0.0 {
                    for (x, l) in cj[k + 1..].iter_mut().zip(lcol) {
                        *x -= l * akj;
                    }
                }
            }
        }
        Ok(Self {
            lu: a,
            perm,
            norm_1,
        })
    }

    pub fn dim(&self) -> usize {
        self.lu.nrows()
    }

    /// Solves `A·x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        // L y = Pb (unit lower)
        for k in 0..n {
            let xk = x[k];
            if xk != 0.0 {
                let col = self.lu.col(k);
                for i in k + 1..n {
                    x[i] -= col[i] * xk;
                }
            }
        }
        // U x = y
        for k in (0..n).rev() {
            let col = self.lu.col(k);
            x[k] /= col[k];
            let xk = x[k];
            if xk != 0.0 {
                for i in 0..k {
                    x[i] -= col[i] * xk;
                }
            }
        }
        x
    }

    /// Solves `Aᵀ·x = b`.
    pub fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut y = b.to_vec();
        // Uᵀ z = b
        for k in 0..n {
            let col = self.lu.col(k);
            let s: f64 = (0..k).map(|i| col[i] * y[i]).sum();
            y[k] = (y[k] - s) / col[k];
        }
        // Lᵀ w = z
        for k in (0..n).rev() {
            let col = self.lu.col(k);
            let s: f64 = (k + 1..n).map(|i| col[i] * y[i]).sum();
            y[k] -= s;
        }
        let mut x = vec![0.0; n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = y[k];
        }
        x
    }

    /// Estimate of `‖A⁻¹‖₁` by Hager's method (Higham's refinement).
    pub fn inverse_norm_1_estimate(&self) -> f64 {
        let n = self.dim();
        if n == 0 {
            return 0.0;
        }
        let mut x = vec![1.0 / n as f64; n];
        let mut est = 0.0;
        for _ in 0..5 {
            let y = self.solve(&x);
            let new_est: f64 = y.iter().map(|v| v.abs()).sum();
            if !new_est.is_finite() {
                return f64::INFINITY;
            }
            let xi: Vec<f64> = y
                .iter()
                .map(|&v| if v < 0.0 { -1.0 } else { 1.0 })
                .collect();
            let z = self.solve_transpose(&xi);
            let (j, zmax) =
                z.iter().enumerate().fold(
                    (0, -1.0),
                    |b, (i, v)| if v.abs() > b.1 { (i, v.abs()) } else { b },
                );
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
            if new_est <= est || zmax <= ztx {
                est = est.max(new_est);
                break;
            }
            est = new_est;
            x = vec![0.0; n];
            x[j] = 1.0;
        }
        // Higham's extra alternating-sign probe
        let alt: Vec<f64> = (0..n)
            .map(|i| {
                let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                s * (1.0 + i as f64 / (n.max(2) - 1) as f64)
            })
            .collect();
        let y = self.solve(&alt);
        let alt_est = 2.0 * y.iter().map(|v| v.abs()).sum::<f64>() / (3.0 * n as f64);
        est.max(alt_est)
    }

    /// 1-norm condition number estimate `‖A‖₁·‖A⁻¹‖₁`.
    pub fn cond_estimate(&self) -> f64 {
        self.norm_1 * self.inverse_norm_1_estimate()
    }

    /// Smallest pivot magnitude relative to the largest entry of `U`.
    pub fn pivot_ratio(&self) -> f64 {
        let d = self.lu.diagonal();
        let umax = norm_inf(&d);
        d.iter().fold(f64::INFINITY, |m, v| m.min(v.abs())) / umax
    }
}

/// Splits column `k` (mutable) from the columns after it.
fn split_cols(a: &mut Matrix, k: usize) -> (&mut [f64], &mut [f64]) {
    let n = a.nrows();
    let (head, tail) = a.as_mut_slice().split_at_mut((k + 1) * n);
    (&mut head[k * n..], tail)
}

/// Convenience: factor and solve in one call.
pub fn lu_solve(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    Ok(LuFactor::new(a)?.solve(b))
}
