use super::dense::{dot, Matrix};

/// Thin SVD `A = U·diag(σ)·Vᵀ` by one-sided (Hestenes) Jacobi rotations.
#[derive(Debug, Clone)]
pub struct Svd {
    u: Matrix,
    sigma: Vec<f64>,
    v: Matrix,
}

const MAX_SWEEPS: usize = 60;

impl Svd {
    pub fn new(a: &Matrix) -> Self {
        if a.nrows() >= a.ncols() {
            let (u, sigma, v) = jacobi(a.clone());
            Self { u, sigma, v }
        } else {
            // Aᵀ = U'ΣV'ᵀ  ⇒  A = V'ΣU'ᵀ
            let (u, sigma, v) = jacobi(a.transpose());
            Self { u: v, sigma, v: u }
        }
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.sigma
    }

    /// Minimum-norm least-squares solution, truncating `σ < rcond·σ_max`.
    pub fn solve(&self, b: &[f64], rcond: f64) -> Vec<f64> {
        let smax = self.sigma.iter().fold(0.0f64, |m, s| m.max(*s));
        let cutoff = rcond * smax;
        let mut x = vec![0.0; self.v.nrows()];
        for (j, &s) in self.sigma.iter().enumerate() {
            if s <= cutoff || s == 0.0 {
                continue;
            }
            let c = dot(self.u.col(j), b) / s;
            for (xi, vij) in x.iter_mut().zip(self.v.col(j)) {
                *xi += c * vij;
            }
        }
        x
    }
}

/// Returns `(U, σ, V)` for `m ≥ n`.
fn jacobi(mut w: Matrix) -> (Matrix, Vec<f64>, Matrix) {
    let n = w.ncols();
    let m = w.nrows();
    let mut v = Matrix::identity(n);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(w.col(p), w.col(p));
                let beta = dot(w.col(q), w.col(q));
                let gamma = dot(w.col(p), w.col(q));
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, p, q, c, s, m);
                rotate(&mut v, p, q, c, s, n);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sigma = vec![0.0; n];
    for j in 0..n {
        let s = dot(w.col(j), w.col(j)).sqrt();
        sigma[j] = s;
        if s > 0.0 {
            for x in w.col_mut(j) {
                *x /= s;
            }
        }
    }
    (w, sigma, v)
}

fn rotate(a: &mut Matrix, p: usize, q: usize, c: f64, s: f64, rows: usize) {
    for i in 0..rows {
        let ap = a[(i, p)];
        let aq = a[(i, q)];
        a[(i, p)] = c * ap - s * aq;
        a[(i, q)] = s * ap + c * aq;
    }
}

pub fn svd_solve(a: &Matrix, b: &[f64], rcond: f64) -> Vec<f64> {
    Svd::new(a).solve(b, rcond)
}
