use crate::sparsity::SparsityPattern;
use crate::{ResidualFn, Scalar};

/// Steady 2D Brusselator on an `N×N` periodic grid.
///
/// State layout: `u` at `i + N·j`, `v` offset by `N²`. The forcing amplitude
/// is the single parameter.
pub struct Brusselator2d {
    pub n: usize,
    alpha: f64,
    forced: Vec<bool>,
}

impl Brusselator2d {
    pub fn new(n: usize) -> Self {
        assert!(n >= 3, "grid needs at least 3 points per side");
        let xs = grid(n);
        let mut forced = vec![false; n * n];
        for j in 0..n {
            for i in 0..n {
                let (x, y) = (xs[i], xs[j]);
                forced[i + n * j] = (x - 0.3).powi(2) + (y - 0.6).powi(2) <= 0.01;
            }
        }
        Self {
            n,
            alpha: 10.0 * ((n - 1) as f64).powi(2),
            forced,
        }
    }

    pub fn initial_state(&self) -> Vec<f64> {
        let n = self.n;
        let xs = grid(n);
        let mut s = vec![0.0; 2 * n * n];
        for j in 0..n {
            for i in 0..n {
                let (x, y) = (xs[i], xs[j]);
                s[i + n * j] = 22.0 * (y * (1.0 - y)).powf(1.5);
                s[n * n + i + n * j] = 27.0 * (x * (1.0 - x)).powf(1.5);
            }
        }
        s
    }

    /// Block 5-point stencil plus the local u/v coupling.
    pub fn pattern(&self) -> SparsityPattern {
        let n = self.n;
        let nn = n * n;
        let mut pairs = Vec::with_capacity(12 * nn);
        for j in 0..n {
            for i in 0..n {
                let k = i + n * j;
                let nbrs = neighbours(n, i, j);
                for block in [0, nn] {
                    pairs.push((block + k, block + k));
                    for m in nbrs {
                        pairs.push((block + k, block + m));
                    }
                    pairs.push((block + k, nn - block + k));
                }
            }
        }
        SparsityPattern::new(2 * nn, 2 * nn, pairs).expect("stencil indices in range")
    }
}

fn grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

fn neighbours(n: usize, i: usize, j: usize) -> [usize; 4] {
    let ip = (i + 1) % n;
    let im = (i + n - 1) % n;
    let jp = (j + 1) % n;
    let jm = (j + n - 1) % n;
    [im + n * j, ip + n * j, i + n * jm, i + n * jp]
}

impl ResidualFn for Brusselator2d {
    fn eval<T: Scalar>(&self, s: &[T], p: &[T], out: &mut [T]) {
        let n = self.n;
        let nn = n * n;
        let (u, v) = s.split_at(nn);
        for j in 0..n {
            for i in 0..n {
                let k = i + n * j;
                let [a, b, c, d] = neighbours(n, i, j);
                let lap_u = u[a] + u[b] + u[c] + u[d] - u[k] * 4.0;
                let lap_v = v[a] + v[b] + v[c] + v[d] - v[k] * 4.0;
                let uuv = u[k] * u[k] * v[k];
                let mut fu = uuv - u[k] * 4.4 + lap_u * self.alpha + 1.0;
                if self.forced[k] {
                    fu += p[0];
                }
                out[k] = fu;
                out[nn + k] = u[k] * 3.4 - uuv + lap_v * self.alpha;
            }
        }
    }
}
