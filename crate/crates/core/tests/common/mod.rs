#![allow(dead_code)]

use nlkit::{ResidualFn, Scalar, SolveResult};

/// `sin(u) + u²`, simple root at 0.
pub struct SinSquare;

impl ResidualFn for SinSquare {
    fn eval<T: Scalar>(&self, u: &[T], _: &[T], out: &mut [T]) {
        out[0] = u[0].sin() + u[0] * u[0];
    }
}

/// `u + 2u² + u³`, simple root at 0.
pub struct Cubic;

impl ResidualFn for Cubic {
    fn eval<T: Scalar>(&self, u: &[T], _: &[T], out: &mut [T]) {
        out[0] = u[0] + u[0] * u[0] * 2.0 + u[0] * u[0] * u[0];
    }
}

/// Least-squares slope of `ln r_{k+1}` against `ln r_k` over the last four
/// traced residuals above `abstol`.
pub fn order_fit(result: &SolveResult, abstol: f64) -> f64 {
    let trace = result.trace.as_ref().expect("trace requested");
    let pre: Vec<f64> = trace
        .iter()
        .map(|&(_, r)| r)
        .take_while(|&r| r > abstol)
        .collect();
    assert!(
        pre.len() >= 4,
        "only {} pre-convergence iterates",
        pre.len()
    );
    let last = &pre[pre.len() - 4..];
    let x: Vec<f64> = last[..3].iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = last[1..].iter().map(|v| v.ln()).collect();
    let mx = x.iter().sum::<f64>() / 3.0;
    let my = y.iter().sum::<f64>() / 3.0;
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// `uᵢ³/3 + uᵢ + 0.2·Σⱼ Aᵢⱼ·sin(uⱼ) − θᵢ·(1 + 0.1·θᵢ₊₁)`, indices mod n,
/// with `A` row-major.
pub struct Coupled {
    pub a: Vec<f64>,
}

impl Coupled {
    pub fn random(n: usize, seed: u64) -> Self {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        Self {
            a: (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        }
    }
}

impl ResidualFn for Coupled {
    fn eval<T: Scalar>(&self, u: &[T], p: &[T], out: &mut [T]) {
        let n = u.len();
        for i in 0..n {
            let mut acc = u[i] * u[i] * u[i] / 3.0 + u[i];
            for j in 0..n {
                acc = acc + u[j].sin() * (0.2 * self.a[i * n + j]);
            }
            out[i] = acc - p[i] * (p[(i + 1) % n] * 0.1 + 1.0);
        }
    }
}

/// Central difference of the re-solved root with respect to `θₖ`.
pub fn resolve_fd(problem: &nlkit::Problem, theta: &[f64], k: usize, h: f64) -> Vec<f64> {
    let spec = nlkit::solvers::presets::newton_raphson();
    let opts = nlkit::SolveOptions::default().with_abstol(1e-13);
    let mut tp = theta.to_vec();
    tp[k] += h;
    let up = nlkit::solve(&problem.clone().with_params(tp.clone()), &spec, &opts).unwrap();
    tp[k] -= 2.0 * h;
    let um = nlkit::solve(&problem.clone().with_params(tp), &spec, &opts).unwrap();
    assert!(up.is_success() && um.is_success());
    up.u_star
        .iter()
        .zip(&um.u_star)
        .map(|(a, b)| (a - b) / (2.0 * h))
        .collect()
}
