use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::pattern::SparsityPattern;
use crate::autodiff::{Dual, CHUNK};
use crate::linalg::norm_inf;
use crate::problem::Problem;
use crate::{Error, Result};

pub const DEFAULT_DETECT_SAMPLES: usize = 3;
const MAX_RESAMPLES: usize = 3;

/// Union of the structural nonzeros of dual-mode Jacobians sampled at
/// `u0 + r·max(1, ‖u0‖∞)`, `r ~ U(-1, 1)` componentwise.
///
/// Branches that depend on the state may hide entries that no sample hits.
pub fn detect_pattern_approx(
    problem: &Problem,
    n_samples: usize,
    seed: u64,
) -> Result<SparsityPattern> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be >= 1".into()));
    }
    let f = problem.residual_fn();
    if !f.supports_dual() {
        return Err(Error::NotDifferentiable);
    }
    let n = problem.dim();
    let scale = norm_inf(&problem.u0).max(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found = vec![false; n * n];
    for _ in 0..n_samples {
        let mut attempt = 0;
        loop {
            let u: Vec<f64> = problem
                .u0
                .iter()
                .map(|&x| x + scale * rng.gen_range(-1.0..1.0))
                .collect();
            match sample_structure(problem, &u, &mut found) {
                Ok(()) => break,
                Err(Error::NonFinite(_)) if attempt + 1 < MAX_RESAMPLES => attempt += 1,
                Err(e) => return Err(e),
            }
        }
    }
    let pairs = (0..n).flat_map(|j| (0..n).map(move |i| (i, j)));
    SparsityPattern::new(n, n, pairs.filter(|&(i, j)| found[i + j * n]))
}

// Marks nonzeros of J(u) in `found` only after the whole sample proved finite.
fn sample_structure(problem: &Problem, u: &[f64], found: &mut [bool]) -> Result<()> {
    let n = u.len();
    let f = problem.residual_fn();
    let pd: Vec<Dual<CHUNK>> = problem.params.iter().map(|&x| Dual::constant(x)).collect();
    let mut ud: Vec<Dual<CHUNK>> = u.iter().map(|&x| Dual::constant(x)).collect();
    let mut out = vec![Dual::constant(0.0); n];
    let mut hits = Vec::new();
    for start in (0..n).step_by(CHUNK) {
        let end = (start + CHUNK).min(n);
        for j in start..end {
            ud[j] = Dual::variable(u[j], j - start);
        }
        f.eval_dual(&ud, &pd, &mut out)?;
        for (i, o) in out.iter().enumerate() {
            for j in start..end {
                let d = o.partials[j - start];
                if !d.is_finite() {
                    return Err(Error::NonFinite("sampled Jacobian"));
                }
                if d != 0.0 {
                    hits.push(i + j * n);
                }
            }
        }
        for j in start..end {
            ud[j] = Dual::constant(u[j]);
        }
    }
    for k in hits {
        found[k] = true;
    }
    Ok(())
}
