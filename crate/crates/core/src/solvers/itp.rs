use crate::{Error, Result};

/// Root and bookkeeping of a bracketed scalar solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ItpResult {
    pub root: f64,
    pub f_root: f64,
    pub iterations: usize,
    /// Final bracket.
    pub bracket: (f64, f64),
}

pub const ITP_KAPPA2: f64 = 2.0;
pub const ITP_N0: u32 = 10;

/// Interpolate-truncate-project root finding on `[a, b]` with
/// `κ₁ = 0.2/(b − a)`, `κ₂ = 2`, `n₀ = 10`.
///
/// Stops when the bracket is at most `2·abstol` wide or `|f| ≤ abstol`.
pub fn solve_bracketed_itp(
    f: impl Fn(f64) -> f64,
    bracket: (f64, f64),
    abstol: f64,
    maxiters: usize,
) -> Result<ItpResult> {
    let (mut a, mut b) = bracket;
    if !(a < b) || !(abstol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need a < b and abstol > 0, got [{a}, {b}], {abstol}"
        )));
    }
    let (mut fa, mut fb) = (f(a), f(b));
    let done = |x: f64, fx: f64, a: f64, b: f64, it: usize| ItpResult {
        root: x,
        f_root: fx,
        iterations: it,
        bracket: (a, b),
    };
    if fa == 0.0 {
        return Ok(done(a, fa, a, b, 0));
    }
    if fb == 0.0 {
        return Ok(done(b, fb, a, b, 0));
    }
    if !(fa * fb < 0.0) {
        return Err(Error::InvalidBracket { fa, fb });
    }
    let kappa1 = 0.2 / (b - a);
    let n_half = ((b - a) / (2.0 * abstol)).log2().ceil().max(0.0);
    let n_max = n_half + f64::from(ITP_N0);
    let mut j = 0usize;
    while b - a > 2.0 * abstol && j < maxiters {
        let mid = 0.5 * (a + b);
        let r = (abstol * 2f64.powf(n_max - j as f64) - 0.5 * (b - a)).max(0.0);
        let delta = kappa1 * (b - a).powf(ITP_KAPPA2);
        let x_f = (b * fa - a * fb) / (fa - fb);
        let sigma = (mid - x_f).signum();
        let x_t = if delta <= (mid - x_f).abs() {
            x_f + sigma * delta
        } else {
            mid
        };
        let x = if (x_t - mid).abs() <= r {
            x_t
        } else {
            mid - sigma * r
        };
        let fx = f(x);
        j += 1;
        if fx == 0.0 || fx.abs() <= abstol {
            return Ok(done(x, fx, a, b, j));
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
    }
    let (root, f_root) = if fa.abs() <= fb.abs() {
        (a, fa)
    } else {
        (b, fb)
    };
    Ok(done(root, f_root, a, b, j))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_root() {
        let r = solve_bracketed_itp(|x| x, (-1.0, 2.0), 1e-10, 200).unwrap();
        assert!(r.root.abs() <= 1e-10);
    }

    #[test]
    fn rejects_same_sign() {
        assert!(matches!(
            solve_bracketed_itp(|x| x * x + 1.0, (-1.0, 1.0), 1e-8, 100),
            Err(Error::InvalidBracket { .. })
        ));
    }
}
