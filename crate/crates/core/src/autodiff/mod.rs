//! Forward-mode differentiation: dual numbers, Taylor jets and finite
//! differences.

mod dual;
mod jet;
mod scalar;

pub use dual::Dual;
pub use jet::Jet;
pub use scalar::Scalar;

use crate::linalg::{norm_inf, Matrix};
use crate::problem::Residual;
use crate::{Error, Result};

/// Seed width of dual sweeps; wider Jacobians are filled in chunks.
pub const CHUNK: usize = 8;

/// How derivatives are computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiffMode {
    DualForward,
    /// `h = None` selects `√ε·max(1, ‖u‖∞)/‖v‖∞`.
    FiniteDiffForward {
        h: Option<f64>,
    },
    /// `h = None` selects `∛ε·max(1, ‖u‖∞)/‖v‖∞`.
    FiniteDiffCentral {
        h: Option<f64>,
    },
}

impl DiffMode {
    pub const FORWARD_FD: DiffMode = DiffMode::FiniteDiffForward { h: None };
    pub const CENTRAL_FD: DiffMode = DiffMode::FiniteDiffCentral { h: None };

    fn validate(&self) -> Result<()> {
        match self {
            DiffMode::FiniteDiffForward { h: Some(h) }
            | DiffMode::FiniteDiffCentral { h: Some(h) }
                if !(*h > 0.0) =>
            {
                Err(Error::InvalidArgument(format!(
                    "finite-difference step must be > 0, got {h}"
                )))
            }
            _ => Ok(()),
        }
    }

    fn step(&self, u: &[f64], v: &[f64]) -> f64 {
        let vn = norm_inf(v).max(f64::MIN_POSITIVE);
        let un = norm_inf(u).max(1.0);
        match *self {
            DiffMode::FiniteDiffForward { h: Some(h) }
            | DiffMode::FiniteDiffCentral { h: Some(h) } => h,
            DiffMode::FiniteDiffCentral { h: None } => f64::EPSILON.cbrt() * un / vn,
            _ => f64::EPSILON.sqrt() * un / vn,
        }
    }
}

fn finite(v: Vec<f64>, what: &'static str) -> Result<Vec<f64>> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(v)
    } else {
        Err(Error::NonFinite(what))
    }
}

fn eval(f: &dyn Residual, u: &[f64], p: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; u.len()];
    f.eval_f64(u, p, &mut out);
    out
}

/// Jacobian-vector product `∂f/∂u · v` at `(u, θ)`.
pub fn jvp(f: &dyn Residual, u: &[f64], p: &[f64], v: &[f64], mode: DiffMode) -> Result<Vec<f64>> {
    mode.validate()?;
    if v.len() != u.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            found: v.len(),
        });
    }
    if !v.iter().all(|x| x.is_finite()) {
        return Err(Error::NonFinite("jvp direction"));
    }
    let out = match mode {
        DiffMode::DualForward => {
            let ud: Vec<Dual<1>> = u.iter().zip(v).map(|(&x, &d)| Dual::new(x, [d])).collect();
            let pd: Vec<Dual<1>> = p.iter().map(|&x| Dual::constant(x)).collect();
            let mut out = vec![Dual::constant(0.0); u.len()];
            f.eval_dual1(&ud, &pd, &mut out)?;
            out.iter().map(|d| d.partials[0]).collect()
        }
        DiffMode::FiniteDiffForward { .. } => {
            let h = mode.step(u, v);
            let f0 = eval(f, u, p);
            let up: Vec<f64> = u.iter().zip(v).map(|(x, d)| x + h * d).collect();
            let f1 = eval(f, &up, p);
            f1.iter().zip(&f0).map(|(a, b)| (a - b) / h).collect()
        }
        DiffMode::FiniteDiffCentral { .. } => {
            let h = mode.step(u, v);
            let up: Vec<f64> = u.iter().zip(v).map(|(x, d)| x + h * d).collect();
            let um: Vec<f64> = u.iter().zip(v).map(|(x, d)| x - h * d).collect();
            let (fp, fm) = (eval(f, &up, p), eval(f, &um, p));
            fp.iter()
                .zip(&fm)
                .map(|(a, b)| (a - b) / (2.0 * h))
                .collect()
        }
    };
    finite(out, "jvp")
}

/// Dense `∂f/∂u`; dual mode seeds `CHUNK` columns per sweep.
pub fn dense_jacobian(f: &dyn Residual, u: &[f64], p: &[f64], mode: DiffMode) -> Result<Matrix> {
    mode.validate()?;
    let n = u.len();
    if n == 0 {
        return Err(Error::InvalidArgument("empty state".into()));
    }
    let mut jac = Matrix::zeros(n, n);
    match mode {
        DiffMode::DualForward => {
            let pd: Vec<Dual<CHUNK>> = p.iter().map(|&x| Dual::constant(x)).collect();
            let mut ud: Vec<Dual<CHUNK>> = u.iter().map(|&x| Dual::constant(x)).collect();
            let mut out = vec![Dual::constant(0.0); n];
            for start in (0..n).step_by(CHUNK) {
                let end = (start + CHUNK).min(n);
                for j in start..end {
                    ud[j] = Dual::variable(u[j], j - start);
                }
                f.eval_dual(&ud, &pd, &mut out)?;
                for j in start..end {
                    let col = jac.col_mut(j);
                    for (c, o) in col.iter_mut().zip(&out) {
                        *c = o.partials[j - start];
                    }
                    ud[j] = Dual::constant(u[j]);
                }
            }
        }
        _ => {
            let f0 = eval(f, u, p);
            let mut e = vec![0.0; n];
            for j in 0..n {
                e[j] = 1.0;
                let col = match mode {
                    DiffMode::FiniteDiffForward { .. } => {
                        let h = mode.step(u, &e);
                        let mut up = u.to_vec();
                        up[j] += h;
                        let f1 = eval(f, &up, p);
                        f1.iter()
                            .zip(&f0)
                            .map(|(a, b)| (a - b) / h)
                            .collect::<Vec<_>>()
                    }
                    _ => jvp(f, u, p, &e, mode)?,
                };
                jac.col_mut(j).copy_from_slice(&col);
                e[j] = 0.0;
            }
        }
    }
    if !jac.is_finite() {
        return Err(Error::NonFinite("Jacobian"));
    }
    Ok(jac)
}

/// `d²/dε² f(u + ε·a)` at `ε = 0`: exact via Taylor jets when the residual
/// supports dual evaluation, central differences otherwise.
pub fn second_directional(f: &dyn Residual, u: &[f64], p: &[f64], a: &[f64]) -> Result<Vec<f64>> {
    if a.len() != u.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            found: a.len(),
        });
    }
    if !f.supports_dual() {
        return second_directional_fd(f, u, p, a);
    }
    let uj: Vec<Jet> = u
        .iter()
        .zip(a)
        .map(|(&x, &d)| Jet::new(x, d, 0.0))
        .collect();
    let pj: Vec<Jet> = p.iter().map(|&x| Jet::constant(x)).collect();
    let mut out = vec![Jet::constant(0.0); u.len()];
    f.eval_jet(&uj, &pj, &mut out)?;
    finite(
        out.iter().map(|j| j.d2).collect(),
        "second directional derivative",
    )
}

/// Central second difference with `h = ε^{1/4}·max(1, ‖u‖∞)/‖a‖∞`.
pub fn second_directional_fd(
    f: &dyn Residual,
    u: &[f64],
    p: &[f64],
    a: &[f64],
) -> Result<Vec<f64>> {
    let an = norm_inf(a);
    if an == 0.0 {
        return Ok(vec![0.0; u.len()]);
    }
    let h = f64::EPSILON.powf(0.25) * norm_inf(u).max(1.0) / an;
    let up: Vec<f64> = u.iter().zip(a).map(|(x, d)| x + h * d).collect();
    let um: Vec<f64> = u.iter().zip(a).map(|(x, d)| x - h * d).collect();
    let (fp, f0, fm) = (eval(f, &up, p), eval(f, u, p), eval(f, &um, p));
    let out = fp
        .iter()
        .zip(&f0)
        .zip(&fm)
        .map(|((a, b), c)| (a - 2.0 * b + c) / (h * h))
        .collect();
    finite(out, "second directional derivative")
}

/// Parameter Jacobian `∂f/∂θ` (n×p).
pub fn param_jacobian(f: &dyn Residual, u: &[f64], p: &[f64], mode: DiffMode) -> Result<Matrix> {
    mode.validate()?;
    let n = u.len();
    let np = p.len();
    let mut jac = Matrix::zeros(n, np);
    match mode {
        DiffMode::DualForward => {
            let ud: Vec<Dual<CHUNK>> = u.iter().map(|&x| Dual::constant(x)).collect();
            let mut pd: Vec<Dual<CHUNK>> = p.iter().map(|&x| Dual::constant(x)).collect();
            let mut out = vec![Dual::constant(0.0); n];
            for start in (0..np).step_by(CHUNK) {
                let end = (start + CHUNK).min(np);
                for j in start..end {
                    pd[j] = Dual::variable(p[j], j - start);
                }
                f.eval_dual(&ud, &pd, &mut out)?;
                for j in start..end {
                    for (c, o) in jac.col_mut(j).iter_mut().zip(&out) {
                        *c = o.partials[j - start];
                    }
                    pd[j] = Dual::constant(p[j]);
                }
            }
        }
        _ => {
            let f0 = eval(f, u, p);
            let mut e = vec![0.0; np];
            for j in 0..np {
                e[j] = 1.0;
                let h = mode.step(p, &e);
                let mut pp = p.to_vec();
                pp[j] += h;
                let col: Vec<f64> = if matches!(mode, DiffMode::FiniteDiffCentral { .. }) {
                    let mut pm = p.to_vec();
                    pm[j] -= h;
                    let (fp, fm) = (eval(f, u, &pp), eval(f, u, &pm));
                    fp.iter()
                        .zip(&fm)
                        .map(|(a, b)| (a - b) / (2.0 * h))
                        .collect()
                } else {
                    let fp = eval(f, u, &pp);
                    fp.iter().zip(&f0).map(|(a, b)| (a - b) / h).collect()
                };
                jac.col_mut(j).copy_from_slice(&col);
                e[j] = 0.0;
            }
        }
    }
    if !jac.is_finite() {
        return Err(Error::NonFinite("parameter Jacobian"));
    }
    Ok(jac)
}
