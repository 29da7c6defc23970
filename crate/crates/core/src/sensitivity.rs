//! Implicit-function sensitivities of a root `u*(θ)`.
//!
//! With `f(u*(θ), θ) = 0` and `J = ∂f/∂u` nonsingular,
//! `J·du*/dθ = −∂f/∂θ`.

use crate::autodiff::{dense_jacobian, param_jacobian, DiffMode};
use crate::linalg::{gmres, ilu0, norm_inf, LuFactor, Matrix};
use crate::sparsity::{color_greedy, compressed_jacobian, ColorAxis, CscMatrix};
use crate::{Error, Problem, Result};

/// Systems at least this large with a known pattern use the sparse path.
pub const SPARSE_MIN_DIM: usize = 200;

#[derive(Debug, Clone, Copy)]
pub struct IftOptions {
    /// `u_star` must satisfy `‖f‖∞ ≤ root_tol`.
    pub root_tol: f64,
    pub mode: DiffMode,
    /// Use colored Jacobians and GMRES when a pattern is known.
    pub allow_sparse: bool,
    pub gmres_reltol: f64,
}

impl Default for IftOptions {
    fn default() -> Self {
        Self {
            root_tol: 1e-7,
            mode: DiffMode::DualForward,
            allow_sparse: true,
            gmres_reltol: 1e-12,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SensitivityResult {
    /// `du*/dθ`, n×p.
    pub du_dtheta: Matrix,
    /// Largest relative residual over the p linear solves.
    pub solve_residual: f64,
}

#[derive(Debug, Clone)]
pub struct AdjointResult {
    pub grad_theta: Vec<f64>,
    pub solve_residual: f64,
}

pub fn ift_forward(problem: &Problem, u_star: &[f64], theta: &[f64]) -> Result<SensitivityResult> {
    ift_forward_with(problem, u_star, theta, &IftOptions::default())
}

pub fn ift_adjoint(
    problem: &Problem,
    u_star: &[f64],
    theta: &[f64],
    gbar: &[f64],
) -> Result<AdjointResult> {
    ift_adjoint_with(problem, u_star, theta, gbar, &IftOptions::default())
}

enum Factored {
    Dense(Matrix, LuFactor),
    Sparse(CscMatrix),
}

fn rel_residual(apply: impl Fn(&[f64]) -> Vec<f64>, x: &[f64], b: &[f64]) -> f64 {
    let ax = apply(x);
    let r: Vec<f64> = ax.iter().zip(b).map(|(a, b)| a - b).collect();
    norm_inf(&r) / norm_inf(b).max(f64::MIN_POSITIVE)
}

impl Factored {
    fn new(problem: &Problem, u: &[f64], theta: &[f64], opts: &IftOptions) -> Result<Self> {
        let f = problem.residual_fn();
        let mode = if f.supports_dual() {
            opts.mode
        } else {
            DiffMode::CENTRAL_FD
        };
        if let Some(jac) = problem.analytic_jacobian() {
            let j = jac(u, theta);
            let lu = LuFactor::new(&j)?;
            return Ok(Self::Dense(j, lu));
        }
        if let (true, Some(pattern)) = (
            opts.allow_sparse && u.len() >= SPARSE_MIN_DIM,
            problem.known_pattern(),
        ) {
            let coloring = color_greedy(pattern, ColorAxis::Columns);
            return Ok(Self::Sparse(compressed_jacobian(
                f, u, theta, pattern, &coloring, mode,
            )?));
        }
        let j = dense_jacobian(f, u, theta, mode)?;
        let lu = LuFactor::new(&j)?;
        Ok(Self::Dense(j, lu))
    }

    /// Solves `J·x = b` (or `Jᵀ·x = b`), returning the relative residual.
    fn solve(&self, b: &[f64], transpose: bool, reltol: f64) -> Result<(Vec<f64>, f64)> {
        if norm_inf(b) == 0.0 {
            return Ok((vec![0.0; b.len()], 0.0));
        }
        match self {
            Self::Dense(j, lu) => {
                let x = if transpose {
                    lu.solve_transpose(b)
                } else {
                    lu.solve(b)
                };
                let res = if transpose {
                    rel_residual(|v| j.tr_matvec(v), &x, b)
                } else {
                    rel_residual(|v| j.matvec(v), &x, b)
                };
                Ok((x, res))
            }
            Self::Sparse(j) => {
                let a = if transpose { j.transpose() } else { j.clone() };
                let n = a.n_rows();
                let pre = ilu0(&a).ok();
                let out = gmres(
                    &a,
                    b,
                    n.min(200),
                    pre.as_ref()
                        .map(|p| p as &dyn crate::linalg::Preconditioner),
                    reltol,
                )?;
                let res = rel_residual(|v| a.matvec(v), &out.x, b);
                if res <= 1e-8 {
                    return Ok((out.x, res));
                }
                // stagnated Krylov: fall back to a dense factorization
                let d = a.to_dense();
                let lu = LuFactor::new(&d)?;
                let x = lu.solve(b);
                let res = rel_residual(|v| d.matvec(v), &x, b);
                Ok((x, res))
            }
        }
    }
}

fn check_root(problem: &Problem, u: &[f64], theta: &[f64], opts: &IftOptions) -> Result<()> {
    if u.len() != problem.dim() {
        return Err(Error::DimensionMismatch {
            expected: problem.dim(),
            found: u.len(),
        });
    }
    let r = norm_inf(&problem.eval_with(u, theta));
    if !(r <= opts.root_tol) {
        return Err(Error::InvalidArgument(format!(
            "u_star is not a root: residual {r:e} exceeds {:e}",
            opts.root_tol
        )));
    }
    Ok(())
}

pub fn ift_forward_with(
    problem: &Problem,
    u_star: &[f64],
    theta: &[f64],
    opts: &IftOptions,
) -> Result<SensitivityResult> {
    check_root(problem, u_star, theta, opts)?;
    let f = problem.residual_fn();
    let mode = if f.supports_dual() {
        opts.mode
    } else {
        DiffMode::CENTRAL_FD
    };
    let jt = param_jacobian(f, u_star, theta, mode)?;
    let fac = Factored::new(problem, u_star, theta, opts)?;
    let n = u_star.len();
    let mut s = Matrix::zeros(n, theta.len());
    let mut worst = 0.0f64;
    for k in 0..theta.len() {
        let rhs: Vec<f64> = jt.col(k).iter().map(|v| -v).collect();
        let (x, res) = fac.solve(&rhs, false, opts.gmres_reltol)?;
        worst = worst.max(res);
        s.col_mut(k).copy_from_slice(&x);
    }
    if !s.is_finite() {
        return Err(Error::NonFinite("sensitivity matrix"));
    }
    Ok(SensitivityResult {
        du_dtheta: s,
        solve_residual: worst,
    })
}

/// Gradient of a scalar loss `g(u*)` with `gbar = ∂g/∂u`, using one
/// transposed solve.
pub fn ift_adjoint_with(
    problem: &Problem,
    u_star: &[f64],
    theta: &[f64],
    gbar: &[f64],
    opts: &IftOptions,
) -> Result<AdjointResult> {
    check_root(problem, u_star, theta, opts)?;
    if gbar.len() != u_star.len() {
        return Err(Error::DimensionMismatch {
            expected: u_star.len(),
            found: gbar.len(),
        });
    }
    let f = problem.residual_fn();
    let mode = if f.supports_dual() {
        opts.mode
    } else {
        DiffMode::CENTRAL_FD
    };
    let jt = param_jacobian(f, u_star, theta, mode)?;
    let fac = Factored::new(problem, u_star, theta, opts)?;
    let (lambda, res) = fac.solve(gbar, true, opts.gmres_reltol)?;
    let grad: Vec<f64> = jt.tr_matvec(&lambda).iter().map(|v| -v).collect();
    if !grad.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("adjoint gradient"));
    }
    Ok(AdjointResult {
        grad_theta: grad,
        solve_residual: res,
    })
}
