//! Dense factorizations, GMRES, ILU(0) and the default solver policy.

mod cholesky;
mod dense;
mod gmres;
mod ilu;
mod lu;
mod operator;
mod qr;
mod select;
mod svd;

pub use cholesky::{cholesky_solve, CholeskyFactor};
pub use dense::{add, all_finite, axpy, dot, norm2, norm_inf, scaled, sub, Matrix};
pub use gmres::{gmres, GmresOutcome};
pub use ilu::{ilu0, Ilu0};
pub use lu::{lu_solve, LuFactor};
pub use operator::{is_linear, FnOperator, LinearOperator, OperatorTraits, Preconditioner};
pub use qr::{qr_solve, QrFactor};
pub use select::{
    default_krylov_dim, extreme_condition, select_linear_solver, LinearSolverChoice, PrecondChoice,
    SelectionTraits, DEFAULT_KRYLOV_DIM, DEFAULT_KRYLOV_RELTOL, ILL_CONDITIONED,
};
pub use svd::{svd_solve, Svd};

use crate::{Deadline, Result};

/// A factorized dense matrix ready for repeated solves.
#[derive(Debug, Clone)]
pub enum DenseFactor {
    Lu(LuFactor),
    Qr(QrFactor),
    Cholesky(CholeskyFactor),
    Svd { svd: Svd, rcond: f64 },
}

/// Default truncation for SVD solves inside Newton iterations.
pub fn default_rcond(n: usize) -> f64 {
    f64::EPSILON * n.max(1) as f64
}

impl DenseFactor {
    /// Factorizes `a` according to `choice`. Krylov choices are not dense
    /// factorizations and fall back to `Auto`.
    pub fn new(a: &Matrix, choice: LinearSolverChoice, deadline: Deadline) -> Result<Self> {
        match choice {
            LinearSolverChoice::Lu => Ok(Self::Lu(LuFactor::with_deadline(a.clone(), deadline)?)),
            LinearSolverChoice::Qr => Ok(Self::Qr(QrFactor::new(a)?)),
            LinearSolverChoice::Cholesky => Ok(Self::Cholesky(CholeskyFactor::new(a)?)),
            LinearSolverChoice::Svd => Ok(Self::Svd {
                svd: Svd::new(a),
                rcond: default_rcond(a.ncols()),
            }),
            LinearSolverChoice::Auto | LinearSolverChoice::Gmres { .. } => Self::auto(a, deadline),
        }
    }

    /// LU first; the LU condition estimate escalates to QR or SVD.
    /// A singular LU also falls back to SVD.
    pub fn auto(a: &Matrix, deadline: Deadline) -> Result<Self> {
        match LuFactor::with_deadline(a.clone(), deadline) {
            Ok(lu) => {
                let traits = SelectionTraits {
                    cond_estimate: Some(lu.cond_estimate()),
                    ..SelectionTraits::dense(a.nrows())
                };
                match select_linear_solver(&traits) {
                    LinearSolverChoice::Svd => Self::new(a, LinearSolverChoice::Svd, deadline),
                    LinearSolverChoice::Qr => QrFactor::new(a).map(Self::Qr).or(Ok(Self::Lu(lu))),
                    _ => Ok(Self::Lu(lu)),
                }
            }
            Err(crate::Error::Singular { .. }) => Self::new(a, LinearSolverChoice::Svd, deadline),
            Err(e) => Err(e),
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        match self {
            Self::Lu(f) => f.solve(b),
            Self::Qr(f) => f.solve(b),
            Self::Cholesky(f) => f.solve(b),
            Self::Svd { svd, rcond } => svd.solve(b, *rcond),
        }
    }
}
