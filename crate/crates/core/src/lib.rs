//! Composable solvers for square nonlinear systems `f(u, θ) = 0`.

pub mod autodiff;
mod deadline;
mod driver;
mod error;
pub mod linalg;
mod problem;
pub mod sparsity;

pub use autodiff::Scalar;
pub use deadline::Deadline;
pub use driver::{check_convergence, RetCode, SolveOptions, SolveResult, StageRecord, Stats};
pub use error::{Error, Result};
pub use problem::{FnResidual, JacobianFn, Problem, Residual, ResidualFn};
pub mod descent;
pub mod globalize;
pub mod problems;
pub mod quasinewton;
pub mod sensitivity;
pub mod solvers;

pub use problems::{list_problems, lookup, ProblemDescriptor};
pub use sensitivity::{ift_adjoint, ift_forward};
pub use solvers::{assemble, solve, solve_default, solve_with, AlgorithmSpec};
