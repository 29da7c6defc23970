use serde::{Deserialize, Serialize};

/// Preconditioners available to the Krylov path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PrecondChoice {
    Ilu0,
}

/// Linear solver used for Newton-type systems.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LinearSolverChoice {
    Lu,
    Qr,
    Cholesky,
    Svd,
    /// `krylov_dim = None` means `min(n, 100)`.
    Gmres {
        krylov_dim: Option<usize>,
        precond: Option<PrecondChoice>,
    },
    Auto,
}

impl LinearSolverChoice {
    pub const fn gmres() -> Self {
        Self::Gmres {
            krylov_dim: None,
            precond: None,
        }
    }

    pub fn is_krylov(&self) -> bool {
        matches!(self, Self::Gmres { .. })
    }
}

pub const DEFAULT_KRYLOV_DIM: usize = 100;
/// Relative GMRES tolerance used for each inexact Newton step.
pub const DEFAULT_KRYLOV_RELTOL: f64 = 1e-4;

/// Condition estimates above this count as ill-conditioned.
pub const ILL_CONDITIONED: f64 = 1e6;

/// Condition estimates above `1/√ε` count as extremely ill-conditioned.
pub fn extreme_condition() -> f64 {
    1.0 / f64::EPSILON.sqrt()
}

pub fn default_krylov_dim(n: usize) -> usize {
    n.clamp(1, DEFAULT_KRYLOV_DIM)
}

/// Inputs to [`select_linear_solver`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionTraits {
    pub n: usize,
    pub is_materialized: bool,
    pub is_sparse: bool,
    pub is_symmetric: bool,
    pub is_posdef: bool,
    /// Structural density `nnz / n²`; 1 for dense storage.
    pub density: f64,
    /// 1-norm condition estimate when one is available.
    pub cond_estimate: Option<f64>,
}

impl SelectionTraits {
    pub fn dense(n: usize) -> Self {
        Self {
            n,
            is_materialized: true,
            is_sparse: false,
            is_symmetric: false,
            is_posdef: false,
            density: 1.0,
            cond_estimate: None,
        }
    }

    pub fn matrix_free(n: usize) -> Self {
        Self {
            is_materialized: false,
            ..Self::dense(n)
        }
    }
}

/// Default policy:
///
/// 1. matrix-free operators go to GMRES;
/// 2. symmetric positive definite matrices to Cholesky;
/// 3. large or very sparse matrices to GMRES with ILU(0) (no sparse direct
///    factorization is available);
/// 4. dense matrices to LU, escalating to QR when ill-conditioned and to
///    SVD when the estimate exceeds `1/√ε`.
pub fn select_linear_solver(t: &SelectionTraits) -> LinearSolverChoice {
    if !t.is_materialized {
        return LinearSolverChoice::gmres();
    }
    if t.is_symmetric && t.is_posdef {
        return LinearSolverChoice::Cholesky;
    }
    if t.is_sparse && (t.n > 10_000 || t.density < 0.01) {
        return LinearSolverChoice::Gmres {
            krylov_dim: None,
            precond: Some(PrecondChoice::Ilu0),
        };
    }
    match t.cond_estimate {
        Some(c) if !(c <= extreme_condition()) => LinearSolverChoice::Svd,
        Some(c) if c > ILL_CONDITIONED => LinearSolverChoice::Qr,
        _ => LinearSolverChoice::Lu,
    }
}
