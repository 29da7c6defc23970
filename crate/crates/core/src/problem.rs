use std::fmt;
use std::sync::Arc;

use crate::autodiff::{Dual, Jet, Scalar, CHUNK};
use crate::linalg::Matrix;
use crate::sparsity::SparsityPattern;
use crate::{Error, Result};

/// A residual written once, generically over the scalar type.
///
/// Implementors get exact forward-mode derivatives through [`Residual`],
/// which is implemented for every `ResidualFn`.
///
/// ```
/// use nlkit::{ResidualFn, Scalar};
///
/// struct Quadratic;
///
/// impl ResidualFn for Quadratic {
///     fn eval<T: Scalar>(&self, u: &[T], p: &[T], out: &mut [T]) {
///         for i in 0..u.len() {
///             out[i] = u[i] * u[i] - p[i];
///         }
///     }
/// }
/// ```
pub trait ResidualFn: Send + Sync {
    fn eval<T: Scalar>(&self, u: &[T], p: &[T], out: &mut [T]);
}

/// Object-safe residual evaluable on every scalar type the solvers use.
pub trait Residual: Send + Sync {
    fn eval_f64(&self, u: &[f64], p: &[f64], out: &mut [f64]);
    fn eval_dual(
        &self,
        u: &[Dual<CHUNK>],
        p: &[Dual<CHUNK>],
        out: &mut [Dual<CHUNK>],
    ) -> Result<()>;
    fn eval_dual1(&self, u: &[Dual<1>], p: &[Dual<1>], out: &mut [Dual<1>]) -> Result<()>;
    fn eval_jet(&self, u: &[Jet], p: &[Jet], out: &mut [Jet]) -> Result<()>;

    /// Whether the dual-number entry points are available.
    fn supports_dual(&self) -> bool {
        true
    }
}

impl<R: ResidualFn> Residual for R {
    fn eval_f64(&self, u: &[f64], p: &[f64], out: &mut [f64]) {
        self.eval(u, p, out)
    }
    fn eval_dual(
        &self,
        u: &[Dual<CHUNK>],
        p: &[Dual<CHUNK>],
        out: &mut [Dual<CHUNK>],
    ) -> Result<()> {
        self.eval(u, p, out);
        Ok(())
    }
    fn eval_dual1(&self, u: &[Dual<1>], p: &[Dual<1>], out: &mut [Dual<1>]) -> Result<()> {
        self.eval(u, p, out);
        Ok(())
    }
    fn eval_jet(&self, u: &[Jet], p: &[Jet], out: &mut [Jet]) -> Result<()> {
        self.eval(u, p, out);
        Ok(())
    }
}

/// Residual given as a plain `f64` closure; only finite differences apply.
pub struct FnResidual<F>(pub F);

impl<F> Residual for FnResidual<F>
where
    F: Fn(&[f64], &[f64], &mut [f64]) + Send + Sync,
{
    fn eval_f64(&self, u: &[f64], p: &[f64], out: &mut [f64]) {
        (self.0)(u, p, out)
    }
    fn eval_dual(&self, _: &[Dual<CHUNK>], _: &[Dual<CHUNK>], _: &mut [Dual<CHUNK>]) -> Result<()> {
        Err(Error::NotDifferentiable)
    }
    fn eval_dual1(&self, _: &[Dual<1>], _: &[Dual<1>], _: &mut [Dual<1>]) -> Result<()> {
        Err(Error::NotDifferentiable)
    }
    fn eval_jet(&self, _: &[Jet], _: &[Jet], _: &mut [Jet]) -> Result<()> {
        Err(Error::NotDifferentiable)
    }
    fn supports_dual(&self) -> bool {
        false
    }
}

pub type JacobianFn = dyn Fn(&[f64], &[f64]) -> Matrix + Send + Sync;

/// A square nonlinear system `f(u, θ) = 0` with its initial guess.
#[derive(Clone)]
pub struct Problem {
    residual: Arc<dyn Residual>,
    pub u0: Vec<f64>,
    pub params: Vec<f64>,
    analytic_jacobian: Option<Arc<JacobianFn>>,
    known_pattern: Option<SparsityPattern>,
}

impl Problem {
    pub fn new(residual: impl Residual + 'static, u0: Vec<f64>, params: Vec<f64>) -> Self {
        Self::from_arc(Arc::new(residual), u0, params)
    }

    pub fn from_arc(residual: Arc<dyn Residual>, u0: Vec<f64>, params: Vec<f64>) -> Self {
        Self {
            residual,
            u0,
            params,
            analytic_jacobian: None,
            known_pattern: None,
        }
    }

    /// Problem from an `f64`-only closure (no dual-number support).
    pub fn from_fn<F>(f: F, u0: Vec<f64>, params: Vec<f64>) -> Self
    where
        F: Fn(&[f64], &[f64], &mut [f64]) + Send + Sync + 'static,
    {
        Self::new(FnResidual(f), u0, params)
    }

    pub fn with_jacobian(
        mut self,
        jac: impl Fn(&[f64], &[f64]) -> Matrix + Send + Sync + 'static,
    ) -> Self {
        self.analytic_jacobian = Some(Arc::new(jac));
        self
    }

    pub fn with_pattern(mut self, pattern: SparsityPattern) -> Self {
        self.known_pattern = Some(pattern);
        self
    }

    pub fn with_u0(mut self, u0: Vec<f64>) -> Self {
        self.u0 = u0;
        self
    }

    pub fn with_params(mut self, params: Vec<f64>) -> Self {
        self.params = params;
        self
    }

    pub fn dim(&self) -> usize {
        self.u0.len()
    }

    pub fn residual_fn(&self) -> &dyn Residual {
        &*self.residual
    }

    pub fn analytic_jacobian(&self) -> Option<&JacobianFn> {
        self.analytic_jacobian.as_deref()
    }

    pub fn known_pattern(&self) -> Option<&SparsityPattern> {
        self.known_pattern.as_ref()
    }

    /// `f(u, θ)` with the stored parameters.
    pub fn eval(&self, u: &[f64]) -> Vec<f64> {
        self.eval_with(u, &self.params)
    }

    pub fn eval_with(&self, u: &[f64], params: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; u.len()];
        self.residual.eval_f64(u, params, &mut out);
        out
    }

    /// Evaluates twice at `u` and compares bit patterns.
    pub fn check_purity(&self, u: &[f64]) -> bool {
        let a = self.eval(u);
        let b = self.eval(u);
        a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits())
    }
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("n", &self.dim())
            .field("u0", &self.u0)
            .field("params", &self.params)
            .field("analytic_jacobian", &self.analytic_jacobian.is_some())
            .field(
                "known_pattern",
                &self.known_pattern.as_ref().map(|p| p.nnz()),
            )
            .finish()
    }
}
