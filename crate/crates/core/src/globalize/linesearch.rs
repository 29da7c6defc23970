use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// The merit `φ(α) = ½‖f(u + α·δu)‖₂²` along a search direction.
pub struct MeritEvaluation<'a> {
    pub phi: &'a mut dyn FnMut(f64) -> f64,
    pub phi0: f64,
    /// `φ'(0) = f(u)ᵀ·J·δu`.
    pub dphi0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BacktrackingParams {
    pub c1: f64,
    pub shrink: f64,
    pub alpha0: f64,
    pub max_backtracks: usize,
}

impl Default for BacktrackingParams {
    fn default() -> Self {
        Self {
            c1: 1e-4,
            shrink: 0.5,
            alpha0: 1.0,
            max_backtracks: 30,
        }
    }
}

impl BacktrackingParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.c1 > 0.0
            && self.c1 < 1.0
            && self.shrink > 0.0
            && self.shrink < 1.0
            && self.alpha0 > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::IncompatibleSpec(format!(
                "invalid backtracking parameters {self:?}"
            )))
        }
    }
}

/// Largest `α ∈ {α₀·ρᵏ : k ≤ max_backtracks}` satisfying the Armijo
/// condition `φ(α) ≤ φ(0) + c₁·α·φ'(0)`. Non-finite merits count as
/// failures of the condition.
pub fn backtracking_search(merit: MeritEvaluation<'_>, params: &BacktrackingParams) -> Result<f64> {
    params.validate()?;
    if !(merit.dphi0 < 0.0) {
        return Err(Error::LineSearchFailed(0));
    }
    let mut alpha = params.alpha0;
    for _ in 0..=params.max_backtracks {
        let phi = (merit.phi)(alpha);
        if phi.is_finite() && phi <= merit.phi0 + params.c1 * alpha * merit.dphi0 {
            return Ok(alpha);
        }
        alpha *= params.shrink;
    }
    Err(Error::LineSearchFailed(params.max_backtracks))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WolfeReport {
    pub armijo: bool,
    pub curvature: bool,
    pub strong: bool,
}

/// Armijo, curvature and strong-curvature predicates at step `alpha`.
pub fn wolfe_conditions(
    phi0: f64,
    dphi0: f64,
    alpha: f64,
    phi_alpha: f64,
    dphi_alpha: f64,
    c1: f64,
    c2: f64,
) -> Result<WolfeReport> {
    if !(0.0 < c1 && c1 < c2 && c2 < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < c1 < c2 < 1, got {c1}, {c2}"
        )));
    }
    Ok(WolfeReport {
        armijo: phi_alpha <= phi0 + c1 * alpha * dphi0,
        curvature: dphi_alpha >= c2 * dphi0,
        strong: dphi_alpha.abs() <= c2 * dphi0.abs(),
    })
}
