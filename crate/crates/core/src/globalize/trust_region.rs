use serde::{Deserialize, Serialize};

use crate::linalg::{dot, norm_inf, LinearOperator};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RadiusScheme {
    Simple,
    /// Expands only when the step reaches the boundary.
    NocedalWright,
}

/// Trust-region constants; `delta0 = None` means `max(1, ‖u₀‖∞)` and
/// `delta_max = None` means `1e3·Δ₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrustConfig {
    pub scheme: RadiusScheme,
    pub delta0: Option<f64>,
    pub delta_max: Option<f64>,
    pub eta1: f64,
    pub eta2: f64,
    pub shrink: f64,
    pub expand: f64,
    /// Bound `‖D·δ‖` with `D` the running maximum of Jacobian column norms.
    pub scaled: bool,
}

impl Default for TrustConfig {
    fn default() -> Self {
        Self::new(RadiusScheme::Simple)
    }
}

impl TrustConfig {
    pub fn new(scheme: RadiusScheme) -> Self {
        Self {
            scheme,
            delta0: None,
            delta_max: None,
            eta1: 0.1,
            eta2: 0.75,
            shrink: 0.25,
            expand: 2.0,
            scaled: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = 0.0 < self.eta1
            && self.eta1 < self.eta2
            && self.eta2 < 1.0
            && 0.0 < self.shrink
            && self.shrink < 1.0
            && self.expand > 1.0
            && self.delta0.map_or(true, |d| d > 0.0)
            && self.delta_max.map_or(true, |d| d > 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::IncompatibleSpec(format!(
                "invalid trust-region constants {self:?}"
            )))
        }
    }

    /// `scaled` toggles the ellipsoidal region.
    pub fn with_scaling(mut self, scaled: bool) -> Self {
        self.scaled = scaled;
        self
    }

    pub fn initial_state(&self, u0: &[f64]) -> TrustState {
        let delta0 = self.delta0.unwrap_or_else(|| norm_inf(u0).max(1.0));
        let delta_max = self.delta_max.unwrap_or(1e3 * delta0).max(delta0);
        TrustState {
            delta: delta0,
            delta_max,
            config: *self,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrustState {
    pub delta: f64,
    pub delta_max: f64,
    pub config: TrustConfig,
}

/// Actual over predicted reduction of `‖f‖₂²`. A predicted reduction below
/// `ε·‖f_u‖²` yields `-∞` so the step is rejected.
pub fn tr_ratio(f_u: &[f64], f_trial: &[f64], j: &dyn LinearOperator, du: &[f64]) -> f64 {
    let mut model = vec![0.0; f_u.len()];
    j.apply(du, &mut model);
    for (m, f) in model.iter_mut().zip(f_u) {
        *m += f;
    }
    ratio_from_parts(f_u, f_trial, &model)
}

pub(crate) fn ratio_from_parts(f_u: &[f64], f_trial: &[f64], model: &[f64]) -> f64 {
    let f2 = dot(f_u, f_u);
    let predicted = f2 - dot(model, model);
    if !(predicted >= f64::EPSILON * f2) || predicted == 0.0 {
        return f64::NEG_INFINITY;
    }
    let actual = f2 - dot(f_trial, f_trial);
    if actual.is_nan() {
        return f64::NEG_INFINITY;
    }
    actual / predicted
}

/// Accept/reject decision and radius update; `step_norm` is `‖δu‖₂`.
pub fn tr_update(state: &TrustState, rho: f64, step_norm: f64) -> (TrustState, bool) {
    let c = &state.config;
    let mut next = *state;
    if rho >= c.eta2 {
        let binds = step_norm >= 0.99 * state.delta;
        if c.scheme == RadiusScheme::Simple || binds {
            next.delta = (c.expand * state.delta).min(state.delta_max);
        }
        (next, true)
    } else if rho >= c.eta1 {
        (next, true)
    } else {
        next.delta = c.shrink * state.delta;
        (next, false)
    }
}
