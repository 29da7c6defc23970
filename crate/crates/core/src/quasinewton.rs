//! Jacobian approximations updated from secant information.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::linalg::{dot, norm2, norm_inf, LuFactor, Matrix};
use crate::Result;

pub const DEFAULT_MEMORY: usize = 10;
const UPDATE_GUARD: f64 = 1e-12;
const KLEMENT_STALL: f64 = 1e-9;
const DIAGONAL_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QnForm {
    /// Dense good-Broyden inverse.
    DenseInverse,
    /// Identity-seeded good-Broyden inverse kept as at most `memory` rank-one
    /// terms.
    LowRank { memory: usize },
    /// Klement-style diagonal Jacobian.
    Diagonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InitRule {
    Identity,
    TrueJacobian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ReinitRule {
    NotDescentDirection,
    Stalling { window: usize, tol: f64 },
}

impl ReinitRule {
    pub fn stalling() -> Self {
        ReinitRule::Stalling {
            window: 3,
            tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuasiNewtonConfig {
    pub form: QnForm,
    pub init: InitRule,
    pub reinit: ReinitRule,
}

impl QuasiNewtonConfig {
    pub fn broyden(init: InitRule) -> Self {
        Self {
            form: QnForm::DenseInverse,
            init,
            reinit: ReinitRule::NotDescentDirection,
        }
    }

    pub fn limited_memory_broyden(memory: usize) -> Self {
        Self {
            form: QnForm::LowRank { memory },
            init: InitRule::Identity,
            reinit: ReinitRule::NotDescentDirection,
        }
    }

    pub fn klement() -> Self {
        Self {
            form: QnForm::Diagonal,
            init: InitRule::Identity,
            reinit: ReinitRule::stalling(),
        }
    }
}

/// The approximation itself. `DenseInverse` and `LowRank` approximate
/// `J⁻¹`; `Diagonal` approximates `J`.
#[derive(Debug, Clone, PartialEq)]
pub enum QnApprox {
    DenseInverse(Matrix),
    LowRank {
        /// `H = I + Σ aᵢ·bᵢᵀ`, oldest first.
        pairs: VecDeque<(Vec<f64>, Vec<f64>)>,
        memory: usize,
    },
    Diagonal(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuasiNewtonState {
    pub approx: QnApprox,
    pub config: QuasiNewtonConfig,
    pub steps_since_reinit: usize,
    /// Set when a `TrueJacobian` init fell back to the identity.
    pub init_fell_back: bool,
}

impl QuasiNewtonState {
    /// `−H·f` (inverse forms) or `−f ⊘ d` (diagonal).
    pub fn direction(&self, f_u: &[f64]) -> Vec<f64> {
        let hv = match &self.approx {
            QnApprox::Diagonal(d) => f_u.iter().zip(d).map(|(f, d)| f / d).collect(),
            _ => self.apply_inverse(f_u),
        };
        hv.into_iter().map(|x| -x).collect()
    }

    /// `H·v` for the inverse forms; `v ⊘ d` for the diagonal form.
    pub fn apply_inverse(&self, v: &[f64]) -> Vec<f64> {
        match &self.approx {
            QnApprox::DenseInverse(h) => h.matvec(v),
            QnApprox::LowRank { pairs, .. } => lbroyden_apply(pairs, v),
            QnApprox::Diagonal(d) => v.iter().zip(d).map(|(x, d)| x / d).collect(),
        }
    }

    /// Secant update from step `s` and residual change `t`.
    pub fn update(&mut self, s: &[f64], t: &[f64]) {
        match &mut self.approx {
            QnApprox::DenseInverse(h) => broyden_update(h, s, t),
            QnApprox::LowRank { pairs, memory } => lbroyden_update(pairs, *memory, s, t),
            QnApprox::Diagonal(d) => klement_update(d, s, t),
        }
        self.steps_since_reinit += 1;
    }
}

/// Builds the initial approximation. `jacobian` is consulted only for the
/// `TrueJacobian` rule; a singular Jacobian falls back to the identity.
pub fn qn_init(
    n: usize,
    config: QuasiNewtonConfig,
    jacobian: Option<&Matrix>,
) -> Result<QuasiNewtonState> {
    let identity = |form: QnForm| match form {
        QnForm::DenseInverse => QnApprox::DenseInverse(Matrix::identity(n)),
        QnForm::LowRank { memory } => QnApprox::LowRank {
            pairs: VecDeque::with_capacity(memory),
            memory: memory.max(1),
        },
        QnForm::Diagonal => QnApprox::Diagonal(vec![1.0; n]),
    };
    let mut fell_back = false;
    let approx = match (config.init, jacobian, config.form) {
        (InitRule::TrueJacobian, Some(j), QnForm::DenseInverse) => match LuFactor::new(j) {
            Ok(lu) => {
                let mut h = Matrix::zeros(n, n);
                let mut e = vec![0.0; n];
                for k in 0..n {
                    e[k] = 1.0;
                    h.col_mut(k).copy_from_slice(&lu.solve(&e));
                    e[k] = 0.0;
                }
                if h.is_finite() {
                    QnApprox::DenseInverse(h)
                } else {
                    fell_back = true;
                    identity(config.form)
                }
            }
            Err(_) => {
                fell_back = true;
                identity(config.form)
            }
        },
        (InitRule::TrueJacobian, Some(j), QnForm::Diagonal) => {
            QnApprox::Diagonal(j.diagonal().into_iter().map(floor_keep_sign).collect())
        }
        (InitRule::TrueJacobian, _, form) => {
            fell_back = true;
            identity(form)
        }
        (InitRule::Identity, _, form) => identity(form),
    };
    Ok(QuasiNewtonState {
        approx,
        config,
        steps_since_reinit: 0,
        init_fell_back: fell_back,
    })
}

/// Good-Broyden inverse update `H += (s − H·t)(sᵀH)/(sᵀH·t)`, skipped when
/// `|sᵀH·t| < 1e-12·‖s‖·‖H·t‖`.
pub fn broyden_update(h: &mut Matrix, s: &[f64], t: &[f64]) {
    let ht = h.matvec(t);
    let sh = h.tr_matvec(s);
    let denom = dot(s, &ht);
    if !(denom.abs() >= UPDATE_GUARD * norm2(s) * norm2(&ht)) || denom == 0.0 {
        return;
    }
    let a: Vec<f64> = s.iter().zip(&ht).map(|(s, ht)| (s - ht) / denom).collect();
    let n = h.nrows();
    for j in 0..n {
        let bj = sh[j];
        if bj != 0.0 {
            for (hij, ai) in h.col_mut(j).iter_mut().zip(&a) {
                *hij += ai * bj;
            }
        }
    }
}

pub fn lbroyden_apply(pairs: &VecDeque<(Vec<f64>, Vec<f64>)>, v: &[f64]) -> Vec<f64> {
    let mut out = v.to_vec();
    for (a, b) in pairs {
        let c = dot(b, v);
        for (o, ai) in out.iter_mut().zip(a) {
            *o += c * ai;
        }
    }
    out
}

fn lbroyden_apply_transpose(pairs: &VecDeque<(Vec<f64>, Vec<f64>)>, v: &[f64]) -> Vec<f64> {
    let mut out = v.to_vec();
    for (a, b) in pairs {
        let c = dot(a, v);
        for (o, bi) in out.iter_mut().zip(b) {
            *o += c * bi;
        }
    }
    out
}

/// Appends the rank-one term of the good-Broyden inverse update, evicting
/// the oldest term first when the history is full.
pub fn lbroyden_update(
    pairs: &mut VecDeque<(Vec<f64>, Vec<f64>)>,
    memory: usize,
    s: &[f64],
    t: &[f64],
) {
    let memory = memory.max(1);
    let mut trial = pairs.clone();
    while trial.len() >= memory {
        trial.pop_front();
    }
    let ht = lbroyden_apply(&trial, t);
    let denom = dot(s, &ht);
    if !(denom.abs() >= UPDATE_GUARD * norm2(s) * norm2(&ht)) || denom == 0.0 {
        return;
    }
    let a = s.iter().zip(&ht).map(|(s, ht)| (s - ht) / denom).collect();
    let b = lbroyden_apply_transpose(&trial, s);
    trial.push_back((a, b));
    *pairs = trial;
}

fn floor_keep_sign(d: f64) -> f64 {
    if d.abs() >= DIAGONAL_FLOOR {
        d
    } else if d < 0.0 {
        -DIAGONAL_FLOOR
    } else {
        DIAGONAL_FLOOR
    }
}

/// `dᵢ = tᵢ/sᵢ` on coordinates with `|sᵢ| > 1e-9·‖s‖∞`, floored at `1e-12`
/// in magnitude.
pub fn klement_update(d: &mut [f64], s: &[f64], t: &[f64]) {
    let smax = norm_inf(s);
    for ((di, &si), &ti) in d.iter_mut().zip(s).zip(t) {
        if si.abs() > KLEMENT_STALL * smax {
            let q = ti / si;
            if q.is_finite() {
                *di = floor_keep_sign(q);
            }
        }
    }
}

/// Tracks residual norms and decides when to reset the approximation.
#[derive(Debug, Clone, Default)]
pub struct ReinitMonitor {
    history: Vec<f64>,
}

impl ReinitMonitor {
    pub fn reset(&mut self) {
        self.history.clear();
    }

    /// Records `‖f(u_next)‖₂` and applies `rule`. `merit_before` and
    /// `merit_after` are `‖f‖₂` at the start and end of the step.
    pub fn check(
        &mut self,
        rule: ReinitRule,
        du: &[f64],
        u: &[f64],
        merit_before: f64,
        merit_after: f64,
    ) -> bool {
        self.history.push(merit_after);
        reinit_check(rule, du, u, merit_before, &self.history)
    }
}

/// Best norm over the last `window` entries failed to improve on the best
/// before them by a relative `tol`.
fn stalled(history: &[f64], start: f64, window: usize, tol: f64) -> bool {
    let window = window.max(1);
    if history.len() < window {
        return false;
    }
    let split = history.len() - window;
    let best_before = history[..split].iter().copied().fold(start, f64::min);
    let best_recent = history[split..]
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    !(best_recent < best_before * (1.0 - tol))
}

/// `reinit_check` in functional form over a recorded norm history.
pub fn reinit_check(
    rule: ReinitRule,
    du: &[f64],
    u: &[f64],
    merit_before: f64,
    history: &[f64],
) -> bool {
    let after = history.last().copied().unwrap_or(merit_before);
    match rule {
        ReinitRule::NotDescentDirection => {
            !(after < merit_before) || norm_inf(du) < f64::EPSILON * norm_inf(u)
        }
        ReinitRule::Stalling { window, tol } => stalled(history, merit_before, window, tol),
    }
}
