//! Descent directions built on a Jacobian (or an approximation of it).

use serde::{Deserialize, Serialize};

use crate::autodiff::second_directional;
use crate::linalg::{
    dot, gmres, norm2, CholeskyFactor, DenseFactor, LinearOperator, Matrix, Preconditioner,
    QrFactor,
};
use crate::problem::Residual;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DampingParams {
    pub lambda0: f64,
    pub lambda_up: f64,
    pub lambda_down: f64,
    pub use_geodesic: bool,
    pub geo_h: f64,
    pub geo_alpha: f64,
    /// Exponent `b` of the uphill rule: a trial is kept when
    /// `(1 − cos β)^b·‖f_trial‖ ≤ ‖f‖`, `β` the angle to the previous
    /// accepted velocity. `None` demands strict decrease.
    pub uphill: Option<f64>,
}

impl Default for DampingParams {
    fn default() -> Self {
        Self {
            lambda0: 1e-3,
            lambda_up: 2.0,
            lambda_down: 3.0,
            use_geodesic: false,
            geo_h: 0.1,
            geo_alpha: 0.75,
            uphill: None,
        }
    }
}

impl DampingParams {
    pub fn geodesic() -> Self {
        Self {
            use_geodesic: true,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.lambda0 > 0.0
            && self.lambda_up > 1.0
            && self.lambda_down > 1.0
            && self.geo_h > 0.0
            && self.geo_alpha >= 0.0
            && self.uphill.map_or(true, |b| b >= 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::IncompatibleSpec(format!(
                "invalid damping parameters {self:?}"
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DescentSpec {
    Newton,
    SteepestDescent,
    Dogleg,
    DampedNewton(DampingParams),
    Halley,
    PotraPtak,
    /// Newton on `J + I/Δt` with switched evolution relaxation of `Δt`.
    PseudoTransient {
        dt0: f64,
    },
}

impl DescentSpec {
    pub fn name(&self) -> &'static str {
        match self {
            DescentSpec::Newton => "Newton",
            DescentSpec::SteepestDescent => "SteepestDescent",
            DescentSpec::Dogleg => "Dogleg",
            DescentSpec::DampedNewton(_) => "DampedNewton",
            DescentSpec::Halley => "Halley",
            DescentSpec::PotraPtak => "PotraPtak",
            DescentSpec::PseudoTransient { .. } => "PseudoTransient",
        }
    }
}

/// Solves `J·x = rhs` for the current Jacobian or its approximation.
pub trait JacobianSolve {
    fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>>;
}

impl JacobianSolve for DenseFactor {
    fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let x = DenseFactor::solve(self, rhs);
        if x.iter().all(|v| v.is_finite()) {
            Ok(x)
        } else {
            Err(Error::NonFinite("linear solve"))
        }
    }
}

/// GMRES on an operator. Solves that miss `reltol` still return the best
/// iterate (inexact Newton); only breakdowns and non-finite output fail.
pub struct KrylovSolve<'a> {
    pub op: &'a dyn LinearOperator,
    pub precond: Option<&'a dyn Preconditioner>,
    pub krylov_dim: usize,
    pub reltol: f64,
}

impl JacobianSolve for KrylovSolve<'_> {
    fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let out = gmres(self.op, rhs, self.krylov_dim, self.precond, self.reltol)?;
        if out.x.iter().all(|v| v.is_finite()) {
            Ok(out.x)
        } else {
            Err(Error::NonFinite("GMRES iterate"))
        }
    }
}

fn negated(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| -x).collect()
}

fn apply(op: &dyn LinearOperator, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; op.dim()];
    op.apply(x, &mut y);
    y
}

/// `δu` with `J·δu = −f_u`.
pub fn newton_direction(solver: &dyn JacobianSolve, f_u: &[f64]) -> Result<Vec<f64>> {
    solver.solve(&negated(f_u))
}

/// `−Jᵀ·f_u`; needs an operator with a transpose.
pub fn steepest_direction(j: &dyn LinearOperator, f_u: &[f64]) -> Result<Vec<f64>> {
    let mut g = vec![0.0; j.dim()];
    if !j.apply_transpose(f_u, &mut g) {
        return Err(Error::IncompatibleSpec(
            "steepest descent needs a materialized Jacobian".into(),
        ));
    }
    Ok(negated(&g))
}

/// The Newton step, the steepest-descent direction and the Cauchy point of
/// one Jacobian. Dogleg steps for any radius are cut from these.
///
/// With a scaling `D` the pieces live in the scaled variables `D·δ`, the
/// radius bounds `‖D·δ‖₂` and [`step`](Self::step) maps back.
#[derive(Debug, Clone)]
pub struct DoglegPieces {
    pub newton: Vec<f64>,
    pub steepest: Vec<f64>,
    pub cauchy: Vec<f64>,
    pub scale: Option<Vec<f64>>,
}

impl DoglegPieces {
    pub fn new(j: &dyn LinearOperator, newton: Vec<f64>, f_u: &[f64]) -> Result<Self> {
        Self::build(j, newton, f_u, None)
    }

    /// Pieces for the ellipsoidal region `‖D·δ‖₂ ≤ Δ`; `d` must be positive.
    pub fn scaled(
        j: &dyn LinearOperator,
        newton: Vec<f64>,
        f_u: &[f64],
        d: &[f64],
    ) -> Result<Self> {
        if d.len() != newton.len() || d.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidArgument(
                "dogleg scaling must be positive and finite".into(),
            ));
        }
        Self::build(j, newton, f_u, Some(d.to_vec()))
    }

    fn build(
        j: &dyn LinearOperator,
        newton: Vec<f64>,
        f_u: &[f64],
        scale: Option<Vec<f64>>,
    ) -> Result<Self> {
        let mut steepest = steepest_direction(j, f_u)?;
        let mut newton = newton;
        if let Some(d) = &scale {
            for ((g, n), di) in steepest.iter_mut().zip(newton.iter_mut()).zip(d) {
                *g /= di;
                *n *= di;
            }
        }
        let g2 = dot(&steepest, &steepest);
        let jg = match &scale {
            Some(d) => apply(
                j,
                &steepest
                    .iter()
                    .zip(d)
                    .map(|(g, di)| g / di)
                    .collect::<Vec<_>>(),
            ),
            None => apply(j, &steepest),
        };
        let jg2 = dot(&jg, &jg);
        let t = if jg2 > 0.0 { g2 / jg2 } else { 0.0 };
        let cauchy = steepest.iter().map(|g| t * g).collect();
        Ok(Self {
            newton,
            steepest,
            cauchy,
            scale,
        })
    }

    pub fn step(&self, delta: f64) -> Vec<f64> {
        let mut s = self.scaled_step(delta);
        if let Some(d) = &self.scale {
            for (x, di) in s.iter_mut().zip(d) {
                *x /= di;
            }
        }
        s
    }

    fn scaled_step(&self, delta: f64) -> Vec<f64> {
        let newton_norm = norm2(&self.newton);
        if newton_norm <= delta {
            return self.newton.clone();
        }
        let cauchy_norm = norm2(&self.cauchy);
        if cauchy_norm >= delta || cauchy_norm == 0.0 {
            let sd_norm = norm2(&self.steepest);
            if sd_norm == 0.0 {
                return self
                    .newton
                    .iter()
                    .map(|x| x * delta / newton_norm)
                    .collect();
            }
            return self.steepest.iter().map(|x| x * delta / sd_norm).collect();
        }
        // positive root of ‖c + τ(n − c)‖² = Δ²
        let d: Vec<f64> = self
            .newton
            .iter()
            .zip(&self.cauchy)
            .map(|(n, c)| n - c)
            .collect();
        let a = dot(&d, &d);
        let b = 2.0 * dot(&self.cauchy, &d);
        let c = cauchy_norm * cauchy_norm - delta * delta;
        let disc = (b * b - 4.0 * a * c).max(0.0).sqrt();
        let tau = if b > 0.0 {
            -2.0 * c / (b + disc)
        } else {
            (disc - b) / (2.0 * a)
        };
        let tau = tau.clamp(0.0, 1.0);
        self.cauchy
            .iter()
            .zip(&d)
            .map(|(c, d)| c + tau * d)
            .collect()
    }

    /// `‖D·δ‖₂`, or `‖δ‖₂` without scaling.
    pub fn norm(&self, du: &[f64]) -> f64 {
        match &self.scale {
            Some(d) => norm2(&du.iter().zip(d).map(|(x, di)| x * di).collect::<Vec<_>>()),
            None => norm2(du),
        }
    }
}

/// Powell's dogleg step for radius `delta` (2-norm).
pub fn dogleg_direction(
    j: &dyn LinearOperator,
    solver: &dyn JacobianSolve,
    f_u: &[f64],
    delta: f64,
) -> Result<Vec<f64>> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "trust radius must be > 0, got {delta}"
        )));
    }
    let newton = newton_direction(solver, f_u)?;
    Ok(DoglegPieces::new(j, newton, f_u)?.step(delta))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DampedSolvePath {
    /// Cholesky on `JᵀJ + λD`.
    NormalCholesky,
    /// Householder QR on `[J; √(λD)]`.
    StackedQr,
}

/// The factorized Levenberg-Marquardt system `(JᵀJ + λD)·x = −Jᵀ·r` with
/// `D = diag(JᵀJ)` floored at `1e-12`.
#[derive(Debug, Clone)]
pub struct DampedSystem {
    jt: Matrix,
    factor: DampedFactor,
}

#[derive(Debug, Clone)]
enum DampedFactor {
    Cholesky(CholeskyFactor),
    Qr { qr: QrFactor, rows: usize },
}

pub const DAMPING_FLOOR: f64 = 1e-12;

/// `diag(JᵀJ)` floored.
pub fn marquardt_scaling(j: &Matrix) -> Vec<f64> {
    (0..j.ncols())
        .map(|c| dot(j.col(c), j.col(c)).max(DAMPING_FLOOR))
        .collect()
}

impl DampedSystem {
    pub fn new(j: &Matrix, scaling: &[f64], lambda: f64, path: DampedSolvePath) -> Result<Self> {
        let n = j.ncols();
        let factor = match path {
            DampedSolvePath::NormalCholesky => {
                let mut a = j.gram();
                for (i, d) in scaling.iter().enumerate() {
                    a[(i, i)] += lambda * d;
                }
                DampedFactor::Cholesky(CholeskyFactor::new(&a)?)
            }
            DampedSolvePath::StackedQr => {
                let m = j.nrows();
                let stacked = Matrix::from_fn(m + n, n, |i, c| {
                    if i < m {
                        j[(i, c)]
                    } else if i - m == c {
                        (lambda * scaling[c]).sqrt()
                    } else {
                        0.0
                    }
                });
                DampedFactor::Qr {
                    qr: QrFactor::new(&stacked)?,
                    rows: m,
                }
            }
        };
        Ok(Self {
            jt: j.transpose(),
            factor,
        })
    }

    /// `x` with `(JᵀJ + λD)·x = −Jᵀ·r`.
    pub fn solve_neg(&self, r: &[f64]) -> Result<Vec<f64>> {
        let x = match &self.factor {
            DampedFactor::Cholesky(c) => c.solve(&negated(&self.jt.matvec(r))),
            DampedFactor::Qr { qr, rows } => {
                let mut rhs = negated(r);
                rhs.resize(rows + self.jt.nrows(), 0.0);
                qr.solve(&rhs)
            }
        };
        if x.iter().all(|v| v.is_finite()) {
            Ok(x)
        } else {
            Err(Error::NonFinite("damped solve"))
        }
    }
}

/// Levenberg-Marquardt direction for damping `lambda`.
pub fn damped_newton_direction(
    j: &Matrix,
    f_u: &[f64],
    lambda: f64,
    path: DampedSolvePath,
) -> Result<Vec<f64>> {
    if !(lambda >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "damping must be >= 0, got {lambda}"
        )));
    }
    DampedSystem::new(j, &marquardt_scaling(j), lambda, path)?.solve_neg(f_u)
}

#[derive(Debug, Clone)]
pub struct Acceleration {
    pub a: Vec<f64>,
    pub accept: bool,
}

/// Second-order correction along the LM velocity `v`, from a finite
/// difference of the residual along `v`. `jv` is `J·v`.
pub fn geodesic_acceleration(
    system: &DampedSystem,
    f: &dyn Residual,
    u: &[f64],
    p: &[f64],
    f_u: &[f64],
    v: &[f64],
    jv: &[f64],
    h: f64,
    alpha: f64,
) -> Result<Acceleration> {
    let trial: Vec<f64> = u.iter().zip(v).map(|(x, d)| x + h * d).collect();
    let mut f_h = vec![0.0; u.len()];
    f.eval_f64(&trial, p, &mut f_h);
    let d: Vec<f64> = f_h
        .iter()
        .zip(f_u)
        .zip(jv)
        .map(|((fh, f0), jv)| 2.0 / h * ((fh - f0) / h - jv))
        .collect();
    if !d.iter().all(|x| x.is_finite()) {
        return Err(Error::NonFinite("geodesic curvature"));
    }
    let a = system.solve_neg(&d)?;
    let vn = norm2(v);
    let an = norm2(&a);
    let accept = an == 0.0 || (vn > 0.0 && 2.0 * an / vn <= alpha);
    Ok(Acceleration { a, accept })
}

/// Halley's correction `(a∘a) ⊘ (a + b/2)` with `a` the Newton step and
/// `J·b = H·a·a`. Near-zero denominators fall back to `aᵢ`.
pub fn halley_direction(
    solver: &dyn JacobianSolve,
    f: &dyn Residual,
    u: &[f64],
    p: &[f64],
    f_u: &[f64],
) -> Result<Vec<f64>> {
    let a = newton_direction(solver, f_u)?;
    let haa = second_directional(f, u, p, &a)?;
    let b = solver.solve(&haa)?;
    Ok(halley_combine(&a, &b))
}

pub(crate) fn halley_combine(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter()
        .zip(b)
        .map(|(&ai, &bi)| {
            let den = ai + 0.5 * bi;
            if den.abs() < f64::EPSILON * (ai.abs() + bi.abs() + f64::MIN_POSITIVE) {
                ai
            } else {
                ai * ai / den
            }
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct PotraPtakStep {
    pub u_next: Vec<f64>,
    pub y: Vec<f64>,
    pub f_y: Vec<f64>,
}

/// Two Newton-like solves with one Jacobian: `y = u + δ₁`, `u⁺ = y + δ₂`
/// where `J·δ₂ = −f(y)`.
pub fn potra_ptak_step(
    solver: &dyn JacobianSolve,
    f: &dyn Residual,
    u: &[f64],
    p: &[f64],
    f_u: &[f64],
) -> Result<PotraPtakStep> {
    let d1 = newton_direction(solver, f_u)?;
    let y: Vec<f64> = u.iter().zip(&d1).map(|(a, b)| a + b).collect();
    let mut f_y = vec![0.0; u.len()];
    f.eval_f64(&y, p, &mut f_y);
    if !f_y.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("Potra-Ptak intermediate residual"));
    }
    let d2 = newton_direction(solver, &f_y)?;
    let u_next = y.iter().zip(&d2).map(|(a, b)| a + b).collect();
    Ok(PotraPtakStep { u_next, y, f_y })
}
