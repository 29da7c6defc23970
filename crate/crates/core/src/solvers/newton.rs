use crate::autodiff::second_directional;
use crate::descent::{
    geodesic_acceleration, halley_combine, marquardt_scaling, newton_direction, steepest_direction,
    DampedSolvePath, DampedSystem, DampingParams, DescentSpec, DoglegPieces, JacobianSolve,
};
use crate::globalize::{
    backtracking_search, tr_update, BacktrackingParams, MeritEvaluation, TrustConfig,
};
use crate::linalg::{dot, norm2, Matrix};
use crate::{Result, RetCode, SolveResult};

use super::common::{
    finite, merit, retcode_for, step, JacobianEngine, LinearSystem, Materialized, Run,
};
use super::spec::{Globalization, JacobianStrategy, Solver};

const SER_CLAMP: (f64, f64) = (1e-4, 1e4);
const LAMBDA_MAX: f64 = 1e20;
const LAMBDA_MIN: f64 = 1e-20;

/// Outcome of one iteration of a loop body.
enum Flow {
    Continue,
    Stop(RetCode),
}

/// Newton-type iterations with optional backtracking: Newton, steepest
/// descent, Halley, Potra-Pták and pseudo-transient continuation.
pub(crate) fn run_newton_family(solver: &Solver, mut run: Run<'_>) -> Result<SolveResult> {
    let spec = solver.spec;
    let problem = run.problem;
    let matrix_free = spec.jacobian == JacobianStrategy::MatrixFree;
    let engine = if matrix_free && !spec.concrete_jac {
        None
    } else {
        Some(JacobianEngine::new(problem, spec.jacobian, &mut run.stats)?)
    };
    let mut u = problem.u0.clone();
    let mut fu = run.eval(&u);
    if !finite(&fu) || !finite(&u) {
        return Ok(run.finish(u, &fu, RetCode::NonFinite));
    }
    run.record(0, &fu);
    let mut dt = match spec.descent {
        DescentSpec::PseudoTransient { dt0 } => dt0,
        _ => 0.0,
    };

    for k in 0..run.options.maxiters {
        if run.converged(&fu) {
            return Ok(run.finish(u, &fu, RetCode::Success));
        }
        let outcome = (|| -> Result<Option<(Vec<f64>, Vec<f64>)>> {
            run.options.deadline.check()?;
            let jac = match &engine {
                Some(e) => Some(e.materialize(&mut run, &u)?),
                None => None,
            };
            let shift = if dt > 0.0 { 1.0 / dt } else { 0.0 };
            let (jac_ref, precond_src) = match (&jac, matrix_free) {
                (Some(Materialized::Sparse(s)), true) => (None, Some(s)),
                (j, _) => (j.as_ref(), None),
            };
            let system = LinearSystem::new(&run, jac_ref, precond_src, &u, shift, spec.linear)?;
            let result = iterate(
                &spec.descent,
                &spec.globalization,
                &mut run,
                &system,
                &u,
                &fu,
            );
            system.harvest(&mut run.stats);
            result
        })();
        let (u_next, f_next) = match outcome {
            Ok(Some(pair)) => pair,
            Ok(None) => return Ok(run.finish(u, &fu, RetCode::NonFinite)),
            Err(e) => {
                let code = retcode_for(e)?;
                return Ok(run.finish(u, &fu, code));
            }
        };
        if let DescentSpec::PseudoTransient { .. } = spec.descent {
            let ratio = norm2(&fu) / norm2(&f_next);
            let ratio = if ratio.is_nan() { SER_CLAMP.0 } else { ratio };
            dt *= ratio.clamp(SER_CLAMP.0, SER_CLAMP.1);
        }
        u = u_next;
        fu = f_next;
        run.stats.nsteps += 1;
        run.record(k + 1, &fu);
    }
    Ok(run.finish(u, &fu, RetCode::MaxIters))
}

/// One step; `Ok(None)` signals a non-finite iterate or residual.
fn iterate(
    descent: &DescentSpec,
    globalization: &Globalization,
    run: &mut Run<'_>,
    system: &LinearSystem<'_>,
    u: &[f64],
    fu: &[f64],
) -> Result<Option<(Vec<f64>, Vec<f64>)>> {
    let (f, p) = (run.f(), run.p());
    let du = match descent {
        DescentSpec::PotraPtak => {
            let d1 = newton_direction(system, fu)?;
            let y = step(u, 1.0, &d1);
            let fy = run.eval(&y);
            if !finite(&fy) || !finite(&y) {
                return Ok(None);
            }
            if run.converged(&fy) {
                return Ok(Some((y, fy)));
            }
            let d2 = newton_direction(system, &fy)?;
            let next = step(&y, 1.0, &d2);
            let f_next = run.eval(&next);
            return Ok((finite(&next) && finite(&f_next)).then_some((next, f_next)));
        }
        DescentSpec::Halley => {
            let a = newton_direction(system, fu)?;
            run.stats.njvp += 1;
            let haa = second_directional(f, u, p, &a)?;
            let b = system.solve(&haa)?;
            halley_combine(&a, &b)
        }
        DescentSpec::SteepestDescent => steepest_direction(system.operator(), fu)?,
        _ => newton_direction(system, fu)?,
    };
    if !finite(&du) {
        return Ok(None);
    }
    match globalization {
        Globalization::LineSearch(params) => line_search(run, params, system, u, fu, &du).map(Some),
        _ => {
            let next = step(u, 1.0, &du);
            let f_next = run.eval(&next);
            Ok((finite(&next) && finite(&f_next)).then_some((next, f_next)))
        }
    }
}

fn line_search(
    run: &mut Run<'_>,
    params: &BacktrackingParams,
    system: &LinearSystem<'_>,
    u: &[f64],
    fu: &[f64],
    du: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let jdu = system.apply(du);
    let dphi0 = dot(fu, &jdu);
    let mut last: Option<(f64, Vec<f64>)> = None;
    let mut nf = 0;
    let mut phi = |alpha: f64| {
        nf += 1;
        let trial = step(u, alpha, du);
        let ft = run.problem.eval(&trial);
        let m = merit(&ft);
        last = Some((alpha, ft));
        m
    };
    let alpha = backtracking_search(
        MeritEvaluation {
            phi: &mut phi,
            phi0: merit(fu),
            dphi0,
        },
        params,
    );
    run.stats.nf += nf;
    let alpha = alpha?;
    let next = step(u, alpha, du);
    let f_next = match last {
        Some((a, ft)) if a == alpha => ft,
        _ => run.eval(&next),
    };
    Ok((next, f_next))
}

/// Dogleg trust-region iteration on a materialized Jacobian.
pub(crate) fn run_trust_region(
    solver: &Solver,
    config: TrustConfig,
    mut run: Run<'_>,
) -> Result<SolveResult> {
    let spec = solver.spec;
    let problem = run.problem;
    let engine = JacobianEngine::new(problem, spec.jacobian, &mut run.stats)?;
    let mut u = problem.u0.clone();
    let mut fu = run.eval(&u);
    if !finite(&fu) || !finite(&u) {
        return Ok(run.finish(u, &fu, RetCode::NonFinite));
    }
    run.record(0, &fu);
    let mut state = config.initial_state(&u);
    let mut current: Option<(Materialized, DoglegPieces)> = None;
    let mut scale: Option<Vec<f64>> = None;

    for k in 0..run.options.maxiters {
        if run.converged(&fu) {
            return Ok(run.finish(u, &fu, RetCode::Success));
        }
        let flow = (|| -> Result<Flow> {
            run.options.deadline.check()?;
            if current.is_none() {
                let jac = engine.materialize(&mut run, &u)?;
                let pieces = {
                    let system = LinearSystem::new(&run, Some(&jac), None, &u, 0.0, spec.linear)?;
                    let newton = newton_direction(&system, &fu);
                    system.harvest(&mut run.stats);
                    let newton = newton?;
                    if config.scaled {
                        let fresh = scale.is_none();
                        let d = update_scale(scale.take(), &jac);
                        if fresh && config.delta0.is_none() {
                            let du0: Vec<f64> = u.iter().zip(&d).map(|(x, di)| x * di).collect();
                            state = config.initial_state(&du0);
                        }
                        let pieces = DoglegPieces::scaled(jac.operator(), newton, &fu, &d)?;
                        scale = Some(d);
                        pieces
                    } else {
                        DoglegPieces::new(jac.operator(), newton, &fu)?
                    }
                };
                if !finite(&pieces.newton) {
                    return Err(crate::Error::NonFinite("Newton step"));
                }
                current = Some((jac, pieces));
            }
            let (jac, pieces) = current.as_ref().expect("set above");
            let du = pieces.step(state.delta);
            let trial = step(&u, 1.0, &du);
            let f_trial = run.eval(&trial);
            let rho = crate::globalize::tr_ratio(&fu, &f_trial, jac.operator(), &du);
            let (next, accept) = tr_update(&state, rho, pieces.norm(&du));
            state = next;
            if accept && finite(&trial) && finite(&f_trial) {
                u = trial;
                fu = f_trial;
                current = None;
                run.stats.nsteps += 1;
                run.record(k + 1, &fu);
            } else if state.delta < f64::EPSILON * pieces.norm(&u).max(1.0) {
                return Ok(Flow::Stop(RetCode::Stalled));
            }
            Ok(Flow::Continue)
        })();
        match flow {
            Ok(Flow::Continue) => {}
            Ok(Flow::Stop(code)) => return Ok(run.finish(u, &fu, code)),
            Err(e) => {
                let code = retcode_for(e)?;
                return Ok(run.finish(u, &fu, code));
            }
        }
    }
    Ok(run.finish(u, &fu, RetCode::MaxIters))
}

fn lm_accept(
    params: &DampingParams,
    prev_v: Option<&[f64]>,
    v: &[f64],
    fu: &[f64],
    f_trial: &[f64],
) -> bool {
    let (old, new) = (norm2(fu), norm2(f_trial));
    match (params.uphill, prev_v) {
        (Some(b), Some(pv)) => {
            let denom = norm2(v) * norm2(pv);
            let cos = if denom > 0.0 { dot(v, pv) / denom } else { 0.0 };
            (1.0 - cos).powf(b) * new <= old && new.is_finite()
        }
        _ => new < old,
    }
}

/// Running maximum of the Jacobian column norms; zero columns count as 1.
fn update_scale(prev: Option<Vec<f64>>, jac: &Materialized) -> Vec<f64> {
    let norms: Vec<f64> = match jac {
        Materialized::Dense(m) => (0..m.ncols()).map(|j| norm2(m.col(j))).collect(),
        Materialized::Sparse(s) => (0..s.n_cols())
            .map(|j| norm2(&s.values()[s.col_ptr()[j]..s.col_ptr()[j + 1]]))
            .collect(),
    };
    let fresh: Vec<f64> = norms
        .into_iter()
        .map(|v| if v > 0.0 && v.is_finite() { v } else { 1.0 })
        .collect();
    match prev {
        Some(p) => p.iter().zip(&fresh).map(|(a, b)| a.max(*b)).collect(),
        None => fresh,
    }
}

/// Levenberg-Marquardt with Marquardt scaling and optional geodesic
/// acceleration. Rejected steps raise `λ` and keep the Jacobian.
pub(crate) fn run_levenberg_marquardt(
    solver: &Solver,
    params: DampingParams,
    mut run: Run<'_>,
) -> Result<SolveResult> {
    let spec = solver.spec;
    let path: DampedSolvePath = solver.damped_path;
    let problem = run.problem;
    let engine = JacobianEngine::new(problem, spec.jacobian, &mut run.stats)?;
    let (f, p) = (run.f(), run.p());
    let mut u = problem.u0.clone();
    let mut fu = run.eval(&u);
    if !finite(&fu) || !finite(&u) {
        return Ok(run.finish(u, &fu, RetCode::NonFinite));
    }
    run.record(0, &fu);
    let mut lambda = params.lambda0;
    let mut jac: Option<(Matrix, Vec<f64>)> = None;
    let mut prev_v: Option<Vec<f64>> = None;

    for k in 0..run.options.maxiters {
        if run.converged(&fu) {
            return Ok(run.finish(u, &fu, RetCode::Success));
        }
        if lambda > LAMBDA_MAX {
            return Ok(run.finish(u, &fu, RetCode::Stalled));
        }
        let flow = (|| -> Result<Flow> {
            run.options.deadline.check()?;
            if jac.is_none() {
                let j = engine.materialize(&mut run, &u)?.to_dense();
                let d = marquardt_scaling(&j);
                jac = Some((j, d));
            }
            let (j, d) = jac.as_ref().expect("set above");
            let system = match DampedSystem::new(j, d, lambda, path) {
                Ok(s) => s,
                Err(e) if retcode_for(e.clone())? == RetCode::LinearSolveFailed => {
                    lambda *= params.lambda_up;
                    return Ok(Flow::Continue);
                }
                Err(e) => return Err(e),
            };
            run.stats.nlinsolve += 1;
            let v = system.solve_neg(&fu)?;
            let mut du = v.clone();
            if params.use_geodesic {
                let jv = j.matvec(&v);
                run.stats.nf += 1;
                run.stats.nlinsolve += 1;
                match geodesic_acceleration(
                    &system,
                    f,
                    &u,
                    p,
                    &fu,
                    &v,
                    &jv,
                    params.geo_h,
                    params.geo_alpha,
                ) {
                    Ok(acc) if acc.accept => {
                        for (d, a) in du.iter_mut().zip(&acc.a) {
                            *d += 0.5 * a;
                        }
                    }
                    Ok(_) | Err(crate::Error::NonFinite(_)) => {
                        lambda *= params.lambda_up;
                        return Ok(Flow::Continue);
                    }
                    Err(e) => return Err(e),
                }
            }
            let trial = step(&u, 1.0, &du);
            let f_trial = run.eval(&trial);
            if finite(&trial)
                && finite(&f_trial)
                && lm_accept(&params, prev_v.as_deref(), &v, &fu, &f_trial)
            {
                prev_v = Some(v.clone());
                u = trial;
                fu = f_trial;
                lambda = (lambda / params.lambda_down).max(LAMBDA_MIN);
                jac = None;
                run.stats.nsteps += 1;
                run.record(k + 1, &fu);
            } else {
                lambda *= params.lambda_up;
            }
            Ok(Flow::Continue)
        })();
        match flow {
            Ok(Flow::Continue) => {}
            Ok(Flow::Stop(code)) => return Ok(run.finish(u, &fu, code)),
            Err(e) => {
                let code = retcode_for(e)?;
                return Ok(run.finish(u, &fu, code));
            }
        }
    }
    Ok(run.finish(u, &fu, RetCode::MaxIters))
}
