use crate::globalize::{backtracking_search, MeritEvaluation};
use crate::linalg::{norm2, sub};
use crate::quasinewton::{qn_init, InitRule, QuasiNewtonConfig, QuasiNewtonState, ReinitMonitor};
use crate::{Error, Result, RetCode, SolveResult};

use super::common::{finite, merit, retcode_for, step, JacobianEngine, Run};
use super::spec::Globalization;

/// Consecutive reinitializations that trigger again on their first step
/// before the solve is declared stalled.
const STALL_STREAK: usize = 3;

fn init(
    run: &mut Run<'_>,
    engine: Option<&JacobianEngine>,
    config: QuasiNewtonConfig,
    u: &[f64],
) -> Result<QuasiNewtonState> {
    let jac = match (config.init, engine) {
        (InitRule::TrueJacobian, Some(e)) => Some(e.materialize(run, u)?.to_dense()),
        _ => None,
    };
    qn_init(u.len(), config, jac.as_ref())
}

/// Quasi-Newton iteration. The step is always taken; a reinit trigger
/// replaces the secant update with a fresh initialization.
pub(crate) fn run_quasi_newton(
    config: QuasiNewtonConfig,
    globalization: Globalization,
    mut run: Run<'_>,
) -> Result<SolveResult> {
    let problem = run.problem;
    let engine = match config.init {
        InitRule::TrueJacobian => Some(JacobianEngine::dense_only(problem, &mut run.stats)?),
        InitRule::Identity => None,
    };
    let mut u = problem.u0.clone();
    let mut fu = run.eval(&u);
    if !finite(&fu) || !finite(&u) {
        return Ok(run.finish(u, &fu, RetCode::NonFinite));
    }
    run.record(0, &fu);
    let mut state = match init(&mut run, engine.as_ref(), config, &u) {
        Ok(s) => s,
        Err(e) => {
            let code = retcode_for(e)?;
            return Ok(run.finish(u, &fu, code));
        }
    };
    let mut monitor = ReinitMonitor::default();
    let mut streak = 0;

    for k in 0..run.options.maxiters {
        if run.converged(&fu) {
            return Ok(run.finish(u, &fu, RetCode::Success));
        }
        if let Err(e) = run.options.deadline.check() {
            let code = retcode_for(e)?;
            return Ok(run.finish(u, &fu, code));
        }
        run.stats.nlinsolve += 1;
        let du = state.direction(&fu);
        if !finite(&du) {
            return Ok(run.finish(u, &fu, RetCode::NonFinite));
        }
        let (next, f_next, searched) = match globalization {
            Globalization::LineSearch(params) => {
                // the approximation satisfies Ĵ·δu = −f, so φ'(0) = −‖f‖²
                let dphi0 = -2.0 * merit(&fu);
                let mut nf = 0;
                let mut phi = |alpha: f64| {
                    nf += 1;
                    merit(&problem.eval(&step(&u, alpha, &du)))
                };
                let found = backtracking_search(
                    MeritEvaluation {
                        phi: &mut phi,
                        phi0: merit(&fu),
                        dphi0,
                    },
                    &params,
                );
                run.stats.nf += nf;
                match found {
                    Ok(alpha) => {
                        let next = step(&u, alpha, &du);
                        let f_next = run.eval(&next);
                        (next, f_next, true)
                    }
                    Err(Error::LineSearchFailed(_)) => (u.clone(), fu.clone(), false),
                    Err(e) => return Err(e),
                }
            }
            _ => {
                let next = step(&u, 1.0, &du);
                let f_next = run.eval(&next);
                (next, f_next, true)
            }
        };
        if !finite(&next) || !finite(&f_next) {
            return Ok(run.finish(u, &fu, RetCode::NonFinite));
        }
        let fired = !searched || monitor.check(config.reinit, &du, &u, norm2(&fu), norm2(&f_next));
        // an identity reset of a fresh identity changes nothing; keep the secant information
        let trigger = fired
            && !(config.init == InitRule::Identity && state.steps_since_reinit == 0 && searched);
        let s = sub(&next, &u);
        let t = sub(&f_next, &fu);
        if searched {
            u = next;
            fu = f_next;
            run.stats.nsteps += 1;
            run.record(k + 1, &fu);
        }
        if trigger {
            streak = if state.steps_since_reinit == 0 {
                streak + 1
            } else {
                1
            };
            if streak >= STALL_STREAK && !run.converged(&fu) {
                return Ok(run.finish(u, &fu, RetCode::Stalled));
            }
            state = match init(&mut run, engine.as_ref(), config, &u) {
                Ok(s) => s,
                Err(e) => {
                    let code = retcode_for(e)?;
                    return Ok(run.finish(u, &fu, code));
                }
            };
            monitor.reset();
            run.stats.nreinit += 1;
        } else {
            streak = 0;
            if norm2(&s) > 0.0 {
                state.update(&s, &t);
            }
        }
    }
    Ok(run.finish(u, &fu, RetCode::MaxIters))
}
