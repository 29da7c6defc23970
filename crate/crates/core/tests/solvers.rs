mod common;

use std::time::Duration;

use common::{max_abs_diff, order_fit, Cubic, SinSquare};
use nlkit::descent::{DampingParams, DescentSpec};
use nlkit::globalize::{BacktrackingParams, RadiusScheme, TrustConfig};
use nlkit::linalg::{LinearSolverChoice, PrecondChoice};
use nlkit::problems::{brusselator_2d, generalized_rosenbrock, quadratic, test23};
use nlkit::quasinewton::QuasiNewtonConfig;
use nlkit::solvers::presets::*;
use nlkit::solvers::{
    algorithm_by_name, assemble, poly_stages, run_polyalgorithm, solve_bracketed_itp,
    AlgorithmSpec, Globalization, JacobianStrategy, ALGORITHM_NAMES,
};
use nlkit::{solve, solve_default, Deadline, Error, FnResidual, Problem, RetCode, SolveOptions};

const ORDER_TOL: f64 = 1e-300;

fn order_opts() -> SolveOptions {
    SolveOptions::default()
        .with_abstol(ORDER_TOL)
        .with_maxiters(60)
        .with_trace()
}

fn orders(spec: &AlgorithmSpec) -> Vec<f64> {
    [
        Problem::new(SinSquare, vec![2.0], vec![]),
        Problem::new(Cubic, vec![2.0], vec![]),
    ]
    .iter()
    .map(|p| {
        let r = solve(p, spec, &order_opts()).unwrap();
        assert!(r.is_success());
        order_fit(&r, ORDER_TOL)
    })
    .collect()
}

#[test]
fn newton_is_quadratic() {
    for q in orders(&newton_raphson()) {
        assert!(q >= 1.8, "{q}");
    }
}

#[test]
fn halley_is_cubic() {
    for q in orders(&halley()) {
        assert!(q >= 2.5, "{q}");
    }
}

#[test]
fn potra_ptak_beats_quadratic() {
    for q in orders(&potra_ptak()) {
        assert!(q >= 2.0, "{q}");
    }
}

#[test]
fn every_named_algorithm_assembles() {
    for name in ALGORITHM_NAMES {
        let alg = algorithm_by_name(name, Some(PrecondChoice::Ilu0));
        assert!(alg.is_some(), "{name}");
        if let Some(nlkit::solvers::Algorithm::Composed(spec)) = alg {
            assert!(assemble(spec).is_ok(), "{name}");
        }
    }
    assert!(algorithm_by_name("gradient-flow", None).is_none());
}

fn rejected(spec: AlgorithmSpec) -> bool {
    matches!(assemble(spec), Err(Error::IncompatibleSpec(_)))
}

#[test]
fn incompatible_compositions_are_rejected() {
    let tr = Globalization::TrustRegion(TrustConfig::new(RadiusScheme::Simple));
    let ls = Globalization::LineSearch(BacktrackingParams::default());
    let j = JacobianStrategy::DualDense;
    assert!(rejected(AlgorithmSpec::new(j, DescentSpec::Newton, tr)));
    assert!(rejected(AlgorithmSpec::new(
        j,
        DescentSpec::Dogleg,
        Globalization::None
    )));
    assert!(rejected(AlgorithmSpec::new(j, DescentSpec::Halley, ls)));
    assert!(rejected(
        AlgorithmSpec::new(
            j,
            DescentSpec::DampedNewton(DampingParams::default()),
            Globalization::None
        )
        .with_linear(LinearSolverChoice::Lu)
    ));
    assert!(rejected(
        newton_raphson()
            .with_jacobian(JacobianStrategy::MatrixFree)
            .with_linear(LinearSolverChoice::Lu)
    ));
    assert!(rejected(
        newton_krylov(Some(PrecondChoice::Ilu0)).with_concrete_jac(false)
    ));
    assert!(rejected(trust_region(RadiusScheme::Simple).with_jacobian(
        JacobianStrategy::QuasiNewton(QuasiNewtonConfig::klement())
    )));
    assert!(rejected(limited_memory_broyden().with_jacobian(
        JacobianStrategy::QuasiNewton(QuasiNewtonConfig::limited_memory_broyden(0))
    )));
    assert!(rejected(pseudo_transient(0.0)));
}

#[test]
fn line_search_rescues_rosenbrock() {
    let d = generalized_rosenbrock(10).unwrap();
    let opts = SolveOptions::default();
    let ls = solve(&d.problem, &newton_backtracking(), &opts).unwrap();
    assert_eq!(ls.retcode, RetCode::Success);
    assert!(max_abs_diff(&ls.u_star, &[1.0; 10]) < 1e-6);
    let plain = solve(&d.problem, &newton_raphson(), &opts).unwrap();
    assert_ne!(plain.retcode, RetCode::Success);
}

#[test]
fn quadratic_by_many_methods() {
    // from 1, Potra-Pták cycles 1 → 3 → 1 on u² − 5, so p stays below 4
    let d = quadratic(&[2.0, 3.0]).unwrap();
    let want = d.reference_solution.clone().unwrap();
    for spec in [
        newton_raphson(),
        newton_backtracking(),
        trust_region(RadiusScheme::NocedalWright),
        levenberg_marquardt(true),
        pseudo_transient(DEFAULT_DT0),
        halley(),
        potra_ptak(),
        broyden(),
        modified_broyden(),
        limited_memory_broyden(),
        klement(),
        newton_krylov(None),
        newton_sparse(),
        newton_raphson().with_jacobian(JacobianStrategy::FDDense),
    ] {
        let r = solve(&d.problem, &spec, &SolveOptions::default()).unwrap();
        assert!(r.is_success(), "{spec:?}: {:?}", r.retcode);
        assert!(max_abs_diff(&r.u_star, &want) < 1e-6);
    }
}

#[test]
fn steepest_descent_makes_progress() {
    let d = quadratic(&[2.0, 5.0]).unwrap();
    let opts = SolveOptions::default().with_abstol(1e-6);
    let r = solve(&d.problem, &steepest_descent(), &opts).unwrap();
    assert!(r.resid_norm < 3.0);
}

#[test]
fn stats_and_trace_are_consistent() {
    let d = quadratic(&[2.0, 5.0]).unwrap();
    let r = solve(
        &d.problem,
        &newton_raphson(),
        &SolveOptions::default().with_trace(),
    )
    .unwrap();
    let trace = r.trace.as_ref().unwrap();
    assert_eq!(trace.len(), r.stats.nsteps + 1);
    assert_eq!(r.stats.njac, r.stats.nsteps);
    assert_eq!(r.stats.nf, r.stats.nsteps + 1);
    assert!(trace.last().unwrap().1 <= 1e-8);
    let again = solve(
        &d.problem,
        &newton_raphson(),
        &SolveOptions::default().with_trace(),
    )
    .unwrap();
    assert!(r.same_outcome(&again));
}

#[test]
fn iteration_budget_yields_max_iters() {
    let d = test23(1).unwrap();
    let r = solve(
        &d.problem,
        &newton_raphson(),
        &SolveOptions::default().with_maxiters(1),
    )
    .unwrap();
    assert_eq!(r.retcode, RetCode::MaxIters);
}

#[test]
fn expired_deadline_yields_timeout() {
    let d = brusselator_2d(8).unwrap();
    let opts = SolveOptions::default().with_deadline(Deadline::after(Duration::ZERO));
    let r = solve(&d.problem, &newton_raphson(), &opts).unwrap();
    assert_eq!(r.retcode, RetCode::Timeout);
}

#[test]
fn nan_residual_yields_non_finite() {
    let pr = Problem::from_fn(
        |u: &[f64], _: &[f64], out: &mut [f64]| out[0] = (u[0] - 2.0).sqrt() + 1.0,
        vec![3.0],
        vec![],
    );
    let r = solve(
        &pr,
        &newton_raphson().with_jacobian(JacobianStrategy::FDDense),
        &SolveOptions::default(),
    )
    .unwrap();
    assert_eq!(r.retcode, RetCode::NonFinite);
}

#[test]
fn closure_residual_falls_back_to_differences() {
    let pr = Problem::new(
        FnResidual(|u: &[f64], _: &[f64], out: &mut [f64]| out[0] = u[0] * u[0] - 4.0),
        vec![1.0],
        vec![],
    );
    let r = solve(&pr, &newton_raphson(), &SolveOptions::default()).unwrap();
    assert!(r.is_success());
    assert!((r.u_star[0] - 2.0).abs() < 1e-8);
    assert!(matches!(
        solve(&pr, &halley(), &SolveOptions::default()),
        Ok(_) | Err(Error::NotDifferentiable)
    ));
}

#[test]
fn invalid_options_are_errors() {
    let d = quadratic(&[2.0]).unwrap();
    let bad = SolveOptions::default().with_abstol(0.0);
    assert!(solve(&d.problem, &newton_raphson(), &bad).is_err());
}

#[test]
fn krylov_matches_dense_on_small_brusselator() {
    let d = brusselator_2d(8).unwrap();
    let opts = SolveOptions::default();
    let dense = solve(&d.problem, &newton_dense(), &opts).unwrap();
    let krylov = solve(&d.problem, &newton_krylov(Some(PrecondChoice::Ilu0)), &opts).unwrap();
    let sparse = solve(&d.problem, &newton_sparse(), &opts).unwrap();
    assert!(dense.is_success() && krylov.is_success() && sparse.is_success());
    assert!(max_abs_diff(&dense.u_star, &krylov.u_star) <= 1e-6);
    assert!(max_abs_diff(&dense.u_star, &sparse.u_star) <= 1e-6);
    assert!(krylov.stats.njvp > 0);
}

#[test]
fn unpreconditioned_krylov_on_small_brusselator() {
    let d = brusselator_2d(6).unwrap();
    let r = solve(&d.problem, &newton_krylov(None), &SolveOptions::default()).unwrap();
    assert!(r.is_success(), "{:?}", r.retcode);
    assert_eq!(r.stats.njac, 0);
}

#[test]
fn poly_algorithm_records_stages() {
    let d = generalized_rosenbrock(10).unwrap();
    let r = run_polyalgorithm(&d.problem, &SolveOptions::default()).unwrap();
    assert!(r.is_success());
    assert!(!r.stages.is_empty());
    assert_eq!(r.stages.last().unwrap().retcode, RetCode::Success);
    let names: Vec<&str> = poly_stages(&d.problem).iter().map(|s| s.0).collect();
    assert_eq!(names[0], "newton-raphson");
    let big = brusselator_2d(8).unwrap();
    assert_eq!(poly_stages(&big.problem)[0].0, "broyden");
    let dflt = solve_default(&d.problem, &SolveOptions::default()).unwrap();
    assert!(r.same_outcome(&dflt));
}

#[test]
fn itp_finds_cubic_root() {
    // real root of x³ − 2x − 5, the classical test equation
    let f = |x: f64| x * x * x - 2.0 * x - 5.0;
    let r = solve_bracketed_itp(f, (2.0, 3.0), 1e-12, 200).unwrap();
    assert!((r.root - 2.094_551_481_542_327).abs() <= 2e-12);
    // never worse than bisection plus n₀
    let bisect = ((1.0f64 / 2e-12).log2()).ceil() as usize;
    assert!(r.iterations <= bisect + 10);
}

#[test]
fn itp_rejects_bad_brackets() {
    assert!(matches!(
        solve_bracketed_itp(|x| x * x + 1.0, (-1.0, 1.0), 1e-8, 50),
        Err(Error::InvalidBracket { .. })
    ));
    assert!(solve_bracketed_itp(|x| x, (1.0, -1.0), 1e-8, 50).is_err());
}

#[test]
fn scaled_trust_region_and_uphill_lm_solve_suite_members() {
    let scaled = AlgorithmSpec {
        globalization: Globalization::TrustRegion(
            TrustConfig::new(RadiusScheme::Simple).with_scaling(true),
        ),
        ..trust_region(RadiusScheme::Simple)
    };
    let uphill = AlgorithmSpec {
        descent: DescentSpec::DampedNewton(DampingParams {
            uphill: Some(2.0),
            ..DampingParams::default()
        }),
        ..levenberg_marquardt(false)
    };
    for i in [1, 4, 12] {
        let d = test23(i).unwrap();
        for spec in [&scaled, &uphill] {
            let r = solve(&d.problem, spec, &SolveOptions::default()).unwrap();
            assert!(r.is_success(), "{} {spec:?}", d.name);
        }
    }
}

#[test]
fn broyden_reinitializes_on_rosenbrock() {
    let d = generalized_rosenbrock(10).unwrap();
    let r = solve(&d.problem, &broyden(), &SolveOptions::default()).unwrap();
    assert!(r.stats.nreinit >= 1, "{:?}", r.stats);
}

#[test]
fn modified_broyden_on_brusselator() {
    let d = brusselator_2d(8).unwrap();
    let r = solve(&d.problem, &modified_broyden(), &SolveOptions::default()).unwrap();
    assert!(r.is_success());
    assert!(r.stats.njac >= 1 && r.stats.njac < r.stats.nsteps + 1);
}
