//! Algorithms assembled from Jacobian strategies, descent directions and
//! globalizations.

mod common;
mod itp;
mod newton;
mod poly;
pub mod presets;
mod quasi;
mod spec;

pub use itp::{solve_bracketed_itp, ItpResult};
pub use poly::{poly_stages, run_polyalgorithm, QN_SKIP_DIM};
pub use presets::{algorithm_by_name, Algorithm, ALGORITHM_NAMES};
pub use spec::{assemble, AlgorithmSpec, Globalization, JacobianStrategy, PatternSource, Solver};

use crate::descent::DescentSpec;
use crate::{Error, Problem, Result, SolveOptions, SolveResult};

use common::Run;

impl Solver {
    pub fn solve(&self, problem: &Problem, options: &SolveOptions) -> Result<SolveResult> {
        options.validate()?;
        let n = problem.dim();
        if n == 0 {
            return Err(Error::InvalidArgument("empty initial guess".into()));
        }
        let probe = problem.eval(&problem.u0);
        if probe.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: probe.len(),
            });
        }
        let run = Run::new(problem, options);
        match (
            self.spec.jacobian,
            self.spec.descent,
            self.spec.globalization,
        ) {
            (JacobianStrategy::QuasiNewton(cfg), _, g) => quasi::run_quasi_newton(cfg, g, run),
            (_, DescentSpec::DampedNewton(params), _) => {
                newton::run_levenberg_marquardt(self, params, run)
            }
            (_, _, Globalization::TrustRegion(cfg)) => newton::run_trust_region(self, cfg, run),
            _ => newton::run_newton_family(self, run),
        }
    }
}

/// Solves `problem` with the algorithm described by `spec`.
///
/// Incompatible specs and configuration mistakes are errors; numerical
/// failures are reported through the result's return code.
pub fn solve(
    problem: &Problem,
    spec: &AlgorithmSpec,
    options: &SolveOptions,
) -> Result<SolveResult> {
    assemble(*spec)?.solve(problem, options)
}

/// Solves with the default poly-algorithm.
pub fn solve_default(problem: &Problem, options: &SolveOptions) -> Result<SolveResult> {
    run_polyalgorithm(problem, options)
}

pub fn solve_with(
    problem: &Problem,
    algorithm: &Algorithm,
    options: &SolveOptions,
) -> Result<SolveResult> {
    match algorithm {
        Algorithm::Composed(spec) => solve(problem, spec, options),
        Algorithm::PolyAlgorithm => run_polyalgorithm(problem, options),
    }
}
