use std::time::Instant;

use crate::{Problem, Result, SolveOptions, SolveResult, StageRecord, Stats};

use super::presets;
use super::spec::AlgorithmSpec;

/// States at or below this count skip the quasi-Newton stages.
pub const QN_SKIP_DIM: usize = 25;

/// Stage list for `problem`, fastest first.
pub fn poly_stages(problem: &Problem) -> Vec<(&'static str, AlgorithmSpec)> {
    let mut stages = Vec::new();
    if problem.analytic_jacobian().is_none() && problem.dim() > QN_SKIP_DIM {
        stages.push(("broyden", presets::broyden()));
        stages.push(("klement", presets::klement()));
        stages.push(("modified-broyden", presets::modified_broyden()));
    }
    let newton = |spec: AlgorithmSpec| {
        let spec = spec.with_linear(crate::linalg::LinearSolverChoice::Auto);
        if problem.analytic_jacobian().is_some() {
            spec.with_jacobian(super::spec::JacobianStrategy::Analytic)
        } else {
            spec
        }
    };
    stages.push(("newton-raphson", newton(presets::newton_raphson())));
    stages.push((
        "newton-backtracking",
        newton(presets::newton_backtracking()),
    ));
    stages.push((
        "trust-region",
        newton(presets::trust_region(
            crate::globalize::RadiusScheme::Simple,
        )),
    ));
    stages
}

/// Runs the stages in order, each with the full iteration budget, and
/// returns the first success or else the stage with the smallest residual.
pub fn run_polyalgorithm(problem: &Problem, options: &SolveOptions) -> Result<SolveResult> {
    options.validate()?;
    let start = Instant::now();
    let mut stats = Stats::default();
    let mut records = Vec::new();
    let mut best: Option<SolveResult> = None;
    for (name, spec) in poly_stages(problem) {
        let result = super::solve(problem, &spec, options)?;
        stats.merge(&result.stats);
        records.push(StageRecord {
            name: name.to_string(),
            retcode: result.retcode,
            resid_norm: result.resid_norm,
        });
        let success = result.is_success();
        let better = best
            .as_ref()
            .map_or(true, |b| !(b.resid_norm <= result.resid_norm));
        if success || better {
            best = Some(result);
        }
        if success || options.deadline.expired() {
            break;
        }
    }
    let mut out = best.expect("at least one stage");
    out.stats = stats;
    out.stages = records;
    out.wall_time_ns = start.elapsed().as_nanos() as u64;
    Ok(out)
}
