//! Benchmark harness: single solves, work-precision sweeps and size scaling.
//!
//! Every command resolves problems through [`nlkit::lookup`] and algorithms
//! through [`nlkit::solvers::algorithm_by_name`], so the CSV columns hold the
//! same ids the CLI accepts.

use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use nlkit::linalg::{norm_inf, PrecondChoice};
use nlkit::solvers::{
    algorithm_by_name, run_polyalgorithm, Algorithm, JacobianStrategy, PatternSource,
};
use nlkit::sparsity::DEFAULT_DETECT_SAMPLES;
use nlkit::{Deadline, Problem, SolveOptions, SolveResult};
use serde::Serialize;

pub const WP_HEADER: &str =
    "problem,algorithm,abstol,runtime_ns,resid_inf,retcode,nf,njac,nlinsolve";
pub const SCALING_HEADER: &str = "size,algorithm,runtime_ns,resid_inf,retcode";
pub const SEED_ENV: &str = "NLKIT_SEED";

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("unknown problem '{0}'")]
    UnknownProblem(String),
    #[error("unknown algorithm '{0}'")]
    UnknownAlgorithm(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Solver(#[from] nlkit::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl BenchError {
    /// Process exit code: 2 for unknown ids, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::UnknownProblem(_) | BenchError::UnknownAlgorithm(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, BenchError>;

pub fn load_problem(id: &str) -> Result<Problem> {
    match nlkit::lookup(id) {
        Ok(d) => Ok(d.problem),
        Err(nlkit::Error::UnknownProblem(_)) => Err(BenchError::UnknownProblem(id.to_string())),
        Err(e) => Err(e.into()),
    }
}

/// Named algorithm with the pattern-detection seed applied.
///
/// Only colored-sparse strategies consume the seed, and only when the
/// problem has no known pattern.
pub fn load_algorithm(
    name: &str,
    precond: Option<PrecondChoice>,
    seed: u64,
    problem: &Problem,
) -> Result<Algorithm> {
    let alg = algorithm_by_name(name, precond)
        .ok_or_else(|| BenchError::UnknownAlgorithm(name.to_string()))?;
    Ok(match alg {
        Algorithm::Composed(mut spec) => {
            if let JacobianStrategy::ColoredSparse(src) = spec.jacobian {
                let src = match src {
                    PatternSource::Detect { n_samples, .. } => {
                        PatternSource::Detect { n_samples, seed }
                    }
                    PatternSource::Auto if problem.known_pattern().is_none() => {
                        PatternSource::Detect {
                            n_samples: DEFAULT_DETECT_SAMPLES,
                            seed,
                        }
                    }
                    other => other,
                };
                spec.jacobian = JacobianStrategy::ColoredSparse(src);
            }
            Algorithm::Composed(spec)
        }
        poly => poly,
    })
}

pub fn run(alg: &Algorithm, problem: &Problem, opts: &SolveOptions) -> nlkit::Result<SolveResult> {
    match alg {
        Algorithm::Composed(spec) => nlkit::solve(problem, spec, opts),
        Algorithm::PolyAlgorithm => run_polyalgorithm(problem, opts),
    }
}

/// `NLKIT_SEED` if set and parseable, else `fallback`.
pub fn seed_from_env(fallback: u64) -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| BenchError::Config(format!("{SEED_ENV}='{s}' is not an integer"))),
        Err(_) => Ok(fallback),
    }
}

/// Parses `1e-2..1e-10` (one tolerance per decade) or a comma list.
/// The result must be strictly decreasing.
pub fn parse_tols(s: &str) -> Result<Vec<f64>> {
    let bad = |v: &str| BenchError::Config(format!("bad tolerance '{v}'"));
    let num = |v: &str| -> Result<f64> {
        let x: f64 = v.trim().parse().map_err(|_| bad(v))?;
        if x > 0.0 && x.is_finite() {
            Ok(x)
        } else {
            Err(bad(v))
        }
    };
    let tols = if let Some((a, b)) = s.split_once("..") {
        let (hi, lo) = (num(a)?, num(b)?);
        let (e_hi, e_lo) = (hi.log10(), lo.log10());
        let steps = (e_hi - e_lo).round();
        if !(steps >= 1.0) || (e_hi - e_lo - steps).abs() > 1e-9 {
            return Err(BenchError::Config(format!(
                "range '{s}' must span a whole number of decades, largest first"
            )));
        }
        // step the decimal exponent so each value is the nearest double to m·10^e
        let sci = format!("{hi:e}");
        let (m, e) = sci.split_once('e').expect("LowerExp has an exponent");
        let e: i32 = e.parse().expect("integer exponent");
        (0..=steps as i32)
            .map(|k| format!("{m}e{}", e - k).parse().expect("valid float"))
            .collect()
    } else {
        s.split(',').map(num).collect::<Result<Vec<_>>>()?
    };
    check_decreasing(&tols)?;
    Ok(tols)
}

fn check_decreasing(tols: &[f64]) -> Result<()> {
    if tols.is_empty() {
        return Err(BenchError::Config("empty tolerance grid".into()));
    }
    if tols.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(BenchError::Config(format!(
            "tolerances must be strictly decreasing: {tols:?}"
        )));
    }
    Ok(())
}

pub fn parse_list(s: &str) -> Vec<String> {
    s.split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(String::from)
        .collect()
}

pub fn parse_sizes(s: &str) -> Result<Vec<usize>> {
    parse_list(s)
        .iter()
        .map(|v| {
            v.parse()
                .map_err(|_| BenchError::Config(format!("bad size '{v}'")))
        })
        .collect()
}

pub fn parse_precond(s: &str) -> Result<PrecondChoice> {
    match s {
        "ilu0" => Ok(PrecondChoice::Ilu0),
        _ => Err(BenchError::Config(format!("unknown preconditioner '{s}'"))),
    }
}

/// Max-norm of `f(u_star)`, measured afresh.
pub fn remeasure(problem: &Problem, r: &SolveResult) -> f64 {
    norm_inf(&problem.eval(&r.u_star))
}

#[derive(Debug, Clone)]
pub struct WpConfig {
    pub problems: Vec<String>,
    pub algorithms: Vec<String>,
    pub tols: Vec<f64>,
    pub reps: usize,
    pub maxiters: usize,
    pub precond: Option<PrecondChoice>,
    pub seed: u64,
    pub jobs: usize,
}

impl WpConfig {
    pub fn validate(&self) -> Result<()> {
        check_decreasing(&self.tols)?;
        if self.reps == 0 {
            return Err(BenchError::Config("reps must be >= 1".into()));
        }
        if self.jobs == 0 {
            return Err(BenchError::Config("jobs must be >= 1".into()));
        }
        if self.problems.is_empty() || self.algorithms.is_empty() {
            return Err(BenchError::Config(
                "need at least one problem and algorithm".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WpRow {
    pub problem: String,
    pub algorithm: String,
    pub abstol: f64,
    pub runtime_ns: u64,
    pub resid_inf: f64,
    pub retcode: String,
    pub nf: usize,
    pub njac: usize,
    pub nlinsolve: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub size: usize,
    pub algorithm: String,
    pub runtime_ns: u64,
    pub resid_inf: f64,
    pub retcode: String,
}

fn median(mut v: Vec<u64>) -> u64 {
    v.sort_unstable();
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        v[m - 1] / 2 + v[m] / 2 + (v[m - 1] % 2 + v[m] % 2) / 2
    }
}

/// Runs `cells` on up to `jobs` threads. Each cell stays on one worker and
/// results come back in input order.
fn run_cells<C: Sync, R: Send>(cells: &[C], jobs: usize, f: impl Fn(&C) -> R + Sync) -> Vec<R> {
    let next = AtomicUsize::new(0);
    let out: Mutex<Vec<Option<R>>> = Mutex::new((0..cells.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..jobs.clamp(1, cells.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(cell) = cells.get(i) else { break };
                let r = f(cell);
                out.lock().unwrap()[i] = Some(r);
            });
        }
    });
    out.into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every cell ran"))
        .collect()
}

/// One row per (problem, algorithm, abstol). A warmup solve is discarded,
/// then `reps` timed solves give the median runtime.
pub fn cmd_wp(config: &WpConfig) -> Result<Vec<WpRow>> {
    config.validate()?;
    let mut cells = Vec::new();
    for pid in &config.problems {
        let problem = load_problem(pid)?;
        for name in &config.algorithms {
            let alg = load_algorithm(name, config.precond, config.seed, &problem)?;
            for &tol in &config.tols {
                cells.push((pid.clone(), problem.clone(), name.clone(), alg, tol));
            }
        }
    }
    run_cells(&cells, config.jobs, |(pid, problem, name, alg, tol)| {
        let opts = SolveOptions::default()
            .with_abstol(*tol)
            .with_maxiters(config.maxiters);
        run(alg, problem, &opts)?;
        let mut times = Vec::with_capacity(config.reps);
        let mut last = None;
        for _ in 0..config.reps {
            let t = Instant::now();
            let r = run(alg, problem, &opts)?;
            times.push(t.elapsed().as_nanos() as u64);
            last = Some(r);
        }
        let r = last.expect("reps >= 1");
        Ok(WpRow {
            problem: pid.clone(),
            algorithm: name.clone(),
            abstol: *tol,
            runtime_ns: median(times),
            resid_inf: remeasure(problem, &r),
            retcode: r.retcode.to_string(),
            nf: r.stats.nf,
            njac: r.stats.njac,
            nlinsolve: r.stats.nlinsolve,
        })
    })
    .into_iter()
    .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Brusselator2d,
    GeneralizedRosenbrock,
}

impl std::str::FromStr for Family {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brusselator2d" | "brusselator_2d" => Ok(Family::Brusselator2d),
            "generalized_rosenbrock" => Ok(Family::GeneralizedRosenbrock),
            _ => Err(BenchError::UnknownProblem(s.to_string())),
        }
    }
}

impl Family {
    pub fn id(self, n: usize) -> String {
        match self {
            Family::Brusselator2d => format!("brusselator2d?N={n}"),
            Family::GeneralizedRosenbrock => format!("generalized_rosenbrock?N={n}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScalingConfig {
    pub family: Family,
    pub sizes: Vec<usize>,
    pub algorithms: Vec<String>,
    pub abstol: f64,
    pub maxiters: usize,
    pub timeout: Duration,
    pub precond: Option<PrecondChoice>,
    pub seed: u64,
    pub jobs: usize,
}

/// One row per (size, algorithm); a cell past its budget reports `Timeout`.
pub fn cmd_scaling(config: &ScalingConfig) -> Result<Vec<ScalingRow>> {
    if config.sizes.is_empty() || config.algorithms.is_empty() || config.jobs == 0 {
        return Err(BenchError::Config(
            "need sizes, algorithms and jobs >= 1".into(),
        ));
    }
    let mut cells = Vec::new();
    for &n in &config.sizes {
        let problem = load_problem(&config.family.id(n))?;
        for name in &config.algorithms {
            let alg = load_algorithm(name, config.precond, config.seed, &problem)?;
            cells.push((n, problem.clone(), name.clone(), alg));
        }
    }
    run_cells(&cells, config.jobs, |(n, problem, name, alg)| {
        let opts = SolveOptions::default()
            .with_abstol(config.abstol)
            .with_maxiters(config.maxiters)
            .with_deadline(Deadline::after(config.timeout));
        let t = Instant::now();
        let r = run(alg, problem, &opts)?;
        let runtime_ns = t.elapsed().as_nanos() as u64;
        Ok(ScalingRow {
            size: *n,
            algorithm: name.clone(),
            runtime_ns,
            resid_inf: remeasure(problem, &r),
            retcode: r.retcode.to_string(),
        })
    })
    .into_iter()
    .collect()
}

/// Writes rows under `header`, which must match the serialized field order.
pub fn write_csv<R: Serialize, W: Write>(header: &str, rows: &[R], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(header.split(','))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Result JSON for `solve`, with the residual re-measured.
#[derive(Debug, Serialize)]
pub struct SolveReport<'a> {
    pub problem: &'a str,
    pub algorithm: &'a str,
    pub resid_inf: f64,
    pub result: &'a SolveResult,
}

pub fn cmd_solve(
    problem_id: &str,
    algorithm: &str,
    opts: &SolveOptions,
    precond: Option<PrecondChoice>,
    seed: u64,
) -> Result<(SolveResult, f64)> {
    let problem = load_problem(problem_id)?;
    let alg = load_algorithm(algorithm, precond, seed, &problem)?;
    let r = run(&alg, &problem, opts)?;
    let resid = remeasure(&problem, &r);
    Ok((r, resid))
}
