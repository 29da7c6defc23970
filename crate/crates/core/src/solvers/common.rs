use std::cell::Cell;
use std::time::Instant;

use crate::autodiff::{dense_jacobian, jvp, DiffMode};
use crate::descent::JacobianSolve;
use crate::linalg::{
    default_krylov_dim, gmres, norm2, norm_inf, select_linear_solver, DenseFactor, Ilu0,
    LinearOperator, LinearSolverChoice, Matrix, OperatorTraits, PrecondChoice, Preconditioner,
    SelectionTraits, DEFAULT_KRYLOV_RELTOL,
};
use crate::problem::{Problem, Residual};
use crate::sparsity::{
    color_greedy, compressed_jacobian, detect_pattern_approx, ColorAxis, Coloring, CscMatrix,
    SparsityPattern, DEFAULT_DETECT_SAMPLES,
};
use crate::{check_convergence, Error, Result, RetCode, SolveOptions, SolveResult, Stats};

use super::spec::{JacobianStrategy, PatternSource};

/// Bookkeeping shared by every solver loop.
pub(crate) struct Run<'a> {
    pub problem: &'a Problem,
    pub options: &'a SolveOptions,
    pub stats: Stats,
    trace: Option<Vec<(usize, f64)>>,
    start: Instant,
}

impl<'a> Run<'a> {
    pub fn new(problem: &'a Problem, options: &'a SolveOptions) -> Self {
        Self {
            problem,
            options,
            stats: Stats::default(),
            trace: options.store_trace.then(Vec::new),
            start: Instant::now(),
        }
    }

    pub fn f(&self) -> &'a dyn Residual {
        self.problem.residual_fn()
    }

    pub fn p(&self) -> &'a [f64] {
        &self.problem.params
    }

    pub fn eval(&mut self, u: &[f64]) -> Vec<f64> {
        self.stats.nf += 1;
        self.problem.eval(u)
    }

    pub fn converged(&self, fu: &[f64]) -> bool {
        check_convergence(fu, self.options.abstol)
    }

    pub fn record(&mut self, k: usize, fu: &[f64]) {
        if let Some(t) = &mut self.trace {
            t.push((k, norm_inf(fu)));
        }
    }

    pub fn finish(self, u: Vec<f64>, fu: &[f64], retcode: RetCode) -> SolveResult {
        let resid_norm = norm_inf(fu);
        let retcode = if check_convergence(fu, self.options.abstol) {
            RetCode::Success
        } else if retcode == RetCode::Success {
            RetCode::MaxIters
        } else {
            retcode
        };
        SolveResult {
            u_star: u,
            resid_norm,
            retcode,
            stats: self.stats,
            trace: self.trace,
            wall_time_ns: self.start.elapsed().as_nanos() as u64,
            stages: Vec::new(),
        }
    }
}

/// Maps an operation error inside a solve to a return code; configuration
/// errors stay errors.
pub(crate) fn retcode_for(err: Error) -> Result<RetCode> {
    match err {
        Error::Timeout => Ok(RetCode::Timeout),
        Error::NonFinite(_) => Ok(RetCode::NonFinite),
        Error::LineSearchFailed(_) => Ok(RetCode::LineSearchFailed),
        Error::Singular { .. }
        | Error::RankDeficient { .. }
        | Error::NotPositiveDefinite { .. }
        | Error::ZeroPivot { .. }
        | Error::Breakdown { .. }
        | Error::DecompressionConflict { .. } => Ok(RetCode::LinearSolveFailed),
        other => Err(other),
    }
}

pub(crate) fn step(u: &[f64], alpha: f64, du: &[f64]) -> Vec<f64> {
    u.iter().zip(du).map(|(x, d)| x + alpha * d).collect()
}

pub(crate) fn finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

#[derive(Debug, Clone)]
pub(crate) enum Materialized {
    Dense(Matrix),
    Sparse(CscMatrix),
}

impl Materialized {
    pub fn to_dense(&self) -> Matrix {
        match self {
            Materialized::Dense(m) => m.clone(),
            Materialized::Sparse(s) => s.to_dense(),
        }
    }

    pub fn operator(&self) -> &dyn LinearOperator {
        match self {
            Materialized::Dense(m) => m,
            Materialized::Sparse(s) => s,
        }
    }
}

/// Produces Jacobians for one strategy; sparse strategies color once.
pub(crate) struct JacobianEngine {
    strategy: JacobianStrategy,
    mode: DiffMode,
    sparse: Option<(SparsityPattern, Coloring)>,
}

fn resolve_pattern(
    problem: &Problem,
    source: PatternSource,
    stats: &mut Stats,
) -> Result<SparsityPattern> {
    let detect = |n_samples, seed, stats: &mut Stats| {
        stats.njac += n_samples;
        detect_pattern_approx(problem, n_samples, seed)
    };
    match (source, problem.known_pattern()) {
        (PatternSource::Auto | PatternSource::Known, Some(p)) => {
            if p.n_rows() != problem.dim() || p.n_cols() != problem.dim() {
                return Err(Error::DimensionMismatch {
                    expected: problem.dim(),
                    found: p.n_cols(),
                });
            }
            Ok(p.clone())
        }
        (PatternSource::Known, None) => Err(Error::IncompatibleSpec(
            "the problem carries no known sparsity pattern".into(),
        )),
        (PatternSource::Auto, None) => detect(DEFAULT_DETECT_SAMPLES, 0, stats),
        (PatternSource::Detect { n_samples, seed }, _) => detect(n_samples, seed, stats),
    }
}

impl JacobianEngine {
    /// `strategy` must materialize (`MatrixFree` only when a preconditioner
    /// pattern is wanted, in which case it behaves as `ColoredSparse(Auto)`).
    pub fn new(problem: &Problem, strategy: JacobianStrategy, stats: &mut Stats) -> Result<Self> {
        let dual = problem.residual_fn().supports_dual();
        let mode = if dual {
            DiffMode::DualForward
        } else {
            DiffMode::CENTRAL_FD
        };
        let sparse = match strategy {
            JacobianStrategy::ColoredSparse(source) => {
                Some(resolve_pattern(problem, source, stats)?)
            }
            JacobianStrategy::MatrixFree => {
                Some(resolve_pattern(problem, PatternSource::Auto, stats)?)
            }
            JacobianStrategy::Analytic if problem.analytic_jacobian().is_none() => {
                return Err(Error::IncompatibleSpec(
                    "the problem has no analytic Jacobian".into(),
                ))
            }
            _ => None,
        }
        .map(|p| {
            let c = color_greedy(&p, ColorAxis::Columns);
            (p, c)
        });
        let mode = match strategy {
            JacobianStrategy::FDDense => DiffMode::FORWARD_FD,
            _ => mode,
        };
        Ok(Self {
            strategy,
            mode,
            sparse,
        })
    }

    pub fn dense_only(problem: &Problem, stats: &mut Stats) -> Result<Self> {
        let strategy = if problem.analytic_jacobian().is_some() {
            JacobianStrategy::Analytic
        } else {
            JacobianStrategy::DualDense
        };
        Self::new(problem, strategy, stats)
    }

    pub fn materialize(&self, run: &mut Run<'_>, u: &[f64]) -> Result<Materialized> {
        run.options.deadline.check()?;
        run.stats.njac += 1;
        let p = run.p();
        let f = run.f();
        if let Some((pattern, coloring)) = &self.sparse {
            return compressed_jacobian(f, u, p, pattern, coloring, self.mode)
                .map(Materialized::Sparse);
        }
        let j = match self.strategy {
            JacobianStrategy::Analytic => {
                let j = (run
                    .problem
                    .analytic_jacobian()
                    .expect("checked at construction"))(u, p);
                if j.nrows() != u.len() || j.ncols() != u.len() {
                    return Err(Error::DimensionMismatch {
                        expected: u.len(),
                        found: j.ncols(),
                    });
                }
                if !j.is_finite() {
                    return Err(Error::NonFinite("analytic Jacobian"));
                }
                j
            }
            _ => dense_jacobian(f, u, p, self.mode)?,
        };
        Ok(Materialized::Dense(j))
    }
}

/// `v ↦ J(u)·v + shift·v` through directional derivatives.
pub(crate) struct JvpOperator<'a> {
    f: &'a dyn Residual,
    u: &'a [f64],
    p: &'a [f64],
    shift: f64,
    mode: DiffMode,
    pub count: Cell<usize>,
}

impl<'a> JvpOperator<'a> {
    pub fn new(f: &'a dyn Residual, u: &'a [f64], p: &'a [f64], shift: f64) -> Self {
        let mode = if f.supports_dual() {
            DiffMode::DualForward
        } else {
            DiffMode::FORWARD_FD
        };
        Self {
            f,
            u,
            p,
            shift,
            mode,
            count: Cell::new(0),
        }
    }
}

impl LinearOperator for JvpOperator<'_> {
    fn dim(&self) -> usize {
        self.u.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.count.set(self.count.get() + 1);
        match jvp(self.f, self.u, self.p, x, self.mode) {
            Ok(jv) => {
                for ((yi, j), xi) in y.iter_mut().zip(jv).zip(x) {
                    *yi = j + self.shift * xi;
                }
            }
            Err(_) => y.fill(f64::NAN),
        }
    }

    fn traits(&self) -> OperatorTraits {
        OperatorTraits::default()
    }
}

/// Dense matrix plus `shift·I`, without copying when `shift = 0`.
enum Owned<'a> {
    Dense(std::borrow::Cow<'a, Matrix>),
    Sparse(std::borrow::Cow<'a, CscMatrix>),
    Free(JvpOperator<'a>),
}

/// A Jacobian-like operator together with the machinery to solve with it.
pub(crate) struct LinearSystem<'a> {
    op: Owned<'a>,
    factor: Option<DenseFactor>,
    precond: Option<Ilu0>,
    krylov_dim: usize,
    pub solves: Cell<usize>,
}

impl<'a> LinearSystem<'a> {
    /// Builds the solver for `J + shift·I`. `jac` is `None` for matrix-free
    /// operators, in which case `precond_source` may carry a materialized
    /// Jacobian for the preconditioner.
    pub fn new(
        run: &Run<'a>,
        jac: Option<&'a Materialized>,
        precond_source: Option<&CscMatrix>,
        u: &'a [f64],
        shift: f64,
        choice: LinearSolverChoice,
    ) -> Result<Self> {
        let n = u.len();
        let deadline = run.options.deadline;
        let (krylov_dim, precond_choice) = match choice {
            LinearSolverChoice::Gmres {
                krylov_dim,
                precond,
            } => (krylov_dim.unwrap_or_else(|| default_krylov_dim(n)), precond),
            _ => (default_krylov_dim(n), None),
        };
        let shifted_dense = |m: &'a Matrix| -> std::borrow::Cow<'a, Matrix> {
            if shift == 0.0 {
                std::borrow::Cow::Borrowed(m)
            } else {
                let mut m = m.clone();
                for i in 0..n {
                    m[(i, i)] += shift;
                }
                std::borrow::Cow::Owned(m)
            }
        };
        let build_ilu = |a: &CscMatrix| -> Option<Ilu0> {
            let mut a = a.clone();
            if shift != 0.0 {
                a.shift_diagonal(shift);
            }
            Ilu0::new(&a).ok()
        };
        let mut sys = Self {
            op: Owned::Free(JvpOperator::new(run.f(), u, run.p(), shift)),
            factor: None,
            precond: None,
            krylov_dim,
            solves: Cell::new(0),
        };
        match jac {
            None => {
                if precond_choice == Some(PrecondChoice::Ilu0) {
                    sys.precond = precond_source.and_then(build_ilu);
                }
            }
            Some(Materialized::Dense(m)) => {
                let m = shifted_dense(m);
                match choice {
                    LinearSolverChoice::Gmres { .. } => {
                        if precond_choice == Some(PrecondChoice::Ilu0) {
                            sys.precond = build_ilu(&CscMatrix::from_dense(&m));
                        }
                    }
                    other => sys.factor = Some(DenseFactor::new(&m, other, deadline)?),
                }
                sys.op = Owned::Dense(m);
            }
            Some(Materialized::Sparse(s)) => {
                let mut s = std::borrow::Cow::Borrowed(s);
                if shift != 0.0 {
                    s.to_mut().shift_diagonal(shift);
                }
                let resolved = match choice {
                    LinearSolverChoice::Auto => select_linear_solver(&SelectionTraits {
                        is_sparse: true,
                        density: s.density(),
                        ..SelectionTraits::dense(n)
                    }),
                    other => other,
                };
                match resolved {
                    LinearSolverChoice::Gmres {
                        krylov_dim,
                        precond,
                    } => {
                        if let Some(k) = krylov_dim {
                            sys.krylov_dim = k;
                        }
                        if precond == Some(PrecondChoice::Ilu0) {
                            sys.precond = Ilu0::new(&s).ok();
                        }
                    }
                    LinearSolverChoice::Lu if choice == LinearSolverChoice::Auto => {
                        sys.factor = Some(DenseFactor::auto(&s.to_dense(), deadline)?);
                    }
                    other => sys.factor = Some(DenseFactor::new(&s.to_dense(), other, deadline)?),
                }
                sys.op = Owned::Sparse(s);
            }
        }
        Ok(sys)
    }

    pub fn operator(&self) -> &dyn LinearOperator {
        match &self.op {
            Owned::Dense(m) => m.as_ref(),
            Owned::Sparse(s) => s.as_ref(),
            Owned::Free(f) => f,
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; x.len()];
        self.operator().apply(x, &mut y);
        y
    }

    /// Moves solve and JVP counts into `stats`.
    pub fn harvest(&self, stats: &mut Stats) {
        stats.nlinsolve += self.solves.replace(0);
        if let Owned::Free(f) = &self.op {
            stats.njvp += f.count.replace(0);
        }
    }
}

impl JacobianSolve for LinearSystem<'_> {
    fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        self.solves.set(self.solves.get() + 1);
        if let Some(f) = &self.factor {
            return JacobianSolve::solve(f, rhs);
        }
        let precond = self.precond.as_ref().map(|p| p as &dyn Preconditioner);
        let out = gmres(
            self.operator(),
            rhs,
            self.krylov_dim,
            precond,
            DEFAULT_KRYLOV_RELTOL,
        )?;
        if finite(&out.x) {
            Ok(out.x)
        } else {
            Err(Error::NonFinite("GMRES iterate"))
        }
    }
}

pub(crate) fn merit(fu: &[f64]) -> f64 {
    let n = norm2(fu);
    0.5 * n * n
}
