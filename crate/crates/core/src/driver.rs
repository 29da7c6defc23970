use serde::{Deserialize, Serialize};

use crate::linalg::norm_inf;
use crate::{Deadline, Error, Result};

/// Termination settings shared by all solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Max-norm residual tolerance.
    pub abstol: f64,
    pub maxiters: usize,
    pub store_trace: bool,
    pub deadline: Deadline,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            abstol: 1e-8,
            maxiters: 1000,
            store_trace: false,
            deadline: Deadline::NONE,
        }
    }
}

impl SolveOptions {
    pub fn with_abstol(mut self, abstol: f64) -> Self {
        self.abstol = abstol;
        self
    }

    pub fn with_maxiters(mut self, maxiters: usize) -> Self {
        self.maxiters = maxiters;
        self
    }

    pub fn with_trace(mut self) -> Self {
        self.store_trace = true;
        self
    }

    pub fn with_deadline(mut self, deadline: Deadline) -> Self {
        self.deadline = deadline;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abstol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "abstol must be > 0, got {}",
                self.abstol
            )));
        }
        if self.maxiters == 0 {
            return Err(Error::InvalidArgument("maxiters must be >= 1".into()));
        }
        Ok(())
    }
}

/// How a solve terminated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RetCode {
    Success,
    MaxIters,
    LineSearchFailed,
    LinearSolveFailed,
    Stalled,
    NonFinite,
    Timeout,
}

impl RetCode {
    pub fn is_success(self) -> bool {
        self == RetCode::Success
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RetCode::Success => "Success",
            RetCode::MaxIters => "MaxIters",
            RetCode::LineSearchFailed => "LineSearchFailed",
            RetCode::LinearSolveFailed => "LinearSolveFailed",
            RetCode::Stalled => "Stalled",
            RetCode::NonFinite => "NonFinite",
            RetCode::Timeout => "Timeout",
        }
    }
}

impl std::fmt::Display for RetCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Work counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    /// Residual evaluations.
    pub nf: usize,
    /// Jacobian materializations.
    pub njac: usize,
    /// Directional-derivative evaluations.
    pub njvp: usize,
    pub nlinsolve: usize,
    /// Accepted outer iterations.
    pub nsteps: usize,
    /// Quasi-Newton reinitializations after the first.
    #[serde(default)]
    pub nreinit: usize,
}

impl Stats {
    pub fn merge(&mut self, other: &Stats) {
        self.nf += other.nf;
        self.njac += other.njac;
        self.njvp += other.njvp;
        self.nlinsolve += other.nlinsolve;
        self.nsteps += other.nsteps;
        self.nreinit += other.nreinit;
    }
}

/// Per-stage record of a poly-algorithm run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub name: String,
    pub retcode: RetCode,
    pub resid_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub u_star: Vec<f64>,
    /// Max-norm of the final residual.
    pub resid_norm: f64,
    pub retcode: RetCode,
    pub stats: Stats,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<(usize, f64)>>,
    pub wall_time_ns: u64,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub stages: Vec<StageRecord>,
}

impl SolveResult {
    pub fn is_success(&self) -> bool {
        self.retcode.is_success()
    }

    /// Equality of everything except wall time.
    pub fn same_outcome(&self, other: &SolveResult) -> bool {
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        bits(&self.u_star) == bits(&other.u_star)
            && self.resid_norm.to_bits() == other.resid_norm.to_bits()
            && self.retcode == other.retcode
            && self.stats == other.stats
            && self.trace == other.trace
            && self.stages == other.stages
    }
}

/// `true` iff `‖resid‖∞ ≤ abstol`; any NaN makes it `false`.
pub fn check_convergence(resid: &[f64], abstol: f64) -> bool {
    norm_inf(resid) <= abstol
}
