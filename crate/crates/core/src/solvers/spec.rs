use serde::{Deserialize, Serialize};

use crate::descent::{DampedSolvePath, DescentSpec};
use crate::globalize::{BacktrackingParams, TrustConfig};
use crate::linalg::{LinearSolverChoice, PrecondChoice};
use crate::quasinewton::{QnForm, QuasiNewtonConfig};
use crate::sparsity::DEFAULT_DETECT_SAMPLES;
use crate::{Error, Result};

/// Where a colored sparse Jacobian gets its pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PatternSource {
    /// The problem's known pattern, else detection with default settings.
    Auto,
    /// The problem's known pattern; missing patterns are an error.
    Known,
    Detect {
        n_samples: usize,
        seed: u64,
    },
}

impl PatternSource {
    pub const fn detect() -> Self {
        PatternSource::Detect {
            n_samples: DEFAULT_DETECT_SAMPLES,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum JacobianStrategy {
    Analytic,
    DualDense,
    FDDense,
    ColoredSparse(PatternSource),
    MatrixFree,
    QuasiNewton(QuasiNewtonConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Globalization {
    None,
    LineSearch(BacktrackingParams),
    TrustRegion(TrustConfig),
}

/// A Jacobian strategy, a descent direction and a globalization, plus the
/// linear solver for Newton-type systems.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSpec {
    pub jacobian: JacobianStrategy,
    pub descent: DescentSpec,
    pub globalization: Globalization,
    pub linear: LinearSolverChoice,
    /// With `MatrixFree`, also materialize a sparse Jacobian each iteration
    /// so a preconditioner can be built from it.
    pub concrete_jac: bool,
}

impl AlgorithmSpec {
    pub fn new(
        jacobian: JacobianStrategy,
        descent: DescentSpec,
        globalization: Globalization,
    ) -> Self {
        Self {
            jacobian,
            descent,
            globalization,
            linear: LinearSolverChoice::Auto,
            concrete_jac: false,
        }
    }

    pub fn with_linear(mut self, linear: LinearSolverChoice) -> Self {
        self.linear = linear;
        self
    }

    pub fn with_concrete_jac(mut self, concrete_jac: bool) -> Self {
        self.concrete_jac = concrete_jac;
        self
    }

    pub fn with_jacobian(mut self, jacobian: JacobianStrategy) -> Self {
        self.jacobian = jacobian;
        self
    }
}

/// A spec that passed [`assemble`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Solver {
    pub(crate) spec: AlgorithmSpec,
    pub(crate) damped_path: DampedSolvePath,
}

impl Solver {
    pub fn spec(&self) -> &AlgorithmSpec {
        &self.spec
    }
}

fn incompatible<T>(reason: impl Into<String>) -> Result<T> {
    Err(Error::IncompatibleSpec(reason.into()))
}

/// Checks that the blocks of `spec` fit together.
pub fn assemble(spec: AlgorithmSpec) -> Result<Solver> {
    use DescentSpec as D;
    use JacobianStrategy as J;

    if let LinearSolverChoice::Gmres {
        krylov_dim: Some(0),
        ..
    } = spec.linear
    {
        return incompatible("GMRES krylov_dim must be at least 1");
    }
    match spec.globalization {
        Globalization::None => {}
        Globalization::LineSearch(p) => p.validate()?,
        Globalization::TrustRegion(c) => c.validate()?,
    }
    let trust_region = matches!(spec.globalization, Globalization::TrustRegion(_));
    if trust_region != matches!(spec.descent, D::Dogleg) {
        return incompatible(
            "trust-region globalization and the dogleg descent require each other",
        );
    }
    let needs_plain_step = matches!(
        spec.descent,
        D::Halley | D::PotraPtak | D::DampedNewton(_) | D::PseudoTransient { .. }
    );
    if needs_plain_step && spec.globalization != Globalization::None {
        return incompatible(format!(
            "{} manages its own step and needs globalization None",
            spec.descent.name()
        ));
    }
    match spec.descent {
        D::DampedNewton(p) => p.validate()?,
        D::PseudoTransient { dt0 } if !(dt0 > 0.0) => {
            return incompatible(format!("pseudo-transient dt0 must be > 0, got {dt0}"));
        }
        _ => {}
    }

    match spec.jacobian {
        J::MatrixFree => {
            if !matches!(
                spec.linear,
                LinearSolverChoice::Gmres { .. } | LinearSolverChoice::Auto
            ) {
                return incompatible("a matrix-free Jacobian needs a Krylov linear solver (GMRES)");
            }
            if matches!(
                spec.descent,
                D::SteepestDescent | D::Dogleg | D::DampedNewton(_)
            ) {
                return incompatible(format!(
                    "{} needs a materialized Jacobian",
                    spec.descent.name()
                ));
            }
            if let LinearSolverChoice::Gmres {
                precond: Some(PrecondChoice::Ilu0),
                ..
            } = spec.linear
            {
                if !spec.concrete_jac {
                    return incompatible(
                        "ILU(0) on a matrix-free Jacobian needs concrete_jac = true",
                    );
                }
            }
        }
        J::QuasiNewton(cfg) => {
            if spec.descent != D::Newton {
                return incompatible("quasi-Newton strategies take the Newton descent");
            }
            if let QnForm::LowRank { memory: 0 } = cfg.form {
                return incompatible("limited-memory Broyden needs memory >= 1");
            }
        }
        _ => {}
    }

    let damped_path = match (spec.descent, spec.linear) {
        (D::DampedNewton(_), LinearSolverChoice::Qr) => DampedSolvePath::StackedQr,
        (D::DampedNewton(_), LinearSolverChoice::Cholesky | LinearSolverChoice::Auto) => {
            DampedSolvePath::NormalCholesky
        }
        (D::DampedNewton(_), other) => {
            return incompatible(format!(
                "damped Newton solves via Cholesky or QR, not {other:?}"
            ))
        }
        _ => DampedSolvePath::NormalCholesky,
    };
    Ok(Solver { spec, damped_path })
}
