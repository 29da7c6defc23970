//! Named combinations of the building blocks.

use crate::descent::{DampingParams, DescentSpec};
use crate::globalize::{BacktrackingParams, RadiusScheme, TrustConfig};
use crate::linalg::{LinearSolverChoice, PrecondChoice};
use crate::quasinewton::{InitRule, QuasiNewtonConfig, DEFAULT_MEMORY};

use super::spec::{AlgorithmSpec, Globalization, JacobianStrategy, PatternSource};

pub const DEFAULT_DT0: f64 = 1e-3;

fn dual(descent: DescentSpec, globalization: Globalization) -> AlgorithmSpec {
    AlgorithmSpec::new(JacobianStrategy::DualDense, descent, globalization)
}

/// Undamped Newton with dense dual Jacobians and LU.
pub fn newton_raphson() -> AlgorithmSpec {
    dual(DescentSpec::Newton, Globalization::None).with_linear(LinearSolverChoice::Lu)
}

pub fn newton_backtracking() -> AlgorithmSpec {
    dual(
        DescentSpec::Newton,
        Globalization::LineSearch(BacktrackingParams::default()),
    )
}

pub fn trust_region(scheme: RadiusScheme) -> AlgorithmSpec {
    dual(
        DescentSpec::Dogleg,
        Globalization::TrustRegion(TrustConfig::new(scheme)),
    )
}

pub fn levenberg_marquardt(geodesic: bool) -> AlgorithmSpec {
    let params = if geodesic {
        DampingParams::geodesic()
    } else {
        DampingParams::default()
    };
    dual(DescentSpec::DampedNewton(params), Globalization::None).with_linear(LinearSolverChoice::Qr)
}

pub fn pseudo_transient(dt0: f64) -> AlgorithmSpec {
    dual(DescentSpec::PseudoTransient { dt0 }, Globalization::None)
}

pub fn halley() -> AlgorithmSpec {
    dual(DescentSpec::Halley, Globalization::None)
}

pub fn potra_ptak() -> AlgorithmSpec {
    dual(DescentSpec::PotraPtak, Globalization::None)
}

pub fn steepest_descent() -> AlgorithmSpec {
    dual(
        DescentSpec::SteepestDescent,
        Globalization::LineSearch(BacktrackingParams::default()),
    )
}

pub fn newton_sparse() -> AlgorithmSpec {
    newton_raphson()
        .with_jacobian(JacobianStrategy::ColoredSparse(PatternSource::Auto))
        .with_linear(LinearSolverChoice::Auto)
}

pub fn newton_dense() -> AlgorithmSpec {
    newton_raphson()
}

/// Jacobian-free Newton-Krylov; with a preconditioner the Jacobian is also
/// materialized sparsely to build it.
pub fn newton_krylov(precond: Option<PrecondChoice>) -> AlgorithmSpec {
    AlgorithmSpec::new(
        JacobianStrategy::MatrixFree,
        DescentSpec::Newton,
        Globalization::None,
    )
    .with_linear(LinearSolverChoice::Gmres {
        krylov_dim: None,
        precond,
    })
    .with_concrete_jac(precond.is_some())
}

fn quasi(config: QuasiNewtonConfig) -> AlgorithmSpec {
    AlgorithmSpec::new(
        JacobianStrategy::QuasiNewton(config),
        DescentSpec::Newton,
        Globalization::None,
    )
}

pub fn broyden() -> AlgorithmSpec {
    quasi(QuasiNewtonConfig::broyden(InitRule::Identity))
}

/// Broyden seeded and reseeded with the true Jacobian.
pub fn modified_broyden() -> AlgorithmSpec {
    quasi(QuasiNewtonConfig::broyden(InitRule::TrueJacobian))
}

pub fn limited_memory_broyden() -> AlgorithmSpec {
    quasi(QuasiNewtonConfig::limited_memory_broyden(DEFAULT_MEMORY))
}

pub fn klement() -> AlgorithmSpec {
    quasi(QuasiNewtonConfig::klement())
}

/// Named algorithm, including the poly-algorithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Algorithm {
    Composed(AlgorithmSpec),
    PolyAlgorithm,
}

pub const ALGORITHM_NAMES: &[&str] = &[
    "newton-raphson",
    "newton-backtracking",
    "trust-region",
    "trust-region-nw",
    "levenberg-marquardt",
    "lm-no-geodesic",
    "pseudo-transient",
    "halley",
    "potra-ptak",
    "steepest-descent",
    "newton-dense",
    "newton-sparse",
    "newton-krylov",
    "broyden",
    "modified-broyden",
    "limited-memory-broyden",
    "klement",
    "polyalgorithm",
];

/// Looks up a name from [`ALGORITHM_NAMES`]. `precond` only affects
/// `newton-krylov`.
pub fn algorithm_by_name(name: &str, precond: Option<PrecondChoice>) -> Option<Algorithm> {
    let spec = match name {
        "newton-raphson" => newton_raphson(),
        "newton-backtracking" => newton_backtracking(),
        "trust-region" => trust_region(RadiusScheme::Simple),
        "trust-region-nw" => trust_region(RadiusScheme::NocedalWright),
        "levenberg-marquardt" => levenberg_marquardt(true),
        "lm-no-geodesic" => levenberg_marquardt(false),
        "pseudo-transient" => pseudo_transient(DEFAULT_DT0),
        "halley" => halley(),
        "potra-ptak" => potra_ptak(),
        "steepest-descent" => steepest_descent(),
        "newton-dense" => newton_dense(),
        "newton-sparse" => newton_sparse(),
        "newton-krylov" => newton_krylov(precond),
        "broyden" => broyden(),
        "modified-broyden" => modified_broyden(),
        "limited-memory-broyden" => limited_memory_broyden(),
        "klement" => klement(),
        "polyalgorithm" => return Some(Algorithm::PolyAlgorithm),
        _ => return None,
    };
    Some(Algorithm::Composed(spec))
}
