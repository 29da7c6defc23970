use super::dense::Matrix;
use crate::sparsity::CscMatrix;

/// Structural facts about an operator used for solver selection.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OperatorTraits {
    pub is_materialized: bool,
    pub is_symmetric: bool,
    pub is_sparse: bool,
}

/// A square linear map `v ↦ A·v`.
pub trait LinearOperator {
    fn dim(&self) -> usize;

    fn apply(&self, x: &[f64], y: &mut [f64]);

    /// `y = Aᵀ·x`; returns `false` when the transpose is unavailable.
    fn apply_transpose(&self, _x: &[f64], _y: &mut [f64]) -> bool {
        false
    }

    fn traits(&self) -> OperatorTraits;
}

impl LinearOperator for Matrix {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(&self.matvec(x));
    }

    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) -> bool {
        y.copy_from_slice(&self.tr_matvec(x));
        true
    }

    fn traits(&self) -> OperatorTraits {
        OperatorTraits {
            is_materialized: true,
            is_symmetric: self.is_symmetric(0.0),
            is_sparse: false,
        }
    }
}

impl LinearOperator for CscMatrix {
    fn dim(&self) -> usize {
        self.n_rows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec_into(x, y);
    }

    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) -> bool {
        y.copy_from_slice(&self.tr_matvec(x));
        true
    }

    fn traits(&self) -> OperatorTraits {
        OperatorTraits {
            is_materialized: true,
            is_symmetric: false,
            is_sparse: true,
        }
    }
}

/// Operator backed by a closure, e.g. a Jacobian-vector product.
pub struct FnOperator<F> {
    n: usize,
    f: F,
}

impl<F: Fn(&[f64], &mut [f64])> FnOperator<F> {
    pub fn new(n: usize, f: F) -> Self {
        Self { n, f }
    }
}

impl<F: Fn(&[f64], &mut [f64])> LinearOperator for FnOperator<F> {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        (self.f)(x, y)
    }

    fn traits(&self) -> OperatorTraits {
        OperatorTraits::default()
    }
}

/// Approximate inverse `M⁻¹` applied as a left preconditioner.
pub trait Preconditioner {
    fn apply_inverse(&self, x: &[f64]) -> Vec<f64>;
}

/// Checks `A(αx+βy) = αAx+βAy` on pseudo-random probes.
pub fn is_linear(op: &dyn LinearOperator, probes: usize, tol: f64) -> bool {
    use rand::{Rng, SeedableRng};
    let n = op.dim();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x11ea);
    (0..probes).all(|_| {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (a, b) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let comb: Vec<f64> = x.iter().zip(&y).map(|(p, q)| a * p + b * q).collect();
        let (mut ax, mut ay, mut ac) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        op.apply(&x, &mut ax);
        op.apply(&y, &mut ay);
        op.apply(&comb, &mut ac);
        let scale = 1.0 + ac.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        ac.iter()
            .zip(ax.iter().zip(&ay))
            .all(|(c, (p, q))| (c - (a * p + b * q)).abs() <= tol * scale)
    })
}
