use crate::{ResidualFn, Scalar};

/// `f₁ = 1 − x₁`, `fᵢ = 10(xᵢ − xᵢ₋₁²)`.
pub struct GeneralizedRosenbrock;

impl ResidualFn for GeneralizedRosenbrock {
    fn eval<T: Scalar>(&self, x: &[T], _: &[T], f: &mut [T]) {
        f[0] = -x[0] + 1.0;
        for i in 1..x.len() {
            f[i] = (x[i] - x[i - 1] * x[i - 1]) * 10.0;
        }
    }
}

/// Elementwise `u² − p`.
pub struct Quadratic;

impl ResidualFn for Quadratic {
    fn eval<T: Scalar>(&self, u: &[T], p: &[T], f: &mut [T]) {
        for i in 0..u.len() {
            f[i] = u[i] * u[i] - p[i];
        }
    }
}
