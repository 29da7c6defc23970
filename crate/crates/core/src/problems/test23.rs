//! The classical 23-member collection of small nonlinear systems.

use std::f64::consts::PI;

use crate::{ResidualFn, Scalar};

fn c<T: Scalar>(v: f64) -> T {
    T::from_f64(v)
}

pub struct Rosenbrock;

impl ResidualFn for Rosenbrock {
    fn eval<T: Scalar>(&self, x: &[T], _: &[T], f: &mut [T]) {
        f[0] = -x[0] + 1.0;
        f[1] = (x[1] - x[0] * x[0]) * 10.0;
    }
}

pub struct PowellSingular;

impl ResidualFn for PowellSingular {
    fn eval<T: Scalar>(&self, x: &[T], _: &[T], f: &mut [T]) {
        f[0] = x[0] + x[1] * 10.0;
        f[1] = (x[2] - x[3]) * 5f64.sqrt();
        f[2] = (x[1] - x[2] * 2.0).powi(2);
        f[3] = (x[0] - x[3]).powi(2) * 10f64.sqrt();
    }
}

pub struct PowellBadlyScaled;

impl ResidualFn for PowellBadlyScaled {
    fn eval<T: Scalar>(&self, x: &[T], _: &[T], f: &mut [T]) {
        f[0] = x[0] * x[1] * 1e4 - 1.0;
        f[1] = (-x[0]).exp() + (-x[1]).exp() - 1.0001;
    }
}

pub struct Wood;

impl ResidualFn for Wood {
    fn eval<T: Scalar>(&self, x: &[T], _: &[T], f: &mut [T]) {
        let t1 = x[1] - x[0] * x[0];
        let t2 = x[3] - x[2] * x[2];
        f[0] = x[0] * t1 * -200.0 - (-x[0] + 1.0);
        f[1] = t1 * 200.0 + (x[1] - 1.0) * 20.2 + (x[3] - 1.0) * 19.8;
        f[2] = x[2] * t2 * -180.0 - (-x[2] + 1.0);
        f[3] = t2 * 180.0 + (x[3] - 1.0) * 20.2 + (x[1] - 1.0) * 19.8;
    }
}

pub struct HelicalValley;

impl ResidualFn for HelicalValley {
    fn eval<T: Scalar>(&self, x: &[T], _: &[T], f: &mut [T]) {
        let theta: T = if x[0].value() == 0.0 {
            c(if x[1].value() < 0.0 { -0.25 } else { 0.25 })
        } else {
            let t = (x[1] / x[0]).atan() / (2.0 * PI);
            if x[0].value() < 0.0 {
                t + 0.5
            } else {
                t
            }
        };
        let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
        f[0] = (x[2] - theta * 10.0) * 10.0;
        f[1] = (r - 1.0) * 10.0;
        f[2] = x[2];
    }
}

/// Gradient form of Watson's least-squares problem (29 sample points).
pub struct Watson;

impl ResidualFn for Watson {
    fn eval<T: Scalar>(&self, x: &[T], _: &[T], f: &mut [T]) {
        let n = x.len();
        f.iter_mut().for_each(|v| *v = T::zero());
        for i in 1..=29 {
            let ti = i as f64 / 29.0;
            let mut sum1 = T::zero();
            let mut temp = 1.0;
            for (j, xj) in x.iter().enumerate().skip(1) {
                sum1 += *xj * (j as f64 * temp);
                temp *= ti;
            }
            let mut sum2 = T::zero();
            let mut temp = 1.0;
            for xj in x {
                sum2 += *xj * temp;
                temp *= ti;
            }
            let temp1 = sum1 - sum2 * sum2 - 1.0;
            let temp2 = sum2 * (2.0 * ti);
            let mut temp = 1.0 / ti;
            for (k, fk) in f.iter_mut().enumerate().take(n) {
                *fk += (-temp2 + k as f64) * temp1 * temp;
                temp *= ti;
            }
        }
        let temp = x[1] - x[0] * x[0] - 1.0;
        f[0] += x[0] * (-temp * 2.0 + 1.0);
        f[1] += temp;
    }
}

pub struct Chebyquad;

impl ResidualFn for Chebyquad {
    fn eval<T: Scalar>(&self, x: &[T], _: &[T], f: &mut [T]) {
        let n = x.len();
        f.iter_mut().for_each(|v| *v = T::zero());
        for xj in x {
            let mut t1 = T::one();
            let mut t2 = *xj * 2.0 - 1.0;
            let t = t2 * 2.0;
            for fi in f.iter_mut() {
                *fi += t2;
                let ti = t * t2 - t1;
                t1 = t2;
                t2 = ti;
            }
        }
        for (k, fk) in f.iter_mut().enumerate() {
            *fk = *fk / n as f64;
            let k1 = (k + 1) as f64;
            if (k + 1) % 2 == 0 {
                *fk = *fk + 1.0 / (k1 * k1 - 1.0);
            }
        }
    }
}

pub struct BrownAlmostLinear;

impl ResidualFn for BrownAlmostLinear {
    fn eval<T: Scalar>(&self, x: &[T], _: &[T], f: &mut [T]) {
        let n = x.len();
        let sum = x.iter().fold(T::zero(), |a, b| a + *b);
        for k in 0..n - 1 {
            f[k] = x[k] + sum - (n + 1) as f64;
        }
        f[n - 1] = x.iter().fold(T::one(), |a, b| a * *b) - 1.0;
    }
}

pub struct DiscreteBoundaryValue;

impl ResidualFn for DiscreteBoundaryValue {
    fn eval<T: Scalar>(&self, x: &[T], _: &[T], f: &mut [T]) {
        let n = x.len();
        let h = 1.0 / (n + 1) as f64;
        for k in 0..n {
            let t = (k + 1) as f64 * h;
            let left = if k > 0 { x[k - 1] } else { T::zero() };
            let right = if k + 1 < n { x[k + 1] } else { T::zero() };
            f[k] = x[k] * 2.0 - left - right + (x[k] + t + 1.0).powi(3) * (h * h / 2.0);
        }
    }
}

pub struct DiscreteIntegral;

impl ResidualFn for DiscreteIntegral {
    fn eval<T: Scalar>(&self, x: &[T], _: &[T], f: &mut [T]) {
        let n = x.len();
        let h = 1.0 / (n + 1) as f64;
        let t = |j: usize| (j + 1) as f64 * h;
        let cube: Vec<T> = (0..n).map(|j| (x[j] + t(j) + 1.0).powi(3)).collect();
        for k in 0..n {
            let tk = t(k);
            let mut lower = T::zero();
            for j in 0..=k {
                lower += cube[j] * t(j);
            }
            let mut upper = T::zero();
            for j in k + 1..n {
                upper += cube[j] * (1.0 - t(j));
            }
            f[k] = x[k] + (lower * (1.0 - tk) + upper * tk) * (h / 2.0);
        }
    }
}

pub struct Trigonometric;

impl ResidualFn for Trigonometric {
    fn eval<T: Scalar>(&self, x: &[T], _: &[T], f: &mut [T]) {
        let n = x.len();
        let sum = x.iter().fold(T::zero(), |a, b| a + b.cos());
        for k in 0..n {
            let kk = (k + 1) as f64;
            f[k] = -sum - x[k].sin() + (-x[k].cos() + 1.0) * kk + n as f64;
        }
    }
}

pub struct VariablyDimensioned;

impl ResidualFn for VariablyDimensioned {
    fn eval<T: Scalar>(&self, x: &[T], _: &[T], f: &mut [T]) {
        let s = x
            .iter()
            .enumerate()
            .fold(T::zero(), |a, (j, xj)| a + (*xj - 1.0) * (j + 1) as f64);
        let g = s * (s * s * 2.0 + 1.0);
        for (k, fk) in f.iter_mut().enumerate() {
            *fk = x[k] - 1.0 + g * (k + 1) as f64;
        }
    }
}

pub struct BroydenTridiagonal;

impl ResidualFn for BroydenTridiagonal {
    fn eval<T: Scalar>(&self, x: &[T], _: &[T], f: &mut [T]) {
        let n = x.len();
        for k in 0..n {
            let left = if k > 0 { x[k - 1] } else { T::zero() };
            let right = if k + 1 < n { x[k + 1] } else { T::zero() };
            f[k] = (-x[k] * 2.0 + 3.0) * x[k] - left - right * 2.0 + 1.0;
        }
    }
}

pub struct BroydenBanded;

impl ResidualFn for BroydenBanded {
    fn eval<T: Scalar>(&self, x: &[T], _: &[T], f: &mut [T]) {
        let n = x.len();
        let (ml, mu) = (5, 1);
        for k in 0..n {
            let mut band = T::zero();
            for j in k.saturating_sub(ml)..(k + mu + 1).min(n) {
                if j != k {
                    band += x[j] * (x[j] + 1.0);
                }
            }
            f[k] = x[k] * (x[k] * x[k] * 5.0 + 2.0) + 1.0 - band;
        }
    }
}

/// `X·X − A` for a square `A` stored row-major in the parameters.
pub struct MatrixSquareRoot {
    pub dim: usize,
}

impl ResidualFn for MatrixSquareRoot {
    fn eval<T: Scalar>(&self, x: &[T], a: &[T], f: &mut [T]) {
        let m = self.dim;
        for i in 0..m {
            for j in 0..m {
                let mut s = -a[i * m + j];
                for k in 0..m {
                    s += x[i * m + k] * x[k * m + j];
                }
                f[i * m + j] = s;
            }
        }
    }
}

pub struct DennisSchnabel;

impl ResidualFn for DennisSchnabel {
    fn eval<T: Scalar>(&self, x: &[T], _: &[T], f: &mut [T]) {
        f[0] = x[0] + x[1] - 3.0;
        f[1] = x[0] * x[0] + x[1] * x[1] - 9.0;
    }
}

pub struct Sample18;

impl ResidualFn for Sample18 {
    fn eval<T: Scalar>(&self, x: &[T], _: &[T], f: &mut [T]) {
        f[0] = if x[0].value() == 0.0 {
            T::zero()
        } else {
            x[1] * x[1] * (-(-x[0] * x[0]).exp() + 1.0) / x[0]
        };
        f[1] = if x[1].value() == 0.0 {
            T::zero()
        } else {
            x[0] * (-(-x[1] * x[1]).exp() + 1.0) / x[1]
        };
    }
}

pub struct Sample19;

impl ResidualFn for Sample19 {
    fn eval<T: Scalar>(&self, x: &[T], _: &[T], f: &mut [T]) {
        let r2 = x[0] * x[0] + x[1] * x[1];
        f[0] = x[0] * r2;
        f[1] = x[1] * r2;
    }
}

pub struct ScalarCubic;

impl ResidualFn for ScalarCubic {
    fn eval<T: Scalar>(&self, x: &[T], _: &[T], f: &mut [T]) {
        f[0] = x[0] * (x[0] - 5.0).powi(2);
    }
}

pub struct FreudensteinRoth;

impl ResidualFn for FreudensteinRoth {
    fn eval<T: Scalar>(&self, x: &[T], _: &[T], f: &mut [T]) {
        f[0] = x[0] - 13.0 + ((-x[1] + 5.0) * x[1] - 2.0) * x[1];
        f[1] = x[0] - 29.0 + ((x[1] + 1.0) * x[1] - 14.0) * x[1];
    }
}

pub struct Boggs;

impl ResidualFn for Boggs {
    fn eval<T: Scalar>(&self, x: &[T], _: &[T], f: &mut [T]) {
        f[0] = x[0] * x[0] - x[1] + 1.0;
        f[1] = x[0] - (x[1] * (PI / 2.0)).cos();
    }
}

/// Discretized Chandrasekhar H-equation with albedo `c`.
pub struct Chandrasekhar {
    pub c: f64,
}

impl ResidualFn for Chandrasekhar {
    fn eval<T: Scalar>(&self, x: &[T], _: &[T], f: &mut [T]) {
        let n = x.len();
        let mu = |i: usize| (i as f64 + 0.5) / n as f64;
        for i in 0..n {
            let mut s = T::zero();
            for (j, xj) in x.iter().enumerate() {
                s += *xj * (mu(i) / (mu(i) + mu(j)));
            }
            f[i] = x[i] - (-s * (self.c / (2.0 * n as f64)) + 1.0).powi(-1);
        }
    }
}
