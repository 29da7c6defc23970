use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use super::scalar::{sign_nonneg, Scalar};

/// Forward-mode dual number carrying `W` partial derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual<const W: usize> {
    pub value: f64,
    pub partials: [f64; W],
}

impl<const W: usize> Dual<W> {
    pub const fn constant(value: f64) -> Self {
        Self {
            value,
            partials: [0.0; W],
        }
    }

    pub fn new(value: f64, partials: [f64; W]) -> Self {
        Self { value, partials }
    }

    /// Dual seeded with a unit partial in slot `k`.
    pub fn variable(value: f64, k: usize) -> Self {
        let mut partials = [0.0; W];
        partials[k] = 1.0;
        Self { value, partials }
    }

    /// Applies a scalar function given its value and derivative at `self.value`.
    #[inline]
    fn chain(self, value: f64, deriv: f64) -> Self {
        let mut partials = self.partials;
        for p in partials.iter_mut() {
            *p *= deriv;
        }
        Self { value, partials }
    }
}

impl<const W: usize> Add for Dual<W> {
    type Output = Self;
    #[inline]
    fn add(mut self, rhs: Self) -> Self {
        self.value += rhs.value;
        for (a, b) in self.partials.iter_mut().zip(rhs.partials) {
            *a += b;
        }
        self
    }
}

impl<const W: usize> Sub for Dual<W> {
    type Output = Self;
    #[inline]
    fn sub(mut self, rhs: Self) -> Self {
        self.value -= rhs.value;
        for (a, b) in self.partials.iter_mut().zip(rhs.partials) {
            *a -= b;
        }
        self
    }
}

impl<const W: usize> Mul for Dual<W> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        let mut partials = [0.0; W];
        for k in 0..W {
            partials[k] = self.value * rhs.partials[k] + rhs.value * self.partials[k];
        }
        Self {
            value: self.value * rhs.value,
            partials,
        }
    }
}

impl<const W: usize> Div for Dual<W> {
    type Output = Self;
    #[inline]
    fn div(self, rhs: Self) -> Self {
        let q = self.value / rhs.value;
        let mut partials = [0.0; W];
        for k in 0..W {
            partials[k] = (self.partials[k] - q * rhs.partials[k]) / rhs.value;
        }
        Self { value: q, partials }
    }
}

impl<const W: usize> Neg for Dual<W> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        self.chain(-self.value, -1.0)
    }
}

impl<const W: usize> Add<f64> for Dual<W> {
    type Output = Self;
    #[inline]
    fn add(mut self, rhs: f64) -> Self {
        self.value += rhs;
        self
    }
}

impl<const W: usize> Sub<f64> for Dual<W> {
    type Output = Self;
    #[inline]
    fn sub(mut self, rhs: f64) -> Self {
        self.value -= rhs;
        self
    }
}

impl<const W: usize> Mul<f64> for Dual<W> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: f64) -> Self {
        self.chain(self.value * rhs, rhs)
    }
}

impl<const W: usize> Div<f64> for Dual<W> {
    type Output = Self;
    #[inline]
    fn div(self, rhs: f64) -> Self {
        self.chain(self.value / rhs, 1.0 / rhs)
    }
}

macro_rules! assign_ops {
    ($ty:ty) => {
        impl<const W: usize> AddAssign for $ty {
            fn add_assign(&mut self, rhs: Self) {
                *self = *self + rhs;
            }
        }
        impl<const W: usize> SubAssign for $ty {
            fn sub_assign(&mut self, rhs: Self) {
                *self = *self - rhs;
            }
        }
        impl<const W: usize> MulAssign for $ty {
            fn mul_assign(&mut self, rhs: Self) {
                *self = *self * rhs;
            }
        }
        impl<const W: usize> DivAssign for $ty {
            fn div_assign(&mut self, rhs: Self) {
                *self = *self / rhs;
            }
        }
    };
}

assign_ops!(Dual<W>);

impl<const W: usize> Scalar for Dual<W> {
    fn from_f64(v: f64) -> Self {
        Self::constant(v)
    }
    fn value(&self) -> f64 {
        self.value
    }
    fn exp(self) -> Self {
        let e = self.value.exp();
        self.chain(e, e)
    }
    fn ln(self) -> Self {
        self.chain(self.value.ln(), 1.0 / self.value)
    }
    fn sin(self) -> Self {
        self.chain(self.value.sin(), self.value.cos())
    }
    fn cos(self) -> Self {
        self.chain(self.value.cos(), -self.value.sin())
    }
    fn atan(self) -> Self {
        self.chain(self.value.atan(), 1.0 / (1.0 + self.value * self.value))
    }
    fn sqrt(self) -> Self {
        let s = self.value.sqrt();
        self.chain(s, 0.5 / s)
    }
    fn powi(self, n: i32) -> Self {
        let d = if n == 0 {
            0.0
        } else {
            n as f64 * self.value.powi(n - 1)
        };
        self.chain(self.value.powi(n), d)
    }
    fn powf(self, p: f64) -> Self {
        self.chain(self.value.powf(p), p * self.value.powf(p - 1.0))
    }
    fn abs(self) -> Self {
        self.chain(self.value.abs(), sign_nonneg(self.value))
    }
}
