use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use super::scalar::{sign_nonneg, Scalar};

/// Second-order Taylor jet along a single direction.
///
/// Represents `g(ε) = value + d1·ε + d2·ε²/2`, so evaluating a residual at
/// `u + ε·a` seeded with `d1 = a` yields the first and second directional
/// derivatives exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub const fn constant(value: f64) -> Self {
        Self {
            value,
            d1: 0.0,
            d2: 0.0,
        }
    }

    pub const fn new(value: f64, d1: f64, d2: f64) -> Self {
        Self { value, d1, d2 }
    }

    /// Composition with a scalar function given `g(v)`, `g'(v)`, `g''(v)`.
    #[inline]
    fn chain(self, g: f64, dg: f64, ddg: f64) -> Self {
        Self {
            value: g,
            d1: dg * self.d1,
            d2: ddg * self.d1 * self.d1 + dg * self.d2,
        }
    }
}

impl Add for Jet {
    type Output = Self;
    fn add(self, r: Self) -> Self {
        Self::new(self.value + r.value, self.d1 + r.d1, self.d2 + r.d2)
    }
}

impl Sub for Jet {
    type Output = Self;
    fn sub(self, r: Self) -> Self {
        Self::new(self.value - r.value, self.d1 - r.d1, self.d2 - r.d2)
    }
}

impl Mul for Jet {
    type Output = Self;
    fn mul(self, r: Self) -> Self {
        Self::new(
            self.value * r.value,
            self.d1 * r.value + self.value * r.d1,
            self.d2 * r.value + 2.0 * self.d1 * r.d1 + self.value * r.d2,
        )
    }
}

impl Div for Jet {
    type Output = Self;
    fn div(self, r: Self) -> Self {
        let q = self.value / r.value;
        let q1 = (self.d1 - q * r.d1) / r.value;
        let q2 = (self.d2 - 2.0 * q1 * r.d1 - q * r.d2) / r.value;
        Self::new(q, q1, q2)
    }
}

impl Neg for Jet {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.value, -self.d1, -self.d2)
    }
}

impl Add<f64> for Jet {
    type Output = Self;
    fn add(self, r: f64) -> Self {
        Self::new(self.value + r, self.d1, self.d2)
    }
}

impl Sub<f64> for Jet {
    type Output = Self;
    fn sub(self, r: f64) -> Self {
        Self::new(self.value - r, self.d1, self.d2)
    }
}

impl Mul<f64> for Jet {
    type Output = Self;
    fn mul(self, r: f64) -> Self {
        Self::new(self.value * r, self.d1 * r, self.d2 * r)
    }
}

impl Div<f64> for Jet {
    type Output = Self;
    fn div(self, r: f64) -> Self {
        Self::new(self.value / r, self.d1 / r, self.d2 / r)
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}
impl SubAssign for Jet {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}
impl MulAssign for Jet {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}
impl DivAssign for Jet {
    fn div_assign(&mut self, rhs: Self) {
        *self = *self / rhs;
    }
}

impl Scalar for Jet {
    fn from_f64(v: f64) -> Self {
        Self::constant(v)
    }
    fn value(&self) -> f64 {
        self.value
    }
    fn exp(self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }
    fn ln(self) -> Self {
        let inv = 1.0 / self.value;
        self.chain(self.value.ln(), inv, -inv * inv)
    }
    fn sin(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }
    fn cos(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }
    fn atan(self) -> Self {
        let v = self.value;
        let den = 1.0 + v * v;
        self.chain(v.atan(), 1.0 / den, -2.0 * v / (den * den))
    }
    fn sqrt(self) -> Self {
        let s = self.value.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.value))
    }
    fn powi(self, n: i32) -> Self {
        let v = self.value;
        let nf = n as f64;
        let d = if n == 0 { 0.0 } else { nf * v.powi(n - 1) };
        let dd = if n == 0 || n == 1 {
            0.0
        } else {
            nf * (nf - 1.0) * v.powi(n - 2)
        };
        self.chain(v.powi(n), d, dd)
    }
    fn powf(self, p: f64) -> Self {
        let v = self.value;
        self.chain(
            v.powf(p),
            p * v.powf(p - 1.0),
            p * (p - 1.0) * v.powf(p - 2.0),
        )
    }
    fn abs(self) -> Self {
        let s = sign_nonneg(self.value);
        self.chain(self.value.abs(), s, 0.0)
    }
}
