//! Scalar abstraction shared by plain floats and forward-mode derivative carriers.
//!
//! Every pointwise formula in the lab is written once against [`Real`] and then
//! evaluated with `f64` (values), [`Dual`] (first derivatives of lifted jets) or
//! [`crate::taylor::Taylor3`] (third-order jets of scalar fields).

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Largest manifold dimension the fixed-capacity derivative carriers support.
pub const MAX_DIM: usize = 6;

pub trait Real:
    Copy
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    fn cst(c: f64) -> Self;
    fn val(&self) -> f64;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn powf(self, e: f64) -> Self;
    fn sqrt(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;

    fn zero() -> Self {
        Self::cst(0.0)
    }

    fn one() -> Self {
        Self::cst(1.0)
    }

    fn scale(self, c: f64) -> Self {
        self * Self::cst(c)
    }

    fn powi(self, k: i32) -> Self {
        match k {
            0 => Self::one(),
            k if k < 0 => Self::one() / self.powi(-k),
            _ => {
                let mut acc = self;
                for _ in 1..k {
                    acc *= self;
                }
                acc
            }
        }
    }

    fn tanh(self) -> Self {
        self.sinh() / self.cosh()
    }
}

impl Real for f64 {
    fn cst(c: f64) -> Self {
        c
    }
    fn val(&self) -> f64 {
        *self
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn powf(self, e: f64) -> Self {
        f64::powf(self, e)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    fn powi(self, k: i32) -> Self {
        f64::powi(self, k)
    }
    fn tanh(self) -> Self {
        f64::tanh(self)
    }
}

/// First-order forward-mode number: a value and its gradient in up to
/// [`MAX_DIM`] directions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual {
    pub v: f64,
    pub d: [f64; MAX_DIM],
}

impl Dual {
    pub fn constant(v: f64) -> Self {
        Dual { v, d: [0.0; MAX_DIM] }
    }

    pub fn new(v: f64, d: [f64; MAX_DIM]) -> Self {
        Dual { v, d }
    }

    /// Single-direction dual (used for radial reductions).
    pub fn along(v: f64, dv: f64) -> Self {
        let mut d = [0.0; MAX_DIM];
        d[0] = dv;
        Dual { v, d }
    }

    fn chain(self, g: f64, dg: f64) -> Self {
        let mut d = self.d;
        for x in d.iter_mut() {
            *x *= dg;
        }
        Dual { v: g, d }
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(mut self, o: Dual) -> Dual {
        self.v += o.v;
        for i in 0..MAX_DIM {
            self.d[i] += o.d[i];
        }
        self
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(mut self, o: Dual) -> Dual {
        self.v -= o.v;
        for i in 0..MAX_DIM {
            self.d[i] -= o.d[i];
        }
        self
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        let mut d = [0.0; MAX_DIM];
        for (i, x) in d.iter_mut().enumerate() {
            *x = self.d[i] * o.v + self.v * o.d[i];
        }
        Dual { v: self.v * o.v, d }
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, o: Dual) -> Dual {
        let inv = 1.0 / o.v;
        let q = self.v * inv;
        let mut d = [0.0; MAX_DIM];
        for (i, x) in d.iter_mut().enumerate() {
            *x = (self.d[i] - q * o.d[i]) * inv;
        }
        Dual { v: q, d }
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        self.chain(-self.v, -1.0)
    }
}

impl AddAssign for Dual {
    fn add_assign(&mut self, o: Dual) {
        *self = *self + o;
    }
}

impl SubAssign for Dual {
    fn sub_assign(&mut self, o: Dual) {
        *self = *self - o;
    }
}

impl MulAssign for Dual {
    fn mul_assign(&mut self, o: Dual) {
        *self = *self * o;
    }
}

impl Real for Dual {
    fn cst(c: f64) -> Self {
        Dual::constant(c)
    }
    fn val(&self) -> f64 {
        self.v
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e)
    }
    fn ln(self) -> Self {
        self.chain(self.v.ln(), 1.0 / self.v)
    }
    fn powf(self, e: f64) -> Self {
        let g = self.v.powf(e);
        self.chain(g, e * self.v.powf(e - 1.0))
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s)
    }
    fn sin(self) -> Self {
        self.chain(self.v.sin(), self.v.cos())
    }
    fn cos(self) -> Self {
        self.chain(self.v.cos(), -self.v.sin())
    }
    fn sinh(self) -> Self {
        self.chain(self.v.sinh(), self.v.cosh())
    }
    fn cosh(self) -> Self {
        self.chain(self.v.cosh(), self.v.sinh())
    }
    fn scale(self, c: f64) -> Self {
        self.chain(self.v * c, c)
    }
}
