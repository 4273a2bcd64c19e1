//! Truncated third-order multivariate Taylor jets for forward-mode differentiation.
//!
//! A [`Taylor3`] carries a value together with its gradient, Hessian and the
//! fully symmetric third-derivative tensor with respect to `n` seed variables.
//! Arithmetic follows the Leibniz rule truncated at order three; univariate
//! functions compose through the third-order Faà di Bruno formula.

use crate::real::{Real, MAX_DIM};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Taylor3 {
    n: usize,
    pub v: f64,
    pub g: [f64; MAX_DIM],
    pub h: [[f64; MAX_DIM]; MAX_DIM],
    pub t: [[[f64; MAX_DIM]; MAX_DIM]; MAX_DIM],
}

impl Taylor3 {
    pub fn constant(v: f64) -> Self {
        Taylor3 {
            n: 0,
            v,
            g: [0.0; MAX_DIM],
            h: [[0.0; MAX_DIM]; MAX_DIM],
            t: [[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM],
        }
    }

    /// Seed variable `i` of an `n`-dimensional point with value `x`.
    pub fn variable(n: usize, i: usize, x: f64) -> Self {
        assert!(n <= MAX_DIM && i < n, "variable index out of range");
        let mut out = Taylor3::constant(x);
        out.n = n;
        out.g[i] = 1.0;
        out
    }

    /// All seed variables of the point `x`.
    pub fn point(x: &[f64]) -> Vec<Taylor3> {
        let n = x.len();
        (0..n).map(|i| Taylor3::variable(n, i, x[i])).collect()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn chain(&self, g0: f64, g1: f64, g2: f64, g3: f64) -> Self {
        let n = self.n;
        let mut out = Taylor3::constant(g0);
        out.n = n;
        for i in 0..n {
            out.g[i] = g1 * self.g[i];
            for j in 0..n {
                out.h[i][j] = g2 * self.g[i] * self.g[j] + g1 * self.h[i][j];
                for k in 0..n {
                    out.t[i][j][k] = g3 * self.g[i] * self.g[j] * self.g[k]
                        + g2 * (self.h[i][j] * self.g[k]
                            + self.h[i][k] * self.g[j]
                            + self.h[j][k] * self.g[i])
                        + g1 * self.t[i][j][k];
                }
            }
        }
        out
    }

    fn recip(&self) -> Self {
        let x = self.v;
        let r = 1.0 / x;
        self.chain(r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r)
    }
}

impl Add for Taylor3 {
    type Output = Taylor3;
    fn add(mut self, o: Taylor3) -> Taylor3 {
        let n = self.n.max(o.n);
        self.n = n;
        self.v += o.v;
        for i in 0..n {
            self.g[i] += o.g[i];
            for j in 0..n {
                self.h[i][j] += o.h[i][j];
                for k in 0..n {
                    self.t[i][j][k] += o.t[i][j][k];
                }
            }
        }
        self
    }
}

impl Neg for Taylor3 {
    type Output = Taylor3;
    fn neg(mut self) -> Taylor3 {
        let n = self.n;
        self.v = -self.v;
        for i in 0..n {
            self.g[i] = -self.g[i];
            for j in 0..n {
                self.h[i][j] = -self.h[i][j];
                for k in 0..n {
                    self.t[i][j][k] = -self.t[i][j][k];
                }
            }
        }
        self
    }
}

impl Sub for Taylor3 {
    type Output = Taylor3;
    fn sub(self, o: Taylor3) -> Taylor3 {
        self + (-o)
    }
}

impl Mul for Taylor3 {
    type Output = Taylor3;
    fn mul(self, o: Taylor3) -> Taylor3 {
        let n = self.n.max(o.n);
        let (a, b) = (&self, &o);
        let mut out = Taylor3::constant(a.v * b.v);
        out.n = n;
        for i in 0..n {
            out.g[i] = a.g[i] * b.v + a.v * b.g[i];
            for j in 0..n {
                out.h[i][j] = a.h[i][j] * b.v + a.g[i] * b.g[j] + a.g[j] * b.g[i] + a.v * b.h[i][j];
                for k in 0..n {
                    out.t[i][j][k] = a.t[i][j][k] * b.v
                        + a.h[i][j] * b.g[k]
                        + a.h[i][k] * b.g[j]
                        + a.h[j][k] * b.g[i]
                        + a.g[i] * b.h[j][k]
                        + a.g[j] * b.h[i][k]
                        + a.g[k] * b.h[i][j]
                        + a.v * b.t[i][j][k];
                }
            }
        }
        out
    }
}

impl Div for Taylor3 {
    type Output = Taylor3;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Taylor3) -> Taylor3 {
        self * o.recip()
    }
}

impl AddAssign for Taylor3 {
    fn add_assign(&mut self, o: Taylor3) {
        *self = *self + o;
    }
}

impl SubAssign for Taylor3 {
    fn sub_assign(&mut self, o: Taylor3) {
        *self = *self - o;
    }
}

impl MulAssign for Taylor3 {
    fn mul_assign(&mut self, o: Taylor3) {
        *self = *self * o;
    }
}

impl Real for Taylor3 {
    fn cst(c: f64) -> Self {
        Taylor3::constant(c)
    }
    fn val(&self) -> f64 {
        self.v
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e, e)
    }
    fn ln(self) -> Self {
        let r = 1.0 / self.v;
        self.chain(self.v.ln(), r, -r * r, 2.0 * r * r * r)
    }
    fn powf(self, e: f64) -> Self {
        let x = self.v;
        self.chain(
            x.powf(e),
            e * x.powf(e - 1.0),
            e * (e - 1.0) * x.powf(e - 2.0),
            e * (e - 1.0) * (e - 2.0) * x.powf(e - 3.0),
        )
    }
    fn sqrt(self) -> Self {
        self.powf(0.5)
    }
    fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s, -c)
    }
    fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c, s)
    }
    fn sinh(self) -> Self {
        let (s, c) = (self.v.sinh(), self.v.cosh());
        self.chain(s, c, s, c)
    }
    fn cosh(self) -> Self {
        let (s, c) = (self.v.sinh(), self.v.cosh());
        self.chain(c, s, c, s)
    }
    fn scale(self, c: f64) -> Self {
        self.chain(self.v * c, c, 0.0, 0.0)
    }
    fn powi(self, k: i32) -> Self {
        if k == 0 {
            return Taylor3::constant(1.0);
        }
        self.powf(k as f64)
    }
}
