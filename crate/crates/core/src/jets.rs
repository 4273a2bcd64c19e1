//! Pointwise p-Laplace calculus on second-order jets.
//!
//! A [`Jet2`] holds `(u, grad u, hess u)` in an orthonormal frame. All
//! formulas are generic over [`Real`] so that the same code evaluates plain
//! values and, on lifted jets, their first derivatives (which is how the
//! divergence engine in [`crate::fields`] differentiates derived vector fields).

use crate::error::{LabError, Result};
use crate::linalg::{axpy, dot, norm_sq, outer, scale_vec, Mat};
use crate::real::Real;
use serde::{Deserialize, Serialize};

/// Gradient floor below which identity sampling treats a point as critical,
/// relative to the field scale.
pub const EPS_GRAD: f64 = 1e-3;

pub type Endomorphism<T = f64> = Mat<T>;

/// Exponents `(p, a, b)` of the vector fields `U = |du|^{p-2} du`, `X = u^b U`
/// and the weight `u^a`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PJetParams {
    pub p: f64,
    pub a: f64,
    pub b: f64,
}

impl PJetParams {
    pub fn new(p: f64, a: f64, b: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(LabError::input(format!("p must exceed 1, got {p}")));
        }
        Ok(PJetParams { p, a, b })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Jet2<T = f64> {
    pub u: T,
    pub grad: Vec<T>,
    pub hess: Mat<T>,
}

impl Jet2<f64> {
    /// Builds a jet, symmetrizing `hess`. Rejects nonpositive `u`, a dimension
    /// mismatch, or a Hessian asymmetric beyond `1e-14 * |hess|`.
    pub fn new(u: f64, grad: Vec<f64>, hess: Mat<f64>) -> Result<Self> {
        if !(u > 0.0 && u.is_finite()) {
            return Err(LabError::input(format!("jet value must be positive, got {u}")));
        }
        let n = grad.len();
        if hess.dim() != n || n == 0 {
            return Err(LabError::input("gradient and Hessian dimensions disagree"));
        }
        let norm = hess.frob_sq().sqrt();
        for i in 0..n {
            for j in 0..i {
                if (hess.get(i, j) - hess.get(j, i)).abs() > 1e-14 * norm.max(f64::MIN_POSITIVE) {
                    return Err(LabError::input("Hessian is not symmetric"));
                }
            }
        }
        let hess = Mat::from_fn(n, |i, j| 0.5 * (hess.get(i, j) + hess.get(j, i)));
        Ok(Jet2 { u, grad, hess })
    }

    /// Same as [`Jet2::new`] without the positivity requirement on `u`; used
    /// where the jet describes an auxiliary function such as `w = ln u`.
    pub fn unsigned(u: f64, grad: Vec<f64>, hess: Mat<f64>) -> Result<Self> {
        let j = Jet2::new(1.0, grad, hess)?;
        Ok(Jet2 { u, ..j })
    }

    fn require_noncritical(&self, eps: f64, context: &'static str) -> Result<()> {
        let g = self.grad_norm();
        if g < eps || !g.is_finite() {
            return Err(LabError::Singular {
                grad_norm: g,
                eps,
                context,
            });
        }
        Ok(())
    }
}

impl<T: Real> Jet2<T> {
    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    pub fn grad_norm_sq(&self) -> T {
        norm_sq(&self.grad)
    }

    pub fn grad_norm(&self) -> T {
        self.grad_norm_sq().sqrt()
    }

    pub fn laplacian(&self) -> T {
        self.hess.trace()
    }

    /// `<hess(grad u), grad u>`.
    pub fn inf_laplacian(&self) -> T {
        dot(&self.grad, &self.hess.matvec(&self.grad))
    }

    /// `|du|^{p-2} lap u + (p-2) |du|^{p-4} lap_inf u`, no critical-point guard.
    pub fn p_laplacian_raw(&self, p: f64) -> T {
        let h = self.grad_norm_sq();
        h.powf(0.5 * (p - 2.0)) * self.laplacian() + h.powf(0.5 * (p - 4.0)) * self.inf_laplacian().scale(p - 2.0)
    }

    /// Matrix of `A_u = id + (p-2) |du|^{-2} du (x) du`.
    pub fn a_matrix(&self, p: f64) -> Mat<T> {
        let h = self.grad_norm_sq();
        let gg = outer(&self.grad, &self.grad).scaled(T::cst(p - 2.0) / h);
        Mat::identity(self.dim()).add(&gg)
    }

    pub fn a_apply(&self, p: f64, v: &[T]) -> Vec<T> {
        let h = self.grad_norm_sq();
        let c = dot(v, &self.grad).scale(p - 2.0) / h;
        axpy(c, &self.grad, v)
    }

    /// `U = |du|^{p-2} du`.
    pub fn field_u(&self, p: f64) -> Vec<T> {
        scale_vec(self.grad_norm_sq().powf(0.5 * (p - 2.0)), &self.grad)
    }

    /// `X = u^b |du|^{p-2} du`.
    pub fn field_x(&self, params: &PJetParams) -> Vec<T> {
        scale_vec(self.u.powf(params.b), &self.field_u(params.p))
    }

    /// `grad U = |du|^{p-2} A_u hess u`.
    pub fn endo_u(&self, p: f64) -> Endomorphism<T> {
        self.a_matrix(p)
            .matmul(&self.hess)
            .scaled(self.grad_norm_sq().powf(0.5 * (p - 2.0)))
    }

    /// `grad X = b u^{b-1} U (x) du + u^b grad U`; entry `(i, j)` is `d_j X_i`.
    pub fn endo_x(&self, params: &PJetParams) -> Endomorphism<T> {
        let PJetParams { p, b, .. } = *params;
        let ub = self.u.powf(b);
        let first = outer(&self.field_u(p), &self.grad).scaled(self.u.powf(b - 1.0).scale(b));
        first.add(&self.endo_u(p).scaled(ub))
    }

    /// Closed form `div X = b u^{b-1} |du|^p + u^b lap_p u`.
    pub fn div_x_closed(&self, params: &PJetParams) -> T {
        let PJetParams { p, b, .. } = *params;
        let h = self.grad_norm_sq();
        self.u.powf(b - 1.0).scale(b) * h.powf(0.5 * p) + self.u.powf(b) * self.p_laplacian_raw(p)
    }

    /// `grad |du|^p = p |du|^{p-2} hess(du)`.
    pub fn grad_of_grad_power(&self, power: f64) -> Vec<T> {
        let h = self.grad_norm_sq();
        scale_vec(h.powf(0.5 * (power - 2.0)).scale(power), &self.hess.matvec(&self.grad))
    }

    /// Jet of `ln u`.
    pub fn log_jet(&self) -> Jet2<T> {
        let inv = T::one() / self.u;
        let grad = scale_vec(inv, &self.grad);
        let hess = self.hess.scaled(inv).sub(&outer(&grad, &grad));
        Jet2 {
            u: self.u.ln(),
            grad,
            hess,
        }
    }
}

/// Pointwise p-Laplacian. For `p >= 2` a critical jet (`|du| < eps_grad`)
/// evaluates to 0; for `p < 2` it is a singularity error.
pub fn p_laplacian(j: &Jet2, p: f64) -> Result<f64> {
    p_laplacian_with_eps(j, p, EPS_GRAD)
}

pub fn p_laplacian_with_eps(j: &Jet2, p: f64, eps_grad: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(LabError::input(format!("p must exceed 1, got {p}")));
    }
    if p == 2.0 {
        return Ok(j.laplacian());
    }
    if j.grad_norm() < eps_grad {
        if p >= 2.0 {
            return Ok(0.0);
        }
        j.require_noncritical(eps_grad, "p-Laplacian with p < 2")?;
    }
    Ok(j.p_laplacian_raw(p))
}

pub fn inf_laplacian(j: &Jet2) -> f64 {
    j.inf_laplacian()
}

/// `A_u(v) = v + (p-2) |du|^{-2} <v, du> du`.
pub fn a_operator(j: &Jet2, p: f64, v: &[f64]) -> Result<Vec<f64>> {
    if v.len() != j.dim() {
        return Err(LabError::input("vector dimension mismatch"));
    }
    if p == 2.0 {
        return Ok(v.to_vec());
    }
    j.require_noncritical(EPS_GRAD, "A_u operator")?;
    Ok(j.a_apply(p, v))
}

pub fn field_x(j: &Jet2, params: &PJetParams) -> Result<Vec<f64>> {
    if params.p != 2.0 {
        j.require_noncritical(EPS_GRAD, "vector field X")?;
    }
    Ok(j.field_x(params))
}

pub fn endo_x(j: &Jet2, params: &PJetParams) -> Result<Endomorphism> {
    if params.p != 2.0 || params.b != 0.0 {
        j.require_noncritical(EPS_GRAD, "endomorphism grad X")?;
    }
    Ok(j.endo_x(params))
}

/// `E - (tr E / n) id`.
pub fn traceless<T: Real>(e: &Endomorphism<T>, n: usize) -> Endomorphism<T> {
    let c = e.trace() / T::cst(n as f64);
    e.sub(&Mat::identity(e.dim()).scaled(c))
}
