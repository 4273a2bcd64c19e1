//! Scalar fields with derivatives to third order, and divergences of the
//! vector fields built from them.
//!
//! A field is evaluated at a point as a [`LiftedJet`]: a [`Jet2<Dual>`] whose
//! entries carry their own first derivatives. Any vector field assembled
//! pointwise from the jet then carries its Jacobian, and its divergence is a
//! trace. Euclidean fields are lifted from [`Taylor3`] jets in the coordinate
//! frame; radial profiles are lifted in the radial orthonormal frame of a
//! warped product.

use crate::error::{LabError, Result};
use crate::geometry::ManifoldModel;
use crate::jets::{traceless, Jet2, PJetParams, EPS_GRAD};
use crate::linalg::{dot, scale_vec, sub_vec, Mat};
use crate::reaction::ReactionTerm;
use crate::real::{Dual, Real, MAX_DIM};
use crate::taylor::Taylor3;
use serde::{Deserialize, Serialize};
use std::fmt::Debug;
use std::sync::Arc;

/// Library of smooth primitives for Euclidean test fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldExpr {
    Constant {
        value: f64,
    },
    /// `sum_k coef_k * prod_i x_i^{powers_k[i]}`
    Polynomial {
        terms: Vec<Monomial>,
    },
    /// `amplitude * exp(-|x - center|^2 / width^2)`
    Gaussian {
        amplitude: f64,
        center: Vec<f64>,
        width: f64,
    },
    /// `amplitude * exp(-rate * sqrt(1 + |x - center|^2))`
    RadialExp {
        amplitude: f64,
        center: Vec<f64>,
        rate: f64,
    },
    /// `amplitude * (scale^2 + |x - center|^2)^(-power)`
    Rational {
        amplitude: f64,
        center: Vec<f64>,
        scale: f64,
        power: f64,
    },
    /// `|x - center|^exponent`
    PowerDistance {
        center: Vec<f64>,
        exponent: f64,
    },
    /// `amplitude * exp(<rate, x>)`
    ExpLinear {
        amplitude: f64,
        rate: Vec<f64>,
    },
    Sum {
        terms: Vec<FieldExpr>,
    },
    Product {
        factors: Vec<FieldExpr>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Monomial {
    pub coef: f64,
    pub powers: Vec<u32>,
}

fn dist_sq<T: Real>(x: &[T], c: &[f64]) -> T {
    x.iter()
        .zip(c)
        .fold(T::zero(), |acc, (&xi, &ci)| {
            let d = xi - T::cst(ci);
            acc + d * d
        })
}

impl FieldExpr {
    pub fn eval<T: Real>(&self, x: &[T]) -> T {
        match self {
            FieldExpr::Constant { value } => T::cst(*value),
            FieldExpr::Polynomial { terms } => terms.iter().fold(T::zero(), |acc, m| {
                let mut t = T::cst(m.coef);
                for (i, &k) in m.powers.iter().enumerate() {
                    if k > 0 {
                        t *= x[i].powi(k as i32);
                    }
                }
                acc + t
            }),
            FieldExpr::Gaussian {
                amplitude,
                center,
                width,
            } => (-dist_sq(x, center).scale(1.0 / (width * width))).exp().scale(*amplitude),
            FieldExpr::RadialExp {
                amplitude,
                center,
                rate,
            } => (-(T::one() + dist_sq(x, center)).sqrt().scale(*rate))
                .exp()
                .scale(*amplitude),
            FieldExpr::Rational {
                amplitude,
                center,
                scale,
                power,
            } => (T::cst(scale * scale) + dist_sq(x, center))
                .powf(-power)
                .scale(*amplitude),
            FieldExpr::PowerDistance { center, exponent } => dist_sq(x, center).powf(0.5 * exponent),
            FieldExpr::ExpLinear { amplitude, rate } => x
                .iter()
                .zip(rate)
                .fold(T::zero(), |acc, (&xi, &ri)| acc + xi.scale(ri))
                .exp()
                .scale(*amplitude),
            FieldExpr::Sum { terms } => terms.iter().fold(T::zero(), |acc, t| acc + t.eval(x)),
            FieldExpr::Product { factors } => factors.iter().fold(T::one(), |acc, t| acc * t.eval(x)),
        }
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        let bad = |len: usize| {
            if len != n {
                Err(LabError::input(format!(
                    "field primitive expects dimension {len}, field has dimension {n}"
                )))
            } else {
                Ok(())
            }
        };
        match self {
            FieldExpr::Constant { .. } => Ok(()),
            FieldExpr::Polynomial { terms } => terms.iter().try_for_each(|m| bad(m.powers.len())),
            FieldExpr::Gaussian { center, .. }
            | FieldExpr::RadialExp { center, .. }
            | FieldExpr::Rational { center, .. }
            | FieldExpr::PowerDistance { center, .. } => bad(center.len()),
            FieldExpr::ExpLinear { rate, .. } => bad(rate.len()),
            FieldExpr::Sum { terms } => terms.iter().try_for_each(|t| t.check_dim(n)),
            FieldExpr::Product { factors } => factors.iter().try_for_each(|t| t.check_dim(n)),
        }
    }
}

/// A field on `R^n` given by a [`FieldExpr`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EuclideanField {
    pub dim: usize,
    pub expr: FieldExpr,
}

impl EuclideanField {
    pub fn new(dim: usize, expr: FieldExpr) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(LabError::input(format!("dimension must lie in 1..={MAX_DIM}")));
        }
        expr.check_dim(dim)?;
        Ok(EuclideanField { dim, expr })
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.expr.eval(x)
    }

    pub fn taylor(&self, x: &[f64]) -> Result<Taylor3> {
        if x.len() != self.dim {
            return Err(LabError::input("point dimension mismatch"));
        }
        Ok(self.expr.eval(&Taylor3::point(x)))
    }
}

/// A radial profile `u(r)` on a warped product, with derivatives to order three.
pub trait RadialSource: Send + Sync + Debug {
    fn model(&self) -> &ManifoldModel;
    /// `[u, u', u'', u''']` at `r`.
    fn derivatives(&self, r: f64) -> Result<[f64; 4]>;
    /// Highest derivative order the source can supply.
    fn order(&self) -> usize {
        3
    }
    /// JSON description for reports.
    fn describe(&self) -> serde_json::Value;
    /// Radii where the profile is defined.
    fn domain(&self) -> (f64, f64) {
        (0.0, self.model().r_max())
    }
    /// Equation the profile is known to solve, if any.
    fn certificate(&self) -> Option<SolutionCertificate> {
        None
    }
}

/// Records that a profile solves `-lap_p u = f(u)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionCertificate {
    pub p: f64,
    pub f: ReactionTerm,
}

/// Radial profile given by a one-variable [`FieldExpr`] in `r`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialProfile {
    model: ManifoldModel,
    expr: FieldExpr,
}

impl RadialProfile {
    pub fn new(model: ManifoldModel, expr: FieldExpr) -> Result<Self> {
        expr.check_dim(1)?;
        Ok(RadialProfile { model, expr })
    }

    pub fn expr(&self) -> &FieldExpr {
        &self.expr
    }
}

impl RadialSource for RadialProfile {
    fn model(&self) -> &ManifoldModel {
        &self.model
    }

    fn derivatives(&self, r: f64) -> Result<[f64; 4]> {
        let t = self.expr.eval(&[Taylor3::variable(1, 0, r)]);
        Ok([t.v, t.g[0], t.h[0][0], t.t[0][0][0]])
    }

    fn describe(&self) -> serde_json::Value {
        serde_json::json!({
            "model": self.model.name(),
            "dim": self.model.dim(),
            "kappa": self.model.kappa(),
            "profile": self.expr,
        })
    }
}

#[derive(Clone, Debug)]
pub enum ScalarField {
    Euclidean(EuclideanField),
    Radial(Arc<dyn RadialSource>),
}

/// Where to evaluate a field: ambient coordinates or a radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplePoint {
    Coords(Vec<f64>),
    Radius(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Chart {
    Flat,
    /// Radial frame: `k = psi'/psi` and `Ric(d_r, d_r)`.
    Radial { k: f64, ric: f64 },
}

/// Jet whose entries carry their first derivatives in the frame directions.
#[derive(Clone, Debug)]
pub struct LiftedJet {
    pub jet: Jet2<Dual>,
    chart: Chart,
}

impl LiftedJet {
    pub fn dim(&self) -> usize {
        self.jet.dim()
    }

    /// Plain second-order jet (derivative parts dropped).
    pub fn values(&self) -> Jet2<f64> {
        Jet2 {
            u: self.jet.u.v,
            grad: self.jet.grad.iter().map(|d| d.v).collect(),
            hess: self.jet.hess.map(|d| d.v),
        }
    }

    /// Divergence of a vector field given with its derivatives.
    pub fn div(&self, v: &[Dual]) -> f64 {
        match self.chart {
            Chart::Flat => v.iter().enumerate().map(|(i, vi)| vi.d[i]).sum(),
            Chart::Radial { k, .. } => v[0].d[0] + (self.dim() as f64 - 1.0) * k * v[0].v,
        }
    }

    /// Gradient of a scalar given with its derivatives.
    pub fn grad(&self, s: Dual) -> Vec<f64> {
        match self.chart {
            Chart::Flat => s.d[..self.dim()].to_vec(),
            Chart::Radial { .. } => {
                let mut g = vec![0.0; self.dim()];
                g[0] = s.d[0];
                g
            }
        }
    }

    /// `Ric(v, v)` for a vector in the frame; in the radial chart `v` must be radial.
    pub fn ricci(&self, v: &[f64]) -> f64 {
        match self.chart {
            Chart::Flat => 0.0,
            Chart::Radial { ric, .. } => ric * v[0] * v[0],
        }
    }
}

impl ScalarField {
    pub fn dim(&self) -> usize {
        match self {
            ScalarField::Euclidean(f) => f.dim,
            ScalarField::Radial(s) => s.model().dim(),
        }
    }

    pub fn describe(&self) -> serde_json::Value {
        match self {
            ScalarField::Euclidean(f) => serde_json::to_value(f).unwrap_or(serde_json::Value::Null),
            ScalarField::Radial(s) => s.describe(),
        }
    }

    /// Ricci lower-bound constant of the underlying model (0 for Euclidean fields).
    pub fn kappa(&self) -> f64 {
        match self {
            ScalarField::Euclidean(_) => 0.0,
            ScalarField::Radial(s) => s.model().kappa(),
        }
    }

    pub fn value(&self, point: &SamplePoint) -> Result<f64> {
        Ok(self.jet(point)?.u)
    }

    /// Second-order jet in the natural orthonormal frame.
    pub fn jet(&self, point: &SamplePoint) -> Result<Jet2> {
        Ok(self.lift(point)?.values())
    }

    /// Third-order data at `point`, as a lifted jet.
    pub fn lift(&self, point: &SamplePoint) -> Result<LiftedJet> {
        match (self, point) {
            (ScalarField::Euclidean(f), SamplePoint::Coords(x)) => {
                let t = f.taylor(x)?;
                Ok(lift_taylor(&t, f.dim))
            }
            (ScalarField::Radial(s), SamplePoint::Radius(r)) => lift_radial(s.as_ref(), *r),
            _ => Err(LabError::input("sample point kind does not match the field kind")),
        }
    }
}

fn lift_taylor(t: &Taylor3, n: usize) -> LiftedJet {
    let mut u = Dual::constant(t.v);
    u.d[..n].copy_from_slice(&t.g[..n]);
    let grad = (0..n)
        .map(|i| {
            let mut d = Dual::constant(t.g[i]);
            d.d[..n].copy_from_slice(&t.h[i][..n]);
            d
        })
        .collect();
    let hess = Mat::from_fn(n, |i, j| {
        let mut d = Dual::constant(t.h[i][j]);
        d.d[..n].copy_from_slice(&t.t[i][j][..n]);
        d
    });
    LiftedJet {
        jet: Jet2 { u, grad, hess },
        chart: Chart::Flat,
    }
}

pub(crate) fn lift_radial(s: &dyn RadialSource, r: f64) -> Result<LiftedJet> {
    if s.order() < 3 {
        return Err(LabError::Capability(format!(
            "divergence needs third radial derivatives; the source supplies order {}",
            s.order()
        )));
    }
    let model = s.model();
    if !(r > 0.0) {
        return Err(LabError::domain("radial jets need r > 0"));
    }
    model.warping_jet(r)?;
    let n = model.dim();
    let [u, u1, u2, u3] = s.derivatives(r)?;
    let (k, dk) = model.log_derivative(r);
    let grad = (0..n)
        .map(|i| if i == 0 { Dual::along(u1, u2) } else { Dual::constant(0.0) })
        .collect();
    let hess = Mat::from_fn(n, |i, j| match (i, j) {
        (0, 0) => Dual::along(u2, u3),
        (i, j) if i == j => Dual::along(k * u1, dk * u1 + k * u2),
        _ => Dual::constant(0.0),
    });
    Ok(LiftedJet {
        jet: Jet2 {
            u: Dual::along(u, u1),
            grad,
            hess,
        },
        chart: Chart::Radial {
            k,
            ric: model.ricci_rr_unchecked(r),
        },
    })
}

/// Closed enumeration of vector fields whose divergence the lab evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum VectorFieldSpec {
    /// `U = |du|^{p-2} du`
    U,
    /// `X = u^b U`
    X,
    /// `grad_X X`
    CovXX,
    /// `grad_X X - div X * X`
    CovXXMinusDivX,
    /// `u^a (grad_X X - div X X) - ((p-1)/p) <X, grad u^a> X`
    Basic1,
    /// `u^a Xo(X) - c u^{a-1} <X, du> X` with `Xo` the traceless part of `grad X`
    Basic2,
    /// `|du|^{p-2} A_u(grad |du|^p)`
    LinearizedGradP,
    /// `|dw|^{p-2} A_w(grad |dw|^lambda)` for `w = ln u`
    MoserFlux { lambda: f64 },
}

/// Coefficient `c = (n(p-1)a + (n-1)pb)/(np)` of the Basic2 field.
pub fn basic2_coefficient(n: usize, params: &PJetParams) -> f64 {
    let n = n as f64;
    let PJetParams { p, a, b } = *params;
    (n * (p - 1.0) * a + (n - 1.0) * p * b) / (n * p)
}

impl VectorFieldSpec {
    /// Pointwise value of the field from jet data; generic so that lifted jets
    /// yield the Jacobian too.
    pub fn eval<T: Real>(&self, j: &Jet2<T>, params: &PJetParams) -> Vec<T> {
        let PJetParams { p, a, .. } = *params;
        let n = j.dim();
        match *self {
            VectorFieldSpec::U => j.field_u(p),
            VectorFieldSpec::X => j.field_x(params),
            VectorFieldSpec::CovXX => j.endo_x(params).matvec(&j.field_x(params)),
            VectorFieldSpec::CovXXMinusDivX => cov_minus_div(j, params),
            VectorFieldSpec::Basic1 => {
                let x = j.field_x(params);
                let w = cov_minus_div(j, params);
                let xg = dot(&x, &j.grad);
                let c = j.u.powf(a - 1.0).scale(a * (p - 1.0) / p) * xg;
                sub_vec(&scale_vec(j.u.powf(a), &w), &scale_vec(c, &x))
            }
            VectorFieldSpec::Basic2 => {
                let x = j.field_x(params);
                let e = traceless(&j.endo_x(params), n);
                let ex = e.matvec(&x);
                let c = basic2_coefficient(n, params);
                let s = j.u.powf(a - 1.0).scale(c) * dot(&x, &j.grad);
                sub_vec(&scale_vec(j.u.powf(a), &ex), &scale_vec(s, &x))
            }
            VectorFieldSpec::LinearizedGradP => {
                let gp = j.grad_of_grad_power(p);
                scale_vec(j.grad_norm_sq().powf(0.5 * (p - 2.0)), &j.a_apply(p, &gp))
            }
            VectorFieldSpec::MoserFlux { lambda } => {
                let w = j.log_jet();
                let gl = w.grad_of_grad_power(lambda);
                scale_vec(w.grad_norm_sq().powf(0.5 * (p - 2.0)), &w.a_apply(p, &gl))
            }
        }
    }

    /// Whether the field is smooth at the jet; the Moser flux involves `ln u`
    /// and is checked against `|grad ln u|` instead of `|grad u|`.
    fn needs_log(&self) -> bool {
        matches!(self, VectorFieldSpec::MoserFlux { .. })
    }
}

fn cov_minus_div<T: Real>(j: &Jet2<T>, params: &PJetParams) -> Vec<T> {
    let x = j.field_x(params);
    let e = j.endo_x(params);
    let div = e.trace();
    sub_vec(&e.matvec(&x), &scale_vec(div, &x))
}

/// Rejects non-positive values and near-critical points: `|du| < EPS_GRAD * u`.
pub fn admissible(j: &Jet2, log: bool) -> Result<()> {
    if !(j.u > 0.0) {
        return Err(LabError::domain(format!("field value {} is not positive", j.u)));
    }
    let g = j.grad_norm();
    let eps = EPS_GRAD * j.u;
    if g < eps || !g.is_finite() {
        return Err(LabError::Singular {
            grad_norm: g,
            eps,
            context: if log { "log-gradient field" } else { "vector field divergence" },
        });
    }
    Ok(())
}

/// Divergence of the vector field `spec` built from `field` at `point`.
pub fn divergence_at(field: &ScalarField, point: &SamplePoint, spec: VectorFieldSpec, params: &PJetParams) -> Result<f64> {
    let l = field.lift(point)?;
    admissible(&l.values(), spec.needs_log())?;
    let v = spec.eval(&l.jet, params);
    let d = l.div(&v);
    if !d.is_finite() {
        return Err(LabError::numerical("divergence evaluated to a non-finite value", d));
    }
    Ok(d)
}

/// Maximum discrepancy between forward-mode derivatives of order `1..=3` and
/// fourth-order central differences of the next-lower order, at step `h`.
///
/// Order 1 differences the field values, order 2 the AD gradient and order 3
/// the AD Hessian, so every stencil is a first-derivative stencil.
pub fn fd_discrepancy(field: &EuclideanField, x: &[f64], h: f64) -> Result<[f64; 3]> {
    let n = field.dim;
    let t0 = field.taylor(x)?;
    let mut err = [0.0f64; 3];
    for dir in 0..n {
        let shifted = |s: f64| -> Result<Taylor3> {
            let mut y = x.to_vec();
            y[dir] += s * h;
            field.taylor(&y)
        };
        let (p1, p2, m1, m2) = (shifted(1.0)?, shifted(2.0)?, shifted(-1.0)?, shifted(-2.0)?);
        let fd = |a: f64, b: f64, c: f64, d: f64| (-b + 8.0 * a - 8.0 * c + d) / (12.0 * h);
        let e1 = (fd(p1.v, p2.v, m1.v, m2.v) - t0.g[dir]).abs();
        err[0] = err[0].max(e1);
        for i in 0..n {
            let e2 = (fd(p1.g[i], p2.g[i], m1.g[i], m2.g[i]) - t0.h[i][dir]).abs();
            err[1] = err[1].max(e2);
            for j in 0..n {
                let e3 = (fd(p1.h[i][j], p2.h[i][j], m1.h[i][j], m2.h[i][j]) - t0.t[i][j][dir]).abs();
                err[2] = err[2].max(e3);
            }
        }
    }
    Ok(err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn half_norm_sq(n: usize) -> EuclideanField {
        let terms = (0..n)
            .map(|i| {
                let mut powers = vec![0; n];
                powers[i] = 2;
                Monomial { coef: 0.5, powers }
            })
            .collect();
        EuclideanField::new(n, FieldExpr::Polynomial { terms }).unwrap()
    }

    #[test]
    fn div_u_of_quadratic_is_dimension() {
        let f = ScalarField::Euclidean(half_norm_sq(3));
        let params = PJetParams::new(2.0, 0.0, 0.0).unwrap();
        let d = divergence_at(&f, &SamplePoint::Coords(vec![0.3, -0.2, 1.1]), VectorFieldSpec::U, &params).unwrap();
        assert_relative_eq!(d, 3.0, max_relative = 1e-14);
    }

    #[test]
    fn radial_div_u_on_hyperbolic_space() {
        let model = ManifoldModel::hyperbolic(3, 1.0).unwrap();
        let prof = RadialProfile::new(
            model,
            FieldExpr::ExpLinear {
                amplitude: 1.0,
                rate: vec![-1.0],
            },
        )
        .unwrap();
        let f = ScalarField::Radial(Arc::new(prof));
        let params = PJetParams::new(2.0, 0.0, 0.0).unwrap();
        let d = divergence_at(&f, &SamplePoint::Radius(1.0), VectorFieldSpec::U, &params).unwrap();
        let e = (-1.0f64).exp();
        let oracle = e * (1.0 - 2.0 / 1f64.tanh());
        assert_relative_eq!(d, oracle, max_relative = 1e-13);
        assert!((d + 0.598).abs() < 1e-3);
    }

    #[test]
    fn div_x_of_polynomial_field() {
        // u = 2 + x1^2, X = u grad u = (2 x1 (2 + x1^2), 0); div X = 4 + 6 x1^2 = 5.5 at x1 = 0.5
        let f = EuclideanField::new(
            2,
            FieldExpr::Polynomial {
                terms: vec![
                    Monomial {
                        coef: 2.0,
                        powers: vec![0, 0],
                    },
                    Monomial {
                        coef: 1.0,
                        powers: vec![2, 0],
                    },
                ],
            },
        )
        .unwrap();
        let params = PJetParams::new(2.0, 0.0, 1.0).unwrap();
        let d = divergence_at(&ScalarField::Euclidean(f), &SamplePoint::Coords(vec![0.5, 0.0]), VectorFieldSpec::X, &params)
            .unwrap();
        assert_relative_eq!(d, 5.5, max_relative = 1e-14);
    }

    #[test]
    fn critical_points_are_refused() {
        let q = half_norm_sq(2);
        let shifted = FieldExpr::Sum {
            terms: vec![FieldExpr::Constant { value: 1.0 }, q.expr],
        };
        let f = ScalarField::Euclidean(EuclideanField::new(2, shifted).unwrap());
        let params = PJetParams::new(3.0, 0.0, 0.0).unwrap();
        let e = divergence_at(&f, &SamplePoint::Coords(vec![0.0, 0.0]), VectorFieldSpec::U, &params).unwrap_err();
        assert!(matches!(e, LabError::Singular { .. }));
    }

    #[derive(Debug)]
    struct SecondOrderOnly(ManifoldModel);

    impl RadialSource for SecondOrderOnly {
        fn model(&self) -> &ManifoldModel {
            &self.0
        }
        fn derivatives(&self, r: f64) -> Result<[f64; 4]> {
            Ok([1.0 + r * r, 2.0 * r, 2.0, f64::NAN])
        }
        fn order(&self) -> usize {
            2
        }
        fn describe(&self) -> serde_json::Value {
            serde_json::Value::Null
        }
    }

    #[test]
    fn low_order_source_is_a_capability_error() {
        let s = SecondOrderOnly(ManifoldModel::euclidean(3).unwrap());
        let f = ScalarField::Radial(Arc::new(s));
        let params = PJetParams::new(2.0, 0.0, 0.0).unwrap();
        let e = divergence_at(&f, &SamplePoint::Radius(1.0), VectorFieldSpec::U, &params).unwrap_err();
        assert!(matches!(e, LabError::Capability(_)));
    }

    #[test]
    fn mismatched_point_kind_is_input_error() {
        let f = ScalarField::Euclidean(half_norm_sq(2));
        assert!(matches!(f.jet(&SamplePoint::Radius(1.0)), Err(LabError::Input(_))));
    }

    #[test]
    fn fd_discrepancy_shrinks_with_step() {
        let f = EuclideanField::new(
            2,
            FieldExpr::Gaussian {
                amplitude: 1.0,
                center: vec![0.1, -0.3],
                width: 1.2,
            },
        )
        .unwrap();
        let x = [0.4, 0.2];
        let coarse = fd_discrepancy(&f, &x, 1e-2).unwrap();
        let fine = fd_discrepancy(&f, &x, 1e-3).unwrap();
        for k in 0..3 {
            assert!(fine[k] < 1e-9, "order {} error {}", k + 1, fine[k]);
            assert!((coarse[k] / fine[k]).log10() >= 3.5, "order {} ratio", k + 1);
        }
    }
}
