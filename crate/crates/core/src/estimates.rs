//! Log-gradient bounds and Harnack-type ratios on explicit profiles.

use crate::error::{LabError, Result};
use crate::exponents::{satisfies_f2, ConditionGrid, EmdenBubble, GradientEstimateParams, HarnackConfig};
use crate::fields::{EuclideanField, FieldExpr, RadialSource, SolutionCertificate};
use crate::geometry::{unit_sphere_area, ManifoldModel};
use crate::jets::Jet2;
use crate::quadrature::{integrate, integrate_to_infinity, QuadSettings};
use crate::reaction::ReactionTerm;
use crate::taylor::Taylor3;
use serde::{Deserialize, Serialize};

/// Largest relative p-Laplacian residual accepted when certifying a profile.
pub const HARMONIC_RESIDUAL_TOL: f64 = 1e-9;
pub const SHARPNESS_FRACTION: f64 = 0.99;
pub const BOUND_SLACK: f64 = 1e-6;
pub const SLOPE_TOL: f64 = 0.05;
pub const DEFAULT_BAND: f64 = 1e3;
/// Superharmonicity is certified when `-lap_p u >= -SUPER_TOL * scale`.
pub const SUPER_TOL: f64 = 1e-10;

/// `|lap_p u| / (|u'|^{p-2} (|(p-1) u''| + |(n-1) k u'|))` from radial data.
fn radial_residual(n: usize, p: f64, k: f64, d: [f64; 3]) -> f64 {
    let [_, u1, u2] = d;
    if u1 == 0.0 {
        return 0.0;
    }
    let w = u1.abs().powf(p - 2.0);
    let a = (p - 1.0) * u2;
    let b = (n as f64 - 1.0) * k * u1;
    (w * (a + b)).abs() / (w * (a.abs() + b.abs()) + f64::MIN_POSITIVE)
}

/// The p-harmonic profile `u(r) = int_r^inf sinh^{-beta}(sqrt(kappa) s) ds`,
/// `beta = (n-1)/(p-1)`, on hyperbolic space of curvature `-kappa`.
#[derive(Clone, Debug)]
pub struct HyperbolicExtremal {
    model: ManifoldModel,
    p: f64,
    beta: f64,
    quad: QuadSettings,
}

impl HyperbolicExtremal {
    pub fn new(n: usize, p: f64, kappa: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(LabError::input("p must exceed 1"));
        }
        let model = ManifoldModel::hyperbolic(n, kappa)?;
        Ok(HyperbolicExtremal {
            model,
            p,
            beta: (n as f64 - 1.0) / (p - 1.0),
            quad: QuadSettings::default(),
        })
    }

    /// `int_0^inf (sinh(a) / sinh(a + sqrt(kappa) t))^beta dt`, so that
    /// `u = sinh^{-beta}(a) I` and `|u'|/u = 1/I`.
    fn tail_ratio(&self, r: f64) -> Result<f64> {
        let c = self.model.kappa().sqrt();
        let a = c * r;
        let beta = self.beta;
        let q = integrate_to_infinity(
            |t| {
                let b = c * t;
                // sinh(a)/sinh(a+b) = e^{-b} (1 - e^{-2a}) / (1 - e^{-2(a+b)})
                let ratio = (-b).exp() * (-(-2.0 * a).exp_m1()) / (-(-2.0 * (a + b)).exp_m1());
                ratio.powf(beta)
            },
            0.0,
            self.quad,
        )?;
        Ok(q.value)
    }

    /// Log-gradient `|u'|/u` at `r`.
    pub fn log_gradient(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(LabError::domain("the extremal is singular at r = 0"));
        }
        Ok(1.0 / self.tail_ratio(r)?)
    }

    pub fn limit(&self) -> f64 {
        self.beta * self.model.kappa().sqrt()
    }
}

impl RadialSource for HyperbolicExtremal {
    fn model(&self) -> &ManifoldModel {
        &self.model
    }

    fn derivatives(&self, r: f64) -> Result<[f64; 4]> {
        if !(r > 0.0) {
            return Err(LabError::domain("the extremal is singular at r = 0"));
        }
        let c = self.model.kappa().sqrt();
        let (s, ch) = ((c * r).sinh(), (c * r).cosh());
        let b = self.beta;
        let sb = s.powf(-b);
        let u = sb * self.tail_ratio(r)?;
        let u1 = -sb;
        let u2 = b * c * ch * sb / s;
        let u3 = b * c * c * (sb - (b + 1.0) * ch * ch * sb / (s * s));
        Ok([u, u1, u2, u3])
    }

    fn domain(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }

    fn describe(&self) -> serde_json::Value {
        serde_json::json!({
            "kind": "hyperbolic_extremal",
            "dim": self.model.dim(),
            "p": self.p,
            "kappa": self.model.kappa(),
        })
    }

    fn certificate(&self) -> Option<SolutionCertificate> {
        Some(SolutionCertificate {
            p: self.p,
            f: ReactionTerm::Zero,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogGradientProfile {
    pub n: usize,
    pub p: f64,
    pub kappa: f64,
    pub grid: Vec<f64>,
    pub u: Vec<f64>,
    pub g: Vec<f64>,
    pub sup_g: f64,
    /// Richardson extrapolation in `1/r` from the last two grid points.
    pub limit_estimate: f64,
    /// Largest relative p-Laplacian residual over the grid.
    pub max_residual: f64,
    /// Whether `g` is non-increasing along the grid.
    pub decreasing: bool,
    pub certificate: Option<SolutionCertificate>,
    pub quad_tol: QuadSettings,
}

fn richardson(grid: &[f64], g: &[f64]) -> f64 {
    match (grid, g) {
        ([.., r1, r2], [.., g1, g2]) => (r2 * g2 - r1 * g1) / (r2 - r1),
        _ => g.last().copied().unwrap_or(0.0),
    }
}

/// Log-gradient profile of the hyperbolic p-harmonic extremal on `grid`.
pub fn hn_p_harmonic_profile(n: usize, p: f64, kappa: f64, grid: &[f64]) -> Result<LogGradientProfile> {
    if grid.is_empty() || grid.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
        return Err(LabError::input("grid must be nonempty and inside (0, inf)"));
    }
    let ex = HyperbolicExtremal::new(n, p, kappa)?;
    let mut u = Vec::with_capacity(grid.len());
    let mut g = Vec::with_capacity(grid.len());
    let mut max_residual = 0.0f64;
    for &r in grid {
        let d = ex.derivatives(r)?;
        let (k, _) = ex.model.log_derivative(r);
        max_residual = max_residual.max(radial_residual(n, p, k, [d[0], d[1], d[2]]));
        u.push(d[0]);
        g.push(ex.log_gradient(r)?);
    }
    if u.iter().any(|v| !(*v > 0.0)) {
        return Err(LabError::numerical("extremal underflowed on the grid", 0.0));
    }
    let decreasing = g.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    let sup_g = g.iter().copied().fold(0.0, f64::max);
    if max_residual > HARMONIC_RESIDUAL_TOL {
        return Err(LabError::numerical("extremal failed the p-harmonicity plug-in", max_residual));
    }
    Ok(LogGradientProfile {
        n,
        p,
        kappa,
        limit_estimate: richardson(grid, &g),
        grid: grid.to_vec(),
        u,
        g,
        sup_g,
        max_residual,
        decreasing,
        certificate: ex.certificate(),
        quad_tol: ex.quad,
    })
}

/// A constant profile: `g = 0`, a solution of the `f = 0` equation.
pub fn constant_profile(n: usize, p: f64, value: f64, grid: &[f64]) -> Result<LogGradientProfile> {
    if !(value > 0.0) {
        return Err(LabError::input("constant profile must be positive"));
    }
    Ok(LogGradientProfile {
        n,
        p,
        kappa: 0.0,
        grid: grid.to_vec(),
        u: vec![value; grid.len()],
        g: vec![0.0; grid.len()],
        sup_g: 0.0,
        limit_estimate: 0.0,
        max_residual: 0.0,
        decreasing: true,
        certificate: Some(SolutionCertificate {
            p,
            f: ReactionTerm::Zero,
        }),
        quad_tol: QuadSettings::default(),
    })
}

/// The entire p-harmonic function `u = exp(beta sqrt(kappa) b)` on hyperbolic
/// space, `b` a Busemann function, sampled at the levels `b = s` of `grid`.
///
/// `|grad b| = 1` and `lap b = -(n-1) sqrt(kappa)`, so along the gradient lines
/// `lap_p u = |u'|^{p-2} ((p-1) u'' - (n-1) sqrt(kappa) u')`, which the
/// residual is computed from.
pub fn hn_horospherical_profile(n: usize, p: f64, kappa: f64, grid: &[f64]) -> Result<LogGradientProfile> {
    if grid.is_empty() || grid.iter().any(|s| !s.is_finite()) {
        return Err(LabError::input("grid must be nonempty and finite"));
    }
    let model = ManifoldModel::hyperbolic(n, kappa)?;
    if !(p > 1.0) {
        return Err(LabError::input("p must exceed 1"));
    }
    let c = (n as f64 - 1.0) / (p - 1.0) * model.kappa().sqrt();
    let mut u = Vec::with_capacity(grid.len());
    let mut max_residual = 0.0f64;
    for &s in grid {
        let v = (c * s).exp();
        if !(v > 0.0 && v.is_finite()) {
            return Err(LabError::numerical("horospherical profile left floating-point range", v));
        }
        let (u1, u2) = (c * v, c * c * v);
        let mean = (n as f64 - 1.0) * model.kappa().sqrt();
        max_residual = max_residual.max(radial_residual(n, p, -mean / (n as f64 - 1.0), [v, u1, u2]));
        u.push(v);
    }
    if max_residual > HARMONIC_RESIDUAL_TOL {
        return Err(LabError::numerical("horospherical profile failed the plug-in", max_residual));
    }
    let g = vec![c; grid.len()];
    Ok(LogGradientProfile {
        n,
        p,
        kappa,
        grid: grid.to_vec(),
        u,
        limit_estimate: c,
        sup_g: c,
        g,
        max_residual,
        decreasing: true,
        certificate: Some(SolutionCertificate {
            p,
            f: ReactionTerm::Zero,
        }),
        quad_tol: QuadSettings::default(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlobalBoundReport {
    pub bound: f64,
    pub sup_g: f64,
    /// `bound (1 + slack) - sup_g`.
    pub margin: f64,
    pub limit_estimate: f64,
    pub sharp: bool,
    pub pass: bool,
}

/// Checks `sup g <= (n-1)/(p-1) sqrt(kappa/(1-delta0^+))` on a certified profile.
pub fn global_bound_check(profile: &LogGradientProfile, n: usize, p: f64, kappa: f64, delta0: f64) -> Result<GlobalBoundReport> {
    let cert = profile
        .certificate
        .as_ref()
        .ok_or_else(|| LabError::precondition("profile is not a certified solution"))?;
    if profile.max_residual > HARMONIC_RESIDUAL_TOL {
        return Err(LabError::precondition("profile residual exceeds the certification tolerance"));
    }
    if (cert.p - p).abs() > 1e-12 {
        return Err(LabError::precondition("profile certifies a different p"));
    }
    let gp = GradientEstimateParams::new(delta0, p)?;
    if !satisfies_f2(&cert.f, delta0, n, p, &ConditionGrid::default())?.verdict.holds {
        return Err(LabError::precondition("the nonlinearity fails the gradient-estimate condition"));
    }
    let bound = gp.global_bound(n, p, kappa);
    let margin = bound * (1.0 + BOUND_SLACK) - profile.sup_g;
    Ok(GlobalBoundReport {
        bound,
        sup_g: profile.sup_g,
        margin,
        limit_estimate: profile.limit_estimate,
        sharp: bound > 0.0 && profile.limit_estimate >= SHARPNESS_FRACTION * bound,
        pass: margin >= 0.0,
    })
}

/// Positive p-harmonic families on Euclidean balls `B_R`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScalingFamily {
    /// `1 + x_1 / R`
    Affine { n: usize, p: f64 },
    /// `|x - x0|^{(p-n)/(p-1)}` with `x0 = (offset R, 0, ...)`
    Fundamental { n: usize, p: f64, offset: f64 },
}

impl ScalingFamily {
    fn dims(&self) -> (usize, f64) {
        match *self {
            ScalingFamily::Affine { n, p } | ScalingFamily::Fundamental { n, p, .. } => (n, p),
        }
    }

    fn member(&self, radius: f64) -> Result<EuclideanField> {
        let (n, p) = self.dims();
        let expr = match *self {
            ScalingFamily::Affine { .. } => {
                let mut powers = vec![0; n];
                powers[0] = 1;
                FieldExpr::Polynomial {
                    terms: vec![
                        crate::fields::Monomial {
                            coef: 1.0,
                            powers: vec![0; n],
                        },
                        crate::fields::Monomial {
                            coef: 1.0 / radius,
                            powers,
                        },
                    ],
                }
            }
            ScalingFamily::Fundamental { offset, .. } => {
                if (p - n as f64).abs() < 1e-12 {
                    return Err(LabError::input("the power fundamental profile needs p != n"));
                }
                if offset < 2.0 {
                    return Err(LabError::input("the pole must lie outside B_{2R}"));
                }
                let mut center = vec![0.0; n];
                center[0] = offset * radius;
                FieldExpr::PowerDistance {
                    center,
                    exponent: (p - n as f64) / (p - 1.0),
                }
            }
        };
        EuclideanField::new(n, expr)
    }
}

/// Deterministic points of the closed ball of radius `rho`: the centre, the
/// axis points and a Fibonacci-type cover of nested spheres.
fn ball_points(n: usize, rho: f64) -> Vec<Vec<f64>> {
    let mut pts = vec![vec![0.0; n]];
    for i in 0..n {
        for s in [-1.0, 1.0] {
            let mut x = vec![0.0; n];
            x[i] = s * rho;
            pts.push(x);
        }
    }
    const M: usize = 400;
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    for shell in [0.5, 0.9, 1.0] {
        for k in 0..M {
            // spread directions with low-discrepancy angles
            let mut dir = vec![0.0; n];
            for (i, d) in dir.iter_mut().enumerate() {
                let t = ((k as f64 + 0.5) * golden.powi(i as i32 + 1)).fract();
                *d = (2.0 * std::f64::consts::PI * t).cos() + if i == 0 { 2.0 * (k as f64 + 0.5) / M as f64 - 1.0 } else { 0.0 };
            }
            let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                pts.push(dir.iter().map(|d| d / norm * shell * rho).collect());
            }
        }
    }
    pts
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub radius: f64,
    /// `R sup_{B_{R/4}} |grad ln u|`
    pub quantity: f64,
    pub max_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalScalingReport {
    pub family: ScalingFamily,
    pub rows: Vec<ScalingRow>,
    pub sup_quantity: f64,
    /// Least-squares slope of `ln quantity` against `ln R`.
    pub slope: f64,
    pub finite: bool,
    pub stable: bool,
    pub pass: bool,
}

fn p_lap_residual(j: &Jet2, p: f64) -> f64 {
    let h = j.grad_norm_sq();
    let a = h.powf(0.5 * (p - 2.0)) * j.laplacian();
    let b = (p - 2.0) * h.powf(0.5 * (p - 4.0)) * j.inf_laplacian();
    let scale = h.powf(0.5 * (p - 2.0)) * j.hess.frob_sq().sqrt() * (1.0 + (p - 2.0).abs());
    (a + b).abs() / (scale + f64::MIN_POSITIVE)
}

/// `R sup_{B_{R/4}} |grad ln u|` across `radii` for a p-harmonic family.
pub fn local_scaling_check(family: ScalingFamily, radii: &[f64]) -> Result<LocalScalingReport> {
    if radii.is_empty() || radii.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
        return Err(LabError::input("radii must be positive and finite"));
    }
    let (n, p) = family.dims();
    let mut rows = Vec::with_capacity(radii.len());
    for &radius in radii {
        let field = family.member(radius)?;
        for x in ball_points(n, 0.999 * radius) {
            if !(field.value(&x) > 0.0) {
                return Err(LabError::input(format!("family member is not positive on B_{radius}")));
            }
        }
        let mut sup = 0.0f64;
        let mut max_residual = 0.0f64;
        for x in ball_points(n, radius / 4.0) {
            let t = field.taylor(&x)?;
            let j = Jet2 {
                u: t.v,
                grad: t.g[..n].to_vec(),
                hess: crate::linalg::Mat::from_fn(n, |i, k| t.h[i][k]),
            };
            sup = sup.max(j.grad_norm() / j.u);
            if j.hess.frob_sq() > 0.0 {
                max_residual = max_residual.max(p_lap_residual(&j, p));
            }
        }
        if max_residual > HARMONIC_RESIDUAL_TOL {
            return Err(LabError::numerical("family member failed the p-harmonicity check", max_residual));
        }
        rows.push(ScalingRow {
            radius,
            quantity: radius * sup,
            max_residual,
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.radius.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.quantity.ln()).collect();
    let slope = if xs.len() < 2 {
        0.0
    } else {
        let mx = xs.iter().sum::<f64>() / xs.len() as f64;
        let my = ys.iter().sum::<f64>() / ys.len() as f64;
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        sxy / sxx
    };
    let sup_quantity = rows.iter().map(|r| r.quantity).fold(0.0, f64::max);
    let finite = rows.iter().all(|r| r.quantity.is_finite());
    let stable = slope.abs() <= SLOPE_TOL;
    Ok(LocalScalingReport {
        family,
        rows,
        sup_quantity,
        slope,
        finite,
        stable,
        pass: finite && stable,
    })
}

/// Radial profiles on `R^n` for the Harnack-type ratios.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case", deny_unknown_fields)]
pub enum HarnackProfile {
    Constant { value: f64 },
    /// `(1 + r^2)^{-power}`
    Decay { power: f64 },
    /// Emden bubble of the given `lambda` (same `n`, `p` as the check).
    Bubble { lambda: f64 },
}

impl HarnackProfile {
    /// `[u, u', u'']` at `r`.
    fn derivs(&self, n: usize, p: f64, r: f64) -> Result<[f64; 3]> {
        let t = Taylor3::variable(1, 0, r);
        let v = match *self {
            HarnackProfile::Constant { value } => return Ok([value, 0.0, 0.0]),
            HarnackProfile::Decay { power } => FieldExpr::Rational {
                amplitude: 1.0,
                center: vec![0.0],
                scale: 1.0,
                power,
            }
            .eval(&[t]),
            HarnackProfile::Bubble { lambda } => EmdenBubble::new(n, p, lambda)?.eval_taylor(t),
        };
        Ok([v.v, v.g[0], v.h[0][0]])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub radius: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub profile: HarnackProfile,
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub rows: Vec<RatioRow>,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub band: f64,
    /// Most negative `-lap_p u` relative to its scale on the certification grid.
    pub min_superharmonic_margin: f64,
    pub quad_tol: QuadSettings,
    pub pass: bool,
}

const CERT_POINTS: usize = 2000;

/// Certifies `-lap_p u >= 0` on `(0, r_max]`.
fn certify_superharmonic(profile: &HarnackProfile, n: usize, p: f64, r_max: f64) -> Result<f64> {
    let mut worst = f64::INFINITY;
    for i in 1..=CERT_POINTS {
        let r = r_max * i as f64 / CERT_POINTS as f64;
        let [_, u1, u2] = profile.derivs(n, p, r)?;
        if u1 == 0.0 {
            worst = worst.min(0.0);
            continue;
        }
        let w = u1.abs().powf(p - 2.0);
        let a = (p - 1.0) * u2;
        let b = (n as f64 - 1.0) * u1 / r;
        let minus_lap = -w * (a + b);
        let scale = w * (a.abs() + b.abs());
        worst = worst.min(minus_lap / scale);
    }
    if worst < -SUPER_TOL {
        return Err(LabError::precondition(format!(
            "profile is not p-superharmonic on the grid (relative margin {worst:e})"
        )));
    }
    Ok(worst)
}

fn radial_lq(profile: &HarnackProfile, n: usize, p: f64, q: f64, radius: f64, invert: bool, quad: QuadSettings) -> Result<f64> {
    let area = unit_sphere_area(n);
    let mut err = None;
    let res = integrate(
        |r| match profile.derivs(n, p, r) {
            Ok([u, ..]) => (if invert { 1.0 / u } else { u }).powf(q) * r.powi(n as i32 - 1),
            Err(e) => {
                err = Some(e);
                0.0
            }
        },
        0.0,
        radius,
        quad,
    )?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok((area * res.value).powf(1.0 / q))
}

fn min_on_ball(profile: &HarnackProfile, n: usize, p: f64, radius: f64, invert: bool) -> Result<f64> {
    const K: usize = 512;
    let mut best = f64::INFINITY;
    for i in 0..=K {
        let [u, ..] = profile.derivs(n, p, radius * i as f64 / K as f64)?;
        best = best.min(if invert { 1.0 / u } else { u });
    }
    Ok(best)
}

fn max_on_ball(profile: &HarnackProfile, n: usize, p: f64, radius: f64, invert: bool) -> Result<f64> {
    const K: usize = 512;
    let mut best = 0.0f64;
    for i in 0..=K {
        let [u, ..] = profile.derivs(n, p, radius * i as f64 / K as f64)?;
        best = best.max(if invert { 1.0 / u } else { u });
    }
    Ok(best)
}

fn ratio_report(
    profile: HarnackProfile,
    n: usize,
    p: f64,
    q: f64,
    radii: &[f64],
    band: f64,
    ratio_at: impl Fn(f64, QuadSettings) -> Result<f64>,
) -> Result<RatioReport> {
    HarnackConfig::new(n, p, q, 2.0)?;
    if radii.is_empty() || radii.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
        return Err(LabError::input("radii must be positive and finite"));
    }
    let quad = QuadSettings::default();
    let r_max = radii.iter().copied().fold(0.0, f64::max);
    let margin = certify_superharmonic(&profile, n, p, 2.0 * r_max)?;
    let rows = radii
        .iter()
        .map(|&radius| Ok(RatioRow { radius, ratio: ratio_at(radius, quad)? }))
        .collect::<Result<Vec<_>>>()?;
    let min_ratio = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(RatioReport {
        profile,
        n,
        p,
        q,
        rows,
        min_ratio,
        max_ratio,
        band,
        min_superharmonic_margin: margin,
        quad_tol: quad,
        pass: min_ratio > 0.0 && max_ratio / min_ratio <= band,
    })
}

/// `inf_{B_R} u / (R^{-n/q} ||u||_{L^q(B_{2R})})` across `radii` on `R^n`.
pub fn weak_harnack_ratio(profile: HarnackProfile, n: usize, p: f64, q: f64, radii: &[f64], band: f64) -> Result<RatioReport> {
    ratio_report(profile, n, p, q, radii, band, |radius, quad| {
        let inf = min_on_ball(&profile, n, p, radius, false)?;
        let norm = radial_lq(&profile, n, p, q, 2.0 * radius, false, quad)?;
        Ok(inf / (radius.powf(-(n as f64) / q) * norm))
    })
}

/// `||1/u||_{L^inf(B_{R/2})} / (V_R^{-1/q} ||1/u||_{L^q(B_R)})` across `radii` on `R^n`.
pub fn local_max_principle_ratio(profile: HarnackProfile, n: usize, p: f64, q: f64, radii: &[f64], band: f64) -> Result<RatioReport> {
    ratio_report(profile, n, p, q, radii, band, |radius, quad| {
        let sup = max_on_ball(&profile, n, p, radius / 2.0, true)?;
        let norm = radial_lq(&profile, n, p, q, radius, true, quad)?;
        let vol = unit_sphere_area(n) * radius.powi(n as i32) / n as f64;
        Ok(sup / (vol.powf(-1.0 / q) * norm))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extremal_tends_to_bound() {
        let grid: Vec<f64> = (1..=40).map(|i| 0.5 * i as f64).collect();
        let pr = hn_p_harmonic_profile(3, 2.0, 1.0, &grid).unwrap();
        // g = 2 / (1 - e^{-2r}): decreases to the bound from above
        assert!(pr.decreasing);
        for (r, g) in pr.grid.iter().zip(&pr.g) {
            assert!((g - 2.0 / (1.0 - (-2.0 * r).exp())).abs() < 1e-9 * g);
        }
        assert!(pr.max_residual <= HARMONIC_RESIDUAL_TOL);
        let rep = global_bound_check(&pr, 3, 2.0, 1.0, 0.0).unwrap();
        assert!(rep.sharp);
        assert!(!rep.pass, "the singular extremal exceeds the bound near the pole");
        let pr = hn_p_harmonic_profile(3, 3.0, 1.0, &grid).unwrap();
        assert!((pr.g.last().unwrap() - 1.0).abs() < 0.01);
    }

    #[test]
    fn extremal_values_match_direct_quadrature() {
        // n = 3, p = 2, kappa = 1: u(r) = coth(r) - 1
        let ex = HyperbolicExtremal::new(3, 2.0, 1.0).unwrap();
        for r in [0.3, 1.0, 4.0] {
            let u = ex.derivatives(r).unwrap()[0];
            assert!((u - (1.0 / r.tanh() - 1.0)).abs() < 1e-10 * u);
        }
    }

    #[test]
    fn horospherical_profile_attains_bound() {
        let grid: Vec<f64> = (-10..=10).map(f64::from).collect();
        for (n, p, kappa) in [(3, 2.0, 1.0), (2, 1.5, 0.25), (4, 3.0, 4.0)] {
            let pr = hn_horospherical_profile(n, p, kappa, &grid).unwrap();
            let rep = global_bound_check(&pr, n, p, kappa, 0.0).unwrap();
            assert!(rep.pass && rep.sharp, "{rep:?}");
            assert!((rep.sup_g - rep.bound).abs() <= 1e-14 * rep.bound);
        }
    }

    #[test]
    fn constant_profile_passes_any_bound() {
        let pr = constant_profile(3, 2.0, 5.0, &[1.0, 2.0]).unwrap();
        let rep = global_bound_check(&pr, 3, 2.0, 0.0, 0.0).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.sup_g, 0.0);
    }

    #[test]
    fn uncertified_profile_is_refused() {
        let mut pr = constant_profile(3, 2.0, 5.0, &[1.0]).unwrap();
        pr.certificate = None;
        assert!(matches!(global_bound_check(&pr, 3, 2.0, 1.0, 0.0), Err(LabError::Precondition(_))));
    }

    #[test]
    fn affine_quantity_is_four_thirds() {
        let rep = local_scaling_check(ScalingFamily::Affine { n: 3, p: 2.0 }, &[1.0, 2.0, 4.0, 8.0]).unwrap();
        for row in &rep.rows {
            assert!((row.quantity - 4.0 / 3.0).abs() < 1e-12, "{row:?}");
        }
        assert!(rep.pass);
    }

    #[test]
    fn fundamental_family_is_stable() {
        let fam = ScalingFamily::Fundamental { n: 2, p: 3.0, offset: 3.0 };
        let rep = local_scaling_check(fam, &[1.0, 2.0, 4.0, 8.0]).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!((rep.rows[0].quantity - 0.5 / 2.75).abs() < 1e-9);
    }

    #[test]
    fn constant_harnack_ratios() {
        let c = HarnackProfile::Constant { value: 2.0 };
        let radii = [1.0, 2.0, 4.0];
        let w = weak_harnack_ratio(c, 3, 2.0, 1.0, &radii, DEFAULT_BAND).unwrap();
        // (R^n / Vol(B_2R))^{1/q}
        let expect = 1.0 / (unit_sphere_area(3) * 8.0 / 3.0);
        for row in &w.rows {
            assert!((row.ratio - expect).abs() < 1e-10 * expect);
        }
        let l = local_max_principle_ratio(c, 3, 2.0, 1.0, &radii, DEFAULT_BAND).unwrap();
        for row in &l.rows {
            assert!((row.ratio - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn decaying_profiles_stay_in_band() {
        let radii: Vec<f64> = (0..=5).map(|k| 2f64.powi(k)).collect();
        let d = HarnackProfile::Decay { power: 0.5 };
        let w = weak_harnack_ratio(d, 3, 2.0, 1.0, &radii, DEFAULT_BAND).unwrap();
        assert!(w.pass, "{w:?}");
        let l = local_max_principle_ratio(d, 3, 2.0, 1.0, &radii[..5], DEFAULT_BAND).unwrap();
        assert!(l.pass, "{l:?}");
        let b = HarnackProfile::Bubble { lambda: 1.0 };
        let w = weak_harnack_ratio(b, 3, 2.0, 1.0, &radii, DEFAULT_BAND).unwrap();
        assert!(w.pass && w.min_ratio > 0.0, "{w:?}");
        let w = weak_harnack_ratio(b, 4, 3.0, 1.5, &radii, DEFAULT_BAND).unwrap();
        assert!(w.pass, "{w:?}");
    }

    #[test]
    fn q_outside_range_is_refused() {
        let c = HarnackProfile::Decay { power: 0.5 };
        // (p-1) chi = 3 for n = 3, p = 2
        assert!(weak_harnack_ratio(c, 3, 2.0, 3.5, &[1.0], DEFAULT_BAND).is_err());
    }

    #[test]
    fn subharmonic_profile_is_refused() {
        // (1 + r^2)^{-2} has -lap u < 0 for large r in R^3
        let c = HarnackProfile::Decay { power: 2.0 };
        assert!(matches!(
            weak_harnack_ratio(c, 3, 2.0, 1.0, &[1.0, 4.0], DEFAULT_BAND),
            Err(LabError::Precondition(_))
        ));
    }
}
