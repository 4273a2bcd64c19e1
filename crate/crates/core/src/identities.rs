//! Seeded verification campaigns for the pointwise identities and inequalities.
//!
//! Each check evaluates both sides independently: left sides are divergences
//! of lifted vector fields, right sides are closed forms in jet data.

use crate::error::{LabError, Result};
use crate::exponents::{satisfies_f2, ConditionGrid};
use crate::fields::{admissible, basic2_coefficient, lift_radial, LiftedJet, RadialSource, SamplePoint, ScalarField, VectorFieldSpec};
use crate::jets::{traceless, Jet2, PJetParams};
use crate::linalg::{dot, norm_sq, scale_vec};
use crate::real::Dual;
use crate::reaction::ReactionTerm;
use crate::report::{
    reduce_identity, reduce_inequality, CheckId, IdentityReport, IdentitySample, InequalityReport, InequalitySample,
    RESIDUAL_FLOOR,
};
use crate::sampling::{admissible_draw, random_jet, sample_rng, CampaignModel, FieldFamily};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::sync::Arc;

pub const TOL_SECOND_ORDER: f64 = 1e-8;
pub const TOL_THIRD_ORDER: f64 = 1e-7;
pub const TOL_ON_SOLUTIONS: f64 = 1e-6;
pub const TOL_NEG: f64 = 1e-10;
pub const TOL_NEG_MOSER: f64 = 1e-8;

fn default_ab() -> Vec<f64> {
    vec![-2.0, -1.0, 0.0, 1.0, 2.0]
}

/// A sampling campaign over random positive fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Campaign {
    #[serde(flatten)]
    pub model: CampaignModel,
    pub dim: usize,
    pub family: FieldFamily,
    pub p_values: Vec<f64>,
    #[serde(default = "default_ab")]
    pub a_values: Vec<f64>,
    #[serde(default = "default_ab")]
    pub b_values: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
}

impl Campaign {
    pub fn new(model: CampaignModel, dim: usize, family: FieldFamily, p_values: Vec<f64>, samples: usize, seed: u64) -> Self {
        Campaign {
            model,
            dim,
            family,
            p_values,
            a_values: default_ab(),
            b_values: default_ab(),
            samples,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.p_values.is_empty() || self.a_values.is_empty() || self.b_values.is_empty() {
            return Err(LabError::input("campaign grids must be nonempty"));
        }
        if self.samples == 0 {
            return Err(LabError::input("campaign needs at least one sample"));
        }
        for &p in &self.p_values {
            PJetParams::new(p, 0.0, 0.0)?;
        }
        Ok(())
    }

    /// `(p, a, b)` for sample `i`, cycling through the grids.
    fn params(&self, i: usize) -> PJetParams {
        let (np, na, nb) = (self.p_values.len(), self.a_values.len(), self.b_values.len());
        PJetParams {
            p: self.p_values[i % np],
            b: self.b_values[(i / np) % nb],
            a: self.a_values[(i / (np * nb)) % na],
        }
    }
}

fn params_json(params: &PJetParams, field: &ScalarField) -> serde_json::Value {
    json!({"p": params.p, "a": params.a, "b": params.b, "field": field.describe()})
}

type Sides = (Vec<f64>, Vec<f64>);

fn run_campaign(
    c: &Campaign,
    id: CheckId,
    tol: f64,
    eval: impl Fn(&LiftedJet, &PJetParams) -> Sides + Sync,
) -> Result<IdentityReport> {
    c.validate()?;
    let model = c.model.build(c.dim)?;
    let flat = matches!(c.model, CampaignModel::Euclidean);
    let samples = (0..c.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(c.seed, i as u64);
            let d = admissible_draw(&mut rng, &model, flat, c.family)?;
            let params = c.params(i);
            let (lhs, rhs) = eval(&d.lifted, &params);
            Ok(IdentitySample {
                index: i as u64,
                params: params_json(&params, &d.field),
                sample: serde_json::to_value(&d.point).unwrap_or_default(),
                lhs,
                rhs,
                filtered: d.filtered,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(reduce_identity(id, tol, samples))
}

/// `Delta_p u` two ways: divergence of `U` versus the expanded second-order form.
pub fn decomposition_sides(l: &LiftedJet, params: &PJetParams) -> Sides {
    let p = params.p;
    let v = l.values();
    let lhs = l.div(&VectorFieldSpec::U.eval(&l.jet, params));
    let h = v.grad_norm_sq();
    let rhs = h.powf(0.5 * (p - 2.0)) * v.laplacian() + (p - 2.0) * h.powf(0.5 * (p - 4.0)) * v.inf_laplacian();
    (vec![lhs], vec![rhs])
}

/// `grad_U U` by directional differentiation versus `(1/p)|du|^{p-2} A_u(grad |du|^p)`.
pub fn ww_sides(l: &LiftedJet, params: &PJetParams) -> Sides {
    let p = params.p;
    let v = l.values();
    let u_field = VectorFieldSpec::U.eval(&l.jet, params);
    let n = l.dim();
    let lhs = (0..n)
        .map(|i| (0..n).map(|j| u_field[j].v * u_field[i].d[j]).sum())
        .collect();
    let rhs = scale_vec(
        v.grad_norm_sq().powf(0.5 * (p - 2.0)) / p,
        &v.a_apply(p, &v.grad_of_grad_power(p)),
    );
    (lhs, rhs)
}

fn div_x_dual(l: &LiftedJet, params: &PJetParams) -> Dual {
    l.jet.endo_x(params).trace()
}

/// `div(grad_X X)` versus `tr(X^2) + <grad div X, X> + Ric(X, X)`.
pub fn bochner_x_sides(l: &LiftedJet, params: &PJetParams) -> Sides {
    let v = l.values();
    let lhs = l.div(&VectorFieldSpec::CovXX.eval(&l.jet, params));
    let x = v.field_x(params);
    let e = v.endo_x(params);
    let rhs = e.trace_sq() + dot(&l.grad(div_x_dual(l, params)), &x) + l.ricci(&x);
    (vec![lhs], vec![rhs])
}

/// `(1/p) L_p |du|^p` versus the p-Bochner right side.
pub fn bochner_p_sides(l: &LiftedJet, params: &PJetParams) -> Sides {
    let p = params.p;
    let v = l.values();
    let lhs = l.div(&VectorFieldSpec::LinearizedGradP.eval(&l.jet, params)) / p;
    let ah = v.a_matrix(p).matmul(&v.hess);
    let phi = v.field_u(p);
    let grad_lap = l.grad(l.jet.p_laplacian_raw(p));
    let rhs = v.grad_norm_sq().powf(p - 2.0) * ah.trace_sq() + dot(&grad_lap, &phi) + l.ricci(&phi);
    (vec![lhs], vec![rhs])
}

/// The first weighted identity, valid for arbitrary positive fields.
pub fn basic1_sides(l: &LiftedJet, params: &PJetParams) -> Sides {
    let PJetParams { p, a, b } = *params;
    let v = l.values();
    let lhs = l.div(&VectorFieldSpec::Basic1.eval(&l.jet, params));
    let x = v.field_x(params);
    let e = v.endo_x(params);
    let tr = e.trace();
    let g = v.grad_norm_sq().sqrt();
    let u = v.u;
    let rhs = u.powf(a) * (e.trace_sq() - tr * tr + l.ricci(&x))
        - ((p - 1.0) * (a + 2.0 * b - 1.0) * a / p) * u.powf(a + 2.0 * b - 2.0) * g.powf(2.0 * p)
        - ((2.0 * p - 1.0) * a / p) * u.powf(a + 2.0 * b - 1.0) * g.powf(p) * v.p_laplacian_raw(p);
    (vec![lhs], vec![rhs])
}

pub fn check_decomposition(c: &Campaign) -> Result<IdentityReport> {
    run_campaign(c, CheckId::Decomposition, TOL_SECOND_ORDER, decomposition_sides)
}

pub fn check_ww(c: &Campaign) -> Result<IdentityReport> {
    run_campaign(c, CheckId::Ww, TOL_SECOND_ORDER, ww_sides)
}

pub fn check_bochner_x(c: &Campaign) -> Result<IdentityReport> {
    run_campaign(c, CheckId::BochnerX, TOL_THIRD_ORDER, bochner_x_sides)
}

pub fn check_bochner_p(c: &Campaign) -> Result<IdentityReport> {
    run_campaign(c, CheckId::BochnerP, TOL_THIRD_ORDER, bochner_p_sides)
}

/// Runs the first weighted identity with `(a, b)` cycling through the campaign grids.
pub fn check_basic1(c: &Campaign) -> Result<IdentityReport> {
    run_campaign(c, CheckId::Basic1, TOL_THIRD_ORDER, basic1_sides)
}

/// Same, with `(a, b)` fixed.
pub fn check_basic1_at(c: &Campaign, a: f64, b: f64) -> Result<IdentityReport> {
    let c = Campaign {
        a_values: vec![a],
        b_values: vec![b],
        ..c.clone()
    };
    check_basic1(&c)
}

/// Certified radial solutions to sample the solution-only identity on.
#[derive(Clone, Debug)]
pub struct SolutionCampaign {
    pub sources: Vec<Arc<dyn RadialSource>>,
    pub samples: usize,
    pub seed: u64,
    /// Fraction of the solved range trimmed at each end.
    pub trim: f64,
}

impl SolutionCampaign {
    pub fn new(sources: Vec<Arc<dyn RadialSource>>, samples: usize, seed: u64) -> Self {
        SolutionCampaign {
            sources,
            samples,
            seed,
            trim: 0.02,
        }
    }

    /// Certified `(p, f)` shared by every source; errors when a source is uncertified
    /// or solves a different equation.
    fn equation(&self, f: &ReactionTerm) -> Result<f64> {
        let mut p = None;
        for s in &self.sources {
            let cert = s
                .certificate()
                .ok_or_else(|| LabError::precondition("field is not a certified solution of the equation"))?;
            if &cert.f != f {
                return Err(LabError::precondition("field certifies a different nonlinearity"));
            }
            if p.is_some_and(|q| q != cert.p) {
                return Err(LabError::precondition("sources certify different p"));
            }
            p = Some(cert.p);
        }
        p.ok_or_else(|| LabError::input("solution campaign has no sources"))
    }

    fn sample(&self, i: usize) -> Result<(usize, f64, LiftedJet, usize)> {
        let mut rng = sample_rng(self.seed, i as u64);
        let k = i % self.sources.len();
        let src = &self.sources[k];
        let (lo, hi) = src.domain();
        let hi = if hi.is_finite() { hi } else { lo + 20.0 };
        let width = hi - lo;
        let (a, b) = (lo + self.trim * width, hi - self.trim * width);
        let field = ScalarField::Radial(src.clone());
        for filtered in 0..crate::sampling::MAX_DRAWS {
            let r = rng.random_range(a..b);
            match field.lift(&SamplePoint::Radius(r)) {
                Ok(l) if admissible(&l.values(), false).is_ok() => return Ok((k, r, l, filtered)),
                Ok(_) | Err(LabError::Singular { .. }) | Err(LabError::Domain(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        Err(LabError::numerical("no admissible radius on the solution", crate::sampling::MAX_DRAWS as f64))
    }
}

/// The weighted identity that uses the equation, with the generic coefficients.
pub fn basic2_sides(l: &LiftedJet, params: &PJetParams, f: &ReactionTerm) -> Sides {
    let PJetParams { p, a, b } = *params;
    let v = l.values();
    let n = l.dim() as f64;
    let lhs = l.div(&VectorFieldSpec::Basic2.eval(&l.jet, params));
    let x = v.field_x(params);
    let e = traceless(&v.endo_x(params), l.dim());
    let u = v.u;
    let g = v.grad_norm_sq().sqrt();
    let c1 = ((p - 1.0) * a / p) * (1.0 - (n - p) * a / ((n - 1.0) * p))
        - ((n - 1.0) / n) * (b + n * (p - 1.0) * a / ((n - 1.0) * p)).powi(2);
    let c2 = ((n - 1.0) / n) * (((n + 1.0) * p - n) * a / ((n - 1.0) * p) * f.eval(u) - u * f.deriv(u));
    let rhs = u.powf(a) * (e.trace_sq() + l.ricci(&x))
        + c1 * u.powf(a + 2.0 * b - 2.0) * g.powf(2.0 * p)
        + c2 * u.powf(a + 2.0 * b - 1.0) * g.powf(p);
    (vec![lhs], vec![rhs])
}

/// Exponents and coefficients of the special weighted identity at `alpha`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecialChoice {
    pub a: f64,
    pub b: f64,
    /// Coefficient of `u^{a+2b-2} |du|^{2p}`.
    pub gradient_coefficient: f64,
}

pub fn special_choice(n: usize, p: f64, alpha: f64) -> SpecialChoice {
    let nf = n as f64;
    let d = (nf + 1.0) * p - nf;
    SpecialChoice {
        a: (nf - 1.0) * p * alpha / d,
        b: -nf * (p - 1.0) * alpha / d,
        gradient_coefficient: (nf - 1.0) * (p - 1.0) * alpha / d * (1.0 - (nf - p) * alpha / d),
    }
}

/// Right side with the quoted special coefficients.
pub fn basic2_special_sides(l: &LiftedJet, p: f64, alpha: f64, f: &ReactionTerm) -> Sides {
    let n = l.dim();
    let s = special_choice(n, p, alpha);
    let params = PJetParams { p, a: s.a, b: s.b };
    let v = l.values();
    let lhs = l.div(&VectorFieldSpec::Basic2.eval(&l.jet, &params));
    let x = v.field_x(&params);
    let e = traceless(&v.endo_x(&params), n);
    let u = v.u;
    let g = v.grad_norm_sq().sqrt();
    let c2 = ((n as f64 - 1.0) / n as f64) * (alpha * f.eval(u) - u * f.deriv(u));
    let rhs = u.powf(s.a) * (e.trace_sq() + l.ricci(&x))
        + s.gradient_coefficient * u.powf(s.a + 2.0 * s.b - 2.0) * g.powf(2.0 * p)
        + c2 * u.powf(s.a + 2.0 * s.b - 1.0) * g.powf(p);
    (vec![lhs], vec![rhs])
}

fn solution_report(
    c: &SolutionCampaign,
    id: CheckId,
    params_of: impl Fn(usize) -> serde_json::Value + Sync,
    eval: impl Fn(&LiftedJet) -> Sides + Sync,
) -> Result<IdentityReport> {
    if c.samples == 0 {
        return Err(LabError::input("campaign needs at least one sample"));
    }
    let samples = (0..c.samples)
        .into_par_iter()
        .map(|i| {
            let (k, r, l, filtered) = c.sample(i)?;
            let (lhs, rhs) = eval(&l);
            Ok(IdentitySample {
                index: i as u64,
                params: json!({"params": params_of(i), "source": c.sources[k].describe()}),
                sample: json!({"radius": r}),
                lhs,
                rhs,
                filtered,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(reduce_identity(id, TOL_ON_SOLUTIONS, samples))
}

/// Weighted identity on certified solutions of `-lap_p u = f(u)`.
pub fn check_basic2(c: &SolutionCampaign, f: &ReactionTerm, a: f64, b: f64) -> Result<IdentityReport> {
    let p = c.equation(f)?;
    let params = PJetParams::new(p, a, b)?;
    solution_report(
        c,
        CheckId::Basic2,
        |_| json!({"p": p, "a": a, "b": b, "c": basic2_coefficient(c.sources[0].model().dim(), &params)}),
        |l| basic2_sides(l, &params, f),
    )
}

/// The special choice of `(a, b)` with the quoted coefficients on the right side.
pub fn check_basic2_special(c: &SolutionCampaign, f: &ReactionTerm, alpha: f64) -> Result<IdentityReport> {
    let p = c.equation(f)?;
    let n = c.sources[0].model().dim();
    let s = special_choice(n, p, alpha);
    solution_report(
        c,
        CheckId::Basic2Special,
        |_| json!({"p": p, "alpha": alpha, "a": s.a, "b": s.b}),
        |l| basic2_special_sides(l, p, alpha, f),
    )
}

/// Random-jet campaign for the algebraic inequalities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JetCampaign {
    pub samples: usize,
    pub dims: Vec<usize>,
    pub p_values: Vec<f64>,
    #[serde(default)]
    pub b_values: Vec<f64>,
    pub seed: u64,
}

impl JetCampaign {
    fn validate(&self) -> Result<()> {
        if self.samples == 0 || self.dims.is_empty() || self.p_values.is_empty() {
            return Err(LabError::input("jet campaign needs samples, dimensions and p values"));
        }
        for &n in &self.dims {
            if !(2..=crate::real::MAX_DIM).contains(&n) {
                return Err(LabError::input(format!("dimension {n} outside 2..=6")));
            }
        }
        for &p in &self.p_values {
            PJetParams::new(p, 0.0, 0.0)?;
        }
        Ok(())
    }
}

/// Margins of `|Xo|^2 >= tr(Xo^2)` and `c_p tr(Xo^2) >= |Xo|^2`, normalized by `|Xo|^2`.
pub fn trace_margins(j: &Jet2, params: &PJetParams) -> [(f64, f64, f64); 2] {
    let p = params.p;
    let e = traceless(&j.endo_x(params), j.dim());
    let tr = e.trace_sq();
    let fro = e.frob_sq();
    let scale = fro + RESIDUAL_FLOOR;
    let cp = ((p - 1.0).powi(2) + 1.0) / (2.0 * (p - 1.0));
    [(fro, tr, (fro - tr) / scale), (cp * tr, fro, (cp * tr - fro) / scale)]
}

fn jet_json(j: &Jet2) -> serde_json::Value {
    let n = j.dim();
    let hess: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|k| j.hess.get(i, k)).collect()).collect();
    json!({"u": j.u, "grad": j.grad, "hess": hess})
}

fn draw_jet(c: &JetCampaign, i: usize, positive: bool) -> (ChaCha8Rng, Jet2) {
    let mut rng = sample_rng(c.seed, i as u64);
    let n = c.dims[i % c.dims.len()];
    let j = random_jet(&mut rng, n, positive);
    (rng, j)
}

/// Trace inequality over random positive jets; every jet is tested at every `(p, b)`.
pub fn check_trace_inequality(c: &JetCampaign) -> Result<(InequalityReport, InequalityReport)> {
    c.validate()?;
    let bs = if c.b_values.is_empty() { vec![0.0] } else { c.b_values.clone() };
    let per: Vec<[InequalitySample; 2]> = (0..c.samples)
        .into_par_iter()
        .map(|i| {
            let (_, j) = draw_jet(c, i, true);
            // (margin, lhs, rhs, p, b) of the tightest grid point per inequality
            let mut worst = [(f64::INFINITY, 0.0, 0.0, 0.0, 0.0); 2];
            for &p in &c.p_values {
                for &b in &bs {
                    let params = PJetParams { p, a: 0.0, b };
                    for (k, (l, r, m)) in trace_margins(&j, &params).into_iter().enumerate() {
                        if m < worst[k].0 || m.is_nan() {
                            worst[k] = (m, l, r, p, b);
                        }
                    }
                }
            }
            let sample = jet_json(&j);
            worst.map(|(m, l, r, p, b)| InequalitySample {
                index: i as u64,
                params: json!({"p": p, "b": b}),
                sample: sample.clone(),
                lhs: l,
                rhs: r,
                margin: m,
                filtered: 0,
            })
        })
        .collect();
    let (lower, upper): (Vec<_>, Vec<_>) = per.into_iter().map(|[a, b]| (a, b)).unzip();
    Ok((
        reduce_inequality(CheckId::TraceLower, TOL_NEG, lower),
        reduce_inequality(CheckId::TraceUpper, TOL_NEG, upper),
    ))
}

/// Both sides of the Kato inequality for the jet of `w`, and the normalizing scale.
pub fn kato_sides(w: &Jet2, p: f64) -> (f64, f64, f64) {
    let n = w.dim() as f64;
    let wm = w.endo_u(p);
    let lhs = wm.trace_sq();
    let lap = w.p_laplacian_raw(p);
    let g = w.grad_norm_sq().sqrt();
    let big_f = g.powf(p);
    let grad_f = w.grad_of_grad_power(p);
    let a_grad_f = w.a_apply(p, &grad_f);
    let t1 = lap * lap / (n - 1.0);
    let t2 = -(2.0 / ((n - 1.0) * p)) * dot(&a_grad_f, &w.field_u(p)) * lap / big_f;
    let t3 = (n * (p - 1.0) / ((n - 1.0) * p * p)) * big_f.powf(-2.0 / p) * dot(&a_grad_f, &grad_f);
    let rhs = t1 + t2 + t3;
    let scale = lhs.abs() + t1.abs() + t2.abs() + t3.abs() + RESIDUAL_FLOOR;
    (lhs, rhs, scale)
}

pub fn check_kato(c: &JetCampaign) -> Result<InequalityReport> {
    c.validate()?;
    let samples: Vec<InequalitySample> = (0..c.samples)
        .into_par_iter()
        .map(|i| {
            let (_, j) = draw_jet(c, i, false);
            let mut worst = (f64::INFINITY, 0.0, 0.0, 0.0);
            for &p in &c.p_values {
                let (l, r, s) = kato_sides(&j, p);
                let m = (l - r) / s;
                if m < worst.0 || m.is_nan() {
                    worst = (m, l, r, p);
                }
            }
            let (m, l, r, p) = worst;
            InequalitySample {
                index: i as u64,
                params: json!({"p": p, "n": j.dim()}),
                sample: jet_json(&j),
                lhs: l,
                rhs: r,
                margin: m,
                filtered: 0,
            }
        })
        .collect();
    Ok(reduce_inequality(CheckId::Kato, TOL_NEG, samples))
}

/// Both sides of the pointwise Moser inequality and the scale, at a lifted jet of `u`.
pub fn moser_sides(l: &LiftedJet, p: f64, delta0: f64, lambda: f64, kappa: f64) -> (f64, f64, f64) {
    let n = l.dim() as f64;
    let spec = VectorFieldSpec::MoserFlux { lambda };
    let params = PJetParams { p, a: 0.0, b: 0.0 };
    let lhs = l.div(&spec.eval(&l.jet, &params)) / lambda;
    let w = l.values().log_jet();
    let h = w.grad_norm_sq().sqrt();
    let ghat = scale_vec(1.0 / h, &w.grad);
    let grad_h = norm_sq(&w.hess.matvec(&ghat)).sqrt();
    let dp = delta0.max(0.0);
    let t1 = (1.0 - dp) * ((p - 1.0).powi(2) / (n - 1.0)) * h.powf(lambda + p);
    let t2 = -(n - 1.0) * kappa * h.powf(lambda + p - 2.0);
    let t3 = -p * (p - 1.0) * h.powf(lambda + p - 2.0) * grad_h;
    let rhs = t1 + t2 + t3;
    (lhs, rhs, lhs.abs() + t1.abs() + t2.abs() + t3.abs() + RESIDUAL_FLOOR)
}

/// Moser inequality along a certified radial solution, on `points` evenly spaced radii.
pub fn check_moser_pointwise(src: &dyn RadialSource, delta0: f64, lambda: f64, points: usize) -> Result<InequalityReport> {
    if !(delta0 < 1.0) {
        return Err(LabError::precondition(format!("delta0 must be below 1, got {delta0}")));
    }
    let cert = src
        .certificate()
        .ok_or_else(|| LabError::precondition("field is not a certified solution of the equation"))?;
    let model = src.model();
    let n = model.dim();
    let p = cert.p;
    let f2 = satisfies_f2(&cert.f, delta0, n, p, &ConditionGrid::default())?;
    if !f2.verdict.holds {
        return Err(LabError::precondition(format!(
            "the nonlinearity fails the gradient-estimate condition at delta0 = {delta0}"
        )));
    }
    let lambda0 = p / (1.0 - delta0.max(0.0));
    if lambda < lambda0 * (1.0 - 1e-12) {
        return Err(LabError::precondition(format!("lambda = {lambda} is below lambda0 = {lambda0}")));
    }
    if points == 0 {
        return Err(LabError::input("need at least one radius"));
    }
    let (lo, hi) = src.domain();
    let hi = if hi.is_finite() { hi } else { lo + 20.0 };
    let width = hi - lo;
    let (a, b) = (lo + 0.01 * width, hi - 0.01 * width);
    let kappa = model.kappa();
    let samples: Vec<Option<InequalitySample>> = (0..points)
        .map(|i| {
            let r = if points == 1 { 0.5 * (a + b) } else { a + (b - a) * i as f64 / (points - 1) as f64 };
            let l = match lift_radial(src, r) {
                Ok(l) => l,
                Err(LabError::Singular { .. }) => return Ok(None),
                Err(e) => return Err(e),
            };
            if admissible(&l.values(), true).is_err() {
                return Ok(None);
            }
            let (lhs, rhs, scale) = moser_sides(&l, p, delta0, lambda, kappa);
            Ok(Some(InequalitySample {
                index: i as u64,
                params: json!({"p": p, "delta0": delta0, "lambda": lambda, "kappa": kappa}),
                sample: json!({"radius": r}),
                lhs,
                rhs,
                margin: (lhs - rhs) / scale,
                filtered: 0,
            }))
        })
        .collect::<Result<_>>()?;
    let filtered = samples.iter().filter(|s| s.is_none()).count();
    let mut kept: Vec<InequalitySample> = samples.into_iter().flatten().collect();
    if let Some(first) = kept.first_mut() {
        first.filtered = filtered;
    }
    Ok(reduce_inequality(CheckId::Moser, TOL_NEG_MOSER, kept))
}
