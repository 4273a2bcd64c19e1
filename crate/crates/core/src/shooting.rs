//! Radial shooting for `-lap_p u = f(u)` on model manifolds.
//!
//! The state is `(u, m)` with the flux `m = psi^{n-1} |u'|^{p-2} u'`, so the
//! system `m' = -psi^{n-1} f(u)`, `u' = sign(m) |m / psi^{n-1}|^{1/(p-1)}`
//! never divides by `|u'|`.

use crate::error::{LabError, Result};
use crate::exponents::{critical_exponent, EmdenBubble, ExtReal};
use crate::fields::{RadialSource, SolutionCertificate};
use crate::geometry::ManifoldModel;
use crate::jets::EPS_GRAD;
use crate::ode::{integrate, OdeOptions, OdeSolution, OdeStats, Segment, Termination};
use crate::reaction::{ReactionTerm, SignClass};
use crate::report::{CheckId, IdentityReport, WorstCase};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::ops::ControlFlow;

/// Series start radius, in units of the intrinsic length when that is below 1.
pub const SERIES_START: f64 = 1e-4;
/// `StayedPositive` needs the horizon to cover this many intrinsic lengths.
pub const MIN_HORIZON_LENGTHS: f64 = 100.0;
/// Scans extend every horizon to at least this many intrinsic lengths.
pub const SCAN_HORIZON_LENGTHS: f64 = 1000.0;
/// Largest log-deviation allowed between the tail and its power-law fit.
pub const ENVELOPE_TOL: f64 = 0.05;
pub const BUBBLE_MATCH_TOL: f64 = 1e-6;

pub const RADIAL_CLASS_NOTE: &str = "radial shooting witnesses nonexistence within the radial class only; \
the Liouville statements concern all positive solutions";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialState {
    pub r: f64,
    pub u: f64,
    pub m: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShootOptions {
    pub horizon: f64,
    pub ode: OdeOptions,
    /// Relative bracket width for the zero-crossing bisection.
    pub event_tol: f64,
    /// Keep integrating through zero with the odd extension of `f`.
    pub continue_past_zero: bool,
}

impl Default for ShootOptions {
    fn default() -> Self {
        ShootOptions {
            horizon: 100.0,
            ode: OdeOptions::default(),
            event_tol: 1e-10,
            continue_past_zero: false,
        }
    }
}

impl ShootOptions {
    pub fn with_horizon(horizon: f64) -> Self {
        ShootOptions {
            horizon,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OutcomeKind {
    CrossedZero { r_cross: f64 },
    StayedPositive { r_max: f64, tail_exponent: f64 },
    Inconclusive { reason: String },
}

impl OutcomeKind {
    pub fn label(&self) -> &'static str {
        match self {
            OutcomeKind::CrossedZero { .. } => "crossed_zero",
            OutcomeKind::StayedPositive { .. } => "stayed_positive",
            OutcomeKind::Inconclusive { .. } => "inconclusive",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub r: f64,
    pub u: f64,
    pub uprime: f64,
    pub m: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShootOutcome {
    pub kind: OutcomeKind,
    pub u0: f64,
    pub horizon: f64,
    /// `(|u0|^{p-1} / |f(u0)|)^{1/p}`; absent when `f(u0) = 0`.
    pub intrinsic_length: Option<f64>,
    pub trajectory: Vec<TrajectoryPoint>,
    pub stats: OdeStats,
    /// Whether `m` was non-increasing at accepted steps; only checked when `f >= 0`.
    pub flux_monotone: Option<bool>,
}

impl ShootOutcome {
    /// Trajectory as CSV with columns `r,u,uprime,m`.
    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "r,u,uprime,m")?;
        for t in &self.trajectory {
            writeln!(w, "{:.17e},{:.17e},{:.17e},{:.17e}", t.r, t.u, t.uprime, t.m)?;
        }
        Ok(())
    }
}

struct Problem<'a> {
    model: &'a ManifoldModel,
    p: f64,
    f: &'a ReactionTerm,
}

impl Problem<'_> {
    fn weight(&self, r: f64) -> f64 {
        self.model.psi(r).powi(self.model.dim() as i32 - 1)
    }

    fn uprime(&self, r: f64, m: f64) -> f64 {
        if m == 0.0 {
            return 0.0;
        }
        m.signum() * (m / self.weight(r)).abs().powf(1.0 / (self.p - 1.0))
    }

    fn rhs(&self, r: f64, y: &[f64; 2]) -> [f64; 2] {
        [self.uprime(r, y[1]), -self.weight(r) * self.f.eval_odd(y[0])]
    }

    /// Intrinsic length of the nonlinearity at `u0`.
    fn length(&self, u0: f64) -> Option<f64> {
        let fv = self.f.eval(u0).abs();
        if fv > 0.0 && fv.is_finite() {
            Some((u0.powf(self.p - 1.0) / fv).powf(1.0 / self.p))
        } else {
            None
        }
    }

    /// Regularized start at `r0` from the two-term series.
    fn series_start(&self, u0: f64, r0: f64) -> [f64; 2] {
        let (n, p) = (self.model.dim() as f64, self.p);
        let f0 = self.f.eval(u0);
        let du = ((p - 1.0) / p) * (f0.abs() / n).powf(1.0 / (p - 1.0)) * r0.powf(p / (p - 1.0));
        let ric0 = self.model.ricci_rr_unchecked(0.0);
        let vol = r0.powf(n) / n - ric0 * r0.powf(n + 2.0) / (6.0 * (n + 2.0));
        [u0 - f0.signum() * du, -f0 * vol]
    }
}

fn check_inputs(model: &ManifoldModel, p: f64, u0: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(LabError::input(format!("p must exceed 1, got {p}")));
    }
    if !(u0 > 0.0 && u0.is_finite()) {
        return Err(LabError::input(format!("u0 must be positive, got {u0}")));
    }
    let _ = model;
    Ok(())
}

struct RawRun {
    sol: OdeSolution<2>,
    r0: f64,
    length: Option<f64>,
    crossing: Option<f64>,
    flux_monotone: Option<bool>,
}

fn run(model: &ManifoldModel, p: f64, f: &ReactionTerm, u0: f64, r_end: f64, opts: &ShootOptions) -> Result<RawRun> {
    check_inputs(model, p, u0)?;
    let prob = Problem { model, p, f };
    let length = prob.length(u0);
    let r0 = SERIES_START * length.unwrap_or(1.0).min(1.0);
    if !(r_end > r0) {
        return Err(LabError::input(format!("horizon {r_end} must exceed the series start {r0}")));
    }
    let y0 = prob.series_start(u0, r0);
    let check_flux = matches!(f.sign_class(), SignClass::Positive | SignClass::Nonnegative);
    let mut monotone = true;
    let mut crossing = None;
    let flux_slack = 10.0 * opts.ode.atol;
    let sol = integrate(
        |r, y| prob.rhs(r, y),
        r0,
        y0,
        r_end,
        &opts.ode,
        |seg: &Segment<2>| {
            let (a, b) = (seg.start(), seg.end());
            if check_flux && a[0] > 0.0 && b[0] > 0.0 && (b[1] > a[1] + flux_slack || b[1] > flux_slack) {
                monotone = false;
            }
            if crossing.is_none() && a[0] > 0.0 && b[0] <= 0.0 {
                crossing = Some(bisect_crossing(seg, opts.event_tol));
                if !opts.continue_past_zero {
                    return ControlFlow::Break(());
                }
            }
            ControlFlow::Continue(())
        },
    )?;
    Ok(RawRun {
        sol,
        r0,
        length,
        crossing,
        flux_monotone: check_flux.then_some(monotone),
    })
}

fn bisect_crossing(seg: &Segment<2>, tol: f64) -> f64 {
    let (mut lo, mut hi) = (seg.t0, seg.t1());
    while hi - lo > tol * hi {
        let mid = 0.5 * (lo + hi);
        if seg.eval(mid)[0] > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Least-squares slope and worst log-residual of `ln u` against `ln r` on `[a, b]`.
fn tail_fit(sol: &OdeSolution<2>, a: f64, b: f64) -> Option<(f64, f64)> {
    const K: usize = 50;
    let mut xs = Vec::with_capacity(K);
    let mut ys = Vec::with_capacity(K);
    for i in 0..K {
        let r = a * (b / a).powf(i as f64 / (K - 1) as f64);
        let u = sol.eval(r)?[0];
        if !(u > 0.0) {
            return None;
        }
        xs.push(r.ln());
        ys.push(u.ln());
    }
    let mx = xs.iter().sum::<f64>() / K as f64;
    let my = ys.iter().sum::<f64>() / K as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let dev = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - my - slope * (x - mx)).abs())
        .fold(0.0, f64::max);
    Some((slope, dev))
}

fn trajectory_of(prob: &Problem, sol: &OdeSolution<2>, u0: f64, stop: Option<f64>) -> Vec<TrajectoryPoint> {
    let mut out = vec![TrajectoryPoint {
        r: 0.0,
        u: u0,
        uprime: 0.0,
        m: 0.0,
    }];
    let push = |out: &mut Vec<TrajectoryPoint>, r: f64, y: [f64; 2]| {
        out.push(TrajectoryPoint {
            r,
            u: y[0],
            uprime: prob.uprime(r, y[1]),
            m: y[1],
        })
    };
    if let Some(first) = sol.segments.first() {
        push(&mut out, first.t0, first.start());
    }
    for seg in &sol.segments {
        match stop {
            Some(rc) if seg.t1() > rc => {
                push(&mut out, rc, seg.eval(rc));
                break;
            }
            _ => push(&mut out, seg.t1(), seg.end()),
        }
    }
    out
}

/// Shoots from `u(0) = u0`, `u'(0) = 0` out to `opts.horizon`.
pub fn shoot(model: &ManifoldModel, p: f64, f: &ReactionTerm, u0: f64, opts: &ShootOptions) -> Result<ShootOutcome> {
    if !(opts.horizon > 0.0 && opts.horizon.is_finite()) {
        return Err(LabError::input("horizon must be positive and finite"));
    }
    let compact = model.r_max().is_finite();
    let r_end = if compact {
        opts.horizon.min(model.r_max() * (1.0 - 1e-6))
    } else {
        opts.horizon
    };
    let raw = run(model, p, f, u0, r_end, opts)?;
    let prob = Problem { model, p, f };
    let trajectory = trajectory_of(&prob, &raw.sol, u0, raw.crossing);
    let kind = if let Some(r_cross) = raw.crossing {
        OutcomeKind::CrossedZero { r_cross }
    } else {
        classify_tail(&raw, r_end, compact)
    };
    Ok(ShootOutcome {
        kind,
        u0,
        horizon: r_end,
        intrinsic_length: raw.length,
        trajectory,
        stats: raw.sol.stats,
        flux_monotone: raw.flux_monotone,
    })
}

fn classify_tail(raw: &RawRun, r_end: f64, compact: bool) -> OutcomeKind {
    let inconclusive = |reason: String| OutcomeKind::Inconclusive { reason };
    match &raw.sol.termination {
        Termination::Reached => {}
        Termination::StepCollapse { t, h } => return inconclusive(format!("step-size collapse at r = {t:e} (h = {h:e})")),
        Termination::MaxSteps { t } => return inconclusive(format!("step budget exhausted at r = {t:e}")),
        Termination::NonFinite { t } => return inconclusive(format!("non-finite state at r = {t:e}")),
        Termination::Stopped => return inconclusive("integration stopped early".into()),
    }
    if compact {
        return inconclusive("compact model: reached the end of the radial range without crossing".into());
    }
    if let Some(l) = raw.length {
        if r_end < MIN_HORIZON_LENGTHS * l {
            return inconclusive(format!(
                "horizon {r_end:e} is below {MIN_HORIZON_LENGTHS} intrinsic lengths ({l:e})"
            ));
        }
    }
    let a = (r_end / 10.0).max(raw.r0);
    match tail_fit(&raw.sol, a, r_end) {
        Some((slope, dev)) if dev <= ENVELOPE_TOL && slope <= 1e-9 => OutcomeKind::StayedPositive {
            r_max: r_end,
            tail_exponent: slope,
        },
        Some((slope, dev)) => inconclusive(format!(
            "no decaying power envelope on the last decade (slope {slope:.4}, log deviation {dev:.3e})"
        )),
        None => inconclusive("tail fit failed".into()),
    }
}

/// A shooting trajectory viewed as a radial field with derivatives up to order three,
/// the higher ones obtained from the ODE itself.
#[derive(Clone, Debug)]
pub struct RadialSolution {
    model: ManifoldModel,
    certificate: SolutionCertificate,
    u0: f64,
    sol: OdeSolution<2>,
    r_lo: f64,
    r_hi: f64,
}

impl RadialSolution {
    /// Integrates to `opts.horizon` (or the first zero) and keeps the dense output.
    pub fn solve(model: &ManifoldModel, p: f64, f: &ReactionTerm, u0: f64, opts: &ShootOptions) -> Result<Self> {
        let r_end = if model.r_max().is_finite() {
            opts.horizon.min(model.r_max() * (1.0 - 1e-6))
        } else {
            opts.horizon
        };
        let o = ShootOptions {
            continue_past_zero: false,
            ..*opts
        };
        let raw = run(model, p, f, u0, r_end, &o)?;
        let r_hi = match raw.crossing {
            Some(rc) => rc,
            None => raw.sol.t_end().unwrap_or(raw.r0),
        };
        Ok(RadialSolution {
            model: model.clone(),
            certificate: SolutionCertificate { p, f: f.clone() },
            u0,
            sol: raw.sol,
            r_lo: raw.r0,
            r_hi,
        })
    }

    pub fn u0(&self) -> f64 {
        self.u0
    }

    pub fn p(&self) -> f64 {
        self.certificate.p
    }

    pub fn reaction(&self) -> &ReactionTerm {
        &self.certificate.f
    }

    pub fn state(&self, r: f64) -> Result<RadialState> {
        if !(r >= self.r_lo && r <= self.r_hi) {
            return Err(LabError::domain(format!(
                "radius {r} outside the solved range [{}, {}]",
                self.r_lo, self.r_hi
            )));
        }
        let y = self.sol.eval(r).ok_or_else(|| LabError::domain(format!("radius {r} outside the trajectory")))?;
        Ok(RadialState { r, u: y[0], m: y[1] })
    }
}

impl RadialSource for RadialSolution {
    fn model(&self) -> &ManifoldModel {
        &self.model
    }

    fn derivatives(&self, r: f64) -> Result<[f64; 4]> {
        let s = self.state(r)?;
        let p = self.certificate.p;
        let prob = Problem {
            model: &self.model,
            p,
            f: &self.certificate.f,
        };
        let u1 = prob.uprime(r, s.m);
        if u1 == 0.0 {
            return Err(LabError::Singular {
                grad_norm: 0.0,
                eps: EPS_GRAD * s.u,
                context: "radial solution at a critical radius",
            });
        }
        let n1 = self.model.dim() as f64 - 1.0;
        let (k, dk) = self.model.log_derivative(r);
        let fv = self.certificate.f.eval_odd(s.u);
        let df = self.certificate.f.deriv_odd(s.u);
        let a = u1.abs().powf(2.0 - p);
        let u2 = (-fv * a - n1 * k * u1) / (p - 1.0);
        let dg = -df * u1 * a - (2.0 - p) * fv * a * u2 / u1;
        let u3 = (dg - n1 * (dk * u1 + k * u2)) / (p - 1.0);
        Ok([s.u, u1, u2, u3])
    }

    fn describe(&self) -> serde_json::Value {
        serde_json::json!({
            "kind": "radial_solution",
            "model": self.model.name(),
            "dim": self.model.dim(),
            "kappa": self.model.kappa(),
            "p": self.certificate.p,
            "f": self.certificate.f,
            "u0": self.u0,
            "domain": [self.r_lo, self.r_hi],
        })
    }

    /// Radii where the trajectory is available and positive.
    fn domain(&self) -> (f64, f64) {
        (self.r_lo, self.r_hi)
    }

    fn certificate(&self) -> Option<SolutionCertificate> {
        Some(self.certificate.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub alpha: f64,
    pub u0: f64,
    pub outcome: Option<OutcomeKind>,
    pub horizon: f64,
    pub error: Option<String>,
}

impl ScanRow {
    pub fn label(&self) -> &'static str {
        self.outcome.as_ref().map_or("error", |o| o.label())
    }

    pub fn r_cross(&self) -> Option<f64> {
        match self.outcome {
            Some(OutcomeKind::CrossedZero { r_cross }) => Some(r_cross),
            _ => None,
        }
    }

    pub fn tail_exponent(&self) -> Option<f64> {
        match self.outcome {
            Some(OutcomeKind::StayedPositive { tail_exponent, .. }) => Some(tail_exponent),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanTable {
    pub header: String,
    pub n: usize,
    pub p: f64,
    pub critical_exponent: ExtReal,
    pub rows: Vec<ScanRow>,
}

impl ScanTable {
    pub fn count(&self, label: &str) -> usize {
        self.rows.iter().filter(|r| r.label() == label).count()
    }

    /// CSV with columns `alpha,u0,outcome,r_cross`.
    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "# {}", self.header)?;
        writeln!(w, "alpha,u0,outcome,r_cross")?;
        for r in &self.rows {
            let rc = r.r_cross().map(|v| format!("{v:.12e}")).unwrap_or_default();
            writeln!(w, "{},{},{},{}", r.alpha, r.u0, r.label(), rc)?;
        }
        Ok(())
    }
}

/// Shoots every `(alpha, u0)` cell for `f = t^alpha` on Euclidean space.
///
/// Each cell's horizon is raised to `SCAN_HORIZON_LENGTHS` intrinsic lengths so
/// slow crossings near the critical exponent are not mistaken for positivity.
pub fn liouville_scan(n: usize, p: f64, alphas: &[f64], u0s: &[f64], horizon: f64) -> Result<ScanTable> {
    let model = ManifoldModel::euclidean(n)?;
    let ps = critical_exponent(n, p)?;
    let cells: Vec<(f64, f64)> = alphas.iter().flat_map(|&a| u0s.iter().map(move |&u| (a, u))).collect();
    let rows = cells
        .par_iter()
        .map(|&(alpha, u0)| {
            let f = ReactionTerm::power(alpha);
            let length = Problem { model: &model, p, f: &f }.length(u0).unwrap_or(0.0);
            let h = horizon.max(SCAN_HORIZON_LENGTHS * length);
            match shoot(&model, p, &f, u0, &ShootOptions::with_horizon(h)) {
                Ok(o) => ScanRow {
                    alpha,
                    u0,
                    outcome: Some(o.kind),
                    horizon: o.horizon,
                    error: None,
                },
                Err(e) => ScanRow {
                    alpha,
                    u0,
                    outcome: None,
                    horizon: h,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    Ok(ScanTable {
        header: RADIAL_CLASS_NOTE.into(),
        n,
        p,
        critical_exponent: ps,
        rows,
    })
}

/// Compares the trajectory from `u0 = bubble(0)` with the closed form on `[0, horizon]`.
pub fn bubble_match(n: usize, p: f64, lambda: f64, horizon: f64) -> Result<IdentityReport> {
    bubble_match_with(n, p, lambda, horizon, &OdeOptions::default())
}

pub fn bubble_match_with(n: usize, p: f64, lambda: f64, horizon: f64, ode: &OdeOptions) -> Result<IdentityReport> {
    let b = EmdenBubble::new(n, p, lambda)?;
    let model = ManifoldModel::euclidean(n)?;
    let f = ReactionTerm::power(b.exponent());
    let u0 = b.value(0.0);
    let opts = ShootOptions {
        horizon,
        ode: *ode,
        ..ShootOptions::default()
    };
    let raw = run(&model, p, &f, u0, horizon, &opts)?;
    if let Some(rc) = raw.crossing {
        return Err(LabError::numerical("bubble trajectory crossed zero", rc));
    }
    if raw.sol.termination != Termination::Reached {
        return Err(LabError::numerical("bubble trajectory did not reach the horizon", raw.sol.t_end().unwrap_or(0.0)));
    }
    const K: usize = 2001;
    let mut radii: Vec<f64> = (0..K).map(|i| raw.r0 + (horizon - raw.r0) * i as f64 / (K - 1) as f64).collect();
    radii.extend(raw.sol.segments.iter().map(|s| s.t1()));
    let mut max_rel = 0.0f64;
    let mut max_abs = 0.0f64;
    let mut worst = None;
    for (i, &r) in radii.iter().enumerate() {
        let u = raw.sol.eval(r).map(|y| y[0]).unwrap_or(f64::NAN);
        let exact = b.value(r);
        let abs = (u - exact).abs();
        let rel = if abs.is_nan() { f64::INFINITY } else { abs / exact };
        max_abs = max_abs.max(abs);
        if worst.is_none() || rel > max_rel {
            max_rel = rel;
            worst = Some(WorstCase {
                index: i as u64,
                params: serde_json::json!({"n": n, "p": p, "lambda": lambda}),
                sample: serde_json::json!({"r": r}),
                lhs: vec![u],
                rhs: vec![exact],
            });
        }
    }
    Ok(IdentityReport {
        identity_id: CheckId::BubbleMatch,
        samples: radii.len(),
        filtered: 0,
        max_rel_residual: max_rel,
        max_abs_residual: max_abs,
        worst_case: worst,
        tol: BUBBLE_MATCH_TOL,
        pass: max_rel <= BUBBLE_MATCH_TOL,
    })
}

/// Distances from the antipode used by the regularity extrapolation.
pub const ANTIPODAL_OFFSETS: [f64; 3] = [0.05, 0.1, 0.15];
pub const ANTIPODAL_TOL: f64 = 1e-6;
pub const ROOT_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereHypotheses {
    /// `n - 1 >= ((n-1)/n)(q-1) lambda`
    pub ricci: bool,
    /// `q <= (n+2)/(n-2)`
    pub exponent: bool,
    /// At least one of the two holds strictly.
    pub strict: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereGridPoint {
    pub u0: f64,
    /// Extrapolated `m / psi^{n-1}` at the antipode; zero for regular solutions.
    pub antipodal_residual: Option<f64>,
    pub positive: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereRoot {
    pub u0: f64,
    pub antipodal_residual: f64,
    pub positive: bool,
    pub constant: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereScanReport {
    pub n: usize,
    pub q: f64,
    pub lambda: f64,
    pub constant_value: f64,
    pub hypotheses: SphereHypotheses,
    pub outside_hypotheses: bool,
    /// Both hypotheses hold with equality.
    pub boundary_case: bool,
    pub grid: Vec<SphereGridPoint>,
    pub roots: Vec<SphereRoot>,
    /// `u0` of regular positive solutions found by bisection.
    pub regular_positive: Vec<f64>,
    /// Grid values whose trajectories are regular within tolerance but not constant.
    pub nonconstant_regular: Vec<f64>,
    pub notes: Vec<String>,
}

struct Antipodal {
    residual: f64,
    positive: bool,
}

fn antipodal(model: &ManifoldModel, f: &ReactionTerm, u0: f64) -> Result<Antipodal> {
    let end = model.r_max() - ANTIPODAL_OFFSETS[0];
    let opts = ShootOptions {
        horizon: end,
        continue_past_zero: true,
        ..ShootOptions::default()
    };
    let raw = run(model, 2.0, f, u0, end, &opts)?;
    if raw.sol.termination != Termination::Reached {
        return Err(LabError::numerical("sphere trajectory did not reach the antipodal window", raw.sol.t_end().unwrap_or(0.0)));
    }
    let prob = Problem { model, p: 2.0, f };
    let s: Vec<f64> = ANTIPODAL_OFFSETS
        .iter()
        .map(|&rho| {
            let r = model.r_max() - rho;
            raw.sol.eval(r).map(|y| y[1] / prob.weight(r)).unwrap_or(f64::NAN)
        })
        .collect();
    // exact fit of c0 + c1 rho + c3 rho^3 through the three offsets
    let rows: Vec<[f64; 3]> = ANTIPODAL_OFFSETS.iter().map(|&x| [1.0, x, x * x * x]).collect();
    let c0 = solve3(&rows, &s)[0];
    let positive = raw.crossing.is_none() && raw.sol.segments.iter().all(|g| g.end()[0] > 0.0);
    Ok(Antipodal { residual: c0, positive })
}

fn solve3(a: &[[f64; 3]], b: &[f64]) -> [f64; 3] {
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let m = [a[0], a[1], a[2]];
    let d = det(m);
    let mut x = [0.0; 3];
    for (k, xk) in x.iter_mut().enumerate() {
        let mut mk = m;
        for i in 0..3 {
            mk[i][k] = b[i];
        }
        *xk = det(mk) / d;
    }
    x
}

/// Scans `Delta u - lambda u + u^q = 0` on the round unit sphere over `u0s`,
/// bisecting every sign change of the antipodal residual.
pub fn bv_sphere_scan(n: usize, q: f64, lambda: f64, u0s: &[f64]) -> Result<SphereScanReport> {
    if !(q > 1.0 && lambda > 0.0) {
        return Err(LabError::input("the sphere scan needs q > 1 and lambda > 0"));
    }
    let model = ManifoldModel::sphere(n, 1.0)?;
    let f = ReactionTerm::PowerMinusLinear { q, lambda };
    let nf = n as f64;
    let ric_need = ((nf - 1.0) / nf) * (q - 1.0) * lambda;
    let q_max = if n > 2 { (nf + 2.0) / (nf - 2.0) } else { f64::INFINITY };
    let eq = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
    let hyp = SphereHypotheses {
        ricci: nf - 1.0 >= ric_need || eq(nf - 1.0, ric_need),
        exponent: q <= q_max || eq(q, q_max),
        strict: (nf - 1.0 > ric_need && !eq(nf - 1.0, ric_need)) || (q < q_max && !eq(q, q_max)),
    };
    let outside = !(hyp.ricci && hyp.exponent && hyp.strict);
    let boundary = hyp.ricci && hyp.exponent && !hyp.strict;
    let constant_value = lambda.powf(1.0 / (q - 1.0));

    let grid: Vec<SphereGridPoint> = u0s
        .par_iter()
        .map(|&u0| match antipodal(&model, &f, u0) {
            Ok(a) => SphereGridPoint {
                u0,
                antipodal_residual: Some(a.residual),
                positive: a.positive,
                error: None,
            },
            Err(e) => SphereGridPoint {
                u0,
                antipodal_residual: None,
                positive: false,
                error: Some(e.to_string()),
            },
        })
        .collect();

    let mut brackets = Vec::new();
    for w in grid.windows(2) {
        if let (Some(a), Some(b)) = (w[0].antipodal_residual, w[1].antipodal_residual) {
            if a == 0.0 {
                brackets.push((w[0].u0, w[0].u0));
            } else if a * b < 0.0 {
                brackets.push((w[0].u0, w[1].u0));
            }
        }
    }
    if let Some(last) = grid.last() {
        if last.antipodal_residual == Some(0.0) {
            brackets.push((last.u0, last.u0));
        }
    }
    let roots: Vec<SphereRoot> = brackets
        .par_iter()
        .map(|&(lo, hi)| -> Result<SphereRoot> {
            let (mut lo, mut hi) = (lo, hi);
            let mut flo = antipodal(&model, &f, lo)?.residual;
            while hi - lo > ROOT_TOL {
                let mid = 0.5 * (lo + hi);
                let fm = antipodal(&model, &f, mid)?.residual;
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (fm < 0.0) == (flo < 0.0) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            let u0 = 0.5 * (lo + hi);
            let a = antipodal(&model, &f, u0)?;
            Ok(SphereRoot {
                u0,
                antipodal_residual: a.residual,
                positive: a.positive,
                constant: (u0 - constant_value).abs() <= ROOT_TOL,
            })
        })
        .collect::<Result<_>>()?;
    let regular_positive = roots
        .iter()
        .filter(|r| r.positive && r.antipodal_residual.abs() <= ANTIPODAL_TOL)
        .map(|r| r.u0)
        .collect();
    let nonconstant_regular = grid
        .iter()
        .filter(|g| {
            g.positive
                && g.antipodal_residual.is_some_and(|c| c.abs() <= ANTIPODAL_TOL)
                && (g.u0 - constant_value).abs() > 1e3 * ROOT_TOL
        })
        .map(|g| g.u0)
        .collect();
    let mut notes = vec![RADIAL_CLASS_NOTE.to_string()];
    if boundary {
        notes.push("boundary case: both hypotheses hold with equality, so the theorem does not apply".into());
    } else if outside {
        notes.push("outside theorem hypotheses; exploration mode".into());
    }
    Ok(SphereScanReport {
        n,
        q,
        lambda,
        constant_value,
        hypotheses: hyp,
        outside_hypotheses: outside,
        boundary_case: boundary,
        grid,
        roots,
        regular_positive,
        nonconstant_regular,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e3() -> ManifoldModel {
        ManifoldModel::euclidean(3).unwrap()
    }

    #[test]
    fn cubic_crosses_zero() {
        let o = shoot(&e3(), 2.0, &ReactionTerm::power(3.0), 1.0, &ShootOptions::with_horizon(100.0)).unwrap();
        assert!(matches!(o.kind, OutcomeKind::CrossedZero { .. }), "{:?}", o.kind);
        assert_eq!(o.flux_monotone, Some(true));
    }

    #[test]
    fn zero_nonlinearity_is_constant() {
        let o = shoot(&e3(), 2.0, &ReactionTerm::Zero, 2.0, &ShootOptions::with_horizon(50.0)).unwrap();
        assert!(matches!(o.kind, OutcomeKind::StayedPositive { .. }), "{:?}", o.kind);
        assert!(o.trajectory.iter().all(|t| t.u == 2.0 && t.m == 0.0));
    }

    #[test]
    fn critical_bubble_stays_positive() {
        let u0 = 3f64.powf(0.25);
        let o = shoot(&e3(), 2.0, &ReactionTerm::power(5.0), u0, &ShootOptions::with_horizon(1000.0)).unwrap();
        match o.kind {
            OutcomeKind::StayedPositive { tail_exponent, .. } => assert!((tail_exponent + 1.0).abs() < 0.05),
            k => panic!("{k:?}"),
        }
    }

    #[test]
    fn short_horizon_is_inconclusive() {
        let o = shoot(&e3(), 2.0, &ReactionTerm::power(5.0), 1.0, &ShootOptions::with_horizon(5.0)).unwrap();
        assert!(matches!(o.kind, OutcomeKind::Inconclusive { .. }));
    }

    #[test]
    fn solution_derivatives_satisfy_ode() {
        let s = RadialSolution::solve(&e3(), 2.0, &ReactionTerm::power(3.0), 1.0, &ShootOptions::with_horizon(10.0)).unwrap();
        let (lo, hi) = s.domain();
        let r = 0.5 * (lo + hi);
        let [u, u1, u2, _] = s.derivatives(r).unwrap();
        assert!((u2 + 2.0 / r * u1 + u.powi(3)).abs() < 1e-12);
        // third derivative against differences of the second
        let h = 1e-4;
        let d = |x: f64| s.derivatives(x).unwrap()[2];
        let fd = (d(r + h) - d(r - h)) / (2.0 * h);
        assert!((fd - s.derivatives(r).unwrap()[3]).abs() < 1e-6);
        assert!(s.derivatives(hi + 1.0).is_err());
    }

    #[test]
    fn csv_columns() {
        let o = shoot(&e3(), 2.0, &ReactionTerm::power(3.0), 1.0, &ShootOptions::with_horizon(100.0)).unwrap();
        let mut buf = Vec::new();
        o.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("r,u,uprime,m\n0.0"));
    }

    #[test]
    fn solve3_recovers_polynomial() {
        let rows: Vec<[f64; 3]> = ANTIPODAL_OFFSETS.iter().map(|&x| [1.0, x, x * x * x]).collect();
        let b: Vec<f64> = ANTIPODAL_OFFSETS.iter().map(|&x| 0.5 - 2.0 * x + 3.0 * x * x * x).collect();
        let c = solve3(&rows, &b);
        assert!((c[0] - 0.5).abs() < 1e-12 && (c[1] + 2.0).abs() < 1e-10 && (c[2] - 3.0).abs() < 1e-8);
    }
}
