//! Critical exponents, conditions on the nonlinearity, the Emden bubble and
//! the Liouville classifier.

use crate::error::{LabError, Result};
use crate::reaction::{ReactionTerm, SignClass};
use crate::report::{reduce_identity, CheckId, IdentityReport, IdentitySample};
use crate::taylor::Taylor3;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;

/// A real number or `+inf`. Serialized as a JSON number or the string `"+inf"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtReal::PosInf)
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            ExtReal::Finite(x) => Some(x),
            ExtReal::PosInf => None,
        }
    }

    /// `num / den^+`: `+inf` when the positive part of `den` vanishes (`num > 0`).
    fn over_positive_part(num: f64, den: f64) -> ExtReal {
        if den > 0.0 {
            ExtReal::Finite(num / den)
        } else {
            ExtReal::PosInf
        }
    }

    /// Whether `x < self`.
    pub fn exceeds(&self, x: f64) -> bool {
        match *self {
            ExtReal::Finite(v) => x < v,
            ExtReal::PosInf => x.is_finite(),
        }
    }

    pub fn at_least(&self, x: f64) -> bool {
        match *self {
            ExtReal::Finite(v) => x <= v,
            ExtReal::PosInf => x.is_finite(),
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        match (self, o) {
            (ExtReal::PosInf, ExtReal::PosInf) => Some(Ordering::Equal),
            (ExtReal::PosInf, _) => Some(Ordering::Greater),
            (_, ExtReal::PosInf) => Some(Ordering::Less),
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(x) => write!(f, "{x}"),
            ExtReal::PosInf => f.write_str("+inf"),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(x) => s.serialize_f64(*x),
            ExtReal::PosInf => s.serialize_str("+inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(ExtReal::Finite(x)),
            Raw::Str(s) if s == "+inf" || s == "inf" => Ok(ExtReal::PosInf),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("expected a number or \"+inf\", got {s:?}"))),
        }
    }
}

fn check_np(n: usize, p: f64) -> Result<()> {
    if n < 2 {
        return Err(LabError::input(format!("dimension must be at least 2, got {n}")));
    }
    if !(p > 1.0 && p.is_finite()) {
        return Err(LabError::input(format!("p must exceed 1, got {p}")));
    }
    Ok(())
}

/// `p_s = ((n+1)p - n) / (n-p)^+`.
pub fn critical_exponent(n: usize, p: f64) -> Result<ExtReal> {
    check_np(n, p)?;
    let n = n as f64;
    Ok(ExtReal::over_positive_part((n + 1.0) * p - n, n - p))
}

/// `p_s` for rational `p = num/den`, as a reduced fraction; `None` for `p >= n`.
pub fn critical_exponent_rational(n: u64, p_num: u64, p_den: u64) -> Result<Option<(u64, u64)>> {
    if p_den == 0 || p_num <= p_den || n < 2 {
        return Err(LabError::input("need n >= 2 and p = num/den > 1"));
    }
    // ((n+1)num - n den) / (n den - num)
    let top = (n + 1) * p_num - n * p_den;
    if n * p_den <= p_num {
        return Ok(None);
    }
    let bottom = n * p_den - p_num;
    let g = gcd(top, bottom);
    Ok(Some((top / g, bottom / g)))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentName {
    Ps,
    WangWei,
    SerrinZouIneq,
    ChengYauLi,
    Main3Ii,
    Main2C,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentRecord {
    pub name: ExponentName,
    pub value: ExtReal,
    /// Whether `(n, p)` satisfies the constraints under which the threshold is stated.
    pub valid: bool,
    pub validity: String,
}

pub fn threshold_table(n: usize, p: f64) -> Result<Vec<ExponentRecord>> {
    check_np(n, p)?;
    let nf = n as f64;
    let rec = |name, value, valid, validity: &str| ExponentRecord {
        name,
        value,
        valid,
        validity: validity.to_string(),
    };
    let cyl = if n > 2 {
        ExtReal::Finite((nf + 1.0) / (nf - 1.0) + 2.0 / (nf * (nf - 2.0)).sqrt())
    } else {
        ExtReal::PosInf
    };
    let c_den = (4.0 - 3.0 * p).max(0.0) * (2.0 - p);
    Ok(vec![
        rec(ExponentName::Ps, critical_exponent(n, p)?, true, "n >= 2, p > 1"),
        rec(
            ExponentName::WangWei,
            ExtReal::Finite((nf + 3.0) * (p - 1.0) / (nf - 1.0)),
            true,
            "n >= 2, p > 1",
        ),
        rec(
            ExponentName::SerrinZouIneq,
            ExtReal::over_positive_part(nf * (p - 1.0), nf - p),
            true,
            "n >= 2, p > 1",
        ),
        rec(ExponentName::ChengYauLi, cyl, p == 2.0 && n > 2, "p = 2, n > 2"),
        rec(
            ExponentName::Main3Ii,
            ExtReal::over_positive_part(2.0 * ((nf + 1.0) * p - nf) * (p - 1.0), (nf + 1.0) * p - 2.0 * nf),
            p > nf / 2.0,
            "p > n/2",
        ),
        rec(
            ExponentName::Main2C,
            ExtReal::over_positive_part(2.0 * (p - 1.0).powi(2) * (3.0 * p - 2.0), c_den),
            n == 2 && p < 2.0,
            "1 < p < n = 2",
        ),
    ])
}

fn threshold(n: usize, p: f64, name: ExponentName) -> Result<ExtReal> {
    Ok(threshold_table(n, p)?
        .into_iter()
        .find(|r| r.name == name)
        .map(|r| r.value)
        .unwrap_or(ExtReal::PosInf))
}

/// Log-spaced sampling grid for conditions quantified over `t > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
}

impl Default for ConditionGrid {
    fn default() -> Self {
        ConditionGrid {
            t_min: 1e-6,
            t_max: 1e6,
            points: 1000,
        }
    }
}

impl ConditionGrid {
    pub fn points(&self) -> Result<Vec<f64>> {
        if !(self.t_min > 0.0 && self.t_max > self.t_min && self.points >= 2) {
            return Err(LabError::input("condition grid needs 0 < t_min < t_max and >= 2 points"));
        }
        let (a, b) = (self.t_min.ln(), self.t_max.ln());
        let m = (self.points - 1) as f64;
        Ok((0..self.points).map(|i| (a + (b - a) * i as f64 / m).exp()).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionVerdict {
    pub holds: bool,
    /// First grid point where the condition fails.
    pub witness: Option<f64>,
    /// Smallest normalized margin over the grid.
    pub min_margin: f64,
}

const CONDITION_RTOL: f64 = 1e-12;

fn grid_check(grid: &ConditionGrid, mut margin: impl FnMut(f64) -> Result<(f64, f64)>) -> Result<ConditionVerdict> {
    let mut witness = None;
    let mut min_margin = f64::INFINITY;
    for t in grid.points()? {
        let (m, scale) = margin(t)?;
        if !(m.is_finite() && scale.is_finite()) {
            return Err(LabError::input(format!("nonlinearity produced a non-finite value at t = {t}")));
        }
        let norm = if scale > 0.0 { m / scale } else { 0.0 };
        min_margin = min_margin.min(norm);
        if m < -CONDITION_RTOL * scale && witness.is_none() {
            witness = Some(t);
        }
    }
    Ok(ConditionVerdict {
        holds: witness.is_none(),
        witness,
        min_margin,
    })
}

/// `alpha f(t) - t f'(t) >= 0` on the grid.
pub fn is_subcritical(f: &ReactionTerm, alpha: f64, grid: &ConditionGrid) -> Result<ConditionVerdict> {
    grid_check(grid, |t| {
        let (v, d) = f.checked(t)?;
        Ok((alpha * v - t * d, (alpha * v).abs() + (t * d).abs()))
    })
}

fn f2_margin(f: &ReactionTerm, delta0: f64, n: usize, p: f64, t: f64) -> Result<(f64, f64)> {
    let (v, d) = f.checked(t)?;
    let nf = n as f64;
    let c = (p - 1.0) / (nf - 1.0);
    let a = c * (nf + 1.0) * v;
    let b = c * 2.0 * delta0 * v.abs();
    Ok((a + b - t * d, a.abs() + b.abs() + (t * d).abs()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct F2Verdict {
    pub delta0: f64,
    pub verdict: ConditionVerdict,
    /// Least `delta0` in `[DELTA0_SEARCH_MIN, 1)` for which the condition holds
    /// on the grid, to `1e-10`; `None` if it fails for every `delta0 < 1`.
    pub minimal_delta0: Option<f64>,
}

/// Lower end of the minimal-`delta0` search.
pub const DELTA0_SEARCH_MIN: f64 = -10.0;
/// Upper end; a condition needing `delta0` beyond it counts as failing for all `delta0 < 1`.
pub const DELTA0_SEARCH_MAX: f64 = 1.0 - 1e-9;

/// `((p-1)/(n-1))((n+1) f + 2 delta0 |f|) - t f' >= 0` on the grid.
pub fn satisfies_f2(f: &ReactionTerm, delta0: f64, n: usize, p: f64, grid: &ConditionGrid) -> Result<F2Verdict> {
    check_np(n, p)?;
    if !(delta0 < 1.0) {
        return Err(LabError::precondition(format!("delta0 must be below 1, got {delta0}")));
    }
    let verdict = grid_check(grid, |t| f2_margin(f, delta0, n, p, t))?;
    let holds_at = |d: f64| -> Result<bool> { Ok(grid_check(grid, |t| f2_margin(f, d, n, p, t))?.holds) };
    let minimal_delta0 = if holds_at(DELTA0_SEARCH_MIN)? {
        Some(DELTA0_SEARCH_MIN)
    } else if !holds_at(DELTA0_SEARCH_MAX)? {
        None
    } else {
        let (mut lo, mut hi) = (DELTA0_SEARCH_MIN, DELTA0_SEARCH_MAX);
        while hi - lo > 1e-10 {
            let mid = 0.5 * (lo + hi);
            if holds_at(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi)
    };
    Ok(F2Verdict {
        delta0,
        verdict,
        minimal_delta0,
    })
}

/// Qualitative description of `f` handed to the classifier.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FClass {
    pub sign: SignClass,
    /// `f = t^alpha` (positive sign) or `f = -t^alpha` (nonpositive sign).
    pub pure_power: bool,
    /// `liminf t^{1-p0} |f(t)| > 0` for some `p0 > p`.
    #[serde(default)]
    pub growth: bool,
    /// The manifold is noncompact.
    #[serde(default = "default_true")]
    pub noncompact: bool,
}

fn default_true() -> bool {
    true
}

impl FClass {
    pub fn pure_power() -> Self {
        FClass {
            sign: SignClass::Positive,
            pure_power: true,
            growth: true,
            noncompact: true,
        }
    }

    pub fn of_sign(sign: SignClass) -> Self {
        FClass {
            sign,
            pure_power: false,
            growth: false,
            noncompact: true,
        }
    }

    fn nonnegative(&self) -> bool {
        matches!(self.sign, SignClass::Positive | SignClass::Nonnegative)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Conclusion {
    ConstantForced,
    NoPositiveSolution,
    OutOfRange,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremHit {
    pub theorem: String,
    pub conclusion: Conclusion,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiouvilleVerdict {
    pub verdict: Conclusion,
    /// First theorem to fire in precedence order.
    pub theorem: Option<String>,
    pub fired: Vec<TheoremHit>,
    pub notes: Vec<String>,
}

/// Applies the Liouville theorems (nonnegative Ricci curvature assumed) in the
/// precedence 2.1/2.2, 2.6, 2.8, 2.9, 2.3/Cor 2.1 and reports every one that fires.
pub fn classify_liouville(n: usize, p: f64, alpha: f64, fc: &FClass) -> Result<LiouvilleVerdict> {
    check_np(n, p)?;
    if !alpha.is_finite() {
        return Err(LabError::input("alpha must be finite"));
    }
    if fc.pure_power && fc.sign == SignClass::Mixed {
        return Err(LabError::input("a pure power cannot have mixed sign"));
    }
    let nf = n as f64;
    let ps = critical_exponent(n, p)?;
    let wang_wei = (nf + 3.0) * (p - 1.0) / (nf - 1.0);
    let main2_c = threshold(n, p, ExponentName::Main2C)?;
    let main3_ii = threshold(n, p, ExponentName::Main3Ii)?;
    let in_ps_window = alpha > 0.0 && ps.exceeds(alpha);
    let mut fired = Vec::new();
    let mut notes = Vec::new();
    let mut hit = |tag: &str, c: Conclusion| {
        fired.push(TheoremHit {
            theorem: tag.to_string(),
            conclusion: c,
        })
    };

    if fc.pure_power && fc.nonnegative() && ps.exceeds(alpha) {
        hit("2.1", Conclusion::NoPositiveSolution);
    }
    if fc.pure_power && fc.sign == SignClass::Nonpositive && alpha > p - 1.0 {
        hit("2.2", Conclusion::NoPositiveSolution);
    }
    if fc.sign == SignClass::Positive && n == 2 && p < 2.0 && alpha > 0.0 && main2_c.exceeds(alpha) && !in_ps_window {
        notes.push(format!(
            "alpha = {alpha} lies below the 2.6(C) threshold {main2_c} but not below p_s = {ps}; Theorem 2.6 needs alpha in (0, p_s)"
        ));
    }
    if fc.sign == SignClass::Positive && in_ps_window {
        if p >= nf {
            hit("2.6(A)", Conclusion::ConstantForced);
        } else if n >= 3 && 2.0 * p > nf {
            hit("2.6(B)", Conclusion::ConstantForced);
        } else if n == 2 && main2_c.exceeds(alpha) {
            hit("2.6(C)", Conclusion::ConstantForced);
        }
    }
    if in_ps_window && fc.growth {
        if fc.nonnegative() {
            hit("2.8(i)", Conclusion::ConstantForced);
        } else if p > nf / 2.0 && main3_ii.at_least(alpha) {
            hit("2.8(ii)", Conclusion::ConstantForced);
        }
    }
    if fc.nonnegative() && in_ps_window && fc.noncompact {
        let case = if p >= nf {
            Some("2.9(I)")
        } else if n >= 3 && 2.0 * p > nf {
            Some("2.9(II)")
        } else if n == 2 && p >= (1.0 + 17f64.sqrt()) / 4.0 {
            if p >= 4.0 / 3.0 {
                notes.push(
                    "n = 2, p >= 4/3: the argument given for case (III) covers p < 4/3 only; this subcase is carried by Theorem 2.6 (C), whose threshold is +inf here".to_string(),
                );
            }
            Some("2.9(III)")
        } else if fc.growth {
            Some("2.9(IV)")
        } else {
            None
        };
        if let Some(c) = case {
            hit(c, Conclusion::ConstantForced);
        }
    }
    if alpha > p - 1.0 && alpha < wang_wei {
        hit("2.3", Conclusion::ConstantForced);
    }
    if fc.nonnegative() && alpha < wang_wei {
        hit("Cor 2.1(a)", Conclusion::ConstantForced);
    }
    if fc.sign == SignClass::Nonpositive && alpha > p - 1.0 {
        hit("Cor 2.1(b)", Conclusion::ConstantForced);
    }

    let (verdict, theorem) = match fired.first() {
        Some(h) => (h.conclusion, Some(h.theorem.clone())),
        None => {
            if fc.pure_power && fc.nonnegative() && !ps.exceeds(alpha) {
                notes.push("alpha >= p_s: positive entire solutions exist for alpha = p_s (Emden bubble)".to_string());
            }
            (Conclusion::OutOfRange, None)
        }
    };
    Ok(LiouvilleVerdict {
        verdict,
        theorem,
        fired,
        notes,
    })
}

/// Constants of the log-gradient estimates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradientEstimateParams {
    pub delta0: f64,
    pub delta0_plus: f64,
    pub lambda0: f64,
}

impl GradientEstimateParams {
    pub fn new(delta0: f64, p: f64) -> Result<Self> {
        if !(delta0 < 1.0) {
            return Err(LabError::precondition(format!("delta0 must be below 1, got {delta0}")));
        }
        if !(p > 1.0) {
            return Err(LabError::input("p must exceed 1"));
        }
        let delta0_plus = delta0.max(0.0);
        Ok(GradientEstimateParams {
            delta0,
            delta0_plus,
            lambda0: p / (1.0 - delta0_plus),
        })
    }

    /// `(n-1)/(p-1) * sqrt(kappa / (1 - delta0^+))`.
    pub fn global_bound(&self, n: usize, p: f64, kappa: f64) -> f64 {
        (n as f64 - 1.0) / (p - 1.0) * (kappa / (1.0 - self.delta0_plus)).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarnackConfig {
    pub chi: f64,
    pub q: f64,
}

impl HarnackConfig {
    /// `chi = n/(n-p)` for `p < n`; otherwise `chi_default` (which must exceed 1).
    pub fn new(n: usize, p: f64, q: f64, chi_default: f64) -> Result<Self> {
        check_np(n, p)?;
        let nf = n as f64;
        let chi = if p < nf { nf / (nf - p) } else { chi_default };
        if !(chi > 1.0) {
            return Err(LabError::input("chi must exceed 1"));
        }
        if !(q > 0.0 && q < (p - 1.0) * chi) {
            return Err(LabError::precondition(format!(
                "q = {q} outside (0, (p-1) chi) = (0, {})",
                (p - 1.0) * chi
            )));
        }
        Ok(HarnackConfig { chi, q })
    }
}

/// The Emden bubble `u(r) = (K / (lambda^q + r^q))^e`, `q = p/(p-1)`, `e = (n-p)/p`,
/// `K = lambda^{1/(p-1)} n^{1/p} ((n-p)/(p-1))^{(p-1)/p}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmdenBubble {
    pub n: usize,
    pub p: f64,
    pub lambda: f64,
}

impl EmdenBubble {
    pub fn new(n: usize, p: f64, lambda: f64) -> Result<Self> {
        check_np(n, p)?;
        if p >= n as f64 {
            return Err(LabError::precondition(format!("the bubble needs p < n, got p = {p}, n = {n}")));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(LabError::input("lambda must be positive"));
        }
        Ok(EmdenBubble { n, p, lambda })
    }

    fn consts(&self) -> (f64, f64, f64) {
        let (n, p, l) = (self.n as f64, self.p, self.lambda);
        let q = p / (p - 1.0);
        let e = (n - p) / p;
        let k = l.powf(1.0 / (p - 1.0)) * n.powf(1.0 / p) * ((n - p) / (p - 1.0)).powf((p - 1.0) / p);
        (q, e, k)
    }

    /// Critical exponent the bubble solves `-lap_p u = u^{p_s}` with.
    pub fn exponent(&self) -> f64 {
        let n = self.n as f64;
        ((n + 1.0) * self.p - n) / (n - self.p)
    }

    pub fn value(&self, r: f64) -> f64 {
        let (q, e, k) = self.consts();
        (k / (self.lambda.powf(q) + r.abs().powf(q))).powf(e)
    }

    pub fn derivative(&self, r: f64) -> f64 {
        let (q, e, k) = self.consts();
        let d = self.lambda.powf(q) + r.powf(q);
        -e * k.powf(e) * d.powf(-e - 1.0) * q * r.powf(q - 1.0)
    }

    /// Radial p-Laplacian in flux form, `-C D^{-s-1} (n D - s q r^q)`.
    pub fn p_laplacian(&self, r: f64) -> f64 {
        let (q, e, k) = self.consts();
        let (n, p) = (self.n as f64, self.p);
        let d = self.lambda.powf(q) + r.powf(q);
        let c = (e * q * k.powf(e)).powf(p - 1.0);
        let s = (e + 1.0) * (p - 1.0);
        -c * d.powf(-s - 1.0) * (n * d - s * q * r.powf(q))
    }

    /// Generic evaluation of the closed form for derivative carriers.
    pub fn eval_taylor(&self, r: Taylor3) -> Taylor3 {
        use crate::real::Real;
        let (q, e, k) = self.consts();
        (Taylor3::constant(k) / (Taylor3::constant(self.lambda.powf(q)) + r.powf(q))).powf(e)
    }
}

pub fn emden_bubble(n: usize, p: f64, lambda: f64) -> Result<EmdenBubble> {
    EmdenBubble::new(n, p, lambda)
}

pub const EMDEN_RESIDUAL_TOL: f64 = 1e-8;

/// `|lap_p u + u^{p_s}| / u^{p_s}` over `radii`.
pub fn emden_residual(n: usize, p: f64, lambda: f64, radii: &[f64]) -> Result<IdentityReport> {
    let b = EmdenBubble::new(n, p, lambda)?;
    let ps = b.exponent();
    let samples = radii
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            if !(r >= 0.0 && r.is_finite()) {
                return Err(LabError::domain(format!("radius {r} must be finite and nonnegative")));
            }
            let src = b.value(r).powf(ps);
            Ok(IdentitySample {
                index: i as u64,
                params: serde_json::json!({"n": n, "p": p, "lambda": lambda}),
                sample: serde_json::json!({"r": r}),
                lhs: vec![-b.p_laplacian(r) / src],
                rhs: vec![1.0],
                filtered: 0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rep = reduce_identity(CheckId::EmdenResidual, EMDEN_RESIDUAL_TOL, samples);
    // the normalized residual here is |lap_p u + u^ps| / u^ps itself
    rep.max_rel_residual = rep.max_abs_residual;
    rep.pass = rep.samples > 0 && rep.max_rel_residual <= rep.tol;
    Ok(rep)
}
