//! Experiment configurations and the reports the CLI and the C ABI emit.
//!
//! Every configuration field has a documented default, and the report echoes
//! the resolved configuration so a run can be repeated from its report alone.

use crate::error::{LabError, Result};
use crate::estimates::{
    constant_profile, global_bound_check, hn_horospherical_profile, hn_p_harmonic_profile, local_max_principle_ratio,
    local_scaling_check, weak_harnack_ratio, GlobalBoundReport, HarnackProfile, LocalScalingReport, LogGradientProfile,
    RatioReport, ScalingFamily,
};
use crate::exponents::{classify_liouville, emden_residual, threshold_table, EmdenBubble, ExponentRecord, FClass, LiouvilleVerdict};
use crate::geometry::{BishopGromovReport, ManifoldModel};
use crate::identities::{
    check_basic1, check_bochner_p, check_bochner_x, check_decomposition, check_kato, check_moser_pointwise,
    check_trace_inequality, check_ww, Campaign, JetCampaign,
};
use crate::reaction::{ReactionTerm, SignClass};
use crate::report::{IdentityReport, InequalityReport};
use crate::sampling::{CampaignModel, FieldFamily};
use crate::shooting::{bubble_match, bv_sphere_scan, liouville_scan, shoot, OutcomeKind, RadialSolution, ScanTable, ShootOptions, SphereScanReport};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub experiment: ExperimentConfig,
}

impl RunConfig {
    pub fn new(experiment: ExperimentConfig) -> Self {
        RunConfig {
            schema_version: SCHEMA_VERSION,
            experiment,
        }
    }

    /// Parses a JSON configuration, rejecting unknown fields and other schema versions.
    pub fn from_json(text: &str) -> Result<Self> {
        let c: RunConfig = serde_json::from_str(text).map_err(|e| LabError::Usage(format!("config: {e}")))?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(LabError::Usage(format!(
                "config schema version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum ExperimentConfig {
    Identities(IdentitiesConfig),
    TraceIneq(JetConfig),
    Kato(JetConfig),
    Moser(MoserConfig),
    Bubble(BubbleConfig),
    Scan(ScanConfig),
    BvSphere(SphereConfig),
    GradientBound(GradientBoundConfig),
    LocalScaling(LocalScalingConfig),
    Harnack(HarnackConfigFile),
    Classify(ClassifyConfig),
    Thresholds(ThresholdsConfig),
    Volume(VolumeConfig),
}

impl ExperimentConfig {
    pub fn command(&self) -> &'static str {
        match self {
            ExperimentConfig::Identities(_) => "identities",
            ExperimentConfig::TraceIneq(_) => "trace-ineq",
            ExperimentConfig::Kato(_) => "kato",
            ExperimentConfig::Moser(_) => "moser",
            ExperimentConfig::Bubble(_) => "bubble",
            ExperimentConfig::Scan(_) => "scan",
            ExperimentConfig::BvSphere(_) => "bv-sphere",
            ExperimentConfig::GradientBound(_) => "gradient-bound",
            ExperimentConfig::LocalScaling(_) => "local-scaling",
            ExperimentConfig::Harnack(_) => "harnack",
            ExperimentConfig::Classify(_) => "classify",
            ExperimentConfig::Thresholds(_) => "thresholds",
            ExperimentConfig::Volume(_) => "volume",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelName {
    Euclidean,
    Sphere,
    Hyperbolic,
}

impl ModelName {
    fn campaign(self, kappa: f64) -> CampaignModel {
        match self {
            ModelName::Euclidean => CampaignModel::Euclidean,
            ModelName::Sphere => CampaignModel::Sphere { kappa },
            ModelName::Hyperbolic => CampaignModel::Hyperbolic { kappa },
        }
    }

    fn label(self) -> &'static str {
        match self {
            ModelName::Euclidean => "euclidean",
            ModelName::Sphere => "sphere",
            ModelName::Hyperbolic => "hyperbolic",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    All,
    Decomposition,
    Ww,
    BochnerX,
    BochnerP,
    Basic1,
}

fn d_suite() -> Suite {
    Suite::All
}
fn d_models() -> Vec<ModelName> {
    vec![ModelName::Euclidean, ModelName::Sphere, ModelName::Hyperbolic]
}
fn d_one() -> f64 {
    1.0
}
fn d_two() -> f64 {
    2.0
}
fn d_three() -> usize {
    3
}
fn d_dims() -> Vec<usize> {
    vec![2, 3, 4]
}
fn d_identity_p() -> Vec<f64> {
    vec![1.5, 2.0, 3.0]
}
fn d_family() -> FieldFamily {
    FieldFamily::Mixed
}
fn d_samples() -> usize {
    1000
}
fn d_jet_samples() -> usize {
    10_000
}
fn d_jet_p() -> Vec<f64> {
    vec![1.2, 1.5, 2.0, 3.0, 5.0]
}
fn d_jet_b() -> Vec<f64> {
    vec![-1.0, 0.0, 1.0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentitiesConfig {
    #[serde(default = "d_suite")]
    pub suite: Suite,
    #[serde(default = "d_models")]
    pub models: Vec<ModelName>,
    /// Curvature magnitude of the sphere and hyperbolic models.
    #[serde(default = "d_one")]
    pub kappa: f64,
    #[serde(default = "d_dims")]
    pub dims: Vec<usize>,
    #[serde(default = "d_identity_p")]
    pub p: Vec<f64>,
    #[serde(default = "d_family")]
    pub family: FieldFamily,
    #[serde(default = "d_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    /// Overrides the per-identity tolerance when set.
    #[serde(default)]
    pub tol: Option<f64>,
}

impl Default for IdentitiesConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JetConfig {
    #[serde(default = "d_jet_samples")]
    pub samples: usize,
    #[serde(default = "d_dims")]
    pub dims: Vec<usize>,
    #[serde(default = "d_jet_p")]
    pub p: Vec<f64>,
    /// Only used by the trace inequality.
    #[serde(default = "d_jet_b")]
    pub b: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    /// Overrides the allowed negative normalized margin.
    #[serde(default)]
    pub tol: Option<f64>,
}

impl Default for JetConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults")
    }
}

fn d_moser_points() -> usize {
    2000
}

/// Moser inequality along the radial solution of `-lap_p u = u^alpha` on `R^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoserConfig {
    #[serde(default = "d_three")]
    pub n: usize,
    #[serde(default = "d_two")]
    pub p: f64,
    #[serde(default = "d_two")]
    pub alpha: f64,
    #[serde(default)]
    pub delta0: f64,
    #[serde(default = "d_two")]
    pub lambda: f64,
    #[serde(default = "d_one")]
    pub u0: f64,
    #[serde(default = "d_moser_points")]
    pub points: usize,
    #[serde(default)]
    pub tol: Option<f64>,
}

fn d_rmax() -> f64 {
    20.0
}
fn d_radii_points() -> usize {
    201
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BubbleConfig {
    #[serde(default = "d_three")]
    pub n: usize,
    #[serde(default = "d_two")]
    pub p: f64,
    #[serde(default = "d_one")]
    pub lambda: f64,
    /// Residual radii are `rmax * i / (points - 1)`.
    #[serde(default = "d_rmax")]
    pub rmax: f64,
    #[serde(default = "d_radii_points")]
    pub points: usize,
    /// Trajectory comparison range.
    #[serde(default = "d_rmax")]
    pub horizon: f64,
    #[serde(default)]
    pub tol: Option<f64>,
}

fn d_alphas() -> Vec<f64> {
    vec![1.0, 2.0, 3.0, 4.0, 4.5, 4.9, 5.0]
}
fn d_u0s() -> Vec<f64> {
    vec![0.5, 1.0, 2.0]
}
fn d_horizon() -> f64 {
    100.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    #[serde(default = "d_three")]
    pub n: usize,
    #[serde(default = "d_two")]
    pub p: f64,
    #[serde(default = "d_alphas")]
    pub alpha: Vec<f64>,
    #[serde(default = "d_u0s")]
    pub u0: Vec<f64>,
    /// Minimum horizon; each cell is raised to its own intrinsic scale.
    #[serde(default = "d_horizon")]
    pub horizon: f64,
}

fn d_sphere_u0() -> Vec<f64> {
    (1..=30).map(|i| i as f64 / 10.0).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SphereConfig {
    #[serde(default = "d_three")]
    pub n: usize,
    #[serde(default = "d_three_f")]
    pub q: f64,
    #[serde(default = "d_one")]
    pub lambda: f64,
    #[serde(default = "d_sphere_u0")]
    pub u0: Vec<f64>,
}

fn d_three_f() -> f64 {
    3.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientProfileName {
    /// `int_r^inf sinh^{-beta}`, singular at the pole.
    Radial,
    /// `exp(beta sqrt(kappa) b)` for a Busemann function `b`.
    Horospherical,
    Constant,
}

fn d_gp() -> GradientProfileName {
    GradientProfileName::Radial
}
fn d_gb_n() -> Vec<usize> {
    vec![3]
}
fn d_gb_p() -> Vec<f64> {
    vec![2.0]
}
fn d_gb_kappa() -> Vec<f64> {
    vec![1.0]
}
fn d_gb_points() -> usize {
    40
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradientBoundConfig {
    #[serde(default = "d_gp")]
    pub profile: GradientProfileName,
    #[serde(default = "d_gb_n")]
    pub n: Vec<usize>,
    #[serde(default = "d_gb_p")]
    pub p: Vec<f64>,
    #[serde(default = "d_gb_kappa")]
    pub kappa: Vec<f64>,
    #[serde(default)]
    pub delta0: f64,
    /// The grid is `rtail * i / points`, `i = 1..=points` (levels `[-rtail, rtail]`
    /// for the horospherical profile).
    #[serde(default = "d_rmax")]
    pub rtail: f64,
    #[serde(default = "d_gb_points")]
    pub points: usize,
}

impl GradientBoundConfig {
    fn grid(&self) -> Vec<f64> {
        let m = self.points.max(1);
        match self.profile {
            GradientProfileName::Horospherical => (0..=m).map(|i| self.rtail * (2.0 * i as f64 / m as f64 - 1.0)).collect(),
            _ => (1..=m).map(|i| self.rtail * i as f64 / m as f64).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingFamilyName {
    Affine,
    Fundamental,
}

fn d_sf() -> ScalingFamilyName {
    ScalingFamilyName::Affine
}
fn d_scaling_radii() -> Vec<f64> {
    vec![1.0, 2.0, 4.0, 8.0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalScalingConfig {
    #[serde(default = "d_sf")]
    pub family: ScalingFamilyName,
    #[serde(default = "d_three")]
    pub n: usize,
    #[serde(default = "d_two")]
    pub p: f64,
    /// Pole distance in units of `R` for the fundamental family.
    #[serde(default = "d_three_f")]
    pub offset: f64,
    #[serde(default = "d_scaling_radii")]
    pub radii: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HarnackProfileName {
    Constant,
    Decay,
    Bubble,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HarnackTest {
    Weak,
    LocalMax,
    Both,
}

fn d_hp() -> HarnackProfileName {
    HarnackProfileName::Decay
}
fn d_ht() -> HarnackTest {
    HarnackTest::Both
}
fn d_half() -> f64 {
    0.5
}
fn d_harnack_radii() -> Vec<f64> {
    vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0]
}
fn d_band() -> f64 {
    crate::estimates::DEFAULT_BAND
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarnackConfigFile {
    #[serde(default = "d_hp")]
    pub profile: HarnackProfileName,
    /// Constant profile value.
    #[serde(default = "d_one")]
    pub value: f64,
    /// Decay profile `(1 + r^2)^{-power}`.
    #[serde(default = "d_half")]
    pub power: f64,
    /// Bubble scale.
    #[serde(default = "d_one")]
    pub lambda: f64,
    #[serde(default = "d_three")]
    pub n: usize,
    #[serde(default = "d_two")]
    pub p: f64,
    #[serde(default = "d_one")]
    pub q: f64,
    #[serde(default = "d_harnack_radii")]
    pub radii: Vec<f64>,
    #[serde(default = "d_band")]
    pub band: f64,
    #[serde(default = "d_ht")]
    pub test: HarnackTest,
}

impl HarnackConfigFile {
    fn profile(&self) -> HarnackProfile {
        match self.profile {
            HarnackProfileName::Constant => HarnackProfile::Constant { value: self.value },
            HarnackProfileName::Decay => HarnackProfile::Decay { power: self.power },
            HarnackProfileName::Bubble => HarnackProfile::Bubble { lambda: self.lambda },
        }
    }
}

fn d_sign() -> SignClass {
    SignClass::Positive
}
fn d_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyConfig {
    #[serde(default = "d_three")]
    pub n: usize,
    #[serde(default = "d_two")]
    pub p: f64,
    pub alpha: f64,
    #[serde(default = "d_sign")]
    pub sign: SignClass,
    #[serde(default = "d_true")]
    pub pure_power: bool,
    #[serde(default = "d_true")]
    pub growth: bool,
    #[serde(default = "d_true")]
    pub noncompact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdsConfig {
    #[serde(default = "d_three")]
    pub n: usize,
    #[serde(default = "d_two")]
    pub p: f64,
}

fn d_model() -> ModelName {
    ModelName::Euclidean
}
fn d_volume_radii() -> Vec<f64> {
    vec![0.5, 1.0, 1.5, 2.0, 2.5, 3.0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VolumeConfig {
    #[serde(default = "d_model")]
    pub model: ModelName,
    #[serde(default = "d_three")]
    pub dim: usize,
    #[serde(default = "d_one")]
    pub kappa: f64,
    #[serde(default = "d_volume_radii")]
    pub radii: Vec<f64>,
}

/// Result of one check, tagged by its report type.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "result", rename_all = "snake_case")]
pub enum Outcome {
    Identity(IdentityReport),
    Inequality(InequalityReport),
    Scan(ScanTable),
    Sphere(SphereScanReport),
    GradientBound {
        profile: LogGradientProfile,
        report: GlobalBoundReport,
    },
    Scaling(LocalScalingReport),
    Ratio(RatioReport),
    Classification(LiouvilleVerdict),
    Thresholds(Vec<ExponentRecord>),
    Volume(BishopGromovReport),
    Error {
        error_kind: String,
        message: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    /// Informational checks never fail a run.
    #[serde(default)]
    pub informational: bool,
    pub outcome: Outcome,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub config: RunConfig,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
    /// Only present when timing was requested, so default reports stay byte-identical.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl RunReport {
    /// Whether any check failed because the request itself was malformed.
    pub fn has_usage_error(&self) -> bool {
        self.checks
            .iter()
            .any(|c| matches!(&c.outcome, Outcome::Error { error_kind, .. } if error_kind == "input" || error_kind == "usage"))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// A finished run with any CSV data the experiment produces.
pub struct RunOutput {
    pub report: RunReport,
    pub csv: Option<String>,
}

struct Builder {
    checks: Vec<CheckResult>,
    csv: Option<String>,
}

impl Builder {
    fn push(&mut self, name: impl Into<String>, r: Result<(bool, Outcome)>) {
        self.push_with(name, false, r)
    }

    fn push_with(&mut self, name: impl Into<String>, informational: bool, r: Result<(bool, Outcome)>) {
        let (pass, outcome) = r.unwrap_or_else(|e| {
            (
                false,
                Outcome::Error {
                    error_kind: e.kind().into(),
                    message: e.to_string(),
                },
            )
        });
        self.checks.push(CheckResult {
            name: name.into(),
            pass,
            informational,
            outcome,
        });
    }
}

fn identity(mut r: IdentityReport, tol: Option<f64>) -> (bool, Outcome) {
    if let Some(t) = tol {
        r.tol = t;
        r.pass = r.samples > 0 && r.max_rel_residual <= t;
    }
    (r.pass, Outcome::Identity(r))
}

fn inequality(mut r: InequalityReport, tol: Option<f64>) -> (bool, Outcome) {
    if let Some(t) = tol {
        r.tol_neg = t;
        r.pass = r.samples > 0 && r.min_margin >= -t;
    }
    (r.pass, Outcome::Inequality(r))
}

fn csv_string(write: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Option<String> {
    let mut buf = Vec::new();
    write(&mut buf).ok()?;
    String::from_utf8(buf).ok()
}

/// Runs an experiment. Check failures, including numerical errors, are recorded
/// in the report; only a malformed configuration is returned as an error.
pub fn run(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    let mut b = Builder {
        checks: Vec::new(),
        csv: None,
    };
    match &config.experiment {
        ExperimentConfig::Identities(c) => run_identities(c, &mut b),
        ExperimentConfig::TraceIneq(c) => {
            let jc = jet_campaign(c);
            match check_trace_inequality(&jc) {
                Ok((lo, up)) => {
                    b.push("trace_lower", Ok(inequality(lo, c.tol)));
                    b.push("trace_upper", Ok(inequality(up, c.tol)));
                }
                Err(e) => b.push("trace", Err(e)),
            }
        }
        ExperimentConfig::Kato(c) => b.push("kato", check_kato(&jet_campaign(c)).map(|r| inequality(r, c.tol))),
        ExperimentConfig::Moser(c) => b.push(
            "moser",
            (|| {
                let model = ManifoldModel::euclidean(c.n)?;
                let sol = RadialSolution::solve(&model, c.p, &ReactionTerm::power(c.alpha), c.u0, &ShootOptions::default())?;
                Ok(inequality(check_moser_pointwise(&sol, c.delta0, c.lambda, c.points)?, c.tol))
            })(),
        ),
        ExperimentConfig::Bubble(c) => run_bubble(c, &mut b),
        ExperimentConfig::Scan(c) => {
            let r = liouville_scan(c.n, c.p, &c.alpha, &c.u0, c.horizon);
            if let Ok(t) = &r {
                b.csv = csv_string(|w| t.write_csv(w));
            }
            b.push("liouville_scan", r.map(|t| (scan_consistent(&t), Outcome::Scan(t))));
        }
        ExperimentConfig::BvSphere(c) => {
            let r = bv_sphere_scan(c.n, c.q, c.lambda, &c.u0);
            let informational = r.as_ref().map(|s| s.outside_hypotheses || s.boundary_case).unwrap_or(false);
            b.push_with(
                "bv_sphere_scan",
                informational,
                r.map(|s| {
                    let pass = informational || (s.nonconstant_regular.is_empty() && s.regular_positive.iter().all(|u| (u - s.constant_value).abs() <= crate::shooting::ROOT_TOL));
                    (pass, Outcome::Sphere(s))
                }),
            );
        }
        ExperimentConfig::GradientBound(c) => run_gradient(c, &mut b),
        ExperimentConfig::LocalScaling(c) => {
            let family = match c.family {
                ScalingFamilyName::Affine => ScalingFamily::Affine { n: c.n, p: c.p },
                ScalingFamilyName::Fundamental => ScalingFamily::Fundamental {
                    n: c.n,
                    p: c.p,
                    offset: c.offset,
                },
            };
            b.push("local_scaling", local_scaling_check(family, &c.radii).map(|r| (r.pass, Outcome::Scaling(r))));
        }
        ExperimentConfig::Harnack(c) => {
            let prof = c.profile();
            if matches!(c.test, HarnackTest::Weak | HarnackTest::Both) {
                b.push("weak_harnack", weak_harnack_ratio(prof, c.n, c.p, c.q, &c.radii, c.band).map(|r| (r.pass, Outcome::Ratio(r))));
            }
            if matches!(c.test, HarnackTest::LocalMax | HarnackTest::Both) {
                b.push(
                    "local_max_principle",
                    local_max_principle_ratio(prof, c.n, c.p, c.q, &c.radii, c.band).map(|r| (r.pass, Outcome::Ratio(r))),
                );
            }
        }
        ExperimentConfig::Classify(c) => {
            let fc = FClass {
                sign: c.sign,
                pure_power: c.pure_power,
                growth: c.growth,
                noncompact: c.noncompact,
            };
            b.push_with(
                "classify",
                true,
                classify_liouville(c.n, c.p, c.alpha, &fc).map(|v| (true, Outcome::Classification(v))),
            );
        }
        ExperimentConfig::Thresholds(c) => {
            b.push_with("thresholds", true, threshold_table(c.n, c.p).map(|t| (true, Outcome::Thresholds(t))))
        }
        ExperimentConfig::Volume(c) => b.push(
            "bishop_gromov",
            c.model
                .campaign(c.kappa)
                .build(c.dim)
                .and_then(|m| m.bishop_gromov_check(&c.radii))
                .map(|r| (r.non_increasing, Outcome::Volume(r))),
        ),
    }
    let pass = !b.checks.is_empty() && b.checks.iter().all(|c| c.pass);
    Ok(RunOutput {
        report: RunReport {
            schema_version: SCHEMA_VERSION,
            tool_version: TOOL_VERSION.into(),
            config: config.clone(),
            checks: b.checks,
            pass,
            wall_time_s: None,
        },
        csv: b.csv,
    })
}

fn jet_campaign(c: &JetConfig) -> JetCampaign {
    JetCampaign {
        samples: c.samples,
        dims: c.dims.clone(),
        p_values: c.p.clone(),
        b_values: c.b.clone(),
        seed: c.seed,
    }
}

fn run_identities(c: &IdentitiesConfig, b: &mut Builder) {
    type Check = fn(&Campaign) -> Result<IdentityReport>;
    let all: [(Suite, &str, Check); 5] = [
        (Suite::Decomposition, "decomposition", check_decomposition),
        (Suite::Ww, "ww", check_ww),
        (Suite::BochnerX, "bochner_x", check_bochner_x),
        (Suite::BochnerP, "bochner_p", check_bochner_p),
        (Suite::Basic1, "basic1", check_basic1),
    ];
    for &model in &c.models {
        for &dim in &c.dims {
            let campaign = Campaign::new(model.campaign(c.kappa), dim, c.family, c.p.clone(), c.samples, c.seed);
            for (suite, name, check) in all {
                if c.suite == Suite::All || c.suite == suite {
                    b.push(format!("{name}/{}/n={dim}", model.label()), check(&campaign).map(|r| identity(r, c.tol)));
                }
            }
        }
    }
}

fn run_bubble(c: &BubbleConfig, b: &mut Builder) {
    let m = c.points.max(2);
    let radii: Vec<f64> = (0..m).map(|i| c.rmax * i as f64 / (m - 1) as f64).collect();
    b.push("emden_residual", emden_residual(c.n, c.p, c.lambda, &radii).map(|r| identity(r, c.tol)));
    b.push("bubble_match", bubble_match(c.n, c.p, c.lambda, c.horizon).map(|r| identity(r, c.tol)));
    if let Ok(bubble) = EmdenBubble::new(c.n, c.p, c.lambda) {
        if let Ok(model) = ManifoldModel::euclidean(c.n) {
            let f = ReactionTerm::power(bubble.exponent());
            if let Ok(o) = shoot(&model, c.p, &f, bubble.value(0.0), &ShootOptions::with_horizon(c.horizon)) {
                b.csv = csv_string(|w| o.write_csv(w));
            }
        }
    }
}

/// No subcritical cell may stay positive or fail, and every subcritical cell must cross.
fn scan_consistent(t: &ScanTable) -> bool {
    t.rows.iter().all(|row| {
        let subcritical = t.critical_exponent.exceeds(row.alpha) && row.alpha > 0.0;
        match (&row.outcome, subcritical) {
            (None, _) => false,
            (Some(OutcomeKind::CrossedZero { .. }), true) => true,
            (Some(_), true) => false,
            (Some(_), false) => true,
        }
    })
}

fn run_gradient(c: &GradientBoundConfig, b: &mut Builder) {
    let grid = c.grid();
    for &n in &c.n {
        for &p in &c.p {
            for &kappa in &c.kappa {
                let name = format!("gradient_bound/n={n}/p={p}/kappa={kappa}");
                let r = (|| {
                    let profile = match c.profile {
                        GradientProfileName::Radial => hn_p_harmonic_profile(n, p, kappa, &grid)?,
                        GradientProfileName::Horospherical => hn_horospherical_profile(n, p, kappa, &grid)?,
                        GradientProfileName::Constant => constant_profile(n, p, 1.0, &grid)?,
                    };
                    let report = global_bound_check(&profile, n, p, kappa, c.delta0)?;
                    Ok((report.pass, profile, report))
                })();
                if b.csv.is_none() {
                    if let Ok((_, profile, _)) = &r {
                        let mut s = String::from("r,u,g\n");
                        for ((r, u), g) in profile.grid.iter().zip(&profile.u).zip(&profile.g) {
                            s.push_str(&format!("{r},{u},{g}\n"));
                        }
                        b.csv = Some(s);
                    }
                }
                b.push(name, r.map(|(pass, profile, report)| (pass, Outcome::GradientBound { profile, report })));
            }
        }
    }
}
