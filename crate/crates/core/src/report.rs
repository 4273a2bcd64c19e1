//! Report records shared by the checks and the CLI.

use serde::{Deserialize, Serialize};

/// Floor in the relative-residual denominator.
pub const RESIDUAL_FLOOR: f64 = 1e-300;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckId {
    Decomposition,
    Ww,
    BochnerX,
    BochnerP,
    Basic1,
    Basic2,
    Basic2Special,
    EmdenResidual,
    BubbleMatch,
    TraceLower,
    TraceUpper,
    Kato,
    Moser,
}

impl CheckId {
    pub fn as_str(&self) -> &'static str {
        match self {
            CheckId::Decomposition => "decomposition",
            CheckId::Ww => "ww",
            CheckId::BochnerX => "bochner_x",
            CheckId::BochnerP => "bochner_p",
            CheckId::Basic1 => "basic1",
            CheckId::Basic2 => "basic2",
            CheckId::Basic2Special => "basic2_special",
            CheckId::EmdenResidual => "emden_residual",
            CheckId::BubbleMatch => "bubble_match",
            CheckId::TraceLower => "trace_lower",
            CheckId::TraceUpper => "trace_upper",
            CheckId::Kato => "kato",
            CheckId::Moser => "moser",
        }
    }
}

/// The sample that produced the extreme residual or margin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorstCase {
    pub index: u64,
    pub params: serde_json::Value,
    pub sample: serde_json::Value,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity_id: CheckId,
    pub samples: usize,
    /// Draws rejected as near-critical before a usable sample was found.
    pub filtered: usize,
    pub max_rel_residual: f64,
    pub max_abs_residual: f64,
    pub worst_case: Option<WorstCase>,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub identity_id: CheckId,
    pub samples: usize,
    pub filtered: usize,
    /// Most negative normalized `LHS - RHS`.
    pub min_margin: f64,
    pub worst_case: Option<WorstCase>,
    pub tol_neg: f64,
    pub pass: bool,
}

/// `|l - r| / (|l| + |r| + floor)` for vectors, with the absolute residual.
pub fn relative_residual(l: &[f64], r: &[f64]) -> (f64, f64) {
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let diff: Vec<f64> = l.iter().zip(r).map(|(a, b)| a - b).collect();
    let abs = norm(&diff);
    (abs / (norm(l) + norm(r) + RESIDUAL_FLOOR), abs)
}

/// One evaluated identity sample.
#[derive(Clone, Debug)]
pub(crate) struct IdentitySample {
    pub index: u64,
    pub params: serde_json::Value,
    pub sample: serde_json::Value,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub filtered: usize,
}

/// Reduces samples in index order; ties keep the lowest index.
pub(crate) fn reduce_identity(id: CheckId, tol: f64, samples: Vec<IdentitySample>) -> IdentityReport {
    let mut max_rel = 0.0f64;
    let mut max_abs = 0.0f64;
    let mut worst: Option<WorstCase> = None;
    let mut filtered = 0;
    let n = samples.len();
    for s in samples {
        filtered += s.filtered;
        let (rel, abs) = relative_residual(&s.lhs, &s.rhs);
        let rel = if rel.is_nan() { f64::INFINITY } else { rel };
        max_abs = max_abs.max(if abs.is_nan() { f64::INFINITY } else { abs });
        if worst.is_none() || rel > max_rel {
            max_rel = max_rel.max(rel);
            worst = Some(WorstCase {
                index: s.index,
                params: s.params,
                sample: s.sample,
                lhs: s.lhs,
                rhs: s.rhs,
            });
        }
    }
    IdentityReport {
        identity_id: id,
        samples: n,
        filtered,
        max_rel_residual: max_rel,
        max_abs_residual: max_abs,
        worst_case: worst,
        tol,
        pass: n > 0 && max_rel <= tol,
    }
}

/// One evaluated inequality sample; `margin` is already normalized.
#[derive(Clone, Debug)]
pub(crate) struct InequalitySample {
    pub index: u64,
    pub params: serde_json::Value,
    pub sample: serde_json::Value,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub filtered: usize,
}

pub(crate) fn reduce_inequality(id: CheckId, tol_neg: f64, samples: Vec<InequalitySample>) -> InequalityReport {
    let mut min_margin = f64::INFINITY;
    let mut worst: Option<WorstCase> = None;
    let mut filtered = 0;
    let n = samples.len();
    for s in samples {
        filtered += s.filtered;
        let m = if s.margin.is_nan() { f64::NEG_INFINITY } else { s.margin };
        if worst.is_none() || m < min_margin {
            min_margin = m;
            worst = Some(WorstCase {
                index: s.index,
                params: s.params,
                sample: s.sample,
                lhs: vec![s.lhs],
                rhs: vec![s.rhs],
            });
        }
    }
    InequalityReport {
        identity_id: id,
        samples: n,
        filtered,
        min_margin,
        worst_case: worst,
        tol_neg,
        pass: n > 0 && min_margin >= -tol_neg,
    }
}
