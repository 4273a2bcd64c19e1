//! Nonlinearities `f` of `-lap_p u = f(u)`.

use crate::error::{LabError, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignClass {
    Positive,
    Nonnegative,
    Nonpositive,
    Mixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerTerm {
    pub coef: f64,
    pub exponent: f64,
}

/// Families of nonlinearities, tagged by `family`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReactionTerm {
    Zero,
    /// `coef * t^alpha`
    PurePower { alpha: f64, coef: f64 },
    /// `t^alpha * ln(1 + t)^beta`
    PowerLog { alpha: f64, beta: f64 },
    /// `t^alpha + a t^beta`
    TwoPower { alpha: f64, a: f64, beta: f64 },
    /// `t^alpha / (1 + t^beta)`
    RationalPower { alpha: f64, beta: f64 },
    /// `t^q - lambda t`
    PowerMinusLinear { q: f64, lambda: f64 },
    /// `sum_k coef_k t^{exponent_k}`
    PowerSum { terms: Vec<PowerTerm> },
}

impl ReactionTerm {
    pub fn power(alpha: f64) -> Self {
        ReactionTerm::PurePower { alpha, coef: 1.0 }
    }

    /// `f(t)` for `t > 0`; `f(0)` is the continuous extension.
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            ReactionTerm::Zero => 0.0,
            ReactionTerm::PurePower { alpha, coef } => coef * t.powf(*alpha),
            ReactionTerm::PowerLog { alpha, beta } => t.powf(*alpha) * t.ln_1p().powf(*beta),
            ReactionTerm::TwoPower { alpha, a, beta } => t.powf(*alpha) + a * t.powf(*beta),
            ReactionTerm::RationalPower { alpha, beta } => t.powf(*alpha) / (1.0 + t.powf(*beta)),
            ReactionTerm::PowerMinusLinear { q, lambda } => t.powf(*q) - lambda * t,
            ReactionTerm::PowerSum { terms } => terms.iter().map(|k| k.coef * t.powf(k.exponent)).sum(),
        }
    }

    /// `f'(t)` for `t > 0`.
    pub fn deriv(&self, t: f64) -> f64 {
        match self {
            ReactionTerm::Zero => 0.0,
            ReactionTerm::PurePower { alpha, coef } => coef * alpha * t.powf(alpha - 1.0),
            ReactionTerm::PowerLog { alpha, beta } => {
                let l = t.ln_1p();
                alpha * t.powf(alpha - 1.0) * l.powf(*beta) + beta * t.powf(*alpha) * l.powf(beta - 1.0) / (1.0 + t)
            }
            ReactionTerm::TwoPower { alpha, a, beta } => {
                alpha * t.powf(alpha - 1.0) + a * beta * t.powf(beta - 1.0)
            }
            ReactionTerm::RationalPower { alpha, beta } => {
                let d = 1.0 + t.powf(*beta);
                (alpha * t.powf(alpha - 1.0) * d - beta * t.powf(alpha + beta - 1.0)) / (d * d)
            }
            ReactionTerm::PowerMinusLinear { q, lambda } => q * t.powf(q - 1.0) - lambda,
            ReactionTerm::PowerSum { terms } => terms
                .iter()
                .map(|k| k.coef * k.exponent * t.powf(k.exponent - 1.0))
                .sum(),
        }
    }

    /// Odd extension `f(t) = -f(-t)` for `t < 0`, used when a trajectory
    /// leaves the positive cone.
    pub fn eval_odd(&self, t: f64) -> f64 {
        if t >= 0.0 {
            self.eval(t)
        } else {
            -self.eval(-t)
        }
    }

    pub fn deriv_odd(&self, t: f64) -> f64 {
        self.deriv(t.abs())
    }

    /// Exponent the family is subcritical with, when it is one of the named families.
    pub fn declared_alpha(&self) -> Option<f64> {
        match *self {
            ReactionTerm::PurePower { alpha, .. } => Some(alpha),
            ReactionTerm::PowerLog { alpha, beta } if beta < 0.0 => Some(alpha),
            ReactionTerm::TwoPower { alpha, a, beta } if a * (alpha - beta) > 0.0 => Some(alpha),
            ReactionTerm::RationalPower { alpha, beta } if beta > 0.0 => Some(alpha),
            _ => None,
        }
    }

    pub fn sign_class(&self) -> SignClass {
        match self {
            ReactionTerm::Zero => SignClass::Nonnegative,
            ReactionTerm::PurePower { coef, .. } if *coef > 0.0 => SignClass::Positive,
            ReactionTerm::PurePower { coef, .. } if *coef < 0.0 => SignClass::Nonpositive,
            ReactionTerm::PurePower { .. } => SignClass::Nonnegative,
            ReactionTerm::PowerLog { .. } | ReactionTerm::RationalPower { .. } => SignClass::Positive,
            ReactionTerm::TwoPower { a, .. } if *a >= 0.0 => SignClass::Positive,
            ReactionTerm::PowerSum { terms } if terms.iter().all(|k| k.coef >= 0.0) => {
                if terms.iter().any(|k| k.coef > 0.0) {
                    SignClass::Positive
                } else {
                    SignClass::Nonnegative
                }
            }
            ReactionTerm::PowerSum { terms } if terms.iter().all(|k| k.coef <= 0.0) => SignClass::Nonpositive,
            _ => SignClass::Mixed,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ReactionTerm::Zero)
    }

    /// Evaluates `(f, f')` at `t`, rejecting non-finite values.
    pub fn checked(&self, t: f64) -> Result<(f64, f64)> {
        let (f, df) = (self.eval(t), self.deriv(t));
        if !(f.is_finite() && df.is_finite()) {
            return Err(LabError::input(format!("nonlinearity is not finite at t = {t}")));
        }
        Ok((f, df))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fd(f: &ReactionTerm, t: f64) -> f64 {
        let h = 1e-5 * t;
        (f.eval(t + h) - f.eval(t - h)) / (2.0 * h)
    }

    #[test]
    fn derivatives_match_differences() {
        let fams = [
            ReactionTerm::power(2.5),
            ReactionTerm::PowerLog { alpha: 2.0, beta: -1.0 },
            ReactionTerm::TwoPower { alpha: 2.0, a: 1.0, beta: 3.0 },
            ReactionTerm::RationalPower { alpha: 3.0, beta: 1.5 },
            ReactionTerm::PowerMinusLinear { q: 3.0, lambda: 1.0 },
            ReactionTerm::PowerSum {
                terms: vec![PowerTerm { coef: 2.0, exponent: 1.5 }, PowerTerm { coef: -1.0, exponent: 0.5 }],
            },
        ];
        for f in &fams {
            for t in [0.1, 1.0, 7.0] {
                assert_relative_eq!(f.deriv(t), fd(f, t), max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn sign_classes() {
        assert_eq!(ReactionTerm::power(3.0).sign_class(), SignClass::Positive);
        assert_eq!(
            ReactionTerm::PurePower { alpha: 3.0, coef: -1.0 }.sign_class(),
            SignClass::Nonpositive
        );
        assert_eq!(
            ReactionTerm::PowerMinusLinear { q: 3.0, lambda: 1.0 }.sign_class(),
            SignClass::Mixed
        );
    }

    #[test]
    fn serde_roundtrip() {
        let f = ReactionTerm::TwoPower { alpha: 2.0, a: 1.0, beta: 3.0 };
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"family":"two_power","alpha":2.0,"a":1.0,"beta":3.0}"#);
        assert_eq!(serde_json::from_str::<ReactionTerm>(&s).unwrap(), f);
        assert!(serde_json::from_str::<ReactionTerm>(r#"{"family":"pure_power","alpha":1.0,"coef":1.0,"x":1}"#).is_err());
    }
}
