//! Globally adaptive Gauss-Kronrod (7/15) quadrature.
//!
//! The interval with the largest local error estimate is bisected until the
//! summed estimate meets `max(abs_tol, rel_tol * |I|)` or the subdivision cap
//! is reached.

use crate::error::{LabError, Result};
use serde::{Deserialize, Serialize};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadSettings {
    fn default() -> Self {
        QuadSettings {
            abs_tol: 1e-10,
            rel_tol: 1e-12,
            max_subdivisions: 2000,
        }
    }
}

impl QuadSettings {
    pub fn with_abs_tol(abs_tol: f64) -> Self {
        QuadSettings {
            abs_tol,
            ..Self::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = h * x;
        let s = f(c - dx) + f(c + dx);
        kronrod += w * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    let value = kronrod * h;
    let err = ((kronrod - gauss) * h).abs();
    (value, err)
}

/// Integrate `f` over the finite interval `[a, b]`.
pub fn integrate(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, s: QuadSettings) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(LabError::domain("finite bounds required"));
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let (v0, e0) = gk15(&mut f, a, b);
    let mut evaluations = 15;
    let mut segs = vec![Segment {
        a,
        b,
        value: v0,
        error: e0,
    }];
    loop {
        let total: f64 = segs.iter().map(|s| s.value).sum();
        let err: f64 = segs.iter().map(|s| s.error).sum();
        if !total.is_finite() {
            return Err(LabError::numerical("integrand produced a non-finite value", err));
        }
        let target = s.abs_tol.max(s.rel_tol * total.abs());
        if err <= target {
            return Ok(QuadResult {
                value: total,
                error: err,
                evaluations,
            });
        }
        if segs.len() >= s.max_subdivisions {
            return Err(LabError::numerical(
                format!("quadrature did not reach tolerance {target:e} within {} subdivisions", s.max_subdivisions),
                err,
            ));
        }
        let (worst, _) = segs
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, be), (i, sg)| {
                if sg.error > be {
                    (i, sg.error)
                } else {
                    (bi, be)
                }
            });
        let sg = segs.swap_remove(worst);
        let mid = 0.5 * (sg.a + sg.b);
        let (lv, le) = gk15(&mut f, sg.a, mid);
        let (rv, re) = gk15(&mut f, mid, sg.b);
        evaluations += 30;
        segs.push(Segment {
            a: sg.a,
            b: mid,
            value: lv,
            error: le,
        });
        segs.push(Segment {
            a: mid,
            b: sg.b,
            value: rv,
            error: re,
        });
    }
}

/// Integrate `f` over `[a, +inf)` through the map `x = a + t/(1-t)`.
pub fn integrate_to_infinity(mut f: impl FnMut(f64) -> f64, a: f64, s: QuadSettings) -> Result<QuadResult> {
    integrate(
        |t| {
            if t >= 1.0 {
                return 0.0;
            }
            let om = 1.0 - t;
            let x = a + t / om;
            let y = f(x) / (om * om);
            if y.is_finite() {
                y
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        s,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| x.powi(5) - 2.0 * x, 0.0, 2.0, QuadSettings::default()).unwrap();
        assert!((r.value - (64.0 / 6.0 - 4.0)).abs() < 1e-13);
    }

    #[test]
    fn oscillatory_integrand_converges() {
        let r = integrate(|x| (10.0 * x).sin(), 0.0, std::f64::consts::PI, QuadSettings::default()).unwrap();
        assert!(r.value.abs() < 1e-10);
    }

    #[test]
    fn semi_infinite_exponential() {
        let r = integrate_to_infinity(|x| (-2.0 * x).exp(), 1.0, QuadSettings::default()).unwrap();
        assert!((r.value - 0.5 * (-2.0f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn subdivision_cap_reports_numerical_error() {
        let s = QuadSettings {
            abs_tol: 1e-300,
            rel_tol: 0.0,
            max_subdivisions: 4,
        };
        let e = integrate(|x| x.sqrt(), 0.0, 1.0, s).unwrap_err();
        assert!(matches!(e, LabError::Numerical { .. }));
    }
}
