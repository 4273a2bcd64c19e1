//! Dormand-Prince 5(4) integrator with step-size control and dense output.

use crate::error::{LabError, Result};
use serde::{Deserialize, Serialize};
use std::ops::ControlFlow;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; chosen from the tolerances when absent.
    pub h0: Option<f64>,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: 1e-12,
            h0: None,
            max_steps: 1_000_000,
        }
    }
}

/// Continuous extension of one accepted step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment<const N: usize> {
    pub t0: f64,
    pub h: f64,
    rc: [[f64; N]; 5],
}

impl<const N: usize> Segment<N> {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn start(&self) -> [f64; N] {
        self.rc[0]
    }

    pub fn end(&self) -> [f64; N] {
        let mut y = self.rc[0];
        for (yi, d) in y.iter_mut().zip(self.rc[1]) {
            *yi += d;
        }
        y
    }

    /// State at `t` in `[t0, t0 + h]` (fourth-order interpolant).
    pub fn eval(&self, t: f64) -> [f64; N] {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let mut y = [0.0; N];
        for i in 0..N {
            let r = &self.rc;
            y[i] = r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])));
        }
        y
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// How an integration run ended.
#[derive(Clone, Debug, PartialEq)]
pub enum Termination {
    Reached,
    Stopped,
    StepCollapse { t: f64, h: f64 },
    MaxSteps { t: f64 },
    NonFinite { t: f64 },
}

#[derive(Clone, Debug)]
pub struct OdeSolution<const N: usize> {
    pub segments: Vec<Segment<N>>,
    pub stats: OdeStats,
    pub termination: Termination,
}

impl<const N: usize> OdeSolution<N> {
    pub fn t_end(&self) -> Option<f64> {
        self.segments.last().map(|s| s.t1())
    }

    /// Dense-output state at `t`, or `None` outside the integrated range.
    pub fn eval(&self, t: f64) -> Option<[f64; N]> {
        let first = self.segments.first()?;
        if t < first.t0 || t > self.t_end()? {
            return None;
        }
        let idx = self.segments.partition_point(|s| s.t1() < t);
        let seg = self.segments.get(idx.min(self.segments.len() - 1))?;
        Some(seg.eval(t))
    }
}

fn err_norm<const N: usize>(y0: &[f64; N], y1: &[f64; N], e: &[f64; N], o: &OdeOptions) -> f64 {
    let mut acc = 0.0;
    for i in 0..N {
        let sc = o.atol + o.rtol * y0[i].abs().max(y1[i].abs());
        acc += (e[i] / sc).powi(2);
    }
    (acc / N as f64).sqrt()
}

fn lin<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        let mut s = 0.0;
        for (c, k) in terms {
            s += c * k[i];
        }
        out[i] += h * s;
    }
    out
}

/// Integrates `y' = f(t, y)` from `t0` to `t_end`. After every accepted step
/// `on_step` sees the new segment and may stop the run.
pub fn integrate<const N: usize>(
    f: impl Fn(f64, &[f64; N]) -> [f64; N],
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &OdeOptions,
    mut on_step: impl FnMut(&Segment<N>) -> ControlFlow<()>,
) -> Result<OdeSolution<N>> {
    if !(t_end > t0) || !t0.is_finite() || !t_end.is_finite() {
        return Err(LabError::input(format!("integration interval [{t0}, {t_end}] is empty or infinite")));
    }
    if !(opts.rtol > 0.0 && opts.atol > 0.0) {
        return Err(LabError::input("integrator tolerances must be positive"));
    }
    let mut stats = OdeStats::default();
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    stats.evaluations += 1;
    let mut h = opts.h0.unwrap_or_else(|| {
        let scale = y.iter().map(|v| v.abs()).fold(0.0, f64::max) * opts.rtol + opts.atol;
        let slope = k1.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let guess = if slope > 0.0 { 0.01 * (scale / slope).powf(0.2) } else { 1e-3 };
        guess.min(t_end - t0).max(1e-12 * (t_end - t0))
    });
    let mut segments = Vec::new();
    let termination = loop {
        if t >= t_end {
            break Termination::Reached;
        }
        if stats.accepted + stats.rejected >= opts.max_steps {
            break Termination::MaxSteps { t };
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        if h <= 1e-14 * t.abs().max(1e-300) {
            break Termination::StepCollapse { t, h };
        }
        let k2 = f(t + C2 * h, &lin(&y, h, &[(A21, &k1)]));
        let k3 = f(t + C3 * h, &lin(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * h, &lin(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(t + C5 * h, &lin(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = f(
            t + h,
            &lin(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y1 = lin(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = f(t + h, &y1);
        stats.evaluations += 6;
        let e = lin(&[0.0; N], h, &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)]);
        let err = err_norm(&y, &y1, &e, opts);
        if !err.is_finite() || y1.iter().any(|v| !v.is_finite()) {
            // shrink hard; persistent non-finite values end the run
            if h < 1e-10 * (t_end - t0) {
                break Termination::NonFinite { t };
            }
            stats.rejected += 1;
            h *= 0.1;
            continue;
        }
        if err <= 1.0 {
            let mut rc = [[0.0; N]; 5];
            for i in 0..N {
                let dy = y1[i] - y[i];
                let bspl = h * k1[i] - dy;
                rc[0][i] = y[i];
                rc[1][i] = dy;
                rc[2][i] = bspl;
                rc[3][i] = dy - h * k7[i] - bspl;
                rc[4][i] = h
                    * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            }
            let seg = Segment { t0: t, h, rc };
            segments.push(seg);
            stats.accepted += 1;
            t = if last { t_end } else { t + h };
            y = y1;
            k1 = k7;
            if on_step(&seg).is_break() {
                break Termination::Stopped;
            }
            let fac = if err == 0.0 { 10.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 10.0) };
            h *= fac;
        } else {
            stats.rejected += 1;
            h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
        }
    };
    Ok(OdeSolution {
        segments,
        stats,
        termination,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_is_accurate() {
        let sol = integrate(|_, y: &[f64; 1]| [-y[0]], 0.0, [1.0], 5.0, &OdeOptions::default(), |_| {
            ControlFlow::Continue(())
        })
        .unwrap();
        assert_eq!(sol.termination, Termination::Reached);
        let end = sol.segments.last().unwrap().end()[0];
        assert!((end - (-5.0f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn dense_output_tracks_harmonic_oscillator() {
        let sol = integrate(
            |_, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            [0.0, 1.0],
            10.0,
            &OdeOptions::default(),
            |_| ControlFlow::Continue(()),
        )
        .unwrap();
        for i in 0..200 {
            let t = 0.05 * i as f64;
            let y = sol.eval(t).unwrap();
            assert!((y[0] - t.sin()).abs() < 1e-8, "t = {t}");
        }
        assert!(sol.eval(11.0).is_none());
    }

    #[test]
    fn callback_stops_run() {
        let mut seen = 0;
        let sol = integrate(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], 1.0, &OdeOptions::default(), |_| {
            seen += 1;
            if seen == 3 {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        })
        .unwrap();
        assert_eq!(sol.termination, Termination::Stopped);
        assert_eq!(sol.segments.len(), 3);
    }

    #[test]
    fn tolerance_halving_reduces_error() {
        let run = |rtol: f64| {
            let o = OdeOptions {
                rtol,
                atol: rtol * 1e-2,
                ..OdeOptions::default()
            };
            let sol = integrate(|t, y: &[f64; 1]| [y[0] * t.cos()], 0.0, [1.0], 8.0, &o, |_| ControlFlow::Continue(()))
                .unwrap();
            (sol.segments.last().unwrap().end()[0] - 8f64.sin().exp()).abs()
        };
        assert!(run(1e-10) < run(1e-6));
    }
}
