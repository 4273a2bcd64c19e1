//! Rotationally symmetric model manifolds `dr^2 + psi(r)^2 g_{S^{n-1}}`.
//!
//! Euclidean space, the round sphere and hyperbolic space are the named
//! models; any other warped product is described by a [`ProfileExpr`] whose
//! derivatives come from forward-mode differentiation, never from differencing.

use crate::error::{LabError, Result};
use crate::quadrature::{integrate, QuadSettings};
use crate::real::Real;
use crate::taylor::Taylor3;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Closed-form warping profiles available to user-defined warped products.
/// Every primitive satisfies `psi(0) = 0` and `psi'(0) = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileExpr {
    /// `psi = r`
    Linear,
    /// `psi = sin(c r) / c`
    Sin { c: f64 },
    /// `psi = sinh(c r) / c`
    Sinh { c: f64 },
    /// `psi = tanh(c r) / c`
    Tanh { c: f64 },
    /// `psi = r + sum_k coeffs[k] r^(2k+3)`
    OddPolynomial { coeffs: Vec<f64> },
}

impl ProfileExpr {
    pub fn eval<T: Real>(&self, r: T) -> T {
        match self {
            ProfileExpr::Linear => r,
            ProfileExpr::Sin { c } => r.scale(*c).sin().scale(1.0 / c),
            ProfileExpr::Sinh { c } => r.scale(*c).sinh().scale(1.0 / c),
            ProfileExpr::Tanh { c } => r.scale(*c).tanh().scale(1.0 / c),
            ProfileExpr::OddPolynomial { coeffs } => {
                let r2 = r * r;
                let mut pow = r * r2;
                let mut acc = r;
                for &c in coeffs {
                    acc += pow.scale(c);
                    pow *= r2;
                }
                acc
            }
        }
    }

    fn natural_r_max(&self) -> f64 {
        match self {
            ProfileExpr::Sin { c } => PI / c,
            _ => f64::INFINITY,
        }
    }
}

/// The warping profile of a model.
#[derive(Clone, Debug, PartialEq)]
pub enum Warping {
    Euclidean,
    /// Round sphere of sectional curvature `curvature > 0`.
    Sphere { curvature: f64 },
    /// Hyperbolic space of sectional curvature `-curvature < 0`.
    Hyperbolic { curvature: f64 },
    Custom(ProfileExpr),
}

/// Which Ricci eigen-direction to report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RicciDirection {
    Radial,
    Tangential,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldModel {
    dim: usize,
    warping: Warping,
    /// Constant `kappa >= 0` in `Ric >= -(n-1) kappa g`.
    kappa: f64,
    r_max: f64,
}

/// Values `(psi, psi', psi'')` at one radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WarpingJet {
    pub psi: f64,
    pub dpsi: f64,
    pub d2psi: f64,
}

impl ManifoldModel {
    pub fn euclidean(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(ManifoldModel {
            dim,
            warping: Warping::Euclidean,
            kappa: 0.0,
            r_max: f64::INFINITY,
        })
    }

    pub fn sphere(dim: usize, curvature: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(curvature > 0.0 && curvature.is_finite()) {
            return Err(LabError::input("sphere curvature must be positive"));
        }
        Ok(ManifoldModel {
            dim,
            warping: Warping::Sphere { curvature },
            kappa: 0.0,
            r_max: PI / curvature.sqrt(),
        })
    }

    pub fn hyperbolic(dim: usize, curvature: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(curvature > 0.0 && curvature.is_finite()) {
            return Err(LabError::input("hyperbolic curvature must be positive"));
        }
        Ok(ManifoldModel {
            dim,
            warping: Warping::Hyperbolic { curvature },
            kappa: curvature,
            r_max: f64::INFINITY,
        })
    }

    /// A user warped product. `kappa` is the declared Ricci lower-bound constant;
    /// positivity of `psi` is checked on a sample grid of the domain.
    pub fn warped(dim: usize, profile: ProfileExpr, kappa: f64, r_max: Option<f64>) -> Result<Self> {
        check_dim(dim)?;
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(LabError::input("kappa must be a nonnegative real"));
        }
        let r_max = r_max.unwrap_or_else(|| profile.natural_r_max());
        if !(r_max > 0.0) {
            return Err(LabError::input("r_max must be positive"));
        }
        let probe_end = if r_max.is_finite() { r_max } else { 50.0 };
        for k in 1..200 {
            let r = probe_end * k as f64 / 200.0;
            let v = profile.eval(r);
            if !(v > 0.0 && v.is_finite()) {
                return Err(LabError::input(format!("warping profile not positive at r = {r}")));
            }
        }
        Ok(ManifoldModel {
            dim,
            warping: Warping::Custom(profile),
            kappa,
            r_max,
        })
    }

    /// Look up a named model: `euclidean`, `sphere` or `hyperbolic`. For the
    /// sphere and hyperbolic models `kappa` is the curvature magnitude.
    pub fn named(name: &str, dim: usize, kappa: f64) -> Result<Self> {
        match name {
            "euclidean" => Self::euclidean(dim),
            "sphere" => Self::sphere(dim, kappa),
            "hyperbolic" => Self::hyperbolic(dim, kappa),
            other => Err(LabError::input(format!("unknown model '{other}'"))),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn warping(&self) -> &Warping {
        &self.warping
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn name(&self) -> &'static str {
        match self.warping {
            Warping::Euclidean => "euclidean",
            Warping::Sphere { .. } => "sphere",
            Warping::Hyperbolic { .. } => "hyperbolic",
            Warping::Custom(_) => "warped",
        }
    }

    /// Signed sectional curvature of a named model (`+c` sphere, `-c` hyperbolic).
    fn named_curvature(&self) -> Option<f64> {
        match self.warping {
            Warping::Euclidean => Some(0.0),
            Warping::Sphere { curvature } => Some(curvature),
            Warping::Hyperbolic { curvature } => Some(-curvature),
            Warping::Custom(_) => None,
        }
    }

    /// Radius below which named profiles switch to their Taylor series.
    pub fn series_threshold(&self) -> f64 {
        let c = self.named_curvature().unwrap_or(0.0).abs();
        if c > 0.0 {
            1e-4 * 1f64.max(1.0 / c.sqrt())
        } else {
            1e-4
        }
    }

    /// `(psi, psi', psi'')` at `r`, without domain checks.
    pub(crate) fn jet_unchecked(&self, r: f64) -> WarpingJet {
        match &self.warping {
            Warping::Euclidean => WarpingJet {
                psi: r,
                dpsi: 1.0,
                d2psi: 0.0,
            },
            Warping::Sphere { curvature: c } | Warping::Hyperbolic { curvature: c } => {
                let s = self.named_curvature().unwrap();
                if r < self.series_threshold() {
                    series_jet(s, r)
                } else {
                    let k = c.sqrt();
                    let (a, b) = if s > 0.0 {
                        ((k * r).sin(), (k * r).cos())
                    } else {
                        ((k * r).sinh(), (k * r).cosh())
                    };
                    WarpingJet {
                        psi: a / k,
                        dpsi: b,
                        d2psi: -s * a / k,
                    }
                }
            }
            Warping::Custom(expr) => {
                let t = expr.eval(Taylor3::variable(1, 0, r));
                WarpingJet {
                    psi: t.v,
                    dpsi: t.g[0],
                    d2psi: t.h[0][0],
                }
            }
        }
    }

    pub(crate) fn psi(&self, r: f64) -> f64 {
        self.jet_unchecked(r).psi
    }

    /// `psi'/psi` and its derivative, with the series limit near the origin.
    pub(crate) fn log_derivative(&self, r: f64) -> (f64, f64) {
        let j = self.jet_unchecked(r);
        let k = j.dpsi / j.psi;
        let dk = j.d2psi / j.psi - k * k;
        (k, dk)
    }

    /// Warping profile and its first two derivatives at `r`.
    pub fn warping_jet(&self, r: f64) -> Result<WarpingJet> {
        self.check_radius(r, true)?;
        Ok(self.jet_unchecked(r))
    }

    fn check_radius(&self, r: f64, allow_zero: bool) -> Result<()> {
        let low_ok = if allow_zero { r >= 0.0 } else { r > 0.0 };
        if !(low_ok && r < self.r_max) || r.is_nan() {
            return Err(LabError::domain(format!(
                "radius {r} outside [0, {}) of the {} model",
                self.r_max,
                self.name()
            )));
        }
        Ok(())
    }

    /// `psi''/psi` and `(psi'^2 - 1)/psi^2`, using exact limits near `r = 0`.
    fn curvature_ratios(&self, r: f64) -> (f64, f64) {
        if let Some(s) = self.named_curvature() {
            if r < self.series_threshold() {
                return (-s, -s);
            }
        }
        if r == 0.0 {
            if let Warping::Custom(expr) = &self.warping {
                let t = expr.eval(Taylor3::variable(1, 0, 0.0));
                let third = t.t[0][0][0];
                return (third, third);
            }
        }
        let j = self.jet_unchecked(r);
        (j.d2psi / j.psi, (j.dpsi * j.dpsi - 1.0) / (j.psi * j.psi))
    }

    /// Ricci curvature along the radial direction or a unit tangential direction.
    pub fn ricci_radial(&self, r: f64, direction: RicciDirection) -> Result<f64> {
        self.check_radius(r, true)?;
        let n = self.dim as f64;
        let (a, b) = self.curvature_ratios(r);
        Ok(match direction {
            RicciDirection::Radial => -(n - 1.0) * a,
            RicciDirection::Tangential => -a - (n - 2.0) * b,
        })
    }

    pub(crate) fn ricci_rr_unchecked(&self, r: f64) -> f64 {
        let n = self.dim as f64;
        -(n - 1.0) * self.curvature_ratios(r).0
    }

    /// Vol(B_R) = omega_{n-1} * int_0^R psi^{n-1}.
    pub fn ball_volume(&self, radius: f64) -> Result<f64> {
        if !(radius > 0.0 && radius <= self.r_max) {
            return Err(LabError::domain(format!(
                "ball radius {radius} outside (0, {}]",
                self.r_max
            )));
        }
        let m = (self.dim - 1) as i32;
        let scale = radius.powi(self.dim as i32) / self.dim as f64;
        let settings = QuadSettings::with_abs_tol(1e-10 * scale);
        let q = integrate(|s| self.psi(s).powi(m), 0.0, radius, settings)?;
        Ok(unit_sphere_area(self.dim) * q.value)
    }

    /// Checks that `r -> Vol(B_r)/r^n` is non-increasing along `radii`.
    pub fn bishop_gromov_check(&self, radii: &[f64]) -> Result<BishopGromovReport> {
        let nonneg_ricci = match self.warping {
            Warping::Euclidean | Warping::Sphere { .. } => true,
            Warping::Hyperbolic { .. } => false,
            Warping::Custom(_) => self.kappa == 0.0,
        };
        if !nonneg_ricci {
            return Err(LabError::precondition(format!(
                "Bishop-Gromov comparison needs nonnegative Ricci curvature; the {} model has Ric >= -(n-1)*{}",
                self.name(),
                self.kappa
            )));
        }
        if radii.is_empty() || radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(LabError::input("radii must be a non-empty increasing list"));
        }
        let n = self.dim as i32;
        let ratios = radii
            .iter()
            .map(|&r| Ok(self.ball_volume(r)? / r.powi(n)))
            .collect::<Result<Vec<f64>>>()?;
        let mut max_increase = f64::NEG_INFINITY;
        for w in ratios.windows(2) {
            max_increase = max_increase.max((w[1] - w[0]) / w[0]);
        }
        let non_increasing = ratios.len() < 2 || max_increase <= BISHOP_GROMOV_SLACK;
        Ok(BishopGromovReport {
            radii: radii.to_vec(),
            ratios,
            max_relative_increase: if radii.len() < 2 { 0.0 } else { max_increase },
            non_increasing,
        })
    }
}

/// Relative slack on ratio increases; well above the volume quadrature error.
pub const BISHOP_GROMOV_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BishopGromovReport {
    pub radii: Vec<f64>,
    pub ratios: Vec<f64>,
    pub max_relative_increase: f64,
    pub non_increasing: bool,
}

fn check_dim(dim: usize) -> Result<()> {
    if !(2..=crate::real::MAX_DIM).contains(&dim) {
        return Err(LabError::input(format!(
            "dimension must lie in 2..={}, got {dim}",
            crate::real::MAX_DIM
        )));
    }
    Ok(())
}

/// Five-term series for `psi'' = -s psi`, `psi(0) = 0`, `psi'(0) = 1`.
fn series_jet(s: f64, r: f64) -> WarpingJet {
    let mut psi = 0.0;
    let mut dpsi = 0.0;
    let mut term_psi = r;
    let mut term_dpsi = 1.0;
    for k in 0..5 {
        psi += term_psi;
        dpsi += term_dpsi;
        let a = (2 * k + 2) as f64;
        let b = (2 * k + 3) as f64;
        term_psi *= -s * r * r / (a * b);
        term_dpsi *= -s * r * r / ((2 * k + 1) as f64 * a);
    }
    WarpingJet {
        psi,
        dpsi,
        d2psi: -s * psi,
    }
}

/// Area of the unit (n-1)-sphere, `2 pi^{n/2} / Gamma(n/2)`.
pub fn unit_sphere_area(n: usize) -> f64 {
    // Gamma(n/2) by recurrence from Gamma(1) or Gamma(1/2)
    let even = n.is_multiple_of(2);
    let mut gamma = if even { 1.0 } else { PI.sqrt() };
    let mut x = if even { 1.0 } else { 0.5 };
    while x + 1e-12 < n as f64 / 2.0 {
        gamma *= x;
        x += 1.0;
    }
    2.0 * PI.powf(n as f64 / 2.0) / gamma
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn named_jets() {
        let e = ManifoldModel::euclidean(3).unwrap();
        assert_eq!(e.warping_jet(2.0).unwrap(), WarpingJet { psi: 2.0, dpsi: 1.0, d2psi: 0.0 });

        let s = ManifoldModel::sphere(3, 1.0).unwrap();
        let j = s.warping_jet(PI / 2.0).unwrap();
        assert_relative_eq!(j.psi, 1.0, epsilon = 1e-15);
        assert!(j.dpsi.abs() < 1e-15);
        assert_relative_eq!(j.d2psi, -1.0, epsilon = 1e-15);

        let h = ManifoldModel::hyperbolic(3, 1.0).unwrap();
        let j = h.warping_jet(1.0).unwrap();
        // high-precision values of sinh 1, cosh 1
        assert_relative_eq!(j.psi, 1.175_201_193_643_801_4, max_relative = 1e-15);
        assert_relative_eq!(j.dpsi, 1.543_080_634_815_243_7, max_relative = 1e-15);
        assert_relative_eq!(j.d2psi, 1.175_201_193_643_801_4, max_relative = 1e-15);
    }

    #[test]
    fn domain_errors() {
        let s = ManifoldModel::sphere(3, 1.0).unwrap();
        assert!(matches!(s.warping_jet(PI), Err(LabError::Domain(_))));
        assert!(matches!(s.warping_jet(-0.1), Err(LabError::Domain(_))));
        assert!(matches!(s.ricci_radial(4.0, RicciDirection::Radial), Err(LabError::Domain(_))));
    }

    #[test]
    fn series_branch_is_continuous() {
        for model in [ManifoldModel::sphere(4, 2.0).unwrap(), ManifoldModel::hyperbolic(4, 0.5).unwrap()] {
            let r = model.series_threshold();
            let s = model.named_curvature().unwrap();
            let a = series_jet(s, r);
            let k = s.abs().sqrt();
            let (psi, dpsi) = if s > 0.0 {
                ((k * r).sin() / k, (k * r).cos())
            } else {
                ((k * r).sinh() / k, (k * r).cosh())
            };
            assert_relative_eq!(a.psi, psi, max_relative = 1e-12);
            assert_relative_eq!(a.dpsi, dpsi, max_relative = 1e-12);
            assert_relative_eq!(a.d2psi, -s * psi, max_relative = 1e-12);
        }
    }

    #[test]
    fn ricci_closed_forms() {
        let h = ManifoldModel::hyperbolic(3, 1.0).unwrap();
        assert_relative_eq!(h.ricci_radial(1.0, RicciDirection::Radial).unwrap(), -2.0, max_relative = 1e-14);
        assert_relative_eq!(h.ricci_radial(1.0, RicciDirection::Tangential).unwrap(), -2.0, max_relative = 1e-13);
        let s = ManifoldModel::sphere(3, 1.0).unwrap();
        assert_relative_eq!(s.ricci_radial(1.0, RicciDirection::Radial).unwrap(), 2.0, max_relative = 1e-14);
        assert_relative_eq!(s.ricci_radial(0.0, RicciDirection::Tangential).unwrap(), 2.0);
        let e = ManifoldModel::euclidean(5).unwrap();
        assert_eq!(e.ricci_radial(3.0, RicciDirection::Radial).unwrap(), 0.0);
        assert_eq!(e.ricci_radial(3.0, RicciDirection::Tangential).unwrap(), 0.0);
    }

    #[test]
    fn custom_profile_matches_named_sinh() {
        let c = ManifoldModel::warped(3, ProfileExpr::Sinh { c: 1.0 }, 1.0, None).unwrap();
        let h = ManifoldModel::hyperbolic(3, 1.0).unwrap();
        for r in [0.3, 1.0, 2.5] {
            let a = c.warping_jet(r).unwrap();
            let b = h.warping_jet(r).unwrap();
            assert_relative_eq!(a.psi, b.psi, max_relative = 1e-14);
            assert_relative_eq!(a.dpsi, b.dpsi, max_relative = 1e-14);
            assert_relative_eq!(a.d2psi, b.d2psi, max_relative = 1e-14);
        }
        assert_relative_eq!(c.ricci_radial(0.0, RicciDirection::Radial).unwrap(), -2.0, max_relative = 1e-14);
    }

    #[test]
    fn volumes() {
        let e = ManifoldModel::euclidean(3).unwrap();
        assert_relative_eq!(e.ball_volume(1.0).unwrap(), 4.0 * PI / 3.0, max_relative = 1e-12);
        let s = ManifoldModel::sphere(2, 1.0).unwrap();
        assert_relative_eq!(s.ball_volume(PI).unwrap(), 4.0 * PI, max_relative = 1e-12);
        let h = ManifoldModel::hyperbolic(2, 1.0).unwrap();
        assert_relative_eq!(h.ball_volume(1.0).unwrap(), 2.0 * PI * (1f64.cosh() - 1.0), max_relative = 1e-12);
        assert!(e.ball_volume(0.0).is_err());
    }

    #[test]
    fn unit_sphere_areas() {
        assert_relative_eq!(unit_sphere_area(2), 2.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(unit_sphere_area(3), 4.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(unit_sphere_area(4), 2.0 * PI * PI, max_relative = 1e-15);
        assert_relative_eq!(unit_sphere_area(5), 8.0 * PI * PI / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn bishop_gromov() {
        let e = ManifoldModel::euclidean(3).unwrap();
        let rep = e.bishop_gromov_check(&[1.0, 2.0, 4.0]).unwrap();
        assert!(rep.non_increasing);
        for r in &rep.ratios {
            assert_relative_eq!(*r, 4.0 * PI / 3.0, max_relative = 1e-11);
        }
        let s = ManifoldModel::sphere(3, 1.0).unwrap();
        let rep = s.bishop_gromov_check(&[0.5, 1.0, 2.0]).unwrap();
        assert!(rep.non_increasing);
        assert!(rep.ratios.windows(2).all(|w| w[1] < w[0]));
        let s2 = ManifoldModel::sphere(2, 1.0).unwrap();
        let rep = s2.bishop_gromov_check(&[PI / 2.0, PI]).unwrap();
        assert_relative_eq!(rep.ratios[0], 2.0 * PI / (PI / 2.0).powi(2), max_relative = 1e-11);
        assert_relative_eq!(rep.ratios[1], 4.0 / PI, max_relative = 1e-11);
        let h = ManifoldModel::hyperbolic(3, 1.0).unwrap();
        assert!(matches!(h.bishop_gromov_check(&[1.0, 2.0]), Err(LabError::Precondition(_))));
    }
}
