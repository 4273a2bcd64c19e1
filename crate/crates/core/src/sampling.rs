//! Seeded random fields, sample points and jets.
//!
//! Every sample owns its generator: the master seed picks a ChaCha key and the
//! sample index the stream, so results never depend on scheduling order.

use crate::error::{LabError, Result};
use crate::fields::{admissible, EuclideanField, FieldExpr, LiftedJet, Monomial, RadialProfile, SamplePoint, ScalarField};
use crate::geometry::ManifoldModel;
use crate::jets::{Jet2, EPS_GRAD};
use crate::linalg::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Attempts per sample before the campaign gives up on finding an admissible point.
pub const MAX_DRAWS: usize = 200;

/// Generator for sample `index` under `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Geometry a campaign samples on. Euclidean campaigns use general fields in
/// coordinates, curved ones radial fields.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum CampaignModel {
    Euclidean,
    Sphere { kappa: f64 },
    Hyperbolic { kappa: f64 },
}

impl CampaignModel {
    pub fn build(&self, dim: usize) -> Result<ManifoldModel> {
        match *self {
            CampaignModel::Euclidean => ManifoldModel::euclidean(dim),
            CampaignModel::Sphere { kappa } => ManifoldModel::sphere(dim, kappa),
            CampaignModel::Hyperbolic { kappa } => ManifoldModel::hyperbolic(dim, kappa),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldFamily {
    /// Degree-3 polynomial shifted to stay above 1 on the sampling box.
    Polynomial,
    Gaussian,
    RadialExp,
    Rational,
    Product,
    /// Positive constant plus two primitives.
    Sum,
    /// One of the others, chosen per sample.
    Mixed,
}

const BASIC: [FieldFamily; 4] = [
    FieldFamily::Polynomial,
    FieldFamily::Gaussian,
    FieldFamily::RadialExp,
    FieldFamily::Rational,
];

fn pick_family(rng: &mut impl Rng, fam: FieldFamily) -> FieldFamily {
    match fam {
        FieldFamily::Mixed => {
            let all = [
                FieldFamily::Polynomial,
                FieldFamily::Gaussian,
                FieldFamily::RadialExp,
                FieldFamily::Rational,
                FieldFamily::Product,
                FieldFamily::Sum,
            ];
            all[rng.random_range(0..all.len())]
        }
        f => f,
    }
}

fn uniform_vec(rng: &mut impl Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

/// Monomials of total degree at most 3 in `n` variables.
fn monomials(n: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for k in 0..=left {
            cur[i] = k;
            rec(i + 1, left - k, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, 3, &mut cur, &mut out);
    out
}

/// A random positive expression. `coords` is the ambient dimension; radial
/// profiles use `coords = 1` and centres at the origin.
fn random_expr(rng: &mut ChaCha8Rng, fam: FieldFamily, coords: usize, radial: bool) -> FieldExpr {
    let center = |rng: &mut ChaCha8Rng| if radial { vec![0.0] } else { uniform_vec(rng, coords, -1.0, 1.0) };
    match pick_family(rng, fam) {
        FieldFamily::Polynomial => {
            let mut terms = Vec::new();
            let mut bound = 0.0;
            for powers in monomials(coords) {
                if powers.iter().all(|&k| k == 0) {
                    continue;
                }
                let coef: f64 = rng.random_range(-1.0..1.0);
                // radial profiles are sampled on r <= 3
                let reach: f64 = if radial { 3f64.powi(powers.iter().sum::<u32>() as i32) } else { 1.0 };
                bound += coef.abs() * reach;
                terms.push(Monomial { coef, powers });
            }
            terms.push(Monomial {
                coef: 1.0 + bound,
                powers: vec![0; coords],
            });
            FieldExpr::Polynomial { terms }
        }
        FieldFamily::Gaussian => FieldExpr::Sum {
            terms: vec![
                FieldExpr::Constant {
                    value: rng.random_range(0.1..1.0),
                },
                FieldExpr::Gaussian {
                    amplitude: rng.random_range(0.5..2.0),
                    center: center(rng),
                    width: rng.random_range(0.5..2.0),
                },
            ],
        },
        FieldFamily::RadialExp => FieldExpr::Sum {
            terms: vec![
                FieldExpr::Constant {
                    value: rng.random_range(0.1..1.0),
                },
                FieldExpr::RadialExp {
                    amplitude: rng.random_range(0.5..2.0),
                    center: center(rng),
                    rate: rng.random_range(0.2..1.5),
                },
            ],
        },
        FieldFamily::Rational => FieldExpr::Rational {
            amplitude: rng.random_range(0.5..2.0),
            center: center(rng),
            scale: rng.random_range(0.5..2.0),
            power: rng.random_range(0.25..1.5),
        },
        FieldFamily::Product => {
            let a = BASIC[rng.random_range(0..BASIC.len())];
            let b = BASIC[rng.random_range(0..BASIC.len())];
            FieldExpr::Product {
                factors: vec![random_expr(rng, a, coords, radial), random_expr(rng, b, coords, radial)],
            }
        }
        FieldFamily::Sum | FieldFamily::Mixed => {
            let a = BASIC[rng.random_range(0..BASIC.len())];
            let b = BASIC[rng.random_range(0..BASIC.len())];
            FieldExpr::Sum {
                terms: vec![
                    FieldExpr::Constant {
                        value: rng.random_range(0.1..1.0),
                    },
                    random_expr(rng, a, coords, radial),
                    random_expr(rng, b, coords, radial),
                ],
            }
        }
    }
}

/// Random field of the family on the model, with a sample point.
pub fn random_field(rng: &mut ChaCha8Rng, model: &ManifoldModel, euclidean_coords: bool, fam: FieldFamily) -> Result<(ScalarField, SamplePoint)> {
    let n = model.dim();
    if euclidean_coords {
        let expr = random_expr(rng, fam, n, false);
        let x = uniform_vec(rng, n, -1.0, 1.0);
        Ok((ScalarField::Euclidean(EuclideanField::new(n, expr)?), SamplePoint::Coords(x)))
    } else {
        let expr = random_expr(rng, fam, 1, true);
        let r_hi = 3f64.min(0.9 * model.r_max());
        let r = rng.random_range(0.05..r_hi);
        let prof = RadialProfile::new(model.clone(), expr)?;
        Ok((ScalarField::Radial(Arc::new(prof)), SamplePoint::Radius(r)))
    }
}

/// An admissible draw: the field, the point, its lifted jet and the number of rejected draws.
pub struct Draw {
    pub field: ScalarField,
    pub point: SamplePoint,
    pub lifted: LiftedJet,
    pub filtered: usize,
}

/// Draws until the sample point is admissible (positive, away from critical points).
pub fn admissible_draw(rng: &mut ChaCha8Rng, model: &ManifoldModel, euclidean_coords: bool, fam: FieldFamily) -> Result<Draw> {
    for filtered in 0..MAX_DRAWS {
        let (field, point) = random_field(rng, model, euclidean_coords, fam)?;
        let lifted = match field.lift(&point) {
            Ok(l) => l,
            Err(LabError::Domain(_)) => continue,
            Err(e) => return Err(e),
        };
        if admissible(&lifted.values(), false).is_ok() && lifted.values().hess.is_finite() {
            return Ok(Draw {
                field,
                point,
                lifted,
                filtered,
            });
        }
    }
    Err(LabError::numerical("no admissible sample point found", MAX_DRAWS as f64))
}

/// Random second-order jet with `|grad| >= eps_grad * scale`. When `positive` the
/// value lies in `[0.5, 2]`, otherwise in `[-2, 2]` and the scale is 1.
pub fn random_jet(rng: &mut impl Rng, n: usize, positive: bool) -> Jet2 {
    loop {
        let u = if positive { rng.random_range(0.5..2.0) } else { rng.random_range(-2.0..2.0) };
        let mag = 10f64.powf(rng.random_range(-2.0..1.0));
        let dir = uniform_vec(rng, n, -1.0, 1.0);
        let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
        let scale = if positive { u } else { 1.0 };
        if norm < 1e-3 || mag < EPS_GRAD * scale {
            continue;
        }
        let grad: Vec<f64> = dir.iter().map(|d| d * mag / norm).collect();
        let mut hess = Mat::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = rng.random_range(-2.0..2.0);
                hess.set(i, j, v);
                hess.set(j, i, v);
            }
        }
        if let Ok(j) = Jet2::unsigned(u, grad, hess) {
            return j;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: f64 = sample_rng(7, 3).random();
        let b: f64 = sample_rng(7, 3).random();
        let c: f64 = sample_rng(7, 4).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn monomial_count() {
        // C(n + 3, 3)
        assert_eq!(monomials(2).len(), 10);
        assert_eq!(monomials(3).len(), 20);
    }

    #[test]
    fn polynomials_stay_above_one() {
        let m = ManifoldModel::euclidean(3).unwrap();
        let mut rng = sample_rng(1, 0);
        for _ in 0..200 {
            let (f, p) = random_field(&mut rng, &m, true, FieldFamily::Polynomial).unwrap();
            assert!(f.value(&p).unwrap() >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn radial_draws_respect_range() {
        let m = ManifoldModel::sphere(3, 4.0).unwrap();
        let mut rng = sample_rng(2, 0);
        for _ in 0..100 {
            let d = admissible_draw(&mut rng, &m, false, FieldFamily::Mixed).unwrap();
            match d.point {
                SamplePoint::Radius(r) => assert!(r < 0.9 * m.r_max()),
                _ => panic!(),
            }
        }
    }

    #[test]
    fn random_jets_are_admissible() {
        let mut rng = sample_rng(3, 0);
        for n in 2..=6 {
            let j = random_jet(&mut rng, n, true);
            assert!(j.grad_norm() >= EPS_GRAD * j.u);
        }
    }
}
