use plemden::estimates::{constant_profile, global_bound_check, hn_horospherical_profile, hn_p_harmonic_profile};
use plemden::exponents::{
    classify_liouville, critical_exponent, critical_exponent_rational, emden_residual, is_subcritical, Conclusion, ConditionGrid,
    ExtReal, FClass,
};
use plemden::fields::{fd_discrepancy, EuclideanField, FieldExpr, SamplePoint, ScalarField};
use plemden::geometry::ManifoldModel;
use plemden::identities::{basic1_sides, bochner_x_sides, special_choice, ww_sides};
use plemden::jets::PJetParams;
use plemden::linalg::dot;
use plemden::ode::OdeOptions;
use plemden::reaction::ReactionTerm;
use plemden::run::{run, ExperimentConfig, IdentitiesConfig, RunConfig};
use plemden::sampling::{random_jet, sample_rng};
use plemden::shooting::{bubble_match_with, shoot, RadialSolution, ShootOptions};
use proptest::prelude::*;

fn model(kind: u8, n: usize, kappa: f64) -> ManifoldModel {
    match kind {
        0 => ManifoldModel::euclidean(n),
        1 => ManifoldModel::sphere(n, kappa),
        _ => ManifoldModel::hyperbolic(n, kappa),
    }
    .unwrap()
}

fn field(n: usize, amp: f64, width: f64, c: &[f64]) -> FieldExpr {
    FieldExpr::Sum {
        terms: vec![
            FieldExpr::Constant { value: 0.4 * amp },
            FieldExpr::Gaussian {
                amplitude: amp,
                center: c[..n].to_vec(),
                width,
            },
        ],
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn warping_solves_its_ode(kind in 0u8..3, kappa in 0.25f64..4.0, t in -6.0f64..0.0) {
        let m = model(kind, 3, kappa);
        let sign = match kind { 0 => 0.0, 1 => 1.0, _ => -1.0 };
        let r = 10f64.powf(t) * if kind == 1 { m.r_max() * 0.999 } else { 20.0 };
        let w = m.warping_jet(r).unwrap();
        let lhs = w.d2psi + sign * kappa * w.psi;
        prop_assert!(lhs.abs() <= 1e-12 * (w.d2psi.abs() + kappa * w.psi.abs()) + f64::MIN_POSITIVE);
    }

    #[test]
    fn ball_volume_increases(kind in 0u8..3, kappa in 0.25f64..4.0, a in 0.01f64..0.98, b in 0.01f64..0.98) {
        prop_assume!((a - b).abs() > 1e-6);
        let m = model(kind, 3, kappa);
        let top = if kind == 1 { m.r_max() } else { 5.0 };
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(m.ball_volume(lo * top).unwrap() < m.ball_volume(hi * top).unwrap());
    }

    #[test]
    fn a_operator_spectral_bounds(seed in any::<u64>(), n in 2usize..=6, pi in 0usize..3) {
        let p = [1.5, 2.0, 3.0][pi];
        let mut rng = sample_rng(seed, 0);
        let j = random_jet(&mut rng, n, true);
        let v: Vec<f64> = random_jet(&mut rng, n, false).grad;
        let q = dot(&j.a_apply(p, &v), &v);
        let v2 = dot(&v, &v);
        let (lo, hi) = (1f64.min(p - 1.0), 1f64.max(p - 1.0));
        prop_assert!(q >= lo * v2 * (1.0 - 1e-14) && q <= hi * v2 * (1.0 + 1e-14));
    }

    #[test]
    fn p2_degeneracy_is_exact(seed in any::<u64>(), n in 2usize..=6) {
        let j = random_jet(&mut sample_rng(seed, 0), n, true);
        prop_assert_eq!(j.p_laplacian_raw(2.0), j.laplacian());
        let v = j.grad.clone();
        prop_assert_eq!(j.a_apply(2.0, &v), v);
    }

    #[test]
    fn endo_trace_is_div_x(seed in any::<u64>(), n in 2usize..=6, p in 1.2f64..5.0, b in -2.0f64..2.0) {
        let j = random_jet(&mut sample_rng(seed, 0), n, true);
        let params = PJetParams::new(p, 0.0, b).unwrap();
        let t = j.endo_x(&params).trace();
        let d = j.div_x_closed(&params);
        prop_assert!((t - d).abs() <= 1e-11 * (t.abs() + d.abs()) + 1e-300);
    }

    #[test]
    fn derivatives_match_differences_at_order_above_three(
        n in 1usize..=3,
        c in prop::array::uniform3(-0.5f64..0.5),
        x in prop::array::uniform3(-0.8f64..0.8),
        width in 0.8f64..2.0,
    ) {
        let f = EuclideanField::new(n, field(n, 1.0, width, &c)).unwrap();
        let coarse = fd_discrepancy(&f, &x[..n], 1e-2).unwrap();
        let fine = fd_discrepancy(&f, &x[..n], 1e-3).unwrap();
        for k in 0..3 {
            // below 1e-11 the fine stencil is at roundoff and the ratio says nothing
            if fine[k] > 1e-11 {
                prop_assert!((coarse[k] / fine[k]).log10() >= 3.5, "order {} coarse {} fine {}", k + 1, coarse[k], fine[k]);
            }
            prop_assert!(fine[k] < 1e-8);
        }
    }

    #[test]
    fn ww_is_homogeneous(
        p in 1.3f64..4.0,
        c in prop::array::uniform3(-0.5f64..0.5),
        x in prop::array::uniform3(-1.0f64..1.0),
    ) {
        let params = PJetParams::new(p, 0.0, 0.0).unwrap();
        let lift = |amp: f64| {
            ScalarField::Euclidean(EuclideanField::new(3, field(3, amp, 1.3, &c)).unwrap())
                .lift(&SamplePoint::Coords(x.to_vec()))
        };
        let (Ok(l1), Ok(l10)) = (lift(1.0), lift(10.0)) else {
            return Err(TestCaseError::reject("critical point"));
        };
        let (a1, b1) = ww_sides(&l1, &params);
        let (a10, b10) = ww_sides(&l10, &params);
        let k = 10f64.powf(2.0 * p - 2.0);
        for i in 0..3 {
            let s = a1[i].abs() + b1[i].abs() + 1e-300;
            prop_assert!((a10[i] / k - a1[i]).abs() <= 1e-12 * s * 10.0);
            prop_assert!((b10[i] / k - b1[i]).abs() <= 1e-12 * s * 10.0);
        }
    }

    #[test]
    fn basic1_at_zero_agrees_with_bochner(
        p in 1.3f64..4.0,
        b in -2.0f64..2.0,
        c in prop::array::uniform3(-0.5f64..0.5),
        x in prop::array::uniform3(-1.0f64..1.0),
    ) {
        let Ok(l) = ScalarField::Euclidean(EuclideanField::new(3, field(3, 1.0, 1.3, &c)).unwrap())
            .lift(&SamplePoint::Coords(x.to_vec()))
        else {
            return Err(TestCaseError::reject("critical point"));
        };
        let params = PJetParams::new(p, 0.0, b).unwrap();
        let (bl, br) = bochner_x_sides(&l, &params);
        let (al, ar) = basic1_sides(&l, &params);
        // the two differ by div(div X . X) on both sides, so their defects coincide
        let scale = bl[0].abs() + br[0].abs() + al[0].abs() + ar[0].abs();
        prop_assert!(((bl[0] - br[0]) - (al[0] - ar[0])).abs() <= 1e-12 * scale);
    }

    #[test]
    fn special_gradient_coefficient_vanishes_at_ps(n in 3usize..=10, t in 0.05f64..0.95) {
        let p = 1.0 + t * (n as f64 - 1.0);
        let ps = critical_exponent(n, p).unwrap().finite().unwrap();
        let s = special_choice(n, p, ps);
        prop_assert!(s.gradient_coefficient.abs() <= 1e-14 * (n as f64) * ps);
    }

    #[test]
    fn pure_power_subcriticality(alpha in -3.0f64..8.0, other in -3.0f64..8.0) {
        let v = is_subcritical(&ReactionTerm::power(alpha), other, &ConditionGrid::default()).unwrap();
        prop_assert_eq!(v.holds, other >= alpha);
    }

    #[test]
    fn classification_is_monotone(n in 2usize..=8, p in 1.1f64..6.0, alpha in 0.01f64..12.0, s in 0.01f64..1.0) {
        let fc = FClass::pure_power();
        let hi = classify_liouville(n, p, alpha, &fc).unwrap();
        if hi.verdict != Conclusion::OutOfRange {
            let lo = classify_liouville(n, p, alpha * s, &fc).unwrap();
            prop_assert!(lo.verdict != Conclusion::OutOfRange, "{:?} at {} but {:?} at {}", hi.theorem, alpha, lo.verdict, alpha * s);
        }
    }
}

#[test]
fn critical_exponent_at_p2_is_rational() {
    for n in 3u64..=40 {
        let (num, den) = critical_exponent_rational(n, 2, 1).unwrap().unwrap();
        assert_eq!(num * (n - 2), den * (n + 2));
        assert_eq!(critical_exponent(n as usize, 2.0).unwrap(), ExtReal::Finite((n + 2) as f64 / (n - 2) as f64));
    }
}

#[test]
fn bubble_residual_under_rescaling() {
    let radii: Vec<f64> = (0..=200).map(|k| k as f64 * 0.1).collect();
    for (n, p) in [(3, 2.0), (4, 2.0), (5, 3.0), (4, 1.5)] {
        for l in [0.5, 1.0, 2.0] {
            let r = emden_residual(n, p, l, &radii).unwrap();
            assert!(r.pass, "({n},{p},{l}) {}", r.max_rel_residual);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn flux_is_monotone_for_positive_reactions(alpha in 0.5f64..6.0, u0 in 0.3f64..3.0, n in 2usize..=4, p in 1.5f64..3.0) {
        let m = ManifoldModel::euclidean(n).unwrap();
        let out = shoot(&m, p, &ReactionTerm::power(alpha), u0, &ShootOptions::with_horizon(50.0)).unwrap();
        prop_assert_eq!(out.flux_monotone, Some(true));
        for w in out.trajectory.windows(2) {
            if w[1].u > 0.0 {
                prop_assert!(w[1].m <= 0.0);
                prop_assert!(w[1].u <= w[0].u);
            }
        }
    }

    #[test]
    fn shooting_is_deterministic(alpha in 0.5f64..6.0, u0 in 0.3f64..3.0) {
        let m = ManifoldModel::euclidean(3).unwrap();
        let f = ReactionTerm::power(alpha);
        let a = shoot(&m, 2.0, &f, u0, &ShootOptions::default()).unwrap();
        let b = shoot(&m, 2.0, &f, u0, &ShootOptions::default()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn critical_trajectories_rescale(mu in 0.3f64..3.0, r in 0.01f64..10.0) {
        // u solves -lap u = u^5 on R^3 iff mu u(mu^2 r) does
        let m = ManifoldModel::euclidean(3).unwrap();
        let f = ReactionTerm::power(5.0);
        let opts = ShootOptions::with_horizon(100.0);
        let one = RadialSolution::solve(&m, 2.0, &f, 1.0, &opts).unwrap();
        let scaled = RadialSolution::solve(&m, 2.0, &f, mu, &opts).unwrap();
        let want = mu * one.state(mu * mu * r).unwrap().u;
        let got = scaled.state(r).unwrap().u;
        prop_assert!((got - want).abs() <= 1e-6 * want, "{} vs {}", got, want);
    }

    #[test]
    fn radial_extremal_is_p_harmonic_and_decreasing(n in 2usize..=4, pi in 0usize..3, ki in 0usize..3) {
        let (p, kappa) = ([1.5, 2.0, 3.0][pi], [0.25, 1.0, 4.0][ki]);
        let grid: Vec<f64> = (1..=40).map(|k| k as f64 * 0.5).collect();
        let prof = hn_p_harmonic_profile(n, p, kappa, &grid).unwrap();
        prop_assert!(prof.max_residual <= 1e-9);
        prop_assert!(prof.decreasing);
        for w in prof.g.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12));
        }
    }

    #[test]
    fn entire_profiles_never_break_the_bound(n in 2usize..=4, pi in 0usize..3, ki in 0usize..3, value in 0.1f64..10.0) {
        let (p, kappa) = ([1.5, 2.0, 3.0][pi], [0.25, 1.0, 4.0][ki]);
        let levels: Vec<f64> = (-20..=20).map(|k| k as f64).collect();
        let h = hn_horospherical_profile(n, p, kappa, &levels).unwrap();
        prop_assert!(global_bound_check(&h, n, p, kappa, 0.0).unwrap().pass);
        let c = constant_profile(n, p, value, &levels[20..]).unwrap();
        prop_assert!(global_bound_check(&c, n, p, kappa, 0.0).unwrap().pass);
    }

    #[test]
    fn identity_reports_are_deterministic(seed in any::<u64>()) {
        let cfg = RunConfig::new(ExperimentConfig::Identities(IdentitiesConfig {
            dims: vec![3],
            samples: 30,
            seed,
            ..Default::default()
        }));
        let a = run(&cfg).unwrap().report.to_json();
        let b = run(&cfg).unwrap().report.to_json();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn integrator_error_tracks_tolerance() {
    let err = |rtol: f64| {
        let ode = OdeOptions {
            rtol,
            atol: rtol * 1e-2,
            ..OdeOptions::default()
        };
        bubble_match_with(3, 2.0, 1.0, 20.0, &ode).unwrap().max_rel_residual
    };
    let (coarse, fine) = (err(1e-6), err(1e-8));
    // tolerance proportionality of the embedded pair: two decades of rtol buy at least one of error
    assert!(coarse / fine >= 10.0, "{coarse} -> {fine}");
    assert!(fine <= 1e-6);
}
