use plemden::fields::{EuclideanField, FieldExpr, Monomial, RadialProfile, RadialSource, SamplePoint, ScalarField};
use plemden::geometry::ManifoldModel;
use plemden::identities::*;
use plemden::jets::{Jet2, PJetParams};
use plemden::linalg::Mat;
use plemden::reaction::ReactionTerm;
use plemden::sampling::{CampaignModel, FieldFamily};
use plemden::shooting::{RadialSolution, ShootOptions};
use std::sync::Arc;

fn rel(l: &[f64], r: &[f64]) -> f64 {
    plemden::report::relative_residual(l, r).0
}

fn euclid(dim: usize, expr: FieldExpr, x: &[f64]) -> plemden::fields::LiftedJet {
    let f = ScalarField::Euclidean(EuclideanField::new(dim, expr).unwrap());
    f.lift(&SamplePoint::Coords(x.to_vec())).unwrap()
}

fn half_norm_sq(n: usize) -> FieldExpr {
    // 1 + |x|^2 / 2, shifted so the field stays positive
    let mut terms = vec![Monomial { coef: 1.0, powers: vec![0; n] }];
    for i in 0..n {
        let mut powers = vec![0; n];
        powers[i] = 2;
        terms.push(Monomial { coef: 0.5, powers });
    }
    FieldExpr::Polynomial { terms }
}

fn gaussian(n: usize) -> FieldExpr {
    FieldExpr::Sum {
        terms: vec![
            FieldExpr::Constant { value: 0.5 },
            FieldExpr::Gaussian {
                amplitude: 1.3,
                center: vec![0.2; n],
                width: 1.1,
            },
        ],
    }
}

#[test]
fn decomposition_is_exact_at_p2() {
    let l = euclid(3, gaussian(3), &[0.3, -0.4, 0.7]);
    let (a, b) = decomposition_sides(&l, &PJetParams::new(2.0, 0.0, 0.0).unwrap());
    assert!(rel(&a, &b) < 1e-14);
}

#[test]
fn gaussian_campaign_decomposition() {
    let mut c = Campaign::new(CampaignModel::Euclidean, 3, FieldFamily::Gaussian, vec![3.0], 500, 7);
    c.a_values = vec![0.0];
    c.b_values = vec![0.0];
    let r = check_decomposition(&c).unwrap();
    assert!(r.pass && r.max_rel_residual <= 1e-8, "{}", r.max_rel_residual);
}

#[test]
fn hyperbolic_radial_decomposition_p_one_half() {
    let c = Campaign::new(CampaignModel::Hyperbolic { kappa: 1.0 }, 3, FieldFamily::Mixed, vec![1.5], 300, 3);
    let r = check_decomposition(&c).unwrap();
    assert!(r.pass, "{}", r.max_rel_residual);
}

#[test]
fn ww_classical_at_p2() {
    let l = euclid(3, gaussian(3), &[0.1, 0.5, -0.2]);
    let (a, b) = ww_sides(&l, &PJetParams::new(2.0, 0.0, 0.0).unwrap());
    // grad_{du} du = hess(du) versus half the gradient of |du|^2, computed by hand
    let v = l.values();
    let direct = v.hess.matvec(&v.grad);
    assert!(rel(&a, &direct) < 1e-12);
    assert!(rel(&a, &b) < 1e-12);
}

#[test]
fn ww_sphere_radial_p_one_half() {
    let c = Campaign::new(CampaignModel::Sphere { kappa: 1.0 }, 3, FieldFamily::Mixed, vec![1.5], 300, 11);
    let r = check_ww(&c).unwrap();
    assert!(r.max_rel_residual <= 1e-10, "{}", r.max_rel_residual);
}

#[test]
fn bochner_x_on_quadratic_gives_dimension() {
    for n in 2..=4 {
        let l = euclid(n, half_norm_sq(n), &vec![0.3; n]);
        let (a, b) = bochner_x_sides(&l, &PJetParams::new(2.0, 0.0, 0.0).unwrap());
        assert!((a[0] - n as f64).abs() < 1e-12, "lhs {}", a[0]);
        assert!((b[0] - n as f64).abs() < 1e-12, "rhs {}", b[0]);
    }
}

#[test]
fn bochner_x_hyperbolic_exponential_has_ricci_term() {
    let model = ManifoldModel::hyperbolic(3, 1.0).unwrap();
    let prof = RadialProfile::new(model, FieldExpr::ExpLinear { amplitude: 1.0, rate: vec![-1.0] }).unwrap();
    let field = ScalarField::Radial(Arc::new(prof));
    let params = PJetParams::new(2.0, 0.0, 0.0).unwrap();
    for r in [0.5, 1.0, 2.0, 3.5] {
        let l = field.lift(&SamplePoint::Radius(r)).unwrap();
        let (a, b) = bochner_x_sides(&l, &params);
        assert!(rel(&a, &b) <= 1e-7);
        let x = l.values().field_x(&params);
        let x2: f64 = x.iter().map(|t| t * t).sum();
        assert!((l.ricci(&x) + 2.0 * x2).abs() < 1e-12 * x2.max(1.0));
        assert!(x2 > 0.0);
    }
}

#[test]
fn bochner_p_classical_on_quadratics() {
    let expr = FieldExpr::Polynomial {
        terms: vec![
            Monomial { coef: 2.0, powers: vec![0, 0, 0] },
            Monomial { coef: 0.7, powers: vec![2, 0, 0] },
            Monomial { coef: -0.3, powers: vec![1, 1, 0] },
            Monomial { coef: 0.4, powers: vec![0, 0, 2] },
            Monomial { coef: 0.5, powers: vec![0, 1, 0] },
        ],
    };
    let l = euclid(3, expr, &[0.2, 0.1, -0.3]);
    let (a, b) = bochner_p_sides(&l, &PJetParams::new(2.0, 0.0, 0.0).unwrap());
    assert!(rel(&a, &b) < 1e-10);
    // for a quadratic: half the Laplacian of |du|^2 is |hess|^2
    let h = l.values().hess;
    assert!((a[0] - h.frob_sq()).abs() < 1e-10);
}

#[test]
fn basic1_at_zero_matches_bochner_consequence() {
    let params = PJetParams::new(3.0, 0.0, -1.0).unwrap();
    for x in [[0.3, -0.2, 0.5], [1.0, 0.4, -0.6]] {
        let l = euclid(3, gaussian(3), &x);
        let (a, b) = basic1_sides(&l, &params);
        assert!(rel(&a, &b) <= 1e-7);
    }
}

#[test]
fn basic1_sphere_radial_a2_b0_p3() {
    let mut c = Campaign::new(CampaignModel::Sphere { kappa: 1.0 }, 3, FieldFamily::Mixed, vec![3.0], 200, 5);
    c.a_values = vec![2.0];
    c.b_values = vec![0.0];
    let r = check_basic1(&c).unwrap();
    assert!(r.pass, "{}", r.max_rel_residual);
}

fn cubic_solution() -> Arc<dyn RadialSource> {
    let model = ManifoldModel::euclidean(3).unwrap();
    Arc::new(RadialSolution::solve(&model, 2.0, &ReactionTerm::power(3.0), 1.0, &ShootOptions::default()).unwrap())
}

#[test]
fn special_choice_quoted_values() {
    let s = special_choice(3, 2.0, 3.0);
    assert!((s.a - 12.0 / 5.0).abs() < 1e-15);
    assert!((s.b + 9.0 / 5.0).abs() < 1e-15);
    assert_eq!(special_choice(3, 2.0, 5.0).gradient_coefficient, 0.0);
}

#[test]
fn basic2_special_on_cubic_solution() {
    let c = SolutionCampaign::new(vec![cubic_solution()], 200, 9);
    let r = check_basic2_special(&c, &ReactionTerm::power(3.0), 3.0).unwrap();
    assert!(r.pass && r.max_rel_residual <= TOL_ON_SOLUTIONS, "{}", r.max_rel_residual);
    let g = check_basic2(&c, &ReactionTerm::power(3.0), 1.0, -1.0).unwrap();
    assert!(g.pass, "{}", g.max_rel_residual);
}

#[test]
fn basic2_refuses_uncertified_or_mismatched_fields() {
    let model = ManifoldModel::euclidean(3).unwrap();
    let prof: Arc<dyn RadialSource> = Arc::new(RadialProfile::new(model, gaussian(1)).unwrap());
    let c = SolutionCampaign::new(vec![prof], 10, 0);
    assert_eq!(check_basic2(&c, &ReactionTerm::Zero, 0.0, 0.0).unwrap_err().kind(), "precondition");
    let c = SolutionCampaign::new(vec![cubic_solution()], 10, 0);
    assert_eq!(
        check_basic2(&c, &ReactionTerm::power(2.0), 0.0, 0.0).unwrap_err().kind(),
        "precondition"
    );
}

fn jet(u: f64, grad: &[f64], hess: &[&[f64]]) -> Jet2 {
    let n = grad.len();
    Jet2::new(u, grad.to_vec(), Mat::from_fn(n, |i, j| hess[i][j])).unwrap()
}

#[test]
fn trace_equality_at_p2() {
    let j = jet(1.3, &[0.4, -0.2, 0.9], &[&[1.0, 0.3, -0.2], &[0.3, -0.5, 0.8], &[-0.2, 0.8, 0.1]]);
    for b in [-2.0, 0.0, 1.0] {
        let m = trace_margins(&j, &PJetParams::new(2.0, 0.0, b).unwrap());
        assert!(m[0].2.abs() <= 1e-12 && m[1].2.abs() <= 1e-12, "{m:?}");
    }
}

#[test]
fn trace_equality_when_first_row_decouples() {
    // gradient along e1 and u_{1i} = 0 for i >= 2
    let j = jet(0.8, &[1.1, 0.0, 0.0], &[&[0.7, 0.0, 0.0], &[0.0, -0.4, 0.9], &[0.0, 0.9, 0.3]]);
    for p in [1.5, 3.0] {
        let m = trace_margins(&j, &PJetParams::new(p, 0.0, 0.0).unwrap());
        assert!(m[1].2 >= -1e-12);
        assert!(m[0].2.abs() <= 1e-12, "{m:?}");
    }
}

#[test]
fn trace_generic_jet_strict() {
    let j = jet(1.0, &[0.6, 0.3], &[&[0.2, 1.1], &[1.1, -0.7]]);
    let m = trace_margins(&j, &PJetParams::new(3.0, 0.0, 0.0).unwrap());
    assert!(m[0].2 > 1e-6 && m[1].2 > 1e-6, "{m:?}");
}

#[test]
fn kato_scalar_hessian() {
    for n in [2usize, 3, 4, 6] {
        let c = 1.7;
        let hess: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|k| if i == k { c } else { 0.0 }).collect()).collect();
        let mut g = vec![0.0; n];
        g[0] = 0.9;
        g[1] = -0.4;
        let rows: Vec<&[f64]> = hess.iter().map(|r| r.as_slice()).collect();
        let w = Jet2::unsigned(0.0, g, Mat::from_fn(n, |i, k| rows[i][k])).unwrap();
        let (l, r, s) = kato_sides(&w, 2.0);
        assert!((l - c * c * n as f64).abs() < 1e-12);
        assert!((l - r) / s >= -1e-12);
    }
}

#[test]
fn kato_equality_case() {
    for p in [1.5, 2.0, 3.0] {
        let w = Jet2::unsigned(
            -0.3,
            vec![0.8, 0.0, 0.0, 0.0],
            Mat::diag(&[1.4, -0.6, -0.6, -0.6]),
        )
        .unwrap();
        let (l, r, s) = kato_sides(&w, p);
        assert!(((l - r) / s).abs() <= 1e-12, "p={p}: {l} vs {r}");
    }
}

#[test]
fn kato_generic_nonnegative() {
    let c = JetCampaign {
        samples: 2000,
        dims: vec![2, 3, 4, 6],
        p_values: vec![1.5, 2.0, 3.0],
        b_values: vec![],
        seed: 1,
    };
    let r = check_kato(&c).unwrap();
    assert!(r.pass, "{}", r.min_margin);
}

#[test]
fn moser_on_quadratic_reaction() {
    let model = ManifoldModel::euclidean(3).unwrap();
    let sol = RadialSolution::solve(&model, 2.0, &ReactionTerm::power(2.0), 1.0, &ShootOptions::default()).unwrap();
    let r = check_moser_pointwise(&sol, 0.0, 2.0, 500).unwrap();
    assert!(r.pass && r.min_margin >= -TOL_NEG_MOSER, "{}", r.min_margin);
}

#[test]
fn moser_refuses_delta_at_least_one() {
    let model = ManifoldModel::euclidean(3).unwrap();
    let sol = RadialSolution::solve(&model, 2.0, &ReactionTerm::power(2.0), 1.0, &ShootOptions::default()).unwrap();
    for d in [1.0, 1.5] {
        assert_eq!(check_moser_pointwise(&sol, d, 2.0, 50).unwrap_err().kind(), "precondition");
    }
}
