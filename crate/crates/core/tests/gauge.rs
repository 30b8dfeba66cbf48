use gerbe_core::fields::paths::*;
use gerbe_core::fields::*;
use gerbe_core::gauge::*;
use gerbe_core::lie::coeffs_dist;
use gerbe_core::linalg::CMat;
use gerbe_core::transport::{poe, IntegratorConfig};
use gerbe_core::two_group::{Instance, SharedCm};
use gerbe_core::Error;
use std::sync::Arc;

fn chart() -> Chart {
    Chart::new(2, &[-1.5, -1.5], &[1.5, 1.5]).unwrap()
}

fn spin_connection() -> GammaConnection {
    let cm = Instance::Spin.build();
    let a = ExprOneForm::parse(cm.g(), &chart(), &[vec!["0.6", "0.3*x2", "sin(x1)"], vec!["x1*x2", "-0.4", "0.2*cos(x2)"]]).unwrap();
    make_fake_flat(&cm, &chart(), Arc::new(a)).unwrap()
}

fn g_map(cm: &SharedCm, gens: [&str; 3]) -> Map {
    Arc::new(ExprGroupMap::parse(cm.g(), &chart(), &gens).unwrap())
}

fn h_map(cm: &SharedCm, gens: &[&str]) -> Map {
    Arc::new(ExprGroupMap::parse(cm.h(), &chart(), gens).unwrap())
}

fn phi_form(cm: &SharedCm, rows: [[&str; 3]; 2]) -> Form1 {
    Arc::new(ExprOneForm::parse(cm.h(), &chart(), &[rows[0].to_vec(), rows[1].to_vec()]).unwrap())
}

fn spin_gauge(src: &GammaConnection, k: f64) -> GaugeTransformation {
    let cm = src.cm().clone();
    let s = k.to_string();
    let g = g_map(&cm, [&format!("{s}*x1"), "0.3*x2*x1", "cos(x2) - 0.5"]);
    let phi = phi_form(&cm, [["x2", &s, "-0.3*x1"], ["0.3*sin(x1)", "x1*x2", "0.1"]]);
    GaugeTransformation::from_source(src, g, phi).unwrap()
}

fn max_form_gap(a: &GammaConnection, b: &GammaConnection) -> f64 {
    let mut worst = 0.0f64;
    for (p, x, y) in sample_points(a.chart(), 40, 3) {
        worst = worst.max(coeffs_dist(&a.a().eval(&p, &x), &b.a().eval(&p, &x)));
        worst = worst.max(coeffs_dist(&a.b().eval(&p, &x, &y), &b.b().eval(&p, &x, &y)));
    }
    worst
}

#[test]
fn identity_gauge_leaves_the_connection_unchanged() {
    let c = spin_connection();
    let id = GaugeTransformation::identity(&c);
    let moved = apply_gauge(&c, &id.g, &id.phi).unwrap();
    assert!(max_form_gap(&c, &moved) < 1e-12);
    assert!(check_gauge(&id, 50, 1).max() < 1e-9);
}

#[test]
fn abelian_gauge_shifts_b_by_d_phi() {
    let cm = Instance::AbelianGerbe.build();
    let b = ExprTwoForm::parse(cm.h(), &chart(), &[((0, 1), vec!["x1 + x2^2"])]).unwrap();
    let c = GammaConnection::new(cm.clone(), chart(), zero_one_form(cm.g()), Arc::new(b)).unwrap();
    let phi: Form1 = Arc::new(ExprOneForm::parse(cm.h(), &chart(), &[vec!["x1*x2"], vec!["sin(x1)"]]).unwrap());
    let moved = apply_gauge(&c, &identity_map(cm.g()), &phi).unwrap();
    for (p, _, _) in sample_points(&chart(), 30, 9) {
        let expected = p[0] + p[1] * p[1] - (p[0].cos() - p[0]);
        let got = moved.b().eval(&p, &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0])[0];
        assert!((got - expected).abs() < 1e-9, "{got} vs {expected}");
    }
}

#[test]
fn gauge_then_inverse_returns_to_source() {
    let c = spin_connection();
    let gt = spin_gauge(&c, 0.7);
    let inv = gt.inverse();
    let back = apply_gauge(gt.target(), &inv.g, &inv.phi).unwrap();
    assert!(max_form_gap(&c, &back) < 1e-5, "{}", max_form_gap(&c, &back));
    let loop_ = compose_gauge(&inv, &gt).unwrap();
    assert!(loop_.distance(&GaugeTransformation::identity(&c)) < 1e-12);
}

#[test]
fn applied_gauge_passes_its_check() {
    let c = spin_connection();
    let gt = spin_gauge(&c, 0.4);
    let r = check_gauge(&gt, 60, 2);
    assert!(r.passed(1e-5), "{r:?}");
}

#[test]
fn perturbed_phi_fails_the_first_equation() {
    let c = spin_connection();
    let gt = spin_gauge(&c, 0.4);
    let bad = GaugeTransformation::new(gt.g.clone(), scaled_one_form(gt.phi.clone(), 1.1), c.clone(), gt.target().clone()).unwrap();
    assert!(check_gauge(&bad, 60, 2).a_residual > 1e-3);
}

#[test]
fn gauge_preserves_fake_flatness() {
    let c = spin_connection();
    assert!(c.fake_curvature_residual() < 1e-5);
    let gt = spin_gauge(&c, 0.9);
    assert!(gt.target().fake_curvature_residual() < 1e-4, "{}", gt.target().fake_curvature_residual());
}

#[test]
fn composition_is_unital_and_associative() {
    let c0 = spin_connection();
    let g1 = spin_gauge(&c0, 0.2);
    let g2 = spin_gauge(g1.target(), -0.5);
    let g3 = spin_gauge(g2.target(), 0.8);
    let id0 = GaugeTransformation::identity(&c0);
    assert!(compose_gauge(&g1, &id0).unwrap().distance(&g1) < 1e-12);
    let left = compose_gauge(&compose_gauge(&g3, &g2).unwrap(), &g1).unwrap();
    let right = compose_gauge(&g3, &compose_gauge(&g2, &g1).unwrap()).unwrap();
    assert!(left.distance(&right) < 1e-8);
    let r = check_gauge(&compose_gauge(&g2, &g1).unwrap(), 40, 4);
    assert!(r.passed(1e-5), "{r:?}");
    assert!(matches!(compose_gauge(&g1, &g2), Err(Error::NonComposable { .. })));
}

#[test]
fn abelian_composition_adds_phi() {
    let cm = Instance::AbelianGerbe.build();
    let c = GammaConnection::new(cm.clone(), chart(), zero_one_form(cm.g()), zero_two_form(cm.h())).unwrap();
    let p1: Form1 = Arc::new(ExprOneForm::parse(cm.h(), &chart(), &[vec!["x2"], vec!["1"]]).unwrap());
    let p2: Form1 = Arc::new(ExprOneForm::parse(cm.h(), &chart(), &[vec!["x1^2"], vec!["x1"]]).unwrap());
    let t1 = GaugeTransformation::from_source(&c, identity_map(cm.g()), p1.clone()).unwrap();
    let t2 = GaugeTransformation::from_source(t1.target(), identity_map(cm.g()), p2.clone()).unwrap();
    let t = compose_gauge(&t2, &t1).unwrap();
    for (p, x, _) in sample_points(&chart(), 20, 5) {
        let sum = p1.eval(&p, &x)[0] + p2.eval(&p, &x)[0];
        assert_eq!(t.phi.eval(&p, &x)[0], sum);
    }
}

fn spin_a(gt: &GaugeTransformation) -> Map {
    h_map(gt.cm(), &["0.3*x1 - 0.2", "x2^2*0.5", "0.4*sin(x1 + x2)"])
}

#[test]
fn solved_two_cell_target_is_a_gauge_transformation() {
    let c = spin_connection();
    let gt = spin_gauge(&c, 0.6);
    let a2 = Gauge2Transformation::from_source(spin_a(&gt), gt.clone()).unwrap();
    let r = check_gauge(a2.target(), 60, 11);
    assert!(r.passed(1e-5), "{r:?}");
    let r2 = check_gauge2(&a2, 60, 11);
    assert!(r2.passed(1e-9), "{r2:?}");
}

#[test]
fn identity_two_cell_has_zero_residual() {
    let c = spin_connection();
    let gt = spin_gauge(&c, 0.6);
    assert!(check_gauge2(&Gauge2Transformation::identity(&gt), 30, 1).max() < 1e-12);
}

#[test]
fn abelian_two_cell_shifts_phi_by_maurer_cartan() {
    let cm = Instance::AbelianGerbe.build();
    let c = GammaConnection::new(cm.clone(), chart(), zero_one_form(cm.g()), zero_two_form(cm.h())).unwrap();
    let p1: Form1 = Arc::new(ExprOneForm::parse(cm.h(), &chart(), &[vec!["x2"], vec!["x1"]]).unwrap());
    let g1 = GaugeTransformation::from_source(&c, identity_map(cm.g()), p1).unwrap();
    let a = h_map(&cm, &["x1^2 + sin(x2)"]);
    // a*θ̄ = d(x1² + sin x2) for a = exp(i f)
    let p2: Form1 = Arc::new(ExprOneForm::parse(cm.h(), &chart(), &[vec!["x2 - 2*x1"], vec!["x1 - cos(x2)"]]).unwrap());
    let g2 = GaugeTransformation::new(identity_map(cm.g()), p2, c.clone(), g1.target().clone()).unwrap();
    let two = Gauge2Transformation::new(a.clone(), g1.clone(), g2).unwrap();
    assert!(check_gauge2(&two, 40, 3).passed(1e-5));
    let wrong = Gauge2Transformation::new(h_map(&cm, &["x1^2"]), g1.clone(), two.target().clone()).unwrap();
    assert!(check_gauge2(&wrong, 40, 3).phi_residual > 1e-3);
}

#[test]
fn perturbed_two_cell_fails_the_g_condition() {
    let c = spin_connection();
    let gt = spin_gauge(&c, 0.6);
    let a2 = Gauge2Transformation::from_source(spin_a(&gt), gt.clone()).unwrap();
    let cm = gt.cm().clone();
    let tilt = h_map(&cm, &["0.05", "0", "0"]);
    let bad = Gauge2Transformation::new(product_map(a2.a.clone(), tilt), gt.clone(), a2.target().clone()).unwrap();
    assert!(check_gauge2(&bad, 30, 2).g_residual > 1e-3);
}

#[test]
fn two_cell_compositions_and_interchange() {
    let c0 = spin_connection();
    let f = spin_gauge(&c0, 0.3);
    let c1 = f.target().clone();
    let k = spin_gauge(&c1, -0.4);
    let a1 = Gauge2Transformation::from_source(h_map(f.cm(), &["0.2*x1", "0.1", "x2*0.3"]), f.clone()).unwrap();
    let a1p = Gauge2Transformation::from_source(h_map(f.cm(), &["-0.1", "0.2*x2", "x1*x2*0.2"]), a1.target().clone()).unwrap();
    let b1 = Gauge2Transformation::from_source(h_map(f.cm(), &["0.1*x2", "0.3*x1", "0.05"]), k.clone()).unwrap();
    let b1p = Gauge2Transformation::from_source(h_map(f.cm(), &["0.2", "-0.1*x1", "0.1*x2"]), b1.target().clone()).unwrap();

    let idv = vcompose2(&Gauge2Transformation::identity(a1.target()), &a1).unwrap();
    let gap = |x: &Gauge2Transformation, y: &Gauge2Transformation| {
        sample_points(&chart(), 30, 8).iter().map(|(p, _, _)| x.a.value(p).dist(&y.a.value(p))).fold(0.0, f64::max)
    };
    assert!(gap(&idv, &a1) < 1e-12);
    let idh = hcompose2(&Gauge2Transformation::identity(&k), &Gauge2Transformation::identity(&f)).unwrap();
    assert!(gap(&idh, &Gauge2Transformation::identity(&compose_gauge(&k, &f).unwrap())) < 1e-12);

    let v = vcompose2(&a1p, &a1).unwrap();
    assert!(check_gauge2(&v, 40, 1).passed(1e-5));
    let h = hcompose2(&b1, &a1).unwrap();
    assert!(check_gauge2(&h, 40, 1).passed(1e-5), "{:?}", check_gauge2(&h, 40, 1));

    let lhs = hcompose2(&vcompose2(&b1p, &b1).unwrap(), &vcompose2(&a1p, &a1).unwrap()).unwrap();
    let rhs = vcompose2(&hcompose2(&b1p, &a1p).unwrap(), &hcompose2(&b1, &a1).unwrap()).unwrap();
    assert!(gap(&lhs, &rhs) < 1e-7, "{}", gap(&lhs, &rhs));
    assert!(vcompose2(&a1, &a1p).is_err());
}

#[test]
fn fake_flat_construction() {
    let cm = Instance::Spin.build();
    let zero = make_fake_flat(&cm, &chart(), zero_one_form(cm.g())).unwrap();
    for (p, x, y) in sample_points(&chart(), 10, 1) {
        assert!(zero.b().eval(&p, &x, &y).iter().all(|v| *v == 0.0));
    }
    let one_dir = ExprOneForm::parse(cm.g(), &chart(), &[vec!["0.3", "-1", "2"], vec!["0", "0", "0"]]).unwrap();
    let c = make_fake_flat(&cm, &chart(), Arc::new(one_dir)).unwrap();
    for (p, x, y) in sample_points(&chart(), 10, 1) {
        assert!(c.b().eval(&p, &x, &y).iter().all(|v| v.abs() < 1e-9));
    }
    let a = ExprOneForm::parse(cm.g(), &chart(), &[vec!["1", "0", "0"], vec!["0", "x1", "0"]]).unwrap();
    let c = make_fake_flat(&cm, &chart(), Arc::new(a)).unwrap();
    assert!(c.fake_curvature_residual() < 1e-5);
    for inst in [Instance::InnerSu2, Instance::InnerSo3] {
        let cm = inst.build();
        let a = ExprOneForm::parse(cm.g(), &chart(), &[vec!["x2", "0", "1"], vec!["0", "x1", "0"]]).unwrap();
        assert!(make_fake_flat(&cm, &chart(), Arc::new(a)).unwrap().is_fake_flat());
    }
    let ab = Instance::AbelianGerbe.build();
    assert!(matches!(make_fake_flat(&ab, &chart(), zero_one_form(ab.g())), Err(Error::SingularTStar)));
}

#[test]
fn hg_phi_intertwines_holonomies() {
    let c = spin_connection();
    let gt = spin_gauge(&c, 0.5);
    let gamma: SharedPath = Arc::new(ExprPath::parse(2, &["-1 + 2*u", "0.8*sin(3*u)"], false).unwrap());
    let cfg = IntegratorConfig::default();
    let (h, gp) = gt.hg_phi(&*gamma, &cfg).unwrap().value;
    let lhs = gp * gt.g.value(&gamma.point(0.0));
    let rhs = gt.cm().t(&h.inverse().unwrap()) * gt.g.value(&gamma.point(1.0)) * c.poe(&*gamma, &cfg).unwrap().value;
    assert!(lhs.dist(&rhs) < 1e-7);
    assert!(gp.dist(&poe(&**gt.target().a(), &*gamma, &cfg).unwrap().value) < 1e-9);
}

#[test]
fn soe_warns_off_fake_flat_and_rejects_non_bigons() {
    let cm = Instance::Spin.build();
    let a = ExprOneForm::parse(cm.g(), &chart(), &[vec!["1", "0", "0"], vec!["0", "x1", "0"]]).unwrap();
    let c = GammaConnection::new(cm.clone(), chart(), Arc::new(a), zero_two_form(cm.h())).unwrap();
    assert!(!c.is_fake_flat());
    let sigma = interpolate(line([0.0; 3], [1.0, 1.0, 0.0]), Arc::new(ExprPath::parse(2, &["u", "u^2"], false).unwrap()));
    let r = c.soe(&*sigma, &IntegratorConfig::default()).unwrap();
    assert_eq!(r.warnings.len(), 1);
    assert!(r.value.dist(&CMat::identity(2)) < 1e-12);
    let not_bigon = interpolate(line([0.0; 3], [1.0, 1.0, 0.0]), line([0.0; 3], [1.0, 0.5, 0.0]));
    assert!(matches!(c.soe(&*not_bigon, &IntegratorConfig::default()), Err(Error::NotABigon { .. })));
    let outside = interpolate(line([0.0; 3], [1.0, 1.0, 0.0]), Arc::new(ExprPath::parse(2, &["u", "u + 3*sin(3.14159265358979*u)"], false).unwrap()));
    assert!(matches!(c.soe(&*outside, &IntegratorConfig::default()), Err(Error::OutsideChart(_))));
}
