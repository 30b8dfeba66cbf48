use gerbe_core::fields::paths::*;
use gerbe_core::fields::*;
use gerbe_core::lie::{coeffs_sub, Coeffs, GroupDescriptor};
use gerbe_core::linalg::{CMat, C64};
use gerbe_core::transport::calibration::*;
use gerbe_core::transport::*;
use gerbe_core::two_group::{Instance, SharedCm};
use std::sync::Arc;

fn cfg() -> IntegratorConfig {
    IntegratorConfig::default()
}

fn cross(a: &[f64], b: &[f64]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn c(v: [f64; 3]) -> Coeffs {
    v.into_iter().collect()
}

/// `A = a1 dx1 + a2 dx2` in so(3) with hand-computed derivatives, and the
/// fake-flat partner `B = (∂1 a2 − ∂2 a1 + a1 × a2) dx1∧dx2` for SPIN
/// (where `t_*` is the identity on coefficients).
fn spin_pair(scale: f64) -> (SharedCm, Form1, Form2) {
    let cm = Instance::Spin.build();
    let a1 = move |p: &Vec3| [scale * p[1].sin(), scale * 0.3 * p[0], scale * 0.2];
    let a2 = move |p: &Vec3| [scale * 0.5, scale * p[0] * p[1], scale * 0.4 * p[0].cos()];
    let a: Form1 = Arc::new(FnOneForm::new(cm.g(), move |p, v| {
        let (x, y) = (a1(p), a2(p));
        c([0, 1, 2].map(|k| x[k] * v[0] + y[k] * v[1]))
    }));
    let b: Form2 = Arc::new(FnTwoForm::new(cm.h(), move |p, x, y| {
        let da = [-scale * p[1].cos(), scale * p[1], -scale * 0.4 * p[0].sin()];
        let br = cross(&a1(p), &a2(p));
        let w = x[0] * y[1] - x[1] * y[0];
        c([0, 1, 2].map(|k| w * (da[k] + br[k])))
    }));
    (cm, a, b)
}

/// A bigon from `(0,0)` to `(1,1)` sweeping across the diagonal.
fn spin_bigon(amp: f64) -> SharedBigon {
    Arc::new(FnBigon(move |s: f64, t: f64| {
        let c = amp * (s - 0.5);
        let pi = std::f64::consts::PI;
        let (sn, cs) = ((pi * t).sin(), (pi * t).cos());
        ([t + c * sn, t - 0.5 * c * sn + 0.1 * t * t, 0.0], [amp * sn, -0.5 * amp * sn, 0.0], [1.0 + c * pi * cs, 1.0 - 0.5 * c * pi * cs + 0.2 * t, 0.0])
    }))
}

/// The unit square seen as a bigon from `(0,0)` to `(1,1)`, swept from its
/// lower-right to its upper-left boundary; `∬ dx1∧dx2 (∂_s, ∂_t) = −1`.
fn diamond() -> SharedBigon {
    Arc::new(FnBigon(|s: f64, t: f64| {
        let (w, dw): (f64, f64) = if t <= 0.5 { (2.0 * t, 2.0) } else { (2.0 - 2.0 * t, -2.0) };
        let c = s - 0.5;
        ([t - c * w, t + c * w, 0.0], [-w, w, 0.0], [1.0 - c * dw, 1.0 + c * dw, 0.0])
    }))
}

fn abelian(b: &str) -> (SharedCm, Form1, Form2) {
    let cm = Instance::AbelianGerbe.build();
    let chart = Chart::new(2, &[-2.0, -2.0], &[3.0, 3.0]).unwrap();
    let bf = ExprTwoForm::parse(cm.h(), &chart, &[((0, 1), vec![b])]).unwrap();
    (cm.clone(), zero_one_form(cm.g()), Arc::new(bf))
}

fn so3_form(seed: f64) -> Form1 {
    let g = GroupDescriptor::so3();
    let chart = Chart::new(2, &[-3.0, -3.0], &[3.0, 3.0]).unwrap();
    let s = seed.to_string();
    let rows = vec![
        vec![format!("{s}*sin(x2) + 0.3"), format!("x1*x2 - {s}"), "0.7*cos(x1 + x2)".to_string()],
        vec![format!("0.4*x1^2"), format!("{s}*cos(x1)"), format!("exp(-x2^2) - {s}*x1")],
    ];
    let rows: Vec<Vec<&str>> = rows.iter().map(|r| r.iter().map(|x| x.as_str()).collect()).collect();
    Arc::new(ExprOneForm::parse(&g, &chart, &rows).unwrap())
}

fn wiggle() -> SharedPath {
    Arc::new(ExprPath::parse(2, &["1.2*u + 0.3*sin(3*u)", "u^2 - 0.5*u"], false).unwrap())
}

#[test]
fn zero_form_transports_to_identity() {
    let g = GroupDescriptor::su2();
    let r = poe(&*zero_one_form(&g), &*wiggle(), &cfg()).unwrap();
    assert!(r.value.dist(&CMat::identity(2)) < 1e-15);
}

#[test]
fn abelian_poe_matches_quadrature() {
    let g = GroupDescriptor::u1();
    let chart = Chart::new(1, &[-1.0], &[2.0]).unwrap();
    let w: Form1 = Arc::new(ExprOneForm::parse(&g, &chart, &[vec!["cos(x1) + x1^2"]]).unwrap());
    let gamma = line([0.0; 3], [1.0, 0.0, 0.0]);
    let r = poe(&*w, &*gamma, &cfg()).unwrap();
    let integral = 1f64.sin() + 1.0 / 3.0;
    let expected = g.exp_coeffs(&[-integral]);
    assert!(r.value.dist(&expected) < 1e-12, "{}", r.value.dist(&expected));
    let basis = g.basis()[0][(0, 0)];
    assert_eq!(basis, C64::new(0.0, 1.0));
    let flow = poe_prefix(&*w, &*gamma, &cfg()).unwrap();
    let half = flow.nearest(0.5);
    let partial = 0.5f64.sin() + 0.125 / 3.0;
    assert!(half.dist(&g.exp_coeffs(&[-partial])) < 1e-12);
}

#[test]
fn prefix_flow_ends_at_poe() {
    let w = so3_form(0.6);
    for richardson in [true, false] {
        let cfg = IntegratorConfig { richardson, ..cfg() };
        let flow = poe_prefix(&*w, &*wiggle(), &cfg).unwrap();
        let r = poe(&*w, &*wiggle(), &cfg).unwrap();
        assert_eq!(flow.last(), r.value);
        assert_eq!(flow.values[0], CMat::identity(3));
    }
}

#[test]
fn poe_is_multiplicative_under_splitting() {
    for seed in [0.1, 0.5, 0.9] {
        let w = so3_form(seed);
        let gamma = wiggle();
        let whole = poe(&*w, &*gamma, &cfg()).unwrap().value;
        let first = poe(&*w, &*restrict_path(gamma.clone(), 0.0, 0.4), &cfg()).unwrap().value;
        let second = poe(&*w, &*restrict_path(gamma.clone(), 0.4, 1.0), &cfg()).unwrap().value;
        assert!(whole.dist(&(second * first)) < 1e-8, "{}", whole.dist(&(second * first)));
    }
}

#[test]
fn rk4_agrees_with_cf_midpoint() {
    let w = so3_form(0.7);
    let a = poe(&*w, &*wiggle(), &cfg()).unwrap().value;
    let b = poe(&*w, &*wiggle(), &IntegratorConfig { scheme: Scheme::Rk4Projected, ..cfg() }).unwrap().value;
    assert!(a.dist(&b) < 1e-9);
}

#[test]
fn error_estimate_shrinks_with_steps() {
    let w = so3_form(0.8);
    let e1 = poe(&*w, &*wiggle(), &cfg().with_steps(200)).unwrap().error_estimate;
    let e2 = poe(&*w, &*wiggle(), &cfg().with_steps(400)).unwrap().error_estimate;
    assert!(e2 * 4.0 <= e1 * 1.05, "{e1} {e2}");
    assert!(poe(&*w, &*wiggle(), &cfg()).unwrap().error_estimate < 1e-6);
}

#[test]
fn poe_is_gauge_covariant() {
    let grp = GroupDescriptor::so3();
    let chart = Chart::new(2, &[-3.0, -3.0], &[3.0, 3.0]).unwrap();
    let gmap: Map = Arc::new(ExprGroupMap::parse(&grp, &chart, &["x1*x2", "sin(x1) - 0.3", "0.5*x2^2"]).unwrap());
    let w = so3_form(0.4);
    let (w2, g2) = (w.clone(), gmap.clone());
    let wp: Form1 = Arc::new(FnOneForm::new(&grp, move |p, v| {
        let gi = g2.value(p).inverse().unwrap();
        let ad = g2.group().adjoint_coeffs(&gi, &w2.eval(p, v));
        gerbe_core::lie::coeffs_add(&ad, &g2.mc_left(p, v))
    }));
    let gamma = wiggle();
    let lhs = poe(&*w, &*gamma, &cfg()).unwrap().value * gmap.value(&gamma.point(0.0));
    let rhs = gmap.value(&gamma.point(1.0)) * poe(&*wp, &*gamma, &cfg()).unwrap().value;
    assert!(lhs.dist(&rhs) < 1e-7, "{}", lhs.dist(&rhs));
}

#[test]
fn reparameterized_paths_give_the_same_poe() {
    let w = so3_form(0.3);
    let a = poe(&*w, &*wiggle(), &cfg()).unwrap().value;
    for r in [Reparam::SmoothStep, Reparam::Quadratic(0.5)] {
        let b = poe(&*w, &*reparam_path(wiggle(), r), &cfg()).unwrap().value;
        assert!(a.dist(&b) < 1e-6, "{r:?}");
    }
}

/// `A' = Ad_g A − θ̄_g − t_*φ` for SPIN.
fn gauge_target(cm: &SharedCm, a: Form1, g: Map, phi: Form1) -> Form1 {
    let cm2 = cm.clone();
    Arc::new(FnOneForm::new(cm.g(), move |p, v| {
        let ad = cm2.g().adjoint_coeffs(&g.value(p), &a.eval(p, v));
        coeffs_sub(&coeffs_sub(&ad, &g.mc_right(p, v)), &cm2.t_star(&phi.eval(p, v)))
    }))
}

fn spin_gauge() -> (SharedCm, Form1, Map, Form1, Form1) {
    let (cm, a, _) = spin_pair(1.0);
    let chart = Chart::new(2, &[-3.0, -3.0], &[3.0, 3.0]).unwrap();
    let g: Map = Arc::new(ExprGroupMap::parse(cm.g(), &chart, &["0.4*x1", "x2*x1", "cos(x2)"]).unwrap());
    let phi: Form1 = Arc::new(ExprOneForm::parse(cm.h(), &chart, &[vec!["x2", "0.2", "-x1"], vec!["0.3*sin(x1)", "x1*x2", "0.1"]]).unwrap());
    let ap = gauge_target(&cm, a.clone(), g.clone(), phi.clone());
    (cm, a, g, phi, ap)
}

#[test]
fn semidirect_poe_with_zero_phi_is_plain_poe() {
    let (cm, _, _, _, ap) = spin_gauge();
    let r = semidirect_poe(&*cm, &*zero_one_form(cm.h()), &*ap, &*wiggle(), &cfg()).unwrap();
    assert!(r.value.0.dist(&CMat::identity(2)) < 1e-14);
    let g = poe(&*ap, &*wiggle(), &cfg()).unwrap().value;
    assert!(r.value.1.dist(&g) < 1e-9);
}

#[test]
fn semidirect_poe_intertwines_the_two_holonomies() {
    let (cm, a, g, phi, ap) = spin_gauge();
    let gamma = wiggle();
    for scheme in [Scheme::CfMidpoint, Scheme::Rk4Projected] {
        let cfg = IntegratorConfig { scheme, ..cfg() };
        let (h, gp) = semidirect_poe(&*cm, &*phi, &*ap, &*gamma, &cfg).unwrap().value;
        let lhs = gp * g.value(&gamma.point(0.0));
        let rhs = cm.t(&h.inverse().unwrap()) * g.value(&gamma.point(1.0)) * poe(&*a, &*gamma, &cfg).unwrap().value;
        assert!(lhs.dist(&rhs) < 1e-7, "{scheme:?}: {}", lhs.dist(&rhs));
    }
}

#[test]
fn semidirect_poe_composes_along_paths() {
    let (cm, _, _, phi, ap) = spin_gauge();
    let g1 = wiggle();
    let g2: SharedPath = Arc::new(ExprPath::parse(2, &["1.2 + 0.3*sin(3) - 0.8*u", "0.5 + u^3"], false).unwrap());
    let whole = concat(g1.clone(), g2.clone());
    let h = |p: &SharedPath| semidirect_poe(&*cm, &*phi, &*ap, &**p, &cfg()).unwrap().value;
    let (h1, _) = h(&g1);
    let (h2, p2) = h(&g2);
    let (h12, _) = h(&whole);
    let rhs = h2 * cm.alpha(&p2, &h1);
    assert!(h12.dist(&rhs) < 1e-7, "{}", h12.dist(&rhs));
}

#[test]
fn soe_of_zero_b_is_identity() {
    let (cm, a, _) = spin_pair(1.0);
    let r = soe_raw(&*cm, &*a, &*zero_two_form(cm.h()), &*spin_bigon(0.6), &cfg()).unwrap();
    assert!(r.value.dist(&CMat::identity(2)) < 1e-12);
}

#[test]
fn abelian_soe_is_exponential_of_the_flux() {
    for b in [0.7f64, -1.3, 2.0] {
        let (cm, a, bf) = abelian(&b.to_string());
        let k = soe_raw(&*cm, &*a, &*bf, &*diamond(), &cfg()).unwrap().value;
        let z = k[(0, 0)];
        assert!((z.im.atan2(z.re).abs() - b.abs()).abs() < 1e-9);
        // frozen convention: soe = exp(−∬ B(∂_s, ∂_t)) with ∬ = −b
        assert!(k.dist(&cm.h().exp_coeffs(&[b])) < 1e-9);
    }
}

#[test]
fn abelian_soe_of_curved_flux() {
    let (cm, a, bf) = abelian("1 + 0.5*x1*x2");
    let k = soe_raw(&*cm, &*a, &*bf, &*diamond(), &cfg()).unwrap().value;
    // the diamond is the unit square: ∬ (1 + x1 x2/2) = 1 + 1/8
    let expected = 1.125;
    let z = k[(0, 0)];
    assert!((z.im.atan2(z.re) - expected).abs() < 1e-8, "{}", z.im.atan2(z.re));
}

#[test]
fn soe_matches_target_and_source() {
    let (cm, a, b) = spin_pair(1.0);
    for amp in [0.3, 0.8] {
        let sigma = spin_bigon(amp);
        let k = soe_raw(&*cm, &*a, &*b, &*sigma, &cfg()).unwrap();
        assert!(k.error_estimate < 1e-4);
        let src = poe(&*a, &*source_path(sigma.clone()), &cfg()).unwrap().value;
        let tgt = poe(&*a, &*target_path(sigma.clone()), &cfg()).unwrap().value;
        let res = (cm.t(&k.value) * src).dist(&tgt);
        assert!(res < 1e-6, "amp {amp}: {res}");
    }
}

#[test]
fn soe_splits_vertically_and_horizontally() {
    let (cm, a, b) = spin_pair(0.8);
    let sigma = spin_bigon(0.7);
    let whole = soe_raw(&*cm, &*a, &*b, &*sigma, &cfg()).unwrap().value;
    let bottom = soe_raw(&*cm, &*a, &*b, &*restrict_s(sigma.clone(), 0.0, 0.5), &cfg()).unwrap().value;
    let top = soe_raw(&*cm, &*a, &*b, &*restrict_s(sigma.clone(), 0.5, 1.0), &cfg()).unwrap().value;
    assert!(whole.dist(&(top * bottom)) < 1e-6);

    let second: SharedBigon = Arc::new(FnBigon(|s: f64, t: f64| {
        let c = 0.5 * (s - 0.5) * (std::f64::consts::PI * t).sin();
        let dc = 0.5 * (std::f64::consts::PI * t).sin();
        let dct = 0.5 * (s - 0.5) * std::f64::consts::PI * (std::f64::consts::PI * t).cos();
        ([1.1 + 0.1 * t - c, 1.1 + 0.6 * t + c, 0.0], [-dc, dc, 0.0], [0.1 - dct, 0.6 + dct, 0.0])
    }));
    let first = spin_bigon(0.7);
    let glued = hcompose(second.clone(), first.clone());
    let k = soe_raw(&*cm, &*a, &*b, &*glued, &cfg()).unwrap().value;
    let k1 = soe_raw(&*cm, &*a, &*b, &*first, &cfg()).unwrap().value;
    let k2 = soe_raw(&*cm, &*a, &*b, &*second, &cfg()).unwrap().value;
    let g2 = poe(&*a, &*source_path(second), &cfg()).unwrap().value;
    let res = k.dist(&(k2 * cm.alpha(&g2, &k1)));
    assert!(res < 1e-6, "{res}");
}

#[test]
fn soe_is_reparameterization_invariant() {
    let (cm, a, b) = spin_pair(1.0);
    let sigma = spin_bigon(0.5);
    let k = soe_raw(&*cm, &*a, &*b, &*sigma, &cfg()).unwrap().value;
    for r in [Reparam::SmoothStep, Reparam::Quadratic(-0.4)] {
        let ks = soe_raw(&*cm, &*a, &*b, &*reparam_s(sigma.clone(), r), &cfg()).unwrap().value;
        let kt = soe_raw(&*cm, &*a, &*b, &*reparam_t(sigma.clone(), r), &cfg()).unwrap().value;
        assert!(k.dist(&ks) < 1e-6 && k.dist(&kt) < 1e-6, "{r:?}");
    }
    let flat = degenerate_bigon(wiggle());
    let k = soe_raw(&*cm, &*a, &*b, &*flat, &cfg()).unwrap().value;
    assert!(k.dist(&CMat::identity(2)) < 1e-12);
}

#[test]
fn config_validation() {
    assert!(cfg().with_steps(7).validate().is_err());
    assert!(cfg().with_steps(10).validate().is_ok());
    assert!(IntegratorConfig { surface_steps: 9, ..cfg() }.validate().is_err());
}

fn calibration_input() -> CalibrationInput {
    let (cm, a, b) = spin_pair(1.0);
    let case = SurfaceCase { cm: cm.clone(), a: a.clone(), b: b.clone(), sigma: spin_bigon(0.7) };
    let (acm, aa, ab) = abelian("0.9");
    let second: SharedBigon = Arc::new(FnBigon(|s: f64, t: f64| {
        let c = 0.4 * (s - 0.5) * (std::f64::consts::PI * t).sin();
        let dc = 0.4 * (std::f64::consts::PI * t).sin();
        let dct = 0.4 * (s - 0.5) * std::f64::consts::PI * (std::f64::consts::PI * t).cos();
        ([1.1 + 0.2 * t + c, 1.1 - 0.3 * t + c, 0.0], [dc, dc, 0.0], [0.2 + dct, -0.3 + dct, 0.0])
    }));
    CalibrationInput {
        target_source: vec![case.clone()],
        abelian: vec![AbelianCase { case: SurfaceCase { cm: acm, a: aa, b: ab, sigma: diamond() }, integral: -0.9 }],
        vertical: vec![case.clone()],
        horizontal: vec![HorizontalCase { case, second }],
    }
}

#[test]
fn calibration_selects_the_frozen_conventions() {
    let c = calibrate(&calibration_input(), &cfg(), &Check::ALL).unwrap();
    assert_eq!(c.outcome, Ok(CONVENTIONS));
    assert_eq!(c.evidence.iter().filter(|e| e.passed).count(), 1);
}

#[test]
fn abelian_check_alone_is_ambiguous() {
    let c = calibrate(&calibration_input(), &cfg(), &[Check::Abelian]).unwrap();
    assert!(matches!(c.outcome, Err(gerbe_core::Error::NoUniqueConvention { passing: 4 })));
}

#[test]
fn scaled_b_scales_the_abelian_log() {
    let (cm, a, bf) = abelian("0.25");
    let k = soe_raw(&*cm, &*a, &*bf, &*diamond(), &cfg()).unwrap().value;
    let k2 = k * k;
    let (cm2, _, bf2) = abelian("0.5");
    let kk = soe_raw(&*cm2, &*a, &*bf2, &*diamond(), &cfg()).unwrap().value;
    assert!(kk.dist(&k2) < 1e-12);
}
