mod common;

use common::*;
use gerbe_core::bundle::total::*;
use gerbe_core::fields::paths::*;
use gerbe_core::fields::*;
use gerbe_core::gauge::GammaConnection;
use gerbe_core::lie::coeffs_dist;
use gerbe_core::linalg::CMat;
use gerbe_core::two_group::SharedCm;

fn forms() -> TrivialTotalForms {
    trivial_total_forms(&spin_connection())
}

fn base() -> SharedPath {
    bulged([-0.6, -0.3, 0.0], [0.5, 0.4, 0.0], 0.3)
}

fn base2() -> SharedPath {
    bulged([0.5, 0.4, 0.0], [0.2, -0.7, 0.0], -0.2)
}

fn g_path(cm: &SharedCm, k: f64) -> impl Fn(f64) -> CMat + Send + Sync + Clone + 'static {
    group_path(cm.g(), &[0.4 * k, -0.3, 0.7], &[0.1, 0.5 * k, -0.2])
}

fn h_path(cm: &SharedCm, k: f64) -> impl Fn(f64) -> CMat + Send + Sync + Clone + 'static {
    group_path(cm.h(), &[-0.5, 0.2 * k, 0.3], &[0.3 * k, -0.1, 0.4])
}

fn close(a: &CMat, b: &CMat) -> f64 {
    a.dist(b)
}

/// A random-looking morphism path over `base()`.
fn rho(cm: &SharedCm, k: f64) -> MorPath {
    MorPath::lift(base(), h_path(cm, k), g_path(cm, k))
}

/// A morphism path whose source is horizontal.
fn rho_with_horizontal_source(f: &TrivialTotalForms, k: f64) -> MorPath {
    let cm = f.cm().clone();
    let beta = ObjPath::lift(base(), g_path(&cm, k));
    let corr = horizontalize_object(f, &beta, &fine()).unwrap().correction;
    let g = g_path(&cm, k);
    MorPath::lift(base(), h_path(&cm, k), move |u| g(u) * corr.value(u))
}

/// `ρ` and `s(ρ)` both horizontal.
fn horizontal_rho(f: &TrivialTotalForms, k: f64) -> MorPath {
    let r = rho_with_horizontal_source(f, k);
    let hc = horizontalize_morphism(f, &r, &fine()).unwrap().correction;
    let one = f.cm().g().identity();
    r.right(f.cm(), hc.as_fn(), constant(one))
}

#[test]
fn equivariance_holds_and_detects_a_dropped_term() {
    let f = forms();
    let rep = check_equivariance(&f, 20, 3);
    for r in &rep.rows {
        assert!(r.passed(), "{} = {}", r.name, r.residual);
    }
    let bad = check_equivariance(&f.without_maurer_cartan(), 20, 3);
    assert!(bad.get("omega_a_equivariance").unwrap() > 1e-3);
}

#[test]
fn zero_connection_gives_maurer_cartan() {
    let cm = spin();
    let zero = GammaConnection::new(cm.clone(), chart(), zero_one_form(cm.g()), zero_two_form(cm.h())).unwrap();
    let f = trivial_total_forms(&zero);
    let gp = g_path(&cm, 1.0);
    let beta = ObjPath::lift(base(), gp.clone());
    let (p, t) = beta.eval(0.37);
    let expected = cm.g().expand_unchecked(&(p.g.inverse().unwrap() * t.dg));
    assert!(coeffs_dist(&f.omega_a(&p, &t), &expected) < 1e-12);
}

#[test]
fn omega_at_identity_fibre_point_is_the_base_form() {
    let f = forms();
    let cm = f.cm().clone();
    let m = [0.3, -0.2, 0.0];
    let v = [0.7, 0.1, 0.0];
    let p = ObjPoint { m, g: cm.g().identity() };
    let t = ObjTangent { v, dg: CMat::zeros(cm.g().identity().n()) };
    assert!(coeffs_dist(&f.omega_a(&p, &t), &f.connection().a().eval(&m, &v)) < 1e-14);
    let g = g_path(&cm, 1.0)(0.8);
    let w = [0.0, 1.0, 0.0];
    let direct = cm.alpha_star(&g.inverse().unwrap(), &f.connection().b().eval(&m, &v, &w));
    let got = f.omega_c(&ObjPoint { m, g }, &v, &w);
    let sum: Vec<f64> = direct.iter().zip(&got).map(|(a, b)| a + b).collect();
    assert!(sum.iter().map(|x| x.abs()).fold(0.0, f64::max) < 1e-14);
}

#[test]
fn horizontalizing_a_section_recovers_the_transport() {
    let f = forms();
    let cm = f.cm().clone();
    let one = cm.g().identity();
    let beta = ObjPath::lift(base(), constant(one));
    let hz = horizontalize_object(&f, &beta, &fine()).unwrap();
    assert!(hz.residual < 1e-6, "{}", hz.residual);
    let kappa = f.connection().poe(&*base(), &cfg()).unwrap().value;
    assert!(close(&hz.correction.last(), &kappa) < 1e-8);
    let half = f.connection().poe(&*restrict_path(base(), 0.0, 0.5), &cfg()).unwrap().value;
    assert!(close(&hz.correction.value(0.5), &half) < 1e-8);

    let corr = hz.correction.clone();
    let hor = ObjPath::lift(base(), move |u| corr.value(u));
    let again = horizontalize_object(&f, &hor, &fine()).unwrap();
    assert!(close(&again.correction.last(), &one) < 1e-7);

    let g0 = g_path(&cm, 1.0)(1.0);
    let moved = hor.right(constant(g0));
    assert!(object_horizontality(&f, &moved) < 1e-6);
    let again = horizontalize_object(&f, &moved, &fine()).unwrap();
    for u in [0.25, 0.5, 1.0] {
        assert!(close(&again.correction.value(u), &one) < 1e-7);
    }
}

#[test]
fn general_object_path_is_horizontalized() {
    let f = forms();
    let beta = ObjPath::lift(base(), g_path(f.cm(), 1.3));
    let hz = horizontalize_object(&f, &beta, &fine()).unwrap();
    assert!(hz.residual < 1e-6, "{}", hz.residual);
    assert!(object_horizontality(&f, &beta) > 1e-2);
}

#[test]
fn morphism_horizontalization_and_calculus() {
    let f = forms();
    let cm = f.cm().clone();
    let one_g = cm.g().identity();

    let beta = ObjPath::lift(base(), g_path(&cm, 1.0));
    let id = beta.identity(&cm);
    let hz = horizontalize_morphism(&f, &id, &fine()).unwrap();
    assert!(close(&hz.correction.last(), &cm.h().identity()) < 1e-12);
    assert!(morphism_horizontality(&f, &id) < 1e-9);

    let r = rho(&cm, 0.8);
    assert!(morphism_horizontality(&f, &r) > 1e-2);
    let hz = horizontalize_morphism(&f, &r, &fine()).unwrap();
    assert!(hz.residual < 1e-6, "{}", hz.residual);
    let hor = r.right(&cm, hz.correction.as_fn(), constant(one_g));

    // inverse stays horizontal
    assert!(morphism_horizontality(&f, &hor.inverse(&cm)) < 1e-6);

    // a G-path acts without spoiling horizontality
    let one_h = cm.h().identity();
    assert!(morphism_horizontality(&f, &hor.right(&cm, constant(one_h), g_path(&cm, 0.5))) < 1e-6);

    // source and target horizontality agree
    let (s, t) = (object_horizontality(&f, &hor.source()), object_horizontality(&f, &hor.target(&cm)));
    assert!((s - t).abs() < 1e-6, "{s} vs {t}");

    // pointwise composite of horizontal paths
    let tgt = hor.target(&cm);
    let second = {
        let h = h_path(&cm, -0.6);
        let tgt = tgt.clone();
        MorPath::from_fn(move |u| {
            let p = tgt.point(u);
            MorPoint { m: p.m, h: h(u), g: p.g }
        })
    };
    let hz2 = horizontalize_morphism(&f, &second, &fine()).unwrap();
    let second = second.right(&cm, hz2.correction.as_fn(), constant(one_g));
    assert!(morphism_horizontality(&f, &second.after(&hor)) < 1e-6);
}

#[test]
fn constant_two_group_element_and_horizontality() {
    let f = forms();
    let cm = f.cm().clone();
    let (h0, g0) = (h_path(&cm, 2.0)(1.0), g_path(&cm, -1.0)(1.0));

    // with a horizontal source the action keeps ρ horizontal
    let both = horizontal_rho(&f, 0.6);
    assert!(morphism_horizontality(&f, &both) < 1e-6);
    assert!(morphism_horizontality(&f, &both.right(&cm, constant(h0), constant(g0))) < 1e-6);

    // otherwise the (α̃_h)_*(Ω^a(s_*ρ̇)) term of the equivariance law survives
    let r = rho(&cm, 0.8);
    let hz = horizontalize_morphism(&f, &r, &fine()).unwrap();
    let one_g = cm.g().identity();
    let hor = r.right(&cm, hz.correction.as_fn(), constant(one_g));
    let moved = hor.right(&cm, constant(h0), constant(g0));
    let gi = g0.inverse().unwrap();
    let mut size = 0.0f64;
    for u in [0.2, 0.45, 0.7, 0.9] {
        let (p, t) = hor.eval(u);
        let s_t = ObjTangent { v: t.v, dg: t.dg };
        let predicted = cm.alpha_star(&gi, &cm.a2_left(&h0, &f.omega_a(&p.source(), &s_t)));
        let (q, w) = moved.eval(u);
        let got = f.omega_b(&q, &w);
        assert!(coeffs_dist(&got, &predicted) < 1e-6, "{}", coeffs_dist(&got, &predicted));
        size = size.max(predicted.iter().map(|x| x.abs()).fold(0.0, f64::max));
    }
    assert!(size > 1e-2);
}

#[test]
fn h_omega_laws() {
    let f = forms();
    let cm = f.cm().clone();
    let c = cfg();
    let hinv = |m: CMat| m.inverse().unwrap();
    let one_h = cm.h().identity();
    let one_g = cm.g().identity();

    let beta = ObjPath::lift(base(), g_path(&cm, 1.0));
    assert!(close(&h_omega(&f, &beta.identity(&cm), &c).unwrap().value, &one_h) < 1e-12);

    let r = rho(&cm, 0.9);
    let hr = h_omega(&f, &r, &c).unwrap().value;
    assert!(close(&hr, &one_h) > 1e-2);

    // (a)
    let gp = g_path(&cm, 0.7);
    let moved = r.right(&cm, constant(one_h), gp.clone());
    let lhs = h_omega(&f, &moved, &c).unwrap().value;
    let rhs = cm.alpha(&hinv(gp(1.0)), &hr);
    assert!(close(&lhs, &rhs) < 1e-6, "(a) {}", close(&lhs, &rhs));

    // (b)
    let lhs = h_omega(&f, &r.inverse(&cm), &c).unwrap().value;
    assert!(close(&lhs, &hinv(hr)) < 1e-6, "(b) {}", close(&lhs, &hinv(hr)));

    // (c)
    let second = {
        let (h, tgt) = (h_path(&cm, -1.1), r.target(&cm));
        MorPath::from_fn(move |u| {
            let p = tgt.point(u);
            MorPoint { m: p.m, h: h(u), g: p.g }
        })
    };
    let lhs = h_omega(&f, &second.after(&r), &c).unwrap().value;
    let rhs = h_omega(&f, &second, &c).unwrap().value * hr;
    assert!(close(&lhs, &rhs) < 1e-6, "(c) {}", close(&lhs, &rhs));

    // (d)
    let end = r.point(1.0);
    let next = {
        let (h, g) = (h_path(&cm, 0.4), g_path(&cm, 0.3));
        MorPath::lift(base2(), move |u| end.h * h(u), move |u| end.g * g(u))
    };
    let lhs = h_omega(&f, &r.then(&next), &c).unwrap().value;
    let poe_s = poe_omega_a(&f, &next.source(), &c).unwrap().value;
    let rhs = h_omega(&f, &next, &c).unwrap().value * cm.alpha(&poe_s, &hr);
    assert!(close(&lhs, &rhs) < 1e-6, "(d) {}", close(&lhs, &rhs));

    // (e)
    let rs = rho_with_horizontal_source(&f, 0.6);
    assert!(object_horizontality(&f, &rs.source()) < 1e-6);
    let lhs = h_omega(&f, &rs, &c).unwrap().value;
    let rhs = poe_omega_b(&f, &rs, &c).unwrap().value;
    assert!(close(&lhs, &rhs) < 1e-6, "(e) {}", close(&lhs, &rhs));

    // (f), (g)
    let hor = horizontal_rho(&f, 0.6);
    assert!(close(&h_omega(&f, &hor, &c).unwrap().value, &one_h) < 1e-6);
    let k = h_path(&cm, 1.4);
    let lhs = h_omega(&f, &hor.right(&cm, k.clone(), constant(one_g)), &c).unwrap().value;
    assert!(close(&lhs, &hinv(k(1.0))) < 1e-6, "(f) {}", close(&lhs, &hinv(k(1.0))));
}

#[test]
fn poe_of_total_forms() {
    let f = forms();
    let cm = f.cm().clone();
    let c = cfg();
    let beta = ObjPath::lift(base(), g_path(&cm, 1.0));
    let gp = g_path(&cm, -0.8);
    let lhs = poe_omega_a(&f, &beta.right(gp.clone()), &c).unwrap().value;
    let rhs = gp(1.0).inverse().unwrap() * poe_omega_a(&f, &beta, &c).unwrap().value;
    assert!(close(&lhs, &rhs) < 1e-7, "{}", close(&lhs, &rhs));
    let id = poe_omega_b(&f, &beta.identity(&cm), &c).unwrap().value;
    assert!(close(&id, &cm.h().identity()) < 1e-12);
}

fn sigma() -> SharedBigon {
    interpolate(base(), bulged([-0.6, -0.3, 0.0], [0.5, 0.4, 0.0], -0.4))
}

fn section(sig: SharedBigon) -> ObjBigon {
    let one = spin().g().identity();
    ObjBigon::from_fn(move |s, t| ObjPoint { m: sig.point(s, t), g: one })
}

#[test]
fn surface_transport_on_the_total_space() {
    let f = forms();
    let cm = f.cm().clone();
    let c = cfg();
    let base_soe = f.connection().soe(&*sigma(), &c).unwrap().value;
    assert!(close(&base_soe, &cm.h().identity()) > 1e-3);

    let sec = section(sigma());
    let lifted = soe_total(&f, &sec, &c).unwrap().value;
    assert!(close(&lifted, &base_soe) < 1e-6, "{}", close(&lifted, &base_soe));

    let g0 = g_path(&cm, 1.0)(1.0);
    let moved = soe_total(&f, &sec.right(move |_, _| g0), &c).unwrap().value;
    let expected = cm.alpha(&g0.inverse().unwrap(), &base_soe);
    assert!(close(&moved, &expected) < 1e-6);

    // a genuine bigon in G: Θ(s, 0) = 1, Θ(s, 1) = exp X
    let gg = cm.g().clone();
    let theta = move |s: f64, t: f64| gg.exp_coeffs(&[0.5 * t + 0.4 * s * t * (1.0 - t), -0.3 * t, 0.2 * t - 0.6 * s * t * (1.0 - t)]);
    let end = theta(0.0, 1.0);
    let th = theta.clone();
    let warped = sec.right(move |s, t| th(s, t) * th(1.0 - s, t));
    let warped_soe = soe_total(&f, &warped, &c).unwrap().value;
    let turned = soe_total(&f, &warped.right(theta), &c).unwrap().value;
    let expected = cm.alpha(&end.inverse().unwrap(), &warped_soe);
    assert!(close(&turned, &expected) < 1e-6, "{}", close(&turned, &expected));

    let flat = ObjPath::lift(base(), g_path(&cm, 1.0));
    let degenerate = ObjBigon::from_fn(move |_, t| flat.point(t));
    let d = soe_total(&f, &degenerate, &c).unwrap().value;
    assert!(close(&d, &cm.h().identity()) < 1e-6);

    let open = ObjBigon::from_fn(move |s, t| ObjPoint { m: [s, t, 0.0], g: spin().g().identity() });
    assert!(soe_total(&f, &open, &c).is_err());
}

#[test]
fn morphism_bigon_square() {
    let f = forms();
    let cm = f.cm().clone();
    let c = cfg();
    let sig = sigma();
    let (gh, hh) = (cm.g().clone(), cm.h().clone());
    // Ψ(s, t) = (Σ(s, t), h(s, t), g(s, t)) with s-independent ends
    let psi = {
        let sig = sig.clone();
        MorBigon::from_fn(move |s, t| {
            let bump = s * t * (1.0 - t);
            MorPoint {
                m: sig.point(s, t),
                h: hh.exp_coeffs(&[0.4 * t - 0.8 * bump, 0.3 * t * t + 0.5 * bump, -0.2 * t]),
                g: gh.exp_coeffs(&[0.3 * t + 0.7 * bump, -0.5 * t, 0.2 * t * t - 0.4 * bump]),
            }
        })
    };
    let gg = cm.g().clone();
    let theta = move |s: f64, t: f64| gg.exp_coeffs(&[0.5 * t + 0.4 * s * t * (1.0 - t), -0.3 * t, 0.2 * t - 0.6 * s * t * (1.0 - t)]);
    let end = theta(0.0, 1.0);
    let th = theta.clone();
    let src_moved = psi.source().right(move |s, t| th(s, t).inverse().unwrap());
    let lhs = cm.alpha(&end.inverse().unwrap(), &soe_total(&f, &src_moved, &c).unwrap().value)
        * h_omega(&f, &psi.slice(0.0), &c).unwrap().value.inverse().unwrap();
    let rhs = h_omega(&f, &psi.slice(1.0), &c).unwrap().value.inverse().unwrap() * soe_total(&f, &psi.target(&cm), &c).unwrap().value;
    assert!(close(&lhs, &rhs) < 1e-5, "{}", close(&lhs, &rhs));
}

#[test]
fn total_velocity_matches_base_velocity() {
    let cm = spin();
    let beta = ObjPath::lift(base(), g_path(&cm, 1.0));
    for u in [0.1, 0.5, 0.9] {
        let (_, t) = beta.eval(u);
        let v = base().eval(u).1;
        assert!(vnorm(&vsub(&t.v, &v)) < 1e-9);
    }
}

#[test]
fn law_suites_pass_on_a_random_family() {
    use gerbe_core::bundle::laws::*;
    use gerbe_core::functor::SampleFamily;
    let f = forms();
    let fam = SampleFamily::generate(&chart(), 1, 11);
    for rep in [
        horizontality_suite(&f, &fam, &fine(), None).unwrap(),
        h_omega_suite(&f, &fam, &fine(), None).unwrap(),
        surface_suite(&f, &fam, &cfg(), None).unwrap(),
    ] {
        for r in &rep.rows {
            assert!(r.passed(), "{} = {:e} (tol {:e})", r.name, r.residual, r.tolerance);
        }
    }
}
