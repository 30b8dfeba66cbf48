use gerbe_core::fields::paths::*;
use gerbe_core::fields::*;
use gerbe_core::functor::*;
use gerbe_core::gauge::*;
use gerbe_core::transport::IntegratorConfig;
use gerbe_core::two_group::{Instance, SharedCm};
use std::sync::Arc;

fn chart() -> Chart {
    Chart::new(2, &[-1.5, -1.5], &[1.5, 1.5]).unwrap()
}

fn cfg() -> IntegratorConfig {
    IntegratorConfig { n_steps: 400, surface_steps: 80, ..Default::default() }
}

fn spin_connection() -> GammaConnection {
    let cm = Instance::Spin.build();
    let a = ExprOneForm::parse(cm.g(), &chart(), &[vec!["0.6", "0.3*x2", "sin(x1)"], vec!["x1*x2", "-0.4", "0.2*cos(x2)"]]).unwrap();
    make_fake_flat(&cm, &chart(), Arc::new(a)).unwrap()
}

fn spin_gauge(src: &GammaConnection, k: f64) -> GaugeTransformation {
    let cm = src.cm().clone();
    let s = k.to_string();
    let g = Arc::new(ExprGroupMap::parse(cm.g(), &chart(), &[&format!("{s}*x1"), "0.3*x2*x1", "cos(x2) - 0.5"]).unwrap());
    let phi = ExprOneForm::parse(cm.h(), &chart(), &[vec!["x2", &s, "-0.3*x1"], vec!["0.3*sin(x1)", "x1*x2", "0.1"]]).unwrap();
    GaugeTransformation::from_source(src, g, Arc::new(phi)).unwrap()
}

fn assert_passes(rep: &AxiomReport) {
    assert!(!rep.rows.is_empty());
    assert!(rep.passed(), "{rep:#?}");
}

#[test]
fn sample_family_is_well_formed() {
    let fam = SampleFamily::generate(&chart(), 3, 11);
    assert_eq!(fam.paths.len(), 3);
    for (a, b) in &fam.path_pairs {
        assert_eq!(a.point(1.0), b.point(0.0));
    }
    for (s1, s2) in &fam.vertical_pairs {
        let top = target_path(s1.clone());
        let bottom = source_path(s2.clone());
        for u in [0.0, 0.3, 0.8, 1.0] {
            assert!(vnorm(&vsub(&top.point(u), &bottom.point(u))) < 1e-14);
        }
    }
    for (s1, s2) in &fam.horizontal_pairs {
        assert!(vnorm(&vsub(&s1.point(0.4, 1.0), &s2.point(0.7, 0.0))) < 1e-14);
    }
    for b in &fam.bigons {
        assert!(boundary_check_bigon(&**b, None).passed(1e-12));
        require_bigon_in_chart(&**b, &chart(), "bigon").unwrap();
    }
    let again = SampleFamily::generate(&chart(), 3, 11);
    assert_eq!(again.paths[2].point(0.37), fam.paths[2].point(0.37));
}

#[test]
fn fake_flat_spin_connection_is_a_functor() {
    let c = spin_connection();
    let fam = SampleFamily::generate(&chart(), 2, 7);
    assert_passes(&functor_suite(&c, &fam, &IntegratorConfig::default(), 1e-5).unwrap());
}

#[test]
fn non_fake_flat_data_breaks_target_source() {
    let c = spin_connection();
    let b = ExprTwoForm::parse(c.cm().h(), &chart(), &[((0, 1), vec!["0.5", "x1", "0"])]).unwrap();
    let bad = GammaConnection::new(c.cm().clone(), chart(), c.a().clone(), Arc::new(b)).unwrap();
    assert!(!bad.is_fake_flat());
    let fam = SampleFamily::generate(&chart(), 2, 7);
    let rep = functor_suite(&bad, &fam, &cfg(), 1e-5).unwrap();
    assert!(rep.get("target_source").unwrap() > 1e-3, "{rep:#?}");
    assert!(rep.get("path_composition").unwrap() < 1e-5);
}

#[test]
fn identity_gauge_is_a_strict_transformation() {
    let c = spin_connection();
    let fam = SampleFamily::generate(&chart(), 2, 5);
    let id = GaugeTransformation::identity(&c);
    let rep = gauge_suite(&id, &fam, &cfg(), 1e-6).unwrap();
    assert_passes(&rep);
    for g in &fam.paths {
        let r = rho_path(&id, &**g, &cfg()).unwrap();
        assert!(r.h().dist(&c.cm().h().identity()) < 1e-12);
    }
}

#[test]
fn spin_gauge_is_pseudonatural() {
    let c = spin_connection();
    let gt = spin_gauge(&c, 0.6);
    let fam = SampleFamily::generate(&chart(), 2, 8);
    assert_passes(&gauge_suite(&gt, &fam, &cfg(), 1e-5).unwrap());
}

#[test]
fn composite_gauge_transports_compose() {
    let c = spin_connection();
    let g1 = spin_gauge(&c, 0.5);
    let g2 = spin_gauge(g1.target(), -0.3);
    let both = compose_gauge(&g2, &g1).unwrap();
    let cm = c.cm();
    let fam = SampleFamily::generate(&chart(), 3, 21);
    for g in &fam.paths {
        let (h, _) = g1.hg_phi(&**g, &cfg()).unwrap().value;
        let (h2, _) = g2.hg_phi(&**g, &cfg()).unwrap().value;
        let (hc, _) = both.hg_phi(&**g, &cfg()).unwrap().value;
        let want = cm.alpha(&g2.g.value(&g.point(1.0)), &h) * h2;
        assert!(hc.dist(&want) < 1e-6, "{}", hc.dist(&want));
    }
}

#[test]
fn solved_modification_satisfies_its_square() {
    let c = spin_connection();
    let gt = spin_gauge(&c, 0.6);
    let a = Arc::new(ExprGroupMap::parse(c.cm().h(), &chart(), &["0.4*x1", "x2^2 - 0.2", "0.3"]).unwrap());
    let a2 = Gauge2Transformation::from_source(a, gt.clone()).unwrap();
    let fam = SampleFamily::generate(&chart(), 3, 4);
    assert_passes(&modification_suite(&a2, &fam, &cfg(), 1e-5).unwrap());
}

#[test]
fn perturbed_modification_fails_its_square() {
    let c = spin_connection();
    let gt = spin_gauge(&c, 0.6);
    let a: Map = Arc::new(ExprGroupMap::parse(c.cm().h(), &chart(), &["0.4*x1", "x2^2 - 0.2", "0.3"]).unwrap());
    let a2 = Gauge2Transformation::from_source(a, gt.clone()).unwrap();
    let shifted: Map = Arc::new(ExprGroupMap::parse(c.cm().h(), &chart(), &["0.4*x1 + 0.1*x2", "x2^2 - 0.2", "0.3"]).unwrap());
    let bad = Gauge2Transformation::new(shifted, gt.clone(), a2.target().clone()).unwrap();
    let fam = SampleFamily::generate(&chart(), 3, 4);
    assert!(!modification_suite(&bad, &fam, &cfg(), 1e-5).unwrap().passed());
}

#[test]
fn trivial_h_gives_identity_two_cells() {
    let cm: SharedCm = Instance::OrdinarySo3.build();
    let a = ExprOneForm::parse(cm.g(), &chart(), &[vec!["0.2", "x2", "0"], vec!["0", "0.1", "x1"]]).unwrap();
    let c = GammaConnection::new(cm.clone(), chart(), Arc::new(a), zero_two_form(cm.h())).unwrap();
    let fam = SampleFamily::generate(&chart(), 2, 3);
    for s in &fam.bigons {
        let m = f_bigon(&c, s, &cfg()).unwrap();
        assert!(m.h().dist(&cm.h().identity()) < 1e-14);
        assert!(m.g().dist(&f_path(&c, &*source_path(s.clone()), &cfg()).unwrap()) < 1e-14);
    }
}

#[test]
fn bigons_with_common_boundary_agree_in_two_dimensions() {
    let c = spin_connection();
    let fam = SampleFamily::generate(&chart(), 2, 13);
    for (s1, s2) in &fam.vertical_pairs {
        let long = vcompose(s2.clone(), s1.clone());
        let short = interpolate(source_path(s1.clone()), target_path(s2.clone()));
        let k1 = c.soe(&*long, &IntegratorConfig::default()).unwrap().value;
        let k2 = c.soe(&*short, &IntegratorConfig::default()).unwrap().value;
        assert!(k1.dist(&k2) < 1e-5, "{}", k1.dist(&k2));
    }
}

#[test]
fn thin_homotopies_are_invisible() {
    let c = spin_connection();
    let fam = SampleFamily::generate(&chart(), 2, 17);
    assert_passes(&thin_invariance_suite(&c, &fam, &DEFAULT_REPARAMS, &IntegratorConfig::default(), 1e-5).unwrap());
}

#[test]
fn report_keeps_the_worst_residual() {
    let mut r = AxiomReport::default();
    r.push("x", 1e-9, 1e-6);
    r.push("x", 1e-7, 1e-6);
    r.push("x", 1e-8, 1e-6);
    r.push("y", f64::NAN, 1.0);
    assert_eq!(r.get("x"), Some(1e-7));
    assert!(!r.passed());
    assert_eq!(r.rows.len(), 2);
}
