#![allow(dead_code)]

use gerbe_core::fields::paths::*;
use gerbe_core::fields::*;
use gerbe_core::gauge::*;
use gerbe_core::linalg::CMat;
use gerbe_core::transport::IntegratorConfig;
use gerbe_core::two_group::{Instance, SharedCm};
use std::f64::consts::PI;
use std::sync::Arc;

pub fn chart() -> Chart {
    Chart::new(2, &[-1.5, -1.5], &[1.5, 1.5]).unwrap()
}

pub fn cfg() -> IntegratorConfig {
    IntegratorConfig { n_steps: 400, surface_steps: 80, ..Default::default() }
}

pub fn spin_connection_on(c: &Chart) -> GammaConnection {
    let cm = Instance::Spin.build();
    let a = ExprOneForm::parse(cm.g(), c, &[vec!["0.6", "0.3*x2", "sin(x1)"], vec!["x1*x2", "-0.4", "0.2*cos(x2)"]]).unwrap();
    make_fake_flat(&cm, c, Arc::new(a)).unwrap()
}

pub fn spin_connection() -> GammaConnection {
    spin_connection_on(&chart())
}

/// Smooth path from `x` to `y` with a sideways bulge and sitting ends.
pub fn bulged(x: Vec3, y: Vec3, bulge: f64) -> SharedPath {
    Arc::new(FnPath(move |u: f64| {
        let (w, dw) = smooth_step(u);
        let d = vsub(&y, &x);
        let perp = [-d[1], d[0], 0.0];
        let s = bulge * (PI * w).sin();
        let ds = bulge * PI * (PI * w).cos();
        let p = vadd(&vadd(&x, &vscale(&d, w)), &vscale(&perp, s));
        let v = vscale(&vadd(&d, &vscale(&perp, ds)), dw);
        (p, v)
    }))
}

/// `u ↦ exp(w X + w² Y)` with `w` the smooth step of `u`.
pub fn group_path(grp: &gerbe_core::lie::Group, x: &[f64], y: &[f64]) -> impl Fn(f64) -> CMat + Send + Sync + Clone + 'static {
    let (grp, x, y) = (grp.clone(), x.to_vec(), y.to_vec());
    move |u: f64| {
        let w = smooth_step(u).0;
        let c: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a * w + b * w * w).collect();
        grp.exp_coeffs(&c)
    }
}

pub fn spin() -> SharedCm {
    Instance::Spin.build()
}

pub fn fine() -> IntegratorConfig {
    IntegratorConfig::default()
}
