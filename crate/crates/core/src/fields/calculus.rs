//! Exterior calculus by central differences.
//!
//! Brackets of forms follow `[A∧B](X,Y) = [A(X), B(Y)] − [A(Y), B(X)]`, so
//! `½[A∧A](X,Y) = [A(X), A(Y)]`. The mixed action term is
//! `α_*(A∧φ)(X,Y) = α_*(A(X), φ(Y)) − α_*(A(Y), φ(X))`.

use super::{vadd, vnorm, vscale, Chart, OneForm, TwoForm, Vec3};
use crate::error::{Error, Result};
use crate::lie::{coeffs_add, coeffs_sub, Coeffs, Group, TOLERANCES};
use crate::two_group::CrossedModule;

/// Fourth-order central derivative of a coefficient-valued function at 0.
pub fn stencil(f: &dyn Fn(f64) -> Coeffs, h: f64) -> Coeffs {
    let a = f(h);
    let b = f(-h);
    let c = f(2.0 * h);
    let d = f(-2.0 * h);
    a.iter()
        .zip(&b)
        .zip(c.iter().zip(&d))
        .map(|((a, b), (c, d))| (8.0 * (a - b) - (c - d)) / (12.0 * h))
        .collect()
}

/// Fail if the stencil around `p` along any of `dirs` leaves the chart.
pub fn check_stencil(chart: &Chart, p: &Vec3, dirs: &[&Vec3]) -> Result<()> {
    let h = TOLERANCES.fd_step;
    for v in dirs {
        for k in [-2.0, 2.0] {
            let q = vadd(p, &vscale(v, k * h));
            if !chart.contains(&q, 0.0) {
                return Err(Error::BoundaryProximity { point: *p });
            }
        }
    }
    if !chart.contains(p, 2.0 * h) && dirs.iter().any(|v| vnorm(v) > 0.0) {
        return Err(Error::BoundaryProximity { point: *p });
    }
    Ok(())
}

/// `dA(X, Y) = X[A(Y)] − Y[A(X)]` without the boundary check.
pub fn d_fd_unchecked(form: &dyn OneForm, p: &Vec3, x: &Vec3, y: &Vec3) -> Coeffs {
    let h = TOLERANCES.fd_step;
    let xa = stencil(&|e| form.eval(&vadd(p, &vscale(x, e)), y), h);
    let ya = stencil(&|e| form.eval(&vadd(p, &vscale(y, e)), x), h);
    coeffs_sub(&xa, &ya)
}

/// Exterior derivative of a 1-form by central differences (step 1e-4).
pub fn d_fd(form: &dyn OneForm, chart: &Chart, p: &Vec3, x: &Vec3, y: &Vec3) -> Result<Coeffs> {
    check_stencil(chart, p, &[x, y])?;
    Ok(d_fd_unchecked(form, p, x, y))
}

/// `dB(X,Y,Z) = X[B(Y,Z)] − Y[B(X,Z)] + Z[B(X,Y)]` without boundary check.
pub fn d2_fd_unchecked(form: &dyn TwoForm, p: &Vec3, x: &Vec3, y: &Vec3, z: &Vec3) -> Coeffs {
    let h = TOLERANCES.fd_step;
    let dx = stencil(&|e| form.eval(&vadd(p, &vscale(x, e)), y, z), h);
    let dy = stencil(&|e| form.eval(&vadd(p, &vscale(y, e)), x, z), h);
    let dz = stencil(&|e| form.eval(&vadd(p, &vscale(z, e)), x, y), h);
    coeffs_add(&coeffs_sub(&dx, &dy), &dz)
}

/// `[A∧B](X,Y)` for two forms valued in the same algebra.
pub fn wedge_bracket(alg: &Group, a: &dyn OneForm, b: &dyn OneForm, p: &Vec3, x: &Vec3, y: &Vec3) -> Coeffs {
    let l = alg.bracket_coeffs(&a.eval(p, x), &b.eval(p, y));
    let r = alg.bracket_coeffs(&a.eval(p, y), &b.eval(p, x));
    coeffs_sub(&l, &r)
}

/// `α_*(A∧φ)(X,Y)`.
pub fn wedge_action(cm: &dyn CrossedModule, a: &dyn OneForm, phi: &dyn OneForm, p: &Vec3, x: &Vec3, y: &Vec3) -> Coeffs {
    let l = cm.a1(&a.eval(p, x), &phi.eval(p, y));
    let r = cm.a1(&a.eval(p, y), &phi.eval(p, x));
    coeffs_sub(&l, &r)
}

/// `dA + ½[A∧A] − t_*(B)` evaluated on `(X, Y)`, without boundary check.
pub fn fake_curvature_unchecked(cm: &dyn CrossedModule, a: &dyn OneForm, b: &dyn TwoForm, p: &Vec3, x: &Vec3, y: &Vec3) -> Coeffs {
    let g = cm.g();
    let da = d_fd_unchecked(a, p, x, y);
    let br = g.bracket_coeffs(&a.eval(p, x), &a.eval(p, y));
    coeffs_sub(&coeffs_add(&da, &br), &cm.t_star(&b.eval(p, x, y)))
}

pub fn fake_curvature(
    cm: &dyn CrossedModule,
    chart: &Chart,
    a: &dyn OneForm,
    b: &dyn TwoForm,
    p: &Vec3,
    x: &Vec3,
    y: &Vec3,
) -> Result<Coeffs> {
    check_stencil(chart, p, &[x, y])?;
    Ok(fake_curvature_unchecked(cm, a, b, p, x, y))
}

/// `dB + α_*(A∧B)` on `(X, Y, Z)`.
#[allow(clippy::too_many_arguments)]
pub fn curvature3(
    cm: &dyn CrossedModule,
    chart: &Chart,
    a: &dyn OneForm,
    b: &dyn TwoForm,
    p: &Vec3,
    x: &Vec3,
    y: &Vec3,
    z: &Vec3,
) -> Result<Coeffs> {
    check_stencil(chart, p, &[x, y, z])?;
    let db = d2_fd_unchecked(b, p, x, y, z);
    let act = coeffs_add(
        &coeffs_sub(&cm.a1(&a.eval(p, x), &b.eval(p, y, z)), &cm.a1(&a.eval(p, y), &b.eval(p, x, z))),
        &cm.a1(&a.eval(p, z), &b.eval(p, x, y)),
    );
    Ok(coeffs_add(&db, &act))
}

/// Coordinate basis vector `e_i`.
pub fn unit(i: usize) -> Vec3 {
    let mut v = [0.0; 3];
    v[i] = 1.0;
    v
}

/// Largest fake-curvature norm over a probe grid and coordinate pairs.
pub fn fake_curvature_probe(cm: &dyn CrossedModule, chart: &Chart, a: &dyn OneForm, b: &dyn TwoForm, per_axis: usize) -> f64 {
    let d = chart.dim();
    let margin = 4.0 * TOLERANCES.fd_step;
    let mut worst = 0.0f64;
    for p in chart.grid(per_axis, margin) {
        for i in 0..d {
            for j in (i + 1)..d {
                let v = fake_curvature_unchecked(cm, a, b, &p, &unit(i), &unit(j));
                let n = crate::lie::coeffs_norm(&v);
                if !(n <= worst) {
                    worst = n;
                }
            }
        }
    }
    worst
}
