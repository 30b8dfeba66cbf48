//! Integrators working on sampled generators.
//!
//! Everything here sees only closures `τ ↦ coefficients`; the geometric
//! layer in the parent module builds those closures from forms and paths.

use alloc::vec::Vec;

use crate::lie::{coeffs_add, coeffs_scale, coeffs_zero, Coeffs, Group};
use crate::linalg::CMat;
use crate::two_group::CrossedModule;

use super::Scheme;

/// Integrate `ġ = −X(τ) g`, `g(0) = 1` over `[0, 1]` in `n` steps.
///
/// When `nodes` is given, the value at every node `k/n` is pushed.
pub fn march(group: &Group, n: usize, scheme: Scheme, gen: &dyn Fn(f64) -> Coeffs, mut nodes: Option<&mut Vec<CMat>>) -> CMat {
    let dt = 1.0 / n as f64;
    let mut g = group.identity();
    if let Some(v) = nodes.as_deref_mut() {
        v.push(g);
    }
    if group.dim() == 0 {
        if let Some(v) = nodes {
            v.extend((0..n).map(|_| g));
        }
        return g;
    }
    for k in 0..n {
        let t0 = k as f64 * dt;
        g = match scheme {
            Scheme::CfMidpoint => {
                let x = gen(t0 + 0.5 * dt);
                group.exp_coeffs(&coeffs_scale(&x, -dt)) * g
            }
            Scheme::Rk4Projected => {
                let f = |t: f64, m: &CMat| -(group.reconstruct(&gen(t)) * *m);
                let k1 = f(t0, &g);
                let k2 = f(t0 + 0.5 * dt, &(g + k1.scale_re(0.5 * dt)));
                let k3 = f(t0 + 0.5 * dt, &(g + k2.scale_re(0.5 * dt)));
                let k4 = f(t0 + dt, &(g + k3.scale_re(dt)));
                g + (k1 + k2.scale_re(2.0) + k3.scale_re(2.0) + k4).scale_re(dt / 6.0)
            }
        };
        g = group.project(&g);
        if let Some(v) = nodes.as_deref_mut() {
            v.push(g);
        }
    }
    g
}

/// Richardson combination of a fine and a coarse result, projected back to
/// the group, with `|fine − coarse|` as the error estimate.
pub fn extrapolate(group: &Group, scheme: Scheme, fine: &CMat, coarse: &CMat) -> (CMat, f64) {
    let order = match scheme {
        Scheme::CfMidpoint => 2,
        Scheme::Rk4Projected => 4,
    };
    let w = (1u32 << order) as f64;
    let m = (fine.scale_re(w) - *coarse).scale_re(1.0 / (w - 1.0));
    (group.project(&m), fine.dist(coarse))
}

/// Poe in `H ⋊ G` of `τ ↦ (Y(τ), X(τ)) ∈ 𝔥 ⋊ 𝔤`.
///
/// Solved in the interaction frame `h = α(g, h̃)` with
/// `dh̃/dτ = −(α_{g⁻¹})_*(Y) h̃`, which is equivalent to the coupled system
/// `ġ = −X g`, `ḣ = −(Y + a2R(h, X)) h` and needs only the action maps.
///
/// When `nodes` is given, the `H`-component at every node `k/n` is pushed.
pub fn semidirect_march(
    cm: &dyn CrossedModule,
    n: usize,
    scheme: Scheme,
    gen: &dyn Fn(f64) -> (Coeffs, Coeffs),
    mut nodes: Option<&mut Vec<CMat>>,
) -> (CMat, CMat) {
    let (gg, hg) = (cm.g(), cm.h());
    let dt = 1.0 / n as f64;
    let mut g = gg.identity();
    let mut ht = hg.identity();
    let inv = |m: &CMat| m.inverse().unwrap_or_else(|| gg.identity());
    if let Some(v) = nodes.as_deref_mut() {
        v.push(hg.identity());
    }
    for k in 0..n {
        let t0 = k as f64 * dt;
        match scheme {
            Scheme::CfMidpoint => {
                let (y, x) = gen(t0 + 0.5 * dt);
                let half = gg.exp_coeffs(&coeffs_scale(&x, -0.5 * dt));
                let gm = half * g;
                if hg.dim() > 0 {
                    let yt = cm.alpha_star(&inv(&gm), &y);
                    ht = hg.project(&(hg.exp_coeffs(&coeffs_scale(&yt, -dt)) * ht));
                }
                g = gg.project(&(half * gm));
            }
            Scheme::Rk4Projected => {
                let f = |t: f64, gm: &CMat, hm: &CMat| {
                    let (y, x) = gen(t);
                    let dg = -(gg.reconstruct(&x) * *gm);
                    let dh = if hg.dim() > 0 {
                        -(hg.reconstruct(&cm.alpha_star(&inv(gm), &y)) * *hm)
                    } else {
                        CMat::zeros(hm.n())
                    };
                    (dg, dh)
                };
                let (a1, b1) = f(t0, &g, &ht);
                let (a2, b2) = f(t0 + 0.5 * dt, &(g + a1.scale_re(0.5 * dt)), &(ht + b1.scale_re(0.5 * dt)));
                let (a3, b3) = f(t0 + 0.5 * dt, &(g + a2.scale_re(0.5 * dt)), &(ht + b2.scale_re(0.5 * dt)));
                let (a4, b4) = f(t0 + dt, &(g + a3.scale_re(dt)), &(ht + b3.scale_re(dt)));
                g = gg.project(&(g + (a1 + a2.scale_re(2.0) + a3.scale_re(2.0) + a4).scale_re(dt / 6.0)));
                ht = hg.project(&(ht + (b1 + b2.scale_re(2.0) + b3.scale_re(2.0) + b4).scale_re(dt / 6.0)));
            }
        }
        if let Some(v) = nodes.as_deref_mut() {
            v.push(hg.project(&cm.alpha(&g, &ht)));
        }
    }
    (hg.project(&cm.alpha(&g, &ht)), g)
}

/// One sample of a surface integrand at `(outer, inner)`:
/// the connection along the inner direction and the 2-form on
/// `(∂_inner, ∂_outer)`.
pub struct SurfaceSample {
    pub a_inner: Coeffs,
    pub b: Coeffs,
}

/// Two-fold iterated exponential on an `m × m` midpoint grid.
///
/// For each outer midpoint the inner transports `U(τ)` from `τ` to the end
/// of the inner path are accumulated backwards, and
/// `𝒜 = sign · ∫ (α_U)_* B dτ` is integrated by the midpoint rule. The
/// outer flow is `k̇ = −𝒜 k`.
pub fn surface_march(cm: &dyn CrossedModule, m: usize, sign: f64, sample: &dyn Fn(f64, f64) -> SurfaceSample) -> CMat {
    let (gg, hg) = (cm.g(), cm.h());
    if hg.dim() == 0 {
        return hg.identity();
    }
    let d = 1.0 / m as f64;
    let mut k = hg.identity();
    let mut halves: Vec<CMat> = Vec::with_capacity(m);
    let mut bs: Vec<Coeffs> = Vec::with_capacity(m);
    let trivial_g = gg.dim() == 0;
    for j in 0..m {
        let outer = (j as f64 + 0.5) * d;
        halves.clear();
        bs.clear();
        for i in 0..m {
            let smp = sample(outer, (i as f64 + 0.5) * d);
            if !trivial_g {
                halves.push(gg.exp_coeffs(&coeffs_scale(&smp.a_inner, -0.5 * d)));
            }
            bs.push(smp.b);
        }
        let mut acc = coeffs_zero(hg.dim());
        if trivial_g {
            for b in &bs {
                acc = coeffs_add(&acc, b);
            }
        } else {
            let mut u = gg.identity();
            for i in (0..m).rev() {
                let um = u * halves[i];
                acc = coeffs_add(&acc, &cm.alpha_star(&um, &bs[i]));
                u = um * halves[i];
            }
        }
        let step = hg.exp_coeffs(&coeffs_scale(&acc, -sign * d * d));
        k = hg.project(&(step * k));
    }
    k
}
