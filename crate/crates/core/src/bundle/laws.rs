//! Randomized law suites for the trivial-bundle forms.
//!
//! Each suite draws its total-space paths from a [`SampleFamily`] on the
//! connection's chart, lifted by group paths `u ↦ exp(w X + w² Y)` with
//! `w` the smooth step of `u` and `X, Y` drawn from the seed.

use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::total::*;
use crate::error::Result;
use crate::fields::paths::{reparam_path, smooth_step, Reparam, SharedBigon, SharedPath};
use crate::functor::{AxiomReport, SampleFamily};
use crate::lie::{coeffs_dist, Group};
use crate::linalg::CMat;
use crate::transport::IntegratorConfig;
use crate::two_group::SharedCm;

/// Row tolerances used when the caller does not override them.
pub const HORIZONTAL_TOLERANCE: f64 = 1e-6;
pub const H_OMEGA_TOLERANCE: f64 = 1e-6;
pub const POE_OMEGA_TOLERANCE: f64 = 1e-7;
pub const SURFACE_TOLERANCE: f64 = 1e-6;
pub const SQUARE_TOLERANCE: f64 = 1e-5;

type GroupPath = Arc<dyn Fn(f64) -> CMat + Send + Sync>;

fn group_path(grp: &Group, x: Vec<f64>, y: Vec<f64>) -> GroupPath {
    let grp = grp.clone();
    Arc::new(move |u: f64| {
        let w = smooth_step(u).0;
        let c: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a * w + b * w * w).collect();
        grp.exp_coeffs(&c)
    })
}

struct Draw {
    rng: ChaCha8Rng,
}

impl Draw {
    fn path(&mut self, grp: &Group) -> GroupPath {
        let x = grp.random_coeffs(&mut self.rng, 0.8).to_vec();
        let y = grp.random_coeffs(&mut self.rng, 0.5).to_vec();
        group_path(grp, x, y)
    }
    fn element(&mut self, grp: &Group) -> CMat {
        grp.random_matrix(&mut self.rng, 0.8)
    }
}

fn sitting(p: &SharedPath) -> SharedPath {
    reparam_path(p.clone(), Reparam::SmoothStep)
}

fn lift_obj(base: &SharedPath, g: &GroupPath) -> ObjPath {
    let g = g.clone();
    ObjPath::lift(base.clone(), move |u| g(u))
}

fn lift_mor(base: &SharedPath, h: &GroupPath, g: &GroupPath) -> MorPath {
    let (h, g) = (h.clone(), g.clone());
    MorPath::lift(base.clone(), move |u| h(u), move |u| g(u))
}

/// `ρ` re-based so that its source is horizontal.
fn with_horizontal_source(forms: &TrivialTotalForms, base: &SharedPath, h: &GroupPath, g: &GroupPath, cfg: &IntegratorConfig) -> Result<MorPath> {
    let corr = horizontalize_object(forms, &lift_obj(base, g), cfg)?.correction;
    let (h, g) = (h.clone(), g.clone());
    Ok(MorPath::lift(base.clone(), move |u| h(u), move |u| g(u) * corr.value(u)))
}

/// Same-target second factor for pointwise composition.
fn over_target(cm: &SharedCm, rho: &MorPath, h: &GroupPath) -> MorPath {
    let (tgt, h) = (rho.target(cm), h.clone());
    MorPath::from_fn(move |u| {
        let p = tgt.point(u);
        MorPoint { m: p.m, h: h(u), g: p.g }
    })
}

/// Horizontalization of object and morphism paths and the calculus of
/// horizontal morphism paths: identities, inverses, `G`-path action,
/// source/target exchange and pointwise composition.
pub fn horizontality_suite(forms: &TrivialTotalForms, fam: &SampleFamily, cfg: &IntegratorConfig, tol: Option<f64>) -> Result<AxiomReport> {
    let tol = tol.unwrap_or(HORIZONTAL_TOLERANCE);
    let cm = forms.cm().clone();
    let (gg, hh) = (cm.g().clone(), cm.h().clone());
    let one_g = gg.identity();
    let one_h = hh.identity();
    let mut draw = Draw { rng: ChaCha8Rng::seed_from_u64(fam.seed ^ 0x6f62_6a65) };
    let mut rep = AxiomReport::default();
    for base in fam.paths.iter().map(sitting) {
        let (gp, hp, hp2, gp2) = (draw.path(&gg), draw.path(&hh), draw.path(&hh), draw.path(&gg));

        let beta = lift_obj(&base, &gp);
        let hz = horizontalize_object(forms, &beta, cfg)?;
        rep.push("object_horizontalization", hz.residual, tol);
        let corr = hz.correction.clone();
        let hor = ObjPath::lift(base.clone(), {
            let gp = gp.clone();
            move |u| gp(u) * corr.value(u)
        });
        let again = horizontalize_object(forms, &hor, cfg)?;
        rep.push("object_horizontal_is_fixed", again.correction.last().dist(&one_g), tol);

        let id = beta.identity(&cm);
        rep.push("identity_is_horizontal", morphism_horizontality(forms, &id), tol);

        let r = lift_mor(&base, &hp, &gp);
        let hz = horizontalize_morphism(forms, &r, cfg)?;
        rep.push("morphism_horizontalization", hz.residual, tol);
        let hor = r.right(&cm, hz.correction.as_fn(), constant(one_g));
        rep.push("inverse_is_horizontal", morphism_horizontality(forms, &hor.inverse(&cm)), tol);
        let gp2c = gp2.clone();
        rep.push(
            "g_path_action_is_horizontal",
            morphism_horizontality(forms, &hor.right(&cm, constant(one_h), move |u| gp2c(u))),
            tol,
        );
        let (s, t) = (object_horizontality(forms, &hor.source()), object_horizontality(forms, &hor.target(&cm)));
        rep.push("source_target_exchange", (s - t).abs(), tol);
        let second = over_target(&cm, &hor, &hp2);
        let hz2 = horizontalize_morphism(forms, &second, cfg)?;
        let second = second.right(&cm, hz2.correction.as_fn(), constant(one_g));
        rep.push("composite_is_horizontal", morphism_horizontality(forms, &second.after(&hor)), tol);

        // a constant 2-group element keeps ρ horizontal when s(ρ) is
        let rs = with_horizontal_source(forms, &base, &hp, &gp, cfg)?;
        let hc = horizontalize_morphism(forms, &rs, cfg)?.correction;
        let both = rs.right(&cm, hc.as_fn(), constant(one_g));
        let (h0, g0) = (draw.element(&hh), draw.element(&gg));
        rep.push("constant_action_is_horizontal", morphism_horizontality(forms, &both.right(&cm, constant(h0), constant(g0))), tol);
        // otherwise Ω^b picks up exactly (α_{g⁻¹})_*(α̃_h)_*(Ω^a(s_*ρ̇))
        let moved = hor.right(&cm, constant(h0), constant(g0));
        let gi = g0.inverse().unwrap_or(one_g);
        for u in [0.2, 0.45, 0.7, 0.9] {
            let (p, t) = hor.eval(u);
            let s_t = ObjTangent { v: t.v, dg: t.dg };
            let predicted = cm.alpha_star(&gi, &cm.a2_left(&h0, &forms.omega_a(&p.source(), &s_t)));
            let (q, w) = moved.eval(u);
            rep.push("constant_action_defect", coeffs_dist(&forms.omega_b(&q, &w), &predicted), tol);
        }
    }
    Ok(rep)
}

/// Laws of `h_Ω` and of `poe_{Ω^a}`, `poe_{Ω^b}`.
pub fn h_omega_suite(forms: &TrivialTotalForms, fam: &SampleFamily, cfg: &IntegratorConfig, tol: Option<f64>) -> Result<AxiomReport> {
    let (tol, tol_poe) = match tol {
        Some(t) => (t, t),
        None => (H_OMEGA_TOLERANCE, POE_OMEGA_TOLERANCE),
    };
    let cm = forms.cm().clone();
    let (gg, hh) = (cm.g().clone(), cm.h().clone());
    let one_g = gg.identity();
    let one_h = hh.identity();
    let inv = |m: &CMat| m.inverse().unwrap_or(CMat::identity(m.n()));
    let mut draw = Draw { rng: ChaCha8Rng::seed_from_u64(fam.seed ^ 0x686f_6d65) };
    let mut rep = AxiomReport::default();
    for (first, next_base) in fam.path_pairs.iter() {
        let (base, base2) = (sitting(first), sitting(next_base));
        let (gp, hp) = (draw.path(&gg), draw.path(&hh));
        let r = lift_mor(&base, &hp, &gp);
        let hr = h_omega(forms, &r, cfg)?.value;

        let beta = lift_obj(&base, &gp);
        rep.push("h_omega_identity", h_omega(forms, &beta.identity(&cm), cfg)?.value.dist(&one_h), tol);

        let gq = draw.path(&gg);
        let gqc = gq.clone();
        let lhs = h_omega(forms, &r.right(&cm, constant(one_h), move |u| gqc(u)), cfg)?.value;
        rep.push("h_omega_g_path", lhs.dist(&cm.alpha(&inv(&gq(1.0)), &hr)), tol);

        let lhs = h_omega(forms, &r.inverse(&cm), cfg)?.value;
        rep.push("h_omega_inverse", lhs.dist(&inv(&hr)), tol);

        let second = over_target(&cm, &r, &draw.path(&hh));
        let lhs = h_omega(forms, &second.after(&r), cfg)?.value;
        rep.push("h_omega_pointwise", lhs.dist(&(h_omega(forms, &second, cfg)?.value * hr)), tol);

        let end = r.point(1.0);
        let (hn, gn) = (draw.path(&hh), draw.path(&gg));
        let next = MorPath::lift(base2.clone(), move |u| end.h * hn(u), move |u| end.g * gn(u));
        let lhs = h_omega(forms, &r.then(&next), cfg)?.value;
        let poe_s = poe_omega_a(forms, &next.source(), cfg)?.value;
        rep.push("h_omega_concatenation", lhs.dist(&(h_omega(forms, &next, cfg)?.value * cm.alpha(&poe_s, &hr))), tol);

        let rs = with_horizontal_source(forms, &base, &hp, &gp, cfg)?;
        let lhs = h_omega(forms, &rs, cfg)?.value;
        rep.push("h_omega_horizontal_source", lhs.dist(&poe_omega_b(forms, &rs, cfg)?.value), tol);

        let hc = horizontalize_morphism(forms, &rs, cfg)?.correction;
        let both = rs.right(&cm, hc.as_fn(), constant(one_g));
        rep.push("h_omega_horizontal", h_omega(forms, &both, cfg)?.value.dist(&one_h), tol);
        let k = draw.path(&hh);
        let kc = k.clone();
        let lhs = h_omega(forms, &both.right(&cm, move |u| kc(u), constant(one_g)), cfg)?.value;
        rep.push("h_omega_h_path", lhs.dist(&inv(&k(1.0))), tol);

        let gr = draw.path(&gg);
        let grc = gr.clone();
        let lhs = poe_omega_a(forms, &beta.right(move |u| grc(u)), cfg)?.value;
        rep.push("poe_omega_a_right_action", lhs.dist(&(inv(&gr(1.0)) * poe_omega_a(forms, &beta, cfg)?.value)), tol_poe);
        rep.push("poe_omega_b_identity", poe_omega_b(forms, &beta.identity(&cm), cfg)?.value.dist(&one_h), tol_poe);
    }
    Ok(rep)
}

fn section(sig: &SharedBigon, one: CMat) -> ObjBigon {
    let sig = sig.clone();
    ObjBigon::from_fn(move |s, t| ObjPoint { m: sig.point(s, t), g: one })
}

/// A bigon in `G` from 1 to `exp X`, with interior dependence on `s`.
fn group_bigon(grp: &Group, draw: &mut Draw) -> Arc<dyn Fn(f64, f64) -> CMat + Send + Sync> {
    let (x, y) = (grp.random_coeffs(&mut draw.rng, 0.6).to_vec(), grp.random_coeffs(&mut draw.rng, 0.6).to_vec());
    let grp = grp.clone();
    Arc::new(move |s: f64, t: f64| {
        let bump = s * t * (1.0 - t);
        let c: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a * t + b * bump).collect();
        grp.exp_coeffs(&c)
    })
}

/// Surface transport on the total space: canonical sections, right
/// translation by constant elements and by bigons in `G`, degenerate
/// bigons, and the square relating `soe_Ω` and `h_Ω` on a bigon of
/// morphisms.
pub fn surface_suite(forms: &TrivialTotalForms, fam: &SampleFamily, cfg: &IntegratorConfig, tol: Option<f64>) -> Result<AxiomReport> {
    let (tol, tol_square) = match tol {
        Some(t) => (t, t),
        None => (SURFACE_TOLERANCE, SQUARE_TOLERANCE),
    };
    let cm = forms.cm().clone();
    let (gg, hh) = (cm.g().clone(), cm.h().clone());
    let one_g = gg.identity();
    let inv = |m: &CMat| m.inverse().unwrap_or(CMat::identity(m.n()));
    let mut draw = Draw { rng: ChaCha8Rng::seed_from_u64(fam.seed ^ 0x7375_7266) };
    let mut rep = AxiomReport::default();
    for (sig, path) in fam.bigons.iter().zip(&fam.paths) {
        let base_soe = forms.connection().soe(&**sig, cfg)?.value;
        let sec = section(sig, one_g);
        rep.push("soe_total_section", soe_total(forms, &sec, cfg)?.value.dist(&base_soe), tol);

        let g0 = draw.element(&gg);
        let moved = soe_total(forms, &sec.right(move |_, _| g0), cfg)?.value;
        rep.push("soe_total_constant", moved.dist(&cm.alpha(&inv(&g0), &base_soe)), tol);

        let theta = group_bigon(&gg, &mut draw);
        let end = theta(0.0, 1.0);
        let th = theta.clone();
        let warped = sec.right(move |s, t| th(s, t) * th(1.0 - s, t));
        let warped_soe = soe_total(forms, &warped, cfg)?.value;
        let th = theta.clone();
        let turned = soe_total(forms, &warped.right(move |s, t| th(s, t)), cfg)?.value;
        rep.push("soe_total_g_bigon", turned.dist(&cm.alpha(&inv(&end), &warped_soe)), tol);

        let flat = lift_obj(&sitting(path), &draw.path(&gg));
        let degenerate = ObjBigon::from_fn(move |_, t| flat.point(t));
        rep.push("soe_total_degenerate", soe_total(forms, &degenerate, cfg)?.value.dist(&hh.identity()), tol);

        // Ψ(s, t) = (Σ(s, t), h(s, t), g(s, t)) with s-independent ends
        let (hb, gb) = (group_bigon(&hh, &mut draw), group_bigon(&gg, &mut draw));
        let psi = {
            let sig = sig.clone();
            MorBigon::from_fn(move |s, t| MorPoint { m: sig.point(s, t), h: hb(s, t), g: gb(s, t) })
        };
        let th = theta.clone();
        let src_moved = psi.source().right(move |s, t| inv(&th(s, t)));
        let lhs = cm.alpha(&inv(&end), &soe_total(forms, &src_moved, cfg)?.value) * inv(&h_omega(forms, &psi.slice(0.0), cfg)?.value);
        let rhs = inv(&h_omega(forms, &psi.slice(1.0), cfg)?.value) * soe_total(forms, &psi.target(&cm), cfg)?.value;
        rep.push("morphism_bigon_square", lhs.dist(&rhs), tol_square);
    }
    Ok(rep)
}
