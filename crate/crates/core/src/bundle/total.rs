//! The trivial bundle `M × Γ` with the connection induced by `(A, B)`.
//!
//! Objects are pairs `(m, g)`, morphisms are `(m, (h, g))` with source
//! `(m, g)` and target `(m, t(h) g)`. Paths and bigons in these spaces are
//! closures; their velocities come from fourth-order central differences.

use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fields::paths::SharedPath;
use crate::fields::{vscale, vsub, Vec3};
use crate::functor::AxiomReport;
use crate::gauge::{sample_points, GammaConnection};
use crate::lie::{central_derivative, coeffs_add, coeffs_dist, coeffs_norm, coeffs_scale, Coeffs};
use crate::linalg::CMat;
use crate::transport::{self, ArgOrder, IntegratorConfig, PrefixFlow, SurfaceSample, TransportResult, CONVENTIONS};
use crate::two_group::{CrossedModule, SharedCm};

/// Step of the central differences taken along total-space curves.
pub const CURVE_STEP: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObjPoint {
    pub m: Vec3,
    pub g: CMat,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObjTangent {
    pub v: Vec3,
    pub dg: CMat,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MorPoint {
    pub m: Vec3,
    pub h: CMat,
    pub g: CMat,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MorTangent {
    pub v: Vec3,
    pub dh: CMat,
    pub dg: CMat,
}

impl MorPoint {
    pub fn source(&self) -> ObjPoint {
        ObjPoint { m: self.m, g: self.g }
    }
    pub fn target(&self, cm: &dyn CrossedModule) -> ObjPoint {
        ObjPoint { m: self.m, g: cm.t(&self.h) * self.g }
    }
}

fn inv(m: &CMat) -> CMat {
    m.inverse().unwrap_or_else(|| CMat::identity(m.n()))
}

fn vec_derivative(f: &dyn Fn(f64) -> Vec3, u: f64, h: f64) -> Vec3 {
    let (a, b, c, d) = (f(u + h), f(u - h), f(u + 2.0 * h), f(u - 2.0 * h));
    let mut out = [0.0; 3];
    for i in 0..3 {
        out[i] = (8.0 * (a[i] - b[i]) - (c[i] - d[i])) / (12.0 * h);
    }
    out
}

type ObjFn = dyn Fn(f64) -> ObjPoint + Send + Sync;
type ObjEval = dyn Fn(f64) -> (ObjPoint, ObjTangent) + Send + Sync;
type MorFn = dyn Fn(f64) -> MorPoint + Send + Sync;
type MorEval = dyn Fn(f64) -> (MorPoint, MorTangent) + Send + Sync;

/// A path `[0, 1] → M × G`.
#[derive(Clone)]
pub struct ObjPath {
    point: Arc<ObjFn>,
    eval: Arc<ObjEval>,
}

impl ObjPath {
    /// Velocities by central differences of `f`.
    pub fn from_fn(f: impl Fn(f64) -> ObjPoint + Send + Sync + 'static) -> Self {
        let point: Arc<ObjFn> = Arc::new(f);
        let p2 = point.clone();
        let eval: Arc<ObjEval> = Arc::new(move |u| {
            let v = vec_derivative(&|s| p2(s).m, u, CURVE_STEP);
            let dg = central_derivative(&|s| p2(s).g, u, CURVE_STEP);
            (p2(u), ObjTangent { v, dg })
        });
        ObjPath { point, eval }
    }

    /// `u ↦ (γ(u), g(u))`.
    pub fn lift(base: SharedPath, g: impl Fn(f64) -> CMat + Send + Sync + 'static) -> Self {
        Self::from_fn(move |u| ObjPoint { m: base.point(u), g: g(u) })
    }

    pub fn point(&self, u: f64) -> ObjPoint {
        (self.point)(u)
    }

    pub fn eval(&self, u: f64) -> (ObjPoint, ObjTangent) {
        (self.eval)(u)
    }

    /// Pointwise right action `R(β, γ)`.
    pub fn right(&self, gamma: impl Fn(f64) -> CMat + Send + Sync + 'static) -> Self {
        let p = self.point.clone();
        Self::from_fn(move |u| {
            let x = p(u);
            ObjPoint { m: x.m, g: x.g * gamma(u) }
        })
    }

    /// The identity path `id_β` in the morphisms.
    pub fn identity(&self, cm: &SharedCm) -> MorPath {
        let p = self.point.clone();
        let one = cm.h().identity();
        MorPath::from_fn(move |u| {
            let x = p(u);
            MorPoint { m: x.m, h: one, g: x.g }
        })
    }
}

/// A path `[0, 1] → M × (H ⋊ G)`.
#[derive(Clone)]
pub struct MorPath {
    point: Arc<MorFn>,
    eval: Arc<MorEval>,
}

impl MorPath {
    pub fn from_fn(f: impl Fn(f64) -> MorPoint + Send + Sync + 'static) -> Self {
        let point: Arc<MorFn> = Arc::new(f);
        let p2 = point.clone();
        let eval: Arc<MorEval> = Arc::new(move |u| {
            let v = vec_derivative(&|s| p2(s).m, u, CURVE_STEP);
            let dh = central_derivative(&|s| p2(s).h, u, CURVE_STEP);
            let dg = central_derivative(&|s| p2(s).g, u, CURVE_STEP);
            (p2(u), MorTangent { v, dh, dg })
        });
        MorPath { point, eval }
    }

    /// `u ↦ (γ(u), (h(u), g(u)))`.
    pub fn lift(base: SharedPath, h: impl Fn(f64) -> CMat + Send + Sync + 'static, g: impl Fn(f64) -> CMat + Send + Sync + 'static) -> Self {
        Self::from_fn(move |u| MorPoint { m: base.point(u), h: h(u), g: g(u) })
    }

    pub fn point(&self, u: f64) -> MorPoint {
        (self.point)(u)
    }

    pub fn eval(&self, u: f64) -> (MorPoint, MorTangent) {
        (self.eval)(u)
    }

    pub fn source(&self) -> ObjPath {
        let p = self.point.clone();
        ObjPath::from_fn(move |u| p(u).source())
    }

    pub fn target(&self, cm: &SharedCm) -> ObjPath {
        let (p, cm) = (self.point.clone(), cm.clone());
        ObjPath::from_fn(move |u| p(u).target(&*cm))
    }

    /// Pointwise groupoid inverse `(h⁻¹, t(h) g)`.
    pub fn inverse(&self, cm: &SharedCm) -> Self {
        let (p, cm) = (self.point.clone(), cm.clone());
        Self::from_fn(move |u| {
            let x = p(u);
            MorPoint { m: x.m, h: inv(&x.h), g: cm.t(&x.h) * x.g }
        })
    }

    /// Pointwise composite `self ∘ first`; requires `s(self) = t(first)`.
    pub fn after(&self, first: &MorPath) -> Self {
        let (p1, p2) = (self.point.clone(), first.point.clone());
        Self::from_fn(move |u| {
            let (a, b) = (p1(u), p2(u));
            MorPoint { m: a.m, h: a.h * b.h, g: b.g }
        })
    }

    /// Pointwise right action by a path `(k, γ)` in `H ⋊ G`:
    /// `(h, g)·(k, γ) = (h α(g, k), g γ)`.
    pub fn right(&self, cm: &SharedCm, k: impl Fn(f64) -> CMat + Send + Sync + 'static, gamma: impl Fn(f64) -> CMat + Send + Sync + 'static) -> Self {
        let (p, cm) = (self.point.clone(), cm.clone());
        Self::from_fn(move |u| {
            let x = p(u);
            MorPoint { m: x.m, h: x.h * cm.alpha(&x.g, &k(u)), g: x.g * gamma(u) }
        })
    }

    /// Path composite `second * self`, each half run at double speed.
    pub fn then(&self, second: &MorPath) -> Self {
        let (a, b) = (self.clone(), second.clone());
        let (pa, pb) = (a.point.clone(), b.point.clone());
        let point: Arc<MorFn> = Arc::new(move |u| if u <= 0.5 { pa(2.0 * u) } else { pb(2.0 * u - 1.0) });
        let eval: Arc<MorEval> = Arc::new(move |u| {
            let (x, t) = if u <= 0.5 { a.eval(2.0 * u) } else { b.eval(2.0 * u - 1.0) };
            (x, MorTangent { v: vscale(&t.v, 2.0), dh: t.dh.scale_re(2.0), dg: t.dg.scale_re(2.0) })
        });
        MorPath { point, eval }
    }
}

type ObjFn2 = dyn Fn(f64, f64) -> ObjPoint + Send + Sync;

/// A bigon `[0, 1]² → M × G`; `(s, 0)` and `(s, 1)` must not depend on `s`.
#[derive(Clone)]
pub struct ObjBigon(Arc<ObjFn2>);

impl ObjBigon {
    pub fn from_fn(f: impl Fn(f64, f64) -> ObjPoint + Send + Sync + 'static) -> Self {
        ObjBigon(Arc::new(f))
    }

    pub fn point(&self, s: f64, t: f64) -> ObjPoint {
        (self.0)(s, t)
    }

    /// Point, `∂_s`, `∂_t`.
    pub fn eval(&self, s: f64, t: f64) -> (ObjPoint, ObjTangent, ObjTangent) {
        let f = &self.0;
        let ds = ObjTangent { v: vec_derivative(&|x| f(x, t).m, s, CURVE_STEP), dg: central_derivative(&|x| f(x, t).g, s, CURVE_STEP) };
        let dt = ObjTangent { v: vec_derivative(&|x| f(s, x).m, t, CURVE_STEP), dg: central_derivative(&|x| f(s, x).g, t, CURVE_STEP) };
        (f(s, t), ds, dt)
    }

    /// Pointwise right action by a bigon in `G`.
    pub fn right(&self, theta: impl Fn(f64, f64) -> CMat + Send + Sync + 'static) -> Self {
        let f = self.0.clone();
        Self::from_fn(move |s, t| {
            let x = f(s, t);
            ObjPoint { m: x.m, g: x.g * theta(s, t) }
        })
    }

    pub fn edge_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for t in [0.0, 1.0] {
            let a = self.point(0.0, t);
            for s in [0.25, 0.5, 1.0] {
                let b = self.point(s, t);
                worst = worst.max(crate::fields::vnorm(&vsub(&a.m, &b.m))).max(a.g.dist(&b.g));
            }
        }
        worst
    }
}

/// A bigon in the morphisms.
#[derive(Clone)]
pub struct MorBigon(Arc<dyn Fn(f64, f64) -> MorPoint + Send + Sync>);

impl MorBigon {
    pub fn from_fn(f: impl Fn(f64, f64) -> MorPoint + Send + Sync + 'static) -> Self {
        MorBigon(Arc::new(f))
    }

    pub fn point(&self, s: f64, t: f64) -> MorPoint {
        (self.0)(s, t)
    }

    /// The path `t ↦ Ψ(s, t)`.
    pub fn slice(&self, s: f64) -> MorPath {
        let f = self.0.clone();
        MorPath::from_fn(move |t| f(s, t))
    }

    pub fn source(&self) -> ObjBigon {
        let f = self.0.clone();
        ObjBigon::from_fn(move |s, t| f(s, t).source())
    }

    pub fn target(&self, cm: &SharedCm) -> ObjBigon {
        let (f, cm) = (self.0.clone(), cm.clone());
        ObjBigon::from_fn(move |s, t| f(s, t).target(&*cm))
    }
}

/// The forms `Ω^a`, `Ω^b`, `Ω^c` of the trivial bundle with connection `(A, B)`.
#[derive(Clone)]
pub struct TrivialTotalForms {
    conn: GammaConnection,
    mc_weight: f64,
}

pub fn trivial_total_forms(conn: &GammaConnection) -> TrivialTotalForms {
    TrivialTotalForms { conn: conn.clone(), mc_weight: 1.0 }
}

impl TrivialTotalForms {
    pub fn connection(&self) -> &GammaConnection {
        &self.conn
    }

    pub fn cm(&self) -> &SharedCm {
        self.conn.cm()
    }

    /// A deliberately wrong `Ω^a` without its `g*θ` term, for negative controls.
    pub fn without_maurer_cartan(&self) -> Self {
        TrivialTotalForms { conn: self.conn.clone(), mc_weight: 0.0 }
    }

    /// `Ad_g⁻¹(A(v)) + g⁻¹ ġ`.
    pub fn omega_a(&self, p: &ObjPoint, t: &ObjTangent) -> Coeffs {
        let gg = self.cm().g();
        let gi = inv(&p.g);
        let ad = gg.adjoint_coeffs(&gi, &self.conn.a().eval(&p.m, &t.v));
        if self.mc_weight == 0.0 {
            return ad;
        }
        coeffs_add(&ad, &coeffs_scale(&gg.expand_unchecked(&(gi * t.dg)), self.mc_weight))
    }

    /// `(α_g⁻¹)_*((α̃_h)_*(A(v)) + h⁻¹ ḣ)`.
    pub fn omega_b(&self, p: &MorPoint, t: &MorTangent) -> Coeffs {
        let cm = self.cm();
        let hh = cm.h();
        if hh.dim() == 0 {
            return Coeffs::new();
        }
        let inner = coeffs_add(&cm.a2_left(&p.h, &self.conn.a().eval(&p.m, &t.v)), &hh.expand_unchecked(&(inv(&p.h) * t.dh)));
        cm.alpha_star(&inv(&p.g), &inner)
    }

    /// `−(α_g⁻¹)_*(B(v, w))`.
    pub fn omega_c(&self, p: &ObjPoint, v: &Vec3, w: &Vec3) -> Coeffs {
        let cm = self.cm();
        coeffs_scale(&cm.alpha_star(&inv(&p.g), &self.conn.b().eval(&p.m, v, w)), -1.0)
    }
}

fn random_group<R: Rng>(cm: &dyn CrossedModule, rng: &mut R, which_h: bool) -> (CMat, Coeffs) {
    let grp = if which_h { cm.h() } else { cm.g() };
    (grp.exp_coeffs(&grp.random_coeffs(rng, 1.0)), grp.random_coeffs(rng, 1.0))
}

fn rand_vec<R: Rng>(rng: &mut R) -> Vec3 {
    [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]
}

/// Residuals of the three equivariance identities of `Ω` under the right
/// `Γ`-action and of `t*Ω^a − s*Ω^a = t_*(Ω^b)`. Pullbacks along the action
/// are taken by central differences of one-parameter curves.
pub fn check_equivariance(forms: &TrivialTotalForms, n_samples: usize, seed: u64) -> AxiomReport {
    let cm = forms.cm().clone();
    let (gg, hh) = (cm.g(), cm.h());
    let chart = forms.conn.chart().clone();
    let dim = chart.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xe9u64);
    let mut rep = AxiomReport::default();
    let tol = 1e-5;
    for (m, x, y) in sample_points(&chart, n_samples, seed) {
        let mut v = rand_vec(&mut rng);
        v[dim..].iter_mut().for_each(|c| *c = 0.0);
        let (g, xg) = random_group(&*cm, &mut rng, false);
        let (g2, yg) = random_group(&*cm, &mut rng, false);
        let (h, zh) = random_group(&*cm, &mut rng, true);
        let (h2, zh2) = random_group(&*cm, &mut rng, true);
        let curve_g = |e: f64| g * gg.exp_coeffs(&coeffs_scale(&xg, e));
        let curve_g2 = |e: f64| g2 * gg.exp_coeffs(&coeffs_scale(&yg, e));
        let curve_h = |e: f64| h * hh.exp_coeffs(&coeffs_scale(&zh, e));
        let curve_h2 = |e: f64| h2 * hh.exp_coeffs(&coeffs_scale(&zh2, e));

        let base = ObjPoint { m, g };
        let base_t = ObjTangent { v, dg: g * gg.reconstruct(&xg) };
        let moved = ObjPoint { m, g: g * g2 };
        let moved_t = ObjTangent { v, dg: central_derivative(&|e| curve_g(e) * curve_g2(e), 0.0, CURVE_STEP) };
        let lhs = forms.omega_a(&moved, &moved_t);
        let rhs = coeffs_add(&gg.adjoint_coeffs(&inv(&g2), &forms.omega_a(&base, &base_t)), &yg);
        rep.push("omega_a_equivariance", coeffs_dist(&lhs, &rhs), tol);

        let rho = MorPoint { m, h, g };
        let rho_t = MorTangent { v, dh: h * hh.reconstruct(&zh), dg: g * gg.reconstruct(&xg) };
        let moved = MorPoint { m, h: h * cm.alpha(&g, &h2), g: g * g2 };
        let moved_t = MorTangent {
            v,
            dh: central_derivative(&|e| curve_h(e) * cm.alpha(&curve_g(e), &curve_h2(e)), 0.0, CURVE_STEP),
            dg: moved_t.dg,
        };
        let lhs = forms.omega_b(&moved, &moved_t);
        let inner = coeffs_add(
            &coeffs_add(&hh.adjoint_coeffs(&inv(&h2), &forms.omega_b(&rho, &rho_t)), &cm.a2_left(&h2, &forms.omega_a(&base, &base_t))),
            &zh2,
        );
        let rhs = cm.alpha_star(&inv(&g2), &inner);
        rep.push("omega_b_equivariance", coeffs_dist(&lhs, &rhs), tol);

        let lhs = forms.omega_c(&ObjPoint { m, g: g * g2 }, &x, &y);
        let rhs = cm.alpha_star(&inv(&g2), &forms.omega_c(&base, &x, &y));
        rep.push("omega_c_equivariance", coeffs_dist(&lhs, &rhs), tol);

        let tgt = rho.target(&*cm);
        let tgt_t = ObjTangent { v, dg: central_derivative(&|e| cm.t(&curve_h(e)) * curve_g(e), 0.0, CURVE_STEP) };
        let delta = crate::lie::coeffs_sub(&forms.omega_a(&tgt, &tgt_t), &forms.omega_a(&base, &base_t));
        rep.push("anchor_difference", coeffs_dist(&delta, &cm.t_star(&forms.omega_b(&rho, &rho_t))), tol);
    }
    rep
}

/// A flow known at the integrator nodes, read between nodes by cubic
/// Hermite interpolation and projected back to the group.
#[derive(Clone)]
pub struct DenseFlow {
    group: crate::lie::Group,
    nodes: Arc<Vec<f64>>,
    values: Arc<Vec<CMat>>,
    slopes: Arc<Vec<CMat>>,
    pub error_estimate: f64,
}

impl DenseFlow {
    fn new(group: &crate::lie::Group, flow: PrefixFlow, slope: impl Fn(f64, &CMat) -> CMat) -> Self {
        let slopes = flow.nodes.iter().zip(&flow.values).map(|(&u, v)| slope(u, v)).collect();
        DenseFlow {
            group: group.clone(),
            nodes: Arc::new(flow.nodes),
            values: Arc::new(flow.values),
            slopes: Arc::new(slopes),
            error_estimate: flow.error_estimate,
        }
    }

    pub fn last(&self) -> CMat {
        *self.values.last().expect("flow has nodes")
    }

    pub fn value(&self, u: f64) -> CMat {
        let n = self.nodes.len() - 1;
        let du = 1.0 / n as f64;
        let k = (crate::math::floor(u / du) as isize).clamp(0, n as isize - 1) as usize;
        let s = (u - self.nodes[k]) / du;
        let (s2, s3) = (s * s, s * s * s);
        let m = self.values[k].scale_re(2.0 * s3 - 3.0 * s2 + 1.0)
            + self.slopes[k].scale_re(du * (s3 - 2.0 * s2 + s))
            + self.values[k + 1].scale_re(-2.0 * s3 + 3.0 * s2)
            + self.slopes[k + 1].scale_re(du * (s3 - s2));
        self.group.project(&m)
    }

    pub fn as_fn(&self) -> impl Fn(f64) -> CMat + Send + Sync + 'static {
        let me = self.clone();
        move |u| me.value(u)
    }
}

/// Correction path together with the horizontality of the corrected path.
#[derive(Clone)]
pub struct Horizontalization {
    pub correction: DenseFlow,
    /// Largest norm of the relevant form along the corrected path.
    pub residual: f64,
}

const POST_SAMPLES: usize = 64;

fn post_nodes() -> impl Iterator<Item = f64> {
    (0..=POST_SAMPLES).map(|k| k as f64 / POST_SAMPLES as f64)
}

/// The path `g` with `g(0) = 1` making `R(β, g)` horizontal.
pub fn horizontalize_object(forms: &TrivialTotalForms, beta: &ObjPath, cfg: &IntegratorConfig) -> Result<Horizontalization> {
    let gg = forms.cm().g().clone();
    let gen = |u: f64| {
        let (p, t) = beta.eval(u);
        forms.omega_a(&p, &t)
    };
    let flow = transport::poe_prefix_gen(&gg, &gen, cfg)?;
    let correction = DenseFlow::new(&gg, flow, |u, g| -(gg.reconstruct(&gen(u)) * *g));
    let hor = beta.right(correction.as_fn());
    let residual = post_nodes().map(|u| {
        let (p, t) = hor.eval(u);
        coeffs_norm(&forms.omega_a(&p, &t))
    });
    Ok(Horizontalization { correction, residual: residual.fold(0.0, f64::max) })
}

fn morphism_generator<'a>(forms: &'a TrivialTotalForms, rho: &'a MorPath) -> impl Fn(f64) -> (Coeffs, Coeffs) + 'a {
    move |u| {
        let (p, t) = rho.eval(u);
        let s = ObjTangent { v: t.v, dg: t.dg };
        (forms.omega_b(&p, &t), forms.omega_a(&p.source(), &s))
    }
}

/// The path `h` with `h(0) = 1` making `R(ρ, (h, 1))` horizontal:
/// `ḣ = −Ω^b(ρ̇) h − (α_h)_*(Ω^a(s_*ρ̇))`.
pub fn horizontalize_morphism(forms: &TrivialTotalForms, rho: &MorPath, cfg: &IntegratorConfig) -> Result<Horizontalization> {
    let cm = forms.cm().clone();
    let hh = cm.h().clone();
    let gen = morphism_generator(forms, rho);
    let flow = transport::semidirect_prefix_gen(&*cm, &gen, cfg)?;
    let correction = DenseFlow::new(&hh, flow, |u, h| {
        if hh.dim() == 0 {
            return CMat::zeros(h.n());
        }
        let (y, x) = gen(u);
        -(hh.reconstruct(&coeffs_add(&y, &cm.a2_right(h, &x))) * *h)
    });
    let one = cm.g().identity();
    let hor = rho.right(&cm, correction.as_fn(), move |_| one);
    let residual = post_nodes().map(|u| {
        let (p, t) = hor.eval(u);
        coeffs_norm(&forms.omega_b(&p, &t))
    });
    Ok(Horizontalization { correction, residual: residual.fold(0.0, f64::max) })
}

/// Largest `|Ω^a(β̇)|` along an object path.
pub fn object_horizontality(forms: &TrivialTotalForms, beta: &ObjPath) -> f64 {
    post_nodes().map(|u| {
        let (p, t) = beta.eval(u);
        coeffs_norm(&forms.omega_a(&p, &t))
    }).fold(0.0, f64::max)
}

/// Largest `|Ω^b(ρ̇)|` along a morphism path.
pub fn morphism_horizontality(forms: &TrivialTotalForms, rho: &MorPath) -> f64 {
    post_nodes().map(|u| {
        let (p, t) = rho.eval(u);
        coeffs_norm(&forms.omega_b(&p, &t))
    }).fold(0.0, f64::max)
}

/// `poe_{Ω^a}(β)`.
pub fn poe_omega_a(forms: &TrivialTotalForms, beta: &ObjPath, cfg: &IntegratorConfig) -> Result<TransportResult<CMat>> {
    let gen = |u: f64| {
        let (p, t) = beta.eval(u);
        forms.omega_a(&p, &t)
    };
    transport::poe_gen(forms.cm().g(), &gen, cfg)
}

/// `poe_{Ω^b}(ρ)`.
pub fn poe_omega_b(forms: &TrivialTotalForms, rho: &MorPath, cfg: &IntegratorConfig) -> Result<TransportResult<CMat>> {
    let gen = |u: f64| {
        let (p, t) = rho.eval(u);
        forms.omega_b(&p, &t)
    };
    transport::poe_gen(forms.cm().h(), &gen, cfg)
}

/// `h_Ω(ρ)`: the `H`-component of the poe of `(Ω^b(ρ̇), Ω^a(s_*ρ̇))` in `H ⋊ G`,
/// i.e. `h_{g,φ}` of the gauge transformation induced on `Mor × G`,
/// evaluated along `(ρ, 1)`.
pub fn h_omega(forms: &TrivialTotalForms, rho: &MorPath, cfg: &IntegratorConfig) -> Result<TransportResult<CMat>> {
    let gen = morphism_generator(forms, rho);
    let r = transport::semidirect_gen(&**forms.cm(), &gen, cfg)?;
    Ok(TransportResult { value: r.value.0, error_estimate: r.error_estimate, warnings: r.warnings })
}

/// Surface transport of the `Γ`-connection `(Ω^a, −Ω^c)` on `M × G`.
pub fn soe_total(forms: &TrivialTotalForms, sigma: &ObjBigon, cfg: &IntegratorConfig) -> Result<TransportResult<CMat>> {
    let residual = sigma.edge_residual();
    if !(residual <= 1e-9) {
        return Err(Error::NotABigon { residual });
    }
    let neg_c = |p: &ObjPoint, x: &ObjTangent, y: &ObjTangent| coeffs_scale(&forms.omega_c(p, &x.v, &y.v), -1.0);
    let sample = |outer: f64, inner: f64| {
        let (p, d_inner, d_outer) = match CONVENTIONS.arg_order {
            ArgOrder::Ts => {
                let (p, ds, dt) = sigma.eval(outer, inner);
                (p, dt, ds)
            }
            ArgOrder::St => {
                let (p, ds, dt) = sigma.eval(inner, outer);
                (p, ds, dt)
            }
        };
        SurfaceSample { a_inner: forms.omega_a(&p, &d_inner), b: neg_c(&p, &d_inner, &d_outer) }
    };
    transport::surface(&**forms.cm(), cfg, CONVENTIONS.ode_sign as f64, &sample)
}

/// Identity used by callers that need a constant `G`-path.
pub fn constant(m: CMat) -> impl Fn(f64) -> CMat + Send + Sync + 'static {
    move |_| m
}
