//! The 2-functor `F_{A,B}: P₂(M) → BΓ`, its pseudonatural transformations
//! and modifications, evaluated on sample representatives.
//!
//! Thin-homotopy classes are never formed; the suites instead check that
//! the values are invariant under reparameterization and that they respect
//! the composition laws of `BΓ`.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::fields::paths::{
    concat, constant_path, degenerate_bigon, hcompose, interpolate, reparam_path, reparam_s, reparam_t, source_path,
    target_path, vcompose, FnPath, Path, Reparam, SharedBigon, SharedPath,
};
use crate::fields::{Chart, Vec3};
use crate::gauge::{Gauge2Transformation, GammaConnection, GaugeTransformation};
use crate::linalg::CMat;
use crate::math;
use crate::transport::IntegratorConfig;
use crate::two_group::{mor_product, TwoGroupMorphism};

/// Representatives of 1- and 2-cells of `P₂(M)` on one chart.
#[derive(Clone, Default)]
pub struct SampleFamily {
    pub paths: Vec<SharedPath>,
    /// `(γ₁, γ₂)` with `γ₁(1) = γ₂(0)`.
    pub path_pairs: Vec<(SharedPath, SharedPath)>,
    pub path_triples: Vec<(SharedPath, SharedPath, SharedPath)>,
    pub bigons: Vec<SharedBigon>,
    /// `(Σ, Σ')` with `Σ: γ ⇒ γ'`, `Σ': γ' ⇒ γ''`.
    pub vertical_pairs: Vec<(SharedBigon, SharedBigon)>,
    /// `(Σ, Σ̃)` with `Σ̃` starting where `Σ` ends.
    pub horizontal_pairs: Vec<(SharedBigon, SharedBigon)>,
    pub seed: u64,
}

struct Sampler<'a> {
    rng: ChaCha8Rng,
    chart: &'a Chart,
}

impl Sampler<'_> {
    fn point(&mut self) -> Vec3 {
        let mut p = [0.0; 3];
        for i in 0..self.chart.dim() {
            let (lo, hi) = (self.chart.lo()[i], self.chart.hi()[i]);
            let w = hi - lo;
            p[i] = lo + 0.25 * w + 0.5 * w * self.rng.gen::<f64>();
        }
        p
    }

    fn wiggle(&mut self) -> [Vec3; 2] {
        let mut c = [[0.0; 3]; 2];
        for (k, ck) in c.iter_mut().enumerate() {
            for i in 0..self.chart.dim() {
                let w = self.chart.hi()[i] - self.chart.lo()[i];
                ck[i] = self.rng.gen_range(-0.1..0.1) * w / (k + 1) as f64;
            }
        }
        c
    }

    /// `x + (y − x)u + Σ_k c_k sin(kπu)`.
    fn path(&mut self, x: Vec3, y: Vec3) -> SharedPath {
        let c = self.wiggle();
        Arc::new(FnPath(move |u: f64| {
            let mut p = [0.0; 3];
            let mut v = [0.0; 3];
            for i in 0..3 {
                p[i] = x[i] * (1.0 - u) + y[i] * u;
                v[i] = y[i] - x[i];
                for (k, ck) in c.iter().enumerate() {
                    let f = (k + 1) as f64 * math::PI;
                    p[i] += ck[i] * exact_sin(k + 1, u);
                    v[i] += ck[i] * f * math::cos(f * u);
                }
            }
            (p, v)
        }))
    }
}

/// `sin(kπu)`, exactly zero at both ends so that joints match bitwise.
fn exact_sin(k: usize, u: f64) -> f64 {
    let f = k as f64 * math::PI;
    if u <= 0.5 {
        math::sin(f * u)
    } else {
        let s = math::sin(f * (1.0 - u));
        if k % 2 == 1 { s } else { -s }
    }
}

impl SampleFamily {
    /// `n` members of each kind inside the central half of `chart`.
    pub fn generate(chart: &Chart, n: usize, seed: u64) -> Self {
        let mut s = Sampler { rng: ChaCha8Rng::seed_from_u64(seed), chart };
        let mut fam = SampleFamily { seed, ..Default::default() };
        for _ in 0..n {
            let (x, y, z, w) = (s.point(), s.point(), s.point(), s.point());
            let g1 = s.path(x, y);
            let g2 = s.path(y, z);
            let g3 = s.path(z, w);
            fam.paths.push(g1.clone());
            fam.path_pairs.push((g1.clone(), g2.clone()));
            fam.path_triples.push((g1.clone(), g2.clone(), g3));
            let (a, b, c) = (s.path(x, y), s.path(x, y), s.path(x, y));
            fam.bigons.push(interpolate(a.clone(), b.clone()));
            fam.vertical_pairs.push((interpolate(a.clone(), b.clone()), interpolate(b, c)));
            let d = s.path(y, z);
            fam.horizontal_pairs.push((interpolate(a, g1), interpolate(g2, d)));
        }
        fam
    }
}

/// One named residual with its tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct AxiomRow {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
}

impl AxiomRow {
    pub fn passed(&self) -> bool {
        self.residual < self.tolerance
    }
}

/// Per-identity maxima over a sample family.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AxiomReport {
    pub rows: Vec<AxiomRow>,
}

impl AxiomReport {
    pub fn push(&mut self, name: &str, residual: f64, tolerance: f64) {
        let residual = if residual.is_nan() { f64::INFINITY } else { residual };
        if let Some(r) = self.rows.iter_mut().find(|r| r.name == name) {
            r.residual = r.residual.max(residual);
        } else {
            self.rows.push(AxiomRow { name: name.to_string(), residual, tolerance });
        }
    }

    pub fn passed(&self) -> bool {
        self.rows.iter().all(AxiomRow::passed)
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.rows.iter().find(|r| r.name == name).map(|r| r.residual)
    }

    pub fn extend(&mut self, other: AxiomReport) {
        for r in other.rows {
            self.push(&r.name, r.residual, r.tolerance);
        }
    }
}

/// `[γ] ↦ poe_A(γ)`.
pub fn f_path(conn: &GammaConnection, gamma: &dyn Path, cfg: &IntegratorConfig) -> Result<CMat> {
    Ok(conn.poe(gamma, cfg)?.value)
}

/// `[Σ] ↦ (soe_{A,B}(Σ), poe_A(γ))`.
pub fn f_bigon(conn: &GammaConnection, sigma: &SharedBigon, cfg: &IntegratorConfig) -> Result<TwoGroupMorphism> {
    let h = conn.soe(&**sigma, cfg)?.value;
    let g = f_path(conn, &*source_path(sigma.clone()), cfg)?;
    Ok(TwoGroupMorphism::new(conn.cm(), h, g))
}

/// `[γ] ↦ (h_{g,φ}(γ)⁻¹, g(y) poe_A(γ))`.
pub fn rho_path(gt: &GaugeTransformation, gamma: &dyn Path, cfg: &IntegratorConfig) -> Result<TwoGroupMorphism> {
    let (h, _) = gt.hg_phi(gamma, cfg)?.value;
    let y = gamma.point(1.0);
    let g = gt.g.value(&y) * f_path(gt.source(), gamma, cfg)?;
    let hi = h.inverse().unwrap_or_else(|| gt.cm().h().identity());
    Ok(TwoGroupMorphism::new(gt.cm(), hi, g))
}

/// `x ↦ (a(x), g₁(x))`, with `g₁` the source gauge map.
pub fn mod_point(a2t: &Gauge2Transformation, x: &Vec3) -> TwoGroupMorphism {
    TwoGroupMorphism::new(a2t.source().cm(), a2t.a.value(x), a2t.source().g.value(x))
}

/// Vertical composite without a composability check; residuals of the
/// boundary are reported separately by the suites.
fn vstack(m2: &TwoGroupMorphism, m1: &TwoGroupMorphism) -> TwoGroupMorphism {
    TwoGroupMorphism::new(m1.cm(), *m2.h() * *m1.h(), *m1.g())
}

fn ident(cm: &crate::two_group::SharedCm, g: CMat) -> TwoGroupMorphism {
    TwoGroupMorphism::identity(cm, g)
}

/// Functoriality of `F_{A,B}` on the family.
pub fn functor_suite(conn: &GammaConnection, fam: &SampleFamily, cfg: &IntegratorConfig, tol: f64) -> Result<AxiomReport> {
    let mut rep = AxiomReport::default();
    let cm = conn.cm();
    for (g1, g2) in &fam.path_pairs {
        let whole = f_path(conn, &*concat(g1.clone(), g2.clone()), cfg)?;
        let split = f_path(conn, &**g2, cfg)? * f_path(conn, &**g1, cfg)?;
        rep.push("path_composition", whole.dist(&split), tol);
    }
    for (g1, g2, g3) in &fam.path_triples {
        let left = f_path(conn, &*concat(g1.clone(), concat(g2.clone(), g3.clone())), cfg)?;
        let right = f_path(conn, &*concat(concat(g1.clone(), g2.clone()), g3.clone()), cfg)?;
        rep.push("F4_associativity", left.dist(&right), tol);
    }
    for g in &fam.paths {
        let unit = f_path(conn, &*concat(constant_path(g.point(0.0)), g.clone()), cfg)?;
        rep.push("F3_unit", unit.dist(&f_path(conn, &**g, cfg)?), tol);
        let id = f_bigon(conn, &degenerate_bigon(g.clone()), cfg)?;
        rep.push("F3_unit", id.h().dist(&cm.h().identity()), tol);
    }
    for sigma in &fam.bigons {
        let m = f_bigon(conn, sigma, cfg)?;
        let tgt = f_path(conn, &*target_path(sigma.clone()), cfg)?;
        rep.push("target_source", m.target().dist(&tgt), tol);
    }
    for (s1, s2) in &fam.vertical_pairs {
        let whole = f_bigon(conn, &vcompose(s2.clone(), s1.clone()), cfg)?;
        let glued = vstack(&f_bigon(conn, s2, cfg)?, &f_bigon(conn, s1, cfg)?);
        rep.push("F1_vertical", whole.dist(&glued), tol);
    }
    for (s1, s2) in &fam.horizontal_pairs {
        let whole = f_bigon(conn, &hcompose(s2.clone(), s1.clone()), cfg)?;
        let glued = mor_product(&f_bigon(conn, s2, cfg)?, &f_bigon(conn, s1, cfg)?);
        rep.push("F2_horizontal", whole.dist(&glued), tol);
    }
    Ok(rep)
}

/// Pseudonaturality of `ρ_{g,φ}`.
pub fn gauge_suite(gt: &GaugeTransformation, fam: &SampleFamily, cfg: &IntegratorConfig, tol: f64) -> Result<AxiomReport> {
    let mut rep = AxiomReport::default();
    let cm = gt.cm();
    let (src, tgt) = (gt.source(), gt.target());
    for g in &fam.paths {
        let r = rho_path(gt, &**g, cfg)?;
        let want = f_path(tgt, &**g, cfg)? * gt.g.value(&g.point(0.0));
        rep.push("rho_endpoint", r.target().dist(&want), tol);
    }
    for (g1, g2) in &fam.path_pairs {
        let whole = rho_path(gt, &*concat(g1.clone(), g2.clone()), cfg)?;
        let r1 = rho_path(gt, &**g1, cfg)?;
        let r2 = rho_path(gt, &**g2, cfg)?;
        let f1 = f_path(src, &**g1, cfg)?;
        let f2t = f_path(tgt, &**g2, cfg)?;
        let first = mor_product(&r2, &ident(cm, f1));
        let second = mor_product(&ident(cm, f2t), &r1);
        rep.push("T1_composition", whole.dist(&vstack(&second, &first)), tol);
    }
    for sigma in &fam.bigons {
        let (gam, gam2) = (source_path(sigma.clone()), target_path(sigma.clone()));
        let k = src.soe(&**sigma, cfg)?.value;
        let kp = tgt.soe(&**sigma, cfg)?.value;
        let (h, _) = gt.hg_phi(&*gam, cfg)?.value;
        let (h2, _) = gt.hg_phi(&*gam2, cfg)?.value;
        let y = gam.point(1.0);
        let lhs = kp * h.inverse().unwrap_or(h);
        let rhs = h2.inverse().unwrap_or(h2) * cm.alpha(&gt.g.value(&y), &k);
        rep.push("T2_bigon_square", lhs.dist(&rhs), tol);
    }
    Ok(rep)
}

/// The modification axiom for `𝒜_a: ρ₁ ⇒ ρ₂`.
pub fn modification_suite(a2t: &Gauge2Transformation, fam: &SampleFamily, cfg: &IntegratorConfig, tol: f64) -> Result<AxiomReport> {
    let mut rep = AxiomReport::default();
    let cm = a2t.source().cm();
    let (g1, g2) = (a2t.source(), a2t.target());
    for g in &fam.paths {
        let (x, y) = (g.point(0.0), g.point(1.0));
        let (mx, my) = (mod_point(a2t, &x), mod_point(a2t, &y));
        rep.push("M_point_target", mx.target().dist(&g2.g.value(&x)), tol);
        let r1 = rho_path(g1, &**g, cfg)?;
        let r2 = rho_path(g2, &**g, cfg)?;
        let ft = f_path(g1.target(), &**g, cfg)?;
        let fs = f_path(g1.source(), &**g, cfg)?;
        let lhs = vstack(&mor_product(&ident(cm, ft), &mx), &r1);
        let rhs = vstack(&r2, &mor_product(&my, &ident(cm, fs)));
        rep.push("M_square", lhs.dist(&rhs), tol);
    }
    Ok(rep)
}

/// Invariance under boundary-fixing reparameterizations and degenerate bigons.
pub fn thin_invariance_suite(
    conn: &GammaConnection,
    fam: &SampleFamily,
    reparams: &[Reparam],
    cfg: &IntegratorConfig,
    tol: f64,
) -> Result<AxiomReport> {
    let mut rep = AxiomReport::default();
    for g in &fam.paths {
        let base = f_path(conn, &**g, cfg)?;
        for r in reparams {
            rep.push("poe_reparam", base.dist(&f_path(conn, &*reparam_path(g.clone(), *r), cfg)?), tol);
        }
        let flat = conn.soe(&*degenerate_bigon(g.clone()), cfg)?.value;
        rep.push("degenerate_soe", flat.dist(&conn.cm().h().identity()), tol);
    }
    for sigma in &fam.bigons {
        let base = conn.soe(&**sigma, cfg)?.value;
        for r in reparams {
            let ks = conn.soe(&*reparam_s(sigma.clone(), *r), cfg)?.value;
            let kt = conn.soe(&*reparam_t(sigma.clone(), *r), cfg)?.value;
            rep.push("soe_reparam_s", base.dist(&ks), tol);
            rep.push("soe_reparam_t", base.dist(&kt), tol);
        }
    }
    Ok(rep)
}

/// The reparameterizers used by default.
pub const DEFAULT_REPARAMS: [Reparam; 3] = [Reparam::Identity, Reparam::SmoothStep, Reparam::Quadratic(0.4)];
