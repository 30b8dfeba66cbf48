//! Γ-connections, gauge transformations and gauge 2-transformations.
//!
//! A gauge transformation `(g, φ): (A, B) → (A', B')` satisfies
//!
//! ```text
//! A' + t_*(φ) = Ad_g(A) − g*θ̄
//! B' + α_*(A' ∧ φ) + dφ + ½[φ ∧ φ] = (α_g)_*(B)
//! ```
//!
//! and a 2-transformation `a: (g₁, φ₁) ⇒ (g₂, φ₂)` satisfies `g₂ = t(a) g₁`
//! and `φ₂ + a2R(a, A') = Ad_a(φ₁) − a*θ̄`.

use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fields::calculus::{d_fd_unchecked, fake_curvature_probe, wedge_action};
use crate::fields::paths::{require_bigon, require_bigon_in_chart, require_path_in_chart, Bigon, Path};
use crate::fields::{Chart, FnGroupMap, FnOneForm, FnTwoForm, Form1, Form2, Map, Vec3};
use crate::lie::{coeffs_add, coeffs_dist, coeffs_scale, coeffs_sub, coeffs_zero, TOLERANCES};
use crate::linalg::CMat;
use crate::transport::{self, IntegratorConfig, TransportResult, Warning};
use crate::two_group::{t_star_matrix, SharedCm};

/// Probe points per axis for the fake-flatness check.
pub const PROBE_PER_AXIS: usize = 6;

struct ConnectionData {
    cm: SharedCm,
    chart: Chart,
    a: Form1,
    b: Form2,
    fcurv: f64,
}

/// A pair `(A, B)` on a chart. Cheap to clone; identity is by allocation.
#[derive(Clone)]
pub struct GammaConnection(Arc<ConnectionData>);

impl core::fmt::Debug for GammaConnection {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("GammaConnection").field("cm", &self.0.cm.name()).field("chart", &self.0.chart).field("fcurv", &self.0.fcurv).finish()
    }
}

impl GammaConnection {
    pub fn new(cm: SharedCm, chart: Chart, a: Form1, b: Form2) -> Result<Self> {
        if a.algebra().name() != cm.g().name() || a.algebra().dim() != cm.g().dim() {
            return Err(Error::DescriptorMismatch { left: a.algebra().name().to_string(), right: cm.g().name().to_string() });
        }
        if b.algebra().name() != cm.h().name() || b.algebra().dim() != cm.h().dim() {
            return Err(Error::DescriptorMismatch { left: b.algebra().name().to_string(), right: cm.h().name().to_string() });
        }
        let fcurv = fake_curvature_probe(&*cm, &chart, &*a, &*b, PROBE_PER_AXIS);
        Ok(GammaConnection(Arc::new(ConnectionData { cm, chart, a, b, fcurv })))
    }

    /// The same forms on another chart box.
    pub fn with_chart(&self, chart: &Chart) -> Result<Self> {
        Self::new(self.0.cm.clone(), chart.clone(), self.0.a.clone(), self.0.b.clone())
    }

    pub fn cm(&self) -> &SharedCm {
        &self.0.cm
    }
    pub fn chart(&self) -> &Chart {
        &self.0.chart
    }
    pub fn a(&self) -> &Form1 {
        &self.0.a
    }
    pub fn b(&self) -> &Form2 {
        &self.0.b
    }

    /// Largest fake-curvature norm on the probe grid.
    pub fn fake_curvature_residual(&self) -> f64 {
        self.0.fcurv
    }

    pub fn is_fake_flat(&self) -> bool {
        self.0.fcurv < TOLERANCES.fake_flat
    }

    pub fn same(&self, o: &GammaConnection) -> bool {
        Arc::ptr_eq(&self.0, &o.0)
    }

    /// Largest difference of `A` and `B` against `o` on sampled points.
    pub fn distance(&self, o: &GammaConnection) -> f64 {
        if self.same(o) {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for (p, x, y) in sample_points(&self.0.chart, 16, 0x5eed) {
            worst = worst.max(coeffs_dist(&self.0.a.eval(&p, &x), &o.0.a.eval(&p, &x)));
            worst = worst.max(coeffs_dist(&self.0.b.eval(&p, &x, &y), &o.0.b.eval(&p, &x, &y)));
        }
        worst
    }

    pub fn poe(&self, gamma: &dyn Path, cfg: &IntegratorConfig) -> Result<TransportResult<CMat>> {
        require_path_in_chart(gamma, &self.0.chart, "path")?;
        transport::poe(&*self.0.a, gamma, cfg)
    }

    /// Surface transport; warns when the connection is not fake-flat.
    pub fn soe(&self, sigma: &dyn Bigon, cfg: &IntegratorConfig) -> Result<TransportResult<CMat>> {
        require_bigon(sigma, TOLERANCES.bigon_corner)?;
        require_bigon_in_chart(sigma, &self.0.chart, "bigon")?;
        let mut r = transport::soe_raw(&*self.0.cm, &*self.0.a, &*self.0.b, sigma, cfg)?;
        if !self.is_fake_flat() {
            r.warnings.push(Warning::NotFakeFlat { residual: self.0.fcurv });
        }
        Ok(r)
    }
}

/// Deterministic sample of `(point, X, Y)` inside a chart.
pub fn sample_points(chart: &Chart, n: usize, seed: u64) -> Vec<(Vec3, Vec3, Vec3)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let margin = 0.01;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let mut p = [0.0; 3];
        let mut x = [0.0; 3];
        let mut y = [0.0; 3];
        for i in 0..chart.dim() {
            let (lo, hi) = (chart.lo()[i] + margin, chart.hi()[i] - margin);
            p[i] = lo + (hi - lo) * rng.gen::<f64>();
            x[i] = rng.gen_range(-1.0..1.0);
            y[i] = rng.gen_range(-1.0..1.0);
        }
        out.push((p, x, y));
    }
    out
}

/// `A' = Ad_g(A) − g*θ̄ − t_*(φ)`.
fn gauge_a(src: &GammaConnection, g: &Map, phi: &Form1) -> Form1 {
    let (cm, a, g, phi) = (src.cm().clone(), src.a().clone(), g.clone(), phi.clone());
    Arc::new(FnOneForm::new(&cm.g().clone(), move |p, v| {
        let ad = cm.g().adjoint_coeffs(&g.value(p), &a.eval(p, v));
        coeffs_sub(&coeffs_sub(&ad, &g.mc_right(p, v)), &cm.t_star(&phi.eval(p, v)))
    }))
}

/// `B' = (α_g)_*(B) − α_*(A' ∧ φ) − dφ − ½[φ ∧ φ]`.
fn gauge_b(src: &GammaConnection, g: &Map, phi: &Form1, a_new: &Form1) -> Form2 {
    let (cm, b, g, phi, an) = (src.cm().clone(), src.b().clone(), g.clone(), phi.clone(), a_new.clone());
    Arc::new(FnTwoForm::new(&cm.h().clone(), move |p, x, y| {
        let mut out = cm.alpha_star(&g.value(p), &b.eval(p, x, y));
        out = coeffs_sub(&out, &wedge_action(&*cm, &*an, &*phi, p, x, y));
        out = coeffs_sub(&out, &d_fd_unchecked(&*phi, p, x, y));
        coeffs_sub(&out, &cm.h().bracket_coeffs(&phi.eval(p, x), &phi.eval(p, y)))
    }))
}

/// The connection `(A', B')` reached from `src` by `(g, φ)`.
pub fn apply_gauge(src: &GammaConnection, g: &Map, phi: &Form1) -> Result<GammaConnection> {
    check_gauge_data(src, g, phi)?;
    let a = gauge_a(src, g, phi);
    let b = gauge_b(src, g, phi, &a);
    GammaConnection::new(src.cm().clone(), src.chart().clone(), a, b)
}

fn check_gauge_data(src: &GammaConnection, g: &Map, phi: &Form1) -> Result<()> {
    if g.group().name() != src.cm().g().name() {
        return Err(Error::DescriptorMismatch { left: g.group().name().to_string(), right: src.cm().g().name().to_string() });
    }
    if phi.algebra().name() != src.cm().h().name() {
        return Err(Error::DescriptorMismatch { left: phi.algebra().name().to_string(), right: src.cm().h().name().to_string() });
    }
    Ok(())
}

/// A 1-cell `(g, φ)` between two declared connections.
#[derive(Clone)]
pub struct GaugeTransformation {
    pub g: Map,
    pub phi: Form1,
    source: GammaConnection,
    target: GammaConnection,
}

impl core::fmt::Debug for GaugeTransformation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("GaugeTransformation").field("source", &self.source).field("target", &self.target).finish()
    }
}

impl GaugeTransformation {
    /// Declare `(g, φ): source → target`; validity is checked by [`check_gauge`].
    pub fn new(g: Map, phi: Form1, source: GammaConnection, target: GammaConnection) -> Result<Self> {
        check_gauge_data(&source, &g, &phi)?;
        if source.cm().name() != target.cm().name() {
            return Err(Error::DescriptorMismatch { left: source.cm().name().to_string(), right: target.cm().name().to_string() });
        }
        Ok(GaugeTransformation { g, phi, source, target })
    }

    /// `(g, φ)` together with the connection it produces from `src`.
    pub fn from_source(src: &GammaConnection, g: Map, phi: Form1) -> Result<Self> {
        let target = apply_gauge(src, &g, &phi)?;
        Self::new(g, phi, src.clone(), target)
    }

    pub fn identity(conn: &GammaConnection) -> Self {
        let cm = conn.cm();
        let g: Map = crate::fields::identity_map(cm.g());
        let phi = crate::fields::zero_one_form(cm.h());
        GaugeTransformation { g, phi, source: conn.clone(), target: conn.clone() }
    }

    pub fn source(&self) -> &GammaConnection {
        &self.source
    }
    pub fn target(&self) -> &GammaConnection {
        &self.target
    }
    pub fn cm(&self) -> &SharedCm {
        self.source.cm()
    }

    /// The same data with both connections moved to `chart`.
    pub fn restrict(&self, chart: &Chart) -> Result<Self> {
        Self::new(self.g.clone(), self.phi.clone(), self.source.with_chart(chart)?, self.target.with_chart(chart)?)
    }

    /// `(g⁻¹, −(α_{g⁻¹})_*φ)`: target → source.
    pub fn inverse(&self) -> Self {
        let cm = self.cm().clone();
        let g = self.g.clone();
        let gi: Map = crate::fields::inverse_map(g.clone());
        let phi = self.phi.clone();
        let gi2 = gi.clone();
        let cm2 = cm.clone();
        let phi_inv: Form1 = Arc::new(FnOneForm::new(cm.h(), move |p, v| coeffs_scale(&cm2.alpha_star(&gi2.value(p), &phi.eval(p, v)), -1.0)));
        GaugeTransformation { g: gi, phi: phi_inv, source: self.target.clone(), target: self.source.clone() }
    }

    /// `(h_{g,φ}(γ), poe_{A'}(γ))`.
    pub fn hg_phi(&self, gamma: &dyn Path, cfg: &IntegratorConfig) -> Result<TransportResult<(CMat, CMat)>> {
        require_path_in_chart(gamma, self.source.chart(), "path")?;
        transport::semidirect_poe(&**self.cm(), &*self.phi, &**self.target.a(), gamma, cfg)
    }

    /// Largest distance of `(g, φ)` from `o` on sampled points.
    pub fn distance(&self, o: &GaugeTransformation) -> f64 {
        let mut worst = 0.0f64;
        for (p, x, _) in sample_points(self.source.chart(), 16, 0x5eed) {
            worst = worst.max(self.g.value(&p).dist(&o.g.value(&p)));
            worst = worst.max(coeffs_dist(&self.phi.eval(&p, &x), &o.phi.eval(&p, &x)));
        }
        worst
    }
}

/// `(h_{g,φ}(γ), poe_{A'}(γ))` for a gauge transformation.
pub fn hg_phi(gt: &GaugeTransformation, gamma: &dyn Path, cfg: &IntegratorConfig) -> Result<TransportResult<(CMat, CMat)>> {
    gt.hg_phi(gamma, cfg)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaugeReport {
    /// `A' + t_*φ − Ad_g A + g*θ̄`
    pub a_residual: f64,
    /// `B' + α_*(A'∧φ) + dφ + ½[φ∧φ] − (α_g)_*B`
    pub b_residual: f64,
}

impl GaugeReport {
    pub fn max(&self) -> f64 {
        self.a_residual.max(self.b_residual)
    }
    pub fn passed(&self, tol: f64) -> bool {
        self.max() < tol
    }
}

pub fn check_gauge(gt: &GaugeTransformation, n_samples: usize, seed: u64) -> GaugeReport {
    let cm = gt.cm().clone();
    let (src, tgt) = (gt.source(), gt.target());
    let mut rep = GaugeReport { a_residual: 0.0, b_residual: 0.0 };
    for (p, x, y) in sample_points(src.chart(), n_samples, seed) {
        let gv = gt.g.value(&p);
        let lhs = coeffs_add(&tgt.a().eval(&p, &x), &cm.t_star(&gt.phi.eval(&p, &x)));
        let rhs = coeffs_sub(&cm.g().adjoint_coeffs(&gv, &src.a().eval(&p, &x)), &gt.g.mc_right(&p, &x));
        rep.a_residual = rep.a_residual.max(coeffs_dist(&lhs, &rhs));
        let mut lhs = tgt.b().eval(&p, &x, &y);
        lhs = coeffs_add(&lhs, &wedge_action(&*cm, &**tgt.a(), &*gt.phi, &p, &x, &y));
        lhs = coeffs_add(&lhs, &d_fd_unchecked(&*gt.phi, &p, &x, &y));
        lhs = coeffs_add(&lhs, &cm.h().bracket_coeffs(&gt.phi.eval(&p, &x), &gt.phi.eval(&p, &y)));
        let rhs = cm.alpha_star(&gv, &src.b().eval(&p, &x, &y));
        rep.b_residual = rep.b_residual.max(coeffs_dist(&lhs, &rhs));
    }
    rep
}

fn require_same(a: &GammaConnection, b: &GammaConnection) -> Result<()> {
    let residual = a.distance(b);
    if !(residual <= TOLERANCES.composable) {
        return Err(Error::NonComposable { residual });
    }
    Ok(())
}

/// `(g₂ g₁, φ₂ + (α_{g₂})_* φ₁)`.
pub fn compose_gauge(gt2: &GaugeTransformation, gt1: &GaugeTransformation) -> Result<GaugeTransformation> {
    require_same(gt1.target(), gt2.source())?;
    let cm = gt1.cm().clone();
    let (g1, g2) = (gt1.g.clone(), gt2.g.clone());
    let g: Map = crate::fields::product_map(g2.clone(), g1);
    let (p1, p2) = (gt1.phi.clone(), gt2.phi.clone());
    let cm2 = cm.clone();
    let phi: Form1 = Arc::new(FnOneForm::new(cm.h(), move |p, v| coeffs_add(&p2.eval(p, v), &cm2.alpha_star(&g2.value(p), &p1.eval(p, v)))));
    Ok(GaugeTransformation { g, phi, source: gt1.source().clone(), target: gt2.target().clone() })
}

/// A 2-cell `a: (g₁, φ₁) ⇒ (g₂, φ₂)` given by an H-valued map.
#[derive(Clone)]
pub struct Gauge2Transformation {
    pub a: Map,
    source: GaugeTransformation,
    target: GaugeTransformation,
}

impl core::fmt::Debug for Gauge2Transformation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Gauge2Transformation").field("source", &self.source).field("target", &self.target).finish()
    }
}

impl Gauge2Transformation {
    pub fn new(a: Map, source: GaugeTransformation, target: GaugeTransformation) -> Result<Self> {
        if a.group().name() != source.cm().h().name() {
            return Err(Error::DescriptorMismatch { left: a.group().name().to_string(), right: source.cm().h().name().to_string() });
        }
        require_same(source.source(), target.source())?;
        require_same(source.target(), target.target())?;
        Ok(Gauge2Transformation { a, source, target })
    }

    /// The 2-cell `a` out of `source`, with the target gauge transformation
    /// solved from the two defining conditions.
    pub fn from_source(a: Map, source: GaugeTransformation) -> Result<Self> {
        let cm = source.cm().clone();
        let (a2, g1, phi1, at) = (a.clone(), source.g.clone(), source.phi.clone(), source.target().a().clone());
        let cm2 = cm.clone();
        let g2: Map = Arc::new(FnGroupMap::new(cm.g(), move |p| cm2.t(&a2.value(p)) * g1.value(p)));
        let cm3 = cm.clone();
        let a3 = a.clone();
        let phi2: Form1 = Arc::new(FnOneForm::new(cm.h(), move |p, v| {
            let av = a3.value(p);
            let ad = cm3.h().adjoint_coeffs(&av, &phi1.eval(p, v));
            let rhs = coeffs_sub(&ad, &a3.mc_right(p, v));
            coeffs_sub(&rhs, &cm3.a2_right(&av, &at.eval(p, v)))
        }));
        let target = GaugeTransformation { g: g2, phi: phi2, source: source.source().clone(), target: source.target().clone() };
        Ok(Gauge2Transformation { a, source, target })
    }

    /// Rebuild over given (restricted) source and target transformations.
    pub fn with_ends(&self, source: GaugeTransformation, target: GaugeTransformation) -> Result<Self> {
        Self::new(self.a.clone(), source, target)
    }

    pub fn identity(gt: &GaugeTransformation) -> Self {
        Gauge2Transformation { a: crate::fields::identity_map(gt.cm().h()), source: gt.clone(), target: gt.clone() }
    }

    pub fn source(&self) -> &GaugeTransformation {
        &self.source
    }
    pub fn target(&self) -> &GaugeTransformation {
        &self.target
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gauge2Report {
    /// `g₂ − t(a) g₁`
    pub g_residual: f64,
    /// `φ₂ + a2R(a, A') − Ad_a φ₁ + a*θ̄`
    pub phi_residual: f64,
}

impl Gauge2Report {
    pub fn max(&self) -> f64 {
        self.g_residual.max(self.phi_residual)
    }
    pub fn passed(&self, tol: f64) -> bool {
        self.max() < tol
    }
}

pub fn check_gauge2(a2t: &Gauge2Transformation, n_samples: usize, seed: u64) -> Gauge2Report {
    let cm = a2t.source.cm().clone();
    let (s, t) = (&a2t.source, &a2t.target);
    let at = s.target().a();
    let mut rep = Gauge2Report { g_residual: 0.0, phi_residual: 0.0 };
    for (p, x, _) in sample_points(s.source().chart(), n_samples, seed) {
        let av = a2t.a.value(&p);
        rep.g_residual = rep.g_residual.max(t.g.value(&p).dist(&(cm.t(&av) * s.g.value(&p))));
        let lhs = coeffs_add(&t.phi.eval(&p, &x), &cm.a2_right(&av, &at.eval(&p, &x)));
        let rhs = coeffs_sub(&cm.h().adjoint_coeffs(&av, &s.phi.eval(&p, &x)), &a2t.a.mc_right(&p, &x));
        rep.phi_residual = rep.phi_residual.max(coeffs_dist(&lhs, &rhs));
    }
    rep
}

/// `a₂ a₁` for `a₁: (g, φ) ⇒ (g', φ')` and `a₂: (g', φ') ⇒ (g'', φ'')`.
pub fn vcompose2(a2: &Gauge2Transformation, a1: &Gauge2Transformation) -> Result<Gauge2Transformation> {
    let residual = a1.target.distance(&a2.source);
    if !(residual <= TOLERANCES.composable) {
        return Err(Error::NonComposable { residual });
    }
    let a: Map = crate::fields::product_map(a2.a.clone(), a1.a.clone());
    Ok(Gauge2Transformation { a, source: a1.source.clone(), target: a2.target.clone() })
}

/// `x ↦ a₂(x) α(g₂(x), a₁(x))`, with `g₂` the source map of `a₂`.
pub fn hcompose2(a2: &Gauge2Transformation, a1: &Gauge2Transformation) -> Result<Gauge2Transformation> {
    require_same(a1.source.target(), a2.source.source())?;
    let cm = a1.source.cm().clone();
    let (m2, m1, g2) = (a2.a.clone(), a1.a.clone(), a2.source.g.clone());
    let cm2 = cm.clone();
    let a: Map = Arc::new(FnGroupMap::new(cm.h(), move |p| m2.value(p) * cm2.alpha(&g2.value(p), &m1.value(p))));
    Ok(Gauge2Transformation { a, source: compose_gauge(&a2.source, &a1.source)?, target: compose_gauge(&a2.target, &a1.target)? })
}

/// Solve `t_*` on its image: `None` unless square and invertible.
fn t_star_inverse(cm: &SharedCm) -> Option<Vec<f64>> {
    let (dg, dh) = (cm.g().dim(), cm.h().dim());
    if dg != dh || dg == 0 {
        return None;
    }
    let n = dg;
    let mut m = t_star_matrix(&**cm);
    let mut inv = alloc::vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    for col in 0..n {
        let piv = (col..n).max_by(|&a, &b| m[a * n + col].abs().total_cmp(&m[b * n + col].abs()))?;
        if m[piv * n + col].abs() < 1e-10 {
            return None;
        }
        for k in 0..n {
            m.swap(col * n + k, piv * n + k);
            inv.swap(col * n + k, piv * n + k);
        }
        let d = m[col * n + col];
        for k in 0..n {
            m[col * n + k] /= d;
            inv[col * n + k] /= d;
        }
        for r in 0..n {
            if r != col {
                let f = m[r * n + col];
                for k in 0..n {
                    m[r * n + k] -= f * m[col * n + k];
                    inv[r * n + k] -= f * inv[col * n + k];
                }
            }
        }
    }
    Some(inv)
}

/// `(A, B)` with `B = t_*⁻¹(dA + ½[A ∧ A])`, so that the fake curvature vanishes.
pub fn make_fake_flat(cm: &SharedCm, chart: &Chart, a: Form1) -> Result<GammaConnection> {
    let inv = t_star_inverse(cm).ok_or(Error::SingularTStar)?;
    let n = cm.g().dim();
    let (cm2, a2) = (cm.clone(), a.clone());
    let b: Form2 = Arc::new(FnTwoForm::new(cm.h(), move |p, x, y| {
        let f = coeffs_add(&d_fd_unchecked(&*a2, p, x, y), &cm2.g().bracket_coeffs(&a2.eval(p, x), &a2.eval(p, y)));
        let mut out = coeffs_zero(n);
        for i in 0..n {
            out[i] = (0..n).map(|k| inv[i * n + k] * f[k]).sum();
        }
        out
    }));
    GammaConnection::new(cm.clone(), chart.clone(), a, b)
}
