//! Crossed modules `(G, H, t, α)` and the morphisms `Mor(Γ) = H ⋊ G` of the
//! associated strict 2-group.
//!
//! Conventions: `s(h, g) = g`, `t(h, g) = t(h) g`,
//! vertical composition `(h₂, g₂) • (h₁, g₁) = (h₂ h₁, g₁)`,
//! product `(h₂, g₂) · (h₁, g₁) = (h₂ α(g₂, h₁), g₂ g₁)`.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lie::{self, coeffs_dist, coeffs_zero, Coeffs, Group, GroupDescriptor, Side, TOLERANCES};
use crate::linalg::{CMat, C64};
use crate::math;

/// A crossed module of matrix Lie groups with its differentials.
///
/// Group elements are passed as raw matrices; algebra elements as
/// coefficient vectors over the descriptors' bases.
pub trait CrossedModule: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;
    fn g(&self) -> &Group;
    fn h(&self) -> &Group;
    /// The homomorphism `t: H → G`.
    fn t(&self, h: &CMat) -> CMat;
    /// The action `α(g, h)`.
    fn alpha(&self, g: &CMat, h: &CMat) -> CMat;
    /// `t_*: 𝔥 → 𝔤`.
    fn t_star(&self, y: &[f64]) -> Coeffs;
    /// `(α_g)_*: 𝔥 → 𝔥`.
    fn alpha_star(&self, g: &CMat, y: &[f64]) -> Coeffs;
    /// The Lie algebra action `α_*: 𝔤 × 𝔥 → 𝔥`.
    fn a1(&self, x: &[f64], y: &[f64]) -> Coeffs;
    /// `∂_ε α(exp(εX), h)` at ε = 0, as a matrix tangent at `h`.
    fn alpha_dg(&self, x: &[f64], h: &CMat) -> CMat;

    /// `h⁻¹ ∂_ε α(exp(εX), h)`, i.e. `(α̃_h)_*(X)`.
    fn a2_left(&self, h: &CMat, x: &[f64]) -> Coeffs {
        let hi = h.inverse().unwrap_or_else(|| self.h().identity());
        self.h().expand_unchecked(&(hi * self.alpha_dg(x, h)))
    }

    /// `∂_ε α(exp(εX), h) h⁻¹`.
    fn a2_right(&self, h: &CMat, x: &[f64]) -> Coeffs {
        let hi = h.inverse().unwrap_or_else(|| self.h().identity());
        self.h().expand_unchecked(&(self.alpha_dg(x, h) * hi))
    }
}

pub type SharedCm = Arc<dyn CrossedModule>;

/// `α̃_h(g) = h⁻¹ α(g, h)`.
pub fn tilde_alpha(cm: &dyn CrossedModule, h: &CMat, g: &CMat) -> CMat {
    let hi = h.inverse().unwrap_or_else(|| cm.h().identity());
    cm.h().project(&(hi * cm.alpha(g, h)))
}

/// Matrix of `t_*` (rows: 𝔤 basis, columns: 𝔥 basis), row-major.
pub fn t_star_matrix(cm: &dyn CrossedModule) -> Vec<f64> {
    let (dg, dh) = (cm.g().dim(), cm.h().dim());
    let mut m = alloc::vec![0.0; dg * dh];
    for j in 0..dh {
        let mut e = coeffs_zero(dh);
        e[j] = 1.0;
        let col = cm.t_star(&e);
        for i in 0..dg {
            m[i * dh + j] = col[i];
        }
    }
    m
}

/// The differentials of a crossed module, bundled.
#[derive(Clone, Copy)]
pub struct DifferentialMaps<'a> {
    cm: &'a dyn CrossedModule,
}

impl<'a> DifferentialMaps<'a> {
    pub fn t_star(&self, y: &[f64]) -> Coeffs {
        self.cm.t_star(y)
    }
    pub fn a1(&self, x: &[f64], y: &[f64]) -> Coeffs {
        self.cm.a1(x, y)
    }
    pub fn a2_left(&self, h: &CMat, x: &[f64]) -> Coeffs {
        self.cm.a2_left(h, x)
    }
    pub fn a2_right(&self, h: &CMat, x: &[f64]) -> Coeffs {
        self.cm.a2_right(h, x)
    }
    pub fn t_star_matrix(&self) -> Vec<f64> {
        t_star_matrix(self.cm)
    }
}

pub fn differential_maps(cm: &dyn CrossedModule) -> DifferentialMaps<'_> {
    DifferentialMaps { cm }
}

/// `G = 1`, `H = U(1)`: the structure group of abelian gerbes.
#[derive(Debug)]
pub struct AbelianGerbe {
    g: Group,
    h: Group,
}

impl AbelianGerbe {
    pub fn new() -> Self {
        AbelianGerbe { g: GroupDescriptor::trivial(), h: GroupDescriptor::u1() }
    }
}

impl Default for AbelianGerbe {
    fn default() -> Self {
        Self::new()
    }
}

impl CrossedModule for AbelianGerbe {
    fn name(&self) -> &str {
        "ABELIAN_GERBE"
    }
    fn g(&self) -> &Group {
        &self.g
    }
    fn h(&self) -> &Group {
        &self.h
    }
    fn t(&self, _h: &CMat) -> CMat {
        CMat::identity(1)
    }
    fn alpha(&self, _g: &CMat, h: &CMat) -> CMat {
        *h
    }
    fn t_star(&self, _y: &[f64]) -> Coeffs {
        Coeffs::new()
    }
    fn alpha_star(&self, _g: &CMat, y: &[f64]) -> Coeffs {
        y.iter().copied().collect()
    }
    fn a1(&self, _x: &[f64], _y: &[f64]) -> Coeffs {
        coeffs_zero(1)
    }
    fn alpha_dg(&self, _x: &[f64], _h: &CMat) -> CMat {
        CMat::zeros(1)
    }
}

/// `H = G`, `t = id`, `α` = conjugation.
#[derive(Debug)]
pub struct Inner {
    name: String,
    grp: Group,
}

impl Inner {
    pub fn new(name: &str, grp: Group) -> Self {
        Inner { name: name.to_string(), grp }
    }
}

impl CrossedModule for Inner {
    fn name(&self) -> &str {
        &self.name
    }
    fn g(&self) -> &Group {
        &self.grp
    }
    fn h(&self) -> &Group {
        &self.grp
    }
    fn t(&self, h: &CMat) -> CMat {
        *h
    }
    fn alpha(&self, g: &CMat, h: &CMat) -> CMat {
        let gi = g.inverse().unwrap_or_else(|| self.grp.identity());
        *g * *h * gi
    }
    fn t_star(&self, y: &[f64]) -> Coeffs {
        y.iter().copied().collect()
    }
    fn alpha_star(&self, g: &CMat, y: &[f64]) -> Coeffs {
        self.grp.adjoint_coeffs(g, y)
    }
    fn a1(&self, x: &[f64], y: &[f64]) -> Coeffs {
        self.grp.bracket_coeffs(x, y)
    }
    fn alpha_dg(&self, x: &[f64], h: &CMat) -> CMat {
        self.grp.reconstruct(x).commutator(h)
    }
}

/// `G = SO(3)`, `H = SU(2)`, `t` the double cover.
#[derive(Debug)]
pub struct Spin {
    g: Group,
    h: Group,
}

impl Spin {
    pub fn new() -> Self {
        Spin { g: GroupDescriptor::so3(), h: GroupDescriptor::su2() }
    }
}

impl Default for Spin {
    fn default() -> Self {
        Self::new()
    }
}

/// Unit quaternion `(w, x, y, z)` of a rotation matrix (Shepperd's method).
fn rotation_to_quaternion(r: &CMat) -> [f64; 4] {
    let m = |i: usize, j: usize| r[(i, j)].re;
    let tr = m(0, 0) + m(1, 1) + m(2, 2);
    let q = if tr > 0.0 {
        let s = 2.0 * math::sqrt(tr + 1.0);
        [s / 4.0, (m(2, 1) - m(1, 2)) / s, (m(0, 2) - m(2, 0)) / s, (m(1, 0) - m(0, 1)) / s]
    } else if m(0, 0) > m(1, 1) && m(0, 0) > m(2, 2) {
        let s = 2.0 * math::sqrt(1.0 + m(0, 0) - m(1, 1) - m(2, 2));
        [(m(2, 1) - m(1, 2)) / s, s / 4.0, (m(0, 1) + m(1, 0)) / s, (m(0, 2) + m(2, 0)) / s]
    } else if m(1, 1) > m(2, 2) {
        let s = 2.0 * math::sqrt(1.0 + m(1, 1) - m(0, 0) - m(2, 2));
        [(m(0, 2) - m(2, 0)) / s, (m(0, 1) + m(1, 0)) / s, s / 4.0, (m(1, 2) + m(2, 1)) / s]
    } else {
        let s = 2.0 * math::sqrt(1.0 + m(2, 2) - m(0, 0) - m(1, 1));
        [(m(1, 0) - m(0, 1)) / s, (m(0, 2) + m(2, 0)) / s, (m(1, 2) + m(2, 1)) / s, s / 4.0]
    };
    let n = math::sqrt(q.iter().map(|v| v * v).sum());
    [q[0] / n, q[1] / n, q[2] / n, q[3] / n]
}

fn quaternion_to_rotation([w, x, y, z]: [f64; 4]) -> CMat {
    CMat::from_real(&[
        &[1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - z * w), 2.0 * (x * z + y * w)],
        &[2.0 * (x * y + z * w), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - x * w)],
        &[2.0 * (x * z - y * w), 2.0 * (y * z + x * w), 1.0 - 2.0 * (x * x + y * y)],
    ])
}

/// An SU(2) preimage of a rotation under the double cover.
pub fn spin_lift(r: &CMat) -> CMat {
    let [w, x, y, z] = rotation_to_quaternion(r);
    CMat::from_fn(2, |i, j| match (i, j) {
        (0, 0) => C64::new(w, -z),
        (0, 1) => C64::new(-y, -x),
        (1, 0) => C64::new(y, -x),
        _ => C64::new(w, z),
    })
}

impl CrossedModule for Spin {
    fn name(&self) -> &str {
        "SPIN"
    }
    fn g(&self) -> &Group {
        &self.g
    }
    fn h(&self) -> &Group {
        &self.h
    }
    fn t(&self, h: &CMat) -> CMat {
        // h = [[w - iz, -y - ix], [y - ix, w + iz]]
        let a = h[(0, 0)];
        let b = h[(0, 1)];
        quaternion_to_rotation([a.re, -b.im, -b.re, -a.im])
    }
    fn alpha(&self, g: &CMat, h: &CMat) -> CMat {
        let l = spin_lift(g);
        l * *h * l.dagger()
    }
    fn t_star(&self, y: &[f64]) -> Coeffs {
        y.iter().copied().collect()
    }
    fn alpha_star(&self, g: &CMat, y: &[f64]) -> Coeffs {
        (0..3).map(|i| (0..3).map(|j| g[(i, j)].re * y[j]).sum()).collect()
    }
    fn a1(&self, x: &[f64], y: &[f64]) -> Coeffs {
        [x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0]]
            .into_iter()
            .collect()
    }
    fn alpha_dg(&self, x: &[f64], h: &CMat) -> CMat {
        self.h.reconstruct(x).commutator(h)
    }
}

/// `H = 1`: ordinary principal G-bundles seen as 2-bundles.
#[derive(Debug)]
pub struct Ordinary {
    name: String,
    g: Group,
    h: Group,
}

impl Ordinary {
    pub fn new(name: &str, g: Group) -> Self {
        Ordinary { name: name.to_string(), g, h: GroupDescriptor::trivial() }
    }
}

impl CrossedModule for Ordinary {
    fn name(&self) -> &str {
        &self.name
    }
    fn g(&self) -> &Group {
        &self.g
    }
    fn h(&self) -> &Group {
        &self.h
    }
    fn t(&self, _h: &CMat) -> CMat {
        self.g.identity()
    }
    fn alpha(&self, _g: &CMat, _h: &CMat) -> CMat {
        CMat::identity(1)
    }
    fn t_star(&self, _y: &[f64]) -> Coeffs {
        coeffs_zero(self.g.dim())
    }
    fn alpha_star(&self, _g: &CMat, _y: &[f64]) -> Coeffs {
        Coeffs::new()
    }
    fn a1(&self, _x: &[f64], _y: &[f64]) -> Coeffs {
        Coeffs::new()
    }
    fn alpha_dg(&self, _x: &[f64], _h: &CMat) -> CMat {
        CMat::zeros(1)
    }
}

/// Named crossed modules selectable from scenarios.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Instance {
    AbelianGerbe,
    InnerSu2,
    InnerSo3,
    Spin,
    OrdinarySo3,
}

impl Instance {
    pub const ALL: [Instance; 5] =
        [Instance::AbelianGerbe, Instance::InnerSu2, Instance::InnerSo3, Instance::Spin, Instance::OrdinarySo3];

    pub fn as_str(&self) -> &'static str {
        match self {
            Instance::AbelianGerbe => "ABELIAN_GERBE",
            Instance::InnerSu2 => "INNER_SU2",
            Instance::InnerSo3 => "INNER_SO3",
            Instance::Spin => "SPIN",
            Instance::OrdinarySo3 => "ORDINARY_SO3",
        }
    }

    pub fn build(&self) -> SharedCm {
        match self {
            Instance::AbelianGerbe => Arc::new(AbelianGerbe::new()),
            Instance::InnerSu2 => Arc::new(Inner::new("INNER_SU2", GroupDescriptor::su2())),
            Instance::InnerSo3 => Arc::new(Inner::new("INNER_SO3", GroupDescriptor::so3())),
            Instance::Spin => Arc::new(Spin::new()),
            Instance::OrdinarySo3 => Arc::new(Ordinary::new("ORDINARY_SO3", GroupDescriptor::so3())),
        }
    }
}

impl FromStr for Instance {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Instance::ALL
            .iter()
            .copied()
            .find(|i| i.as_str() == s)
            .ok_or_else(|| Error::UnknownInstance(s.to_string()))
    }
}

pub fn instance(name: &str) -> Result<SharedCm> {
    Ok(name.parse::<Instance>()?.build())
}

/// Maximum residuals of the crossed-module axioms over random samples.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CrossedModuleReport {
    pub samples: usize,
    pub membership: f64,
    pub homomorphism: f64,
    pub equivariance: f64,
    pub peiffer: f64,
    pub action_g: f64,
    pub action_h: f64,
    pub t_star_fd: f64,
    pub alpha_star_fd: f64,
    pub a1_fd: f64,
    pub a2_left_fd: f64,
    pub a2_right_fd: f64,
}

impl CrossedModuleReport {
    /// (name, residual, tolerance) for every field.
    pub fn rows(&self) -> Vec<(&'static str, f64, f64)> {
        alloc::vec![
            ("membership", self.membership, 1e-8),
            ("homomorphism", self.homomorphism, 1e-8),
            ("equivariance", self.equivariance, 1e-8),
            ("peiffer", self.peiffer, 1e-8),
            ("action_g", self.action_g, 1e-8),
            ("action_h", self.action_h, 1e-8),
            ("t_star_fd", self.t_star_fd, 1e-5),
            ("alpha_star_fd", self.alpha_star_fd, 1e-5),
            ("a1_fd", self.a1_fd, 1e-5),
            ("a2_left_fd", self.a2_left_fd, 1e-5),
            ("a2_right_fd", self.a2_right_fd, 1e-5),
        ]
    }

    pub fn passed(&self) -> bool {
        self.rows().iter().all(|(_, r, tol)| *r < *tol)
    }
}

/// Evaluate every axiom on `n_samples` random pairs.
///
/// Right-hand sides are built with projected group products, so a map that
/// leaves the group (e.g. a rescaled `t`) shows up as a residual.
pub fn check_axioms(cm: &dyn CrossedModule, n_samples: usize, seed: u64) -> CrossedModuleReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (gg, hg) = (cm.g(), cm.h());
    let gmul = |a: &CMat, b: &CMat| gg.project(&(*a * *b));
    let hmul = |a: &CMat, b: &CMat| hg.project(&(*a * *b));
    let ginv = |a: &CMat| gg.project(&a.inverse().unwrap_or_else(|| gg.identity()));
    let hinv = |a: &CMat| hg.project(&a.inverse().unwrap_or_else(|| hg.identity()));
    let fd = TOLERANCES.mc_step;
    let mut r = CrossedModuleReport { samples: n_samples, ..Default::default() };
    let up = |slot: &mut f64, v: f64| {
        if !(v <= *slot) {
            *slot = v;
        }
    };
    for _ in 0..n_samples {
        let g1 = gg.random_matrix(&mut rng, 1.5);
        let g2 = gg.random_matrix(&mut rng, 1.5);
        let h1 = hg.random_matrix(&mut rng, 1.5);
        let h2 = hg.random_matrix(&mut rng, 1.5);
        let x = gg.random_coeffs(&mut rng, 1.0);
        let y = hg.random_coeffs(&mut rng, 1.0);

        up(&mut r.membership, gg.constraint_residual(&cm.t(&h1)));
        up(&mut r.membership, hg.constraint_residual(&cm.alpha(&g1, &h1)));
        up(&mut r.homomorphism, cm.t(&(h1 * h2)).dist(&gmul(&cm.t(&h1), &cm.t(&h2))));
        up(&mut r.equivariance, cm.t(&cm.alpha(&g1, &h1)).dist(&gmul(&gmul(&g1, &cm.t(&h1)), &ginv(&g1))));
        up(&mut r.peiffer, cm.alpha(&cm.t(&h1), &h2).dist(&hmul(&hmul(&h1, &h2), &hinv(&h1))));
        up(&mut r.action_g, cm.alpha(&(g1 * g2), &h1).dist(&cm.alpha(&g1, &cm.alpha(&g2, &h1))));
        up(&mut r.action_h, cm.alpha(&g1, &(h1 * h2)).dist(&hmul(&cm.alpha(&g1, &h1), &cm.alpha(&g1, &h2))));

        // t_* against d/dε t(exp εY)
        let ts_fd = lie::mc_coeffs(gg, &|e| cm.t(&hg.exp_coeffs(&lie::coeffs_scale(&y, e))), 0.0, Side::Right, fd);
        up(&mut r.t_star_fd, coeffs_dist(&ts_fd, &cm.t_star(&y)));
        // (α_g)_* against d/dε α(g, exp εY)
        let as_fd =
            lie::mc_coeffs(hg, &|e| cm.alpha(&g1, &hg.exp_coeffs(&lie::coeffs_scale(&y, e))), 0.0, Side::Right, fd);
        up(&mut r.alpha_star_fd, coeffs_dist(&as_fd, &cm.alpha_star(&g1, &y)));
        // α_* against d/dε (α_{exp εX})_* Y
        if hg.dim() > 0 {
            let d = lie::central_derivative(
                &|e| hg.reconstruct(&cm.alpha_star(&gg.exp_coeffs(&lie::coeffs_scale(&x, e)), &y)),
                0.0,
                fd,
            );
            up(&mut r.a1_fd, coeffs_dist(&hg.expand_unchecked(&d), &cm.a1(&x, &y)));
        }
        // a2L / a2R against one-sided translations of d/dε α(exp εX, h)
        let curve = |e: f64| cm.alpha(&gg.exp_coeffs(&lie::coeffs_scale(&x, e)), &h1);
        let d = lie::central_derivative(&curve, 0.0, fd);
        let hi = h1.inverse().unwrap_or_else(|| hg.identity());
        up(&mut r.a2_left_fd, coeffs_dist(&hg.expand_unchecked(&(hi * d)), &cm.a2_left(&h1, &x)));
        up(&mut r.a2_right_fd, coeffs_dist(&hg.expand_unchecked(&(d * hi)), &cm.a2_right(&h1, &x)));
    }
    r
}

/// An element `(h, g)` of `Mor(Γ) = H ⋊ G`: a 2-cell `g ⇒ t(h) g`.
#[derive(Clone, Debug)]
pub struct TwoGroupMorphism {
    cm: SharedCm,
    h: CMat,
    g: CMat,
}

impl TwoGroupMorphism {
    /// Build from matrices, projecting both onto their groups.
    pub fn new(cm: &SharedCm, h: CMat, g: CMat) -> Self {
        TwoGroupMorphism { h: cm.h().project(&h), g: cm.g().project(&g), cm: cm.clone() }
    }

    /// The identity 2-cell `(1, g)`.
    pub fn identity(cm: &SharedCm, g: CMat) -> Self {
        Self::new(cm, cm.h().identity(), g)
    }

    pub fn cm(&self) -> &SharedCm {
        &self.cm
    }
    pub fn h(&self) -> &CMat {
        &self.h
    }
    pub fn g(&self) -> &CMat {
        &self.g
    }
    pub fn source(&self) -> CMat {
        self.g
    }
    pub fn target(&self) -> CMat {
        self.cm.g().project(&(self.cm.t(&self.h) * self.g))
    }

    /// Inverse for vertical composition: `(h⁻¹, t(h) g)`.
    pub fn vinverse(&self) -> Self {
        let hi = self.h.inverse().unwrap_or_else(|| self.cm.h().identity());
        Self::new(&self.cm, hi, self.target())
    }

    /// Inverse for the group product: `(α(g⁻¹, h⁻¹), g⁻¹)`.
    pub fn pinverse(&self) -> Self {
        let gi = self.g.inverse().unwrap_or_else(|| self.cm.g().identity());
        let hi = self.h.inverse().unwrap_or_else(|| self.cm.h().identity());
        Self::new(&self.cm, self.cm.alpha(&gi, &hi), gi)
    }

    pub fn dist(&self, o: &TwoGroupMorphism) -> f64 {
        self.h.dist(&o.h) + self.g.dist(&o.g)
    }
}

/// `(h₂, g₂) • (h₁, g₁) = (h₂ h₁, g₁)`; needs `s(m₂) = t(m₁)`.
pub fn mor_vcompose(m2: &TwoGroupMorphism, m1: &TwoGroupMorphism) -> Result<TwoGroupMorphism> {
    let residual = m2.source().dist(&m1.target());
    if !(residual <= TOLERANCES.composable) {
        return Err(Error::NonComposable { residual });
    }
    Ok(TwoGroupMorphism::new(&m1.cm, m2.h * m1.h, m1.g))
}

/// `(h₂, g₂) · (h₁, g₁) = (h₂ α(g₂, h₁), g₂ g₁)`.
pub fn mor_product(m2: &TwoGroupMorphism, m1: &TwoGroupMorphism) -> TwoGroupMorphism {
    TwoGroupMorphism::new(&m1.cm, m2.h * m2.cm.alpha(&m2.g, &m1.h), m2.g * m1.g)
}
