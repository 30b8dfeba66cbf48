//! Paths `[0,1] → ℝᵈ` and bigons `[0,1]² → ℝᵈ` with exact first derivatives.
//!
//! A bigon `Σ(s, t)` is a family of paths `Σ(s, ·)` from `x = Σ(s, 0)` to
//! `y = Σ(s, 1)`; its source is `Σ(0, ·)` and its target `Σ(1, ·)`.

use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::expr::{parse_expr, Env, Expr, Jet, Var};
use super::{vadd, vscale, vsub, Chart, Vec3};
use crate::error::{Error, Result};
use crate::math;

pub trait Path: Send + Sync {
    /// Point and velocity at `u`.
    fn eval(&self, u: f64) -> (Vec3, Vec3);

    fn point(&self, u: f64) -> Vec3 {
        self.eval(u).0
    }
}

pub trait Bigon: Send + Sync {
    /// Point, `∂_s Σ`, `∂_t Σ`.
    fn eval(&self, s: f64, t: f64) -> (Vec3, Vec3, Vec3);

    fn point(&self, s: f64, t: f64) -> Vec3 {
        self.eval(s, t).0
    }
}

pub type SharedPath = Arc<dyn Path>;
pub type SharedBigon = Arc<dyn Bigon>;

/// The boundary-flat step `σ(u) = u − sin(2πu)/(2π)` and its derivative.
#[inline]
pub fn smooth_step(u: f64) -> (f64, f64) {
    let w = 2.0 * math::PI * u;
    (u - math::sin(w) / (2.0 * math::PI), 1.0 - math::cos(w))
}

/// A reparameterization of `[0,1]` fixing both ends.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Reparam {
    Identity,
    SmoothStep,
    /// `u ↦ u + c·u(1−u)`, monotone for |c| < 1
    Quadratic(f64),
}

impl Reparam {
    pub fn apply(&self, u: f64) -> (f64, f64) {
        match *self {
            Reparam::Identity => (u, 1.0),
            Reparam::SmoothStep => smooth_step(u),
            Reparam::Quadratic(c) => (u + c * u * (1.0 - u), 1.0 + c * (1.0 - 2.0 * u)),
        }
    }
}

/// A path given by `d` expressions in `u`.
#[derive(Clone, Debug)]
pub struct ExprPath {
    dim: usize,
    comps: Vec<Expr>,
    sitting: bool,
}

impl ExprPath {
    pub fn new(dim: usize, comps: Vec<Expr>, sitting: bool) -> Result<Self> {
        if comps.len() != dim {
            return Err(Error::Invalid(alloc::format!("path needs {dim} components")));
        }
        for e in &comps {
            e.check_vars(&[Var::U])?;
        }
        Ok(ExprPath { dim, comps, sitting })
    }

    pub fn parse(dim: usize, comps: &[&str], sitting: bool) -> Result<Self> {
        let comps = comps.iter().map(|c| parse_expr(c)).collect::<Result<Vec<_>>>()?;
        Self::new(dim, comps, sitting)
    }

    pub fn components(&self) -> &[Expr] {
        &self.comps
    }

    pub fn sitting(&self) -> bool {
        self.sitting
    }
}

impl Path for ExprPath {
    fn eval(&self, u: f64) -> (Vec3, Vec3) {
        let (w, dw) = if self.sitting { smooth_step(u) } else { (u, 1.0) };
        let env = Env { u: Jet::<1>::variable(w, 0), ..Env::zero() };
        let mut p = [0.0; 3];
        let mut v = [0.0; 3];
        for i in 0..self.dim {
            let j = self.comps[i].eval(&env);
            p[i] = j.v;
            v[i] = j.d[0] * dw;
        }
        (p, v)
    }
}

/// A bigon given by `d` expressions in `(s, t)`.
#[derive(Clone, Debug)]
pub struct ExprBigon {
    dim: usize,
    comps: Vec<Expr>,
}

impl ExprBigon {
    pub fn new(dim: usize, comps: Vec<Expr>) -> Result<Self> {
        if comps.len() != dim {
            return Err(Error::Invalid(alloc::format!("bigon needs {dim} components")));
        }
        for e in &comps {
            e.check_vars(&[Var::S, Var::T])?;
        }
        Ok(ExprBigon { dim, comps })
    }

    pub fn parse(dim: usize, comps: &[&str]) -> Result<Self> {
        let comps = comps.iter().map(|c| parse_expr(c)).collect::<Result<Vec<_>>>()?;
        Self::new(dim, comps)
    }

    pub fn components(&self) -> &[Expr] {
        &self.comps
    }
}

impl Bigon for ExprBigon {
    fn eval(&self, s: f64, t: f64) -> (Vec3, Vec3, Vec3) {
        let env = Env { s: Jet::<2>::variable(s, 0), t: Jet::<2>::variable(t, 1), ..Env::zero() };
        let (mut p, mut ds, mut dt) = ([0.0; 3], [0.0; 3], [0.0; 3]);
        for i in 0..self.dim {
            let j = self.comps[i].eval(&env);
            p[i] = j.v;
            ds[i] = j.d[0];
            dt[i] = j.d[1];
        }
        (p, ds, dt)
    }
}

/// A path given by a closure returning point and velocity.
pub struct FnPath<F>(pub F);

impl<F: Fn(f64) -> (Vec3, Vec3) + Send + Sync> Path for FnPath<F> {
    fn eval(&self, u: f64) -> (Vec3, Vec3) {
        (self.0)(u)
    }
}

/// A bigon given by a closure returning point, `∂_s`, `∂_t`.
pub struct FnBigon<F>(pub F);

impl<F: Fn(f64, f64) -> (Vec3, Vec3, Vec3) + Send + Sync> Bigon for FnBigon<F> {
    fn eval(&self, s: f64, t: f64) -> (Vec3, Vec3, Vec3) {
        (self.0)(s, t)
    }
}

pub fn constant_path(x: Vec3) -> SharedPath {
    Arc::new(FnPath(move |_| (x, [0.0; 3])))
}

/// Straight segment from `a` to `b`.
pub fn line(a: Vec3, b: Vec3) -> SharedPath {
    let d = vsub(&b, &a);
    Arc::new(FnPath(move |u| (vadd(&a, &vscale(&d, u)), d)))
}

/// `u ↦ γ(r(u))`.
pub fn reparam_path(p: SharedPath, r: Reparam) -> SharedPath {
    Arc::new(FnPath(move |u| {
        let (w, dw) = r.apply(u);
        let (x, v) = p.eval(w);
        (x, vscale(&v, dw))
    }))
}

/// `u ↦ γ(a + (b − a) u)`.
pub fn restrict_path(p: SharedPath, a: f64, b: f64) -> SharedPath {
    Arc::new(FnPath(move |u| {
        let (x, v) = p.eval(a + (b - a) * u);
        (x, vscale(&v, b - a))
    }))
}

pub fn reverse_path(p: SharedPath) -> SharedPath {
    Arc::new(FnPath(move |u| {
        let (x, v) = p.eval(1.0 - u);
        (x, vscale(&v, -1.0))
    }))
}

/// `second ∘ first`: `first` on `[0, ½]`, `second` on `[½, 1]`, each with
/// sitting instants so the composite is smooth.
pub fn concat(first: SharedPath, second: SharedPath) -> SharedPath {
    Arc::new(FnPath(move |u| {
        let (p, w) = if u <= 0.5 { (&first, 2.0 * u) } else { (&second, 2.0 * u - 1.0) };
        let (w, dw) = smooth_step(w);
        let (x, v) = p.eval(w);
        (x, vscale(&v, 2.0 * dw))
    }))
}

/// `Σ(s, ·)` as a path.
pub fn slice_path(b: SharedBigon, s: f64) -> SharedPath {
    Arc::new(FnPath(move |t| {
        let (x, _, dt) = b.eval(s, t);
        (x, dt)
    }))
}

pub fn source_path(b: SharedBigon) -> SharedPath {
    slice_path(b, 0.0)
}

pub fn target_path(b: SharedBigon) -> SharedPath {
    slice_path(b, 1.0)
}

/// `Σ(s, t) = γ(t)`: the identity bigon of `γ`.
pub fn degenerate_bigon(p: SharedPath) -> SharedBigon {
    Arc::new(FnBigon(move |_, t| {
        let (x, v) = p.eval(t);
        (x, [0.0; 3], v)
    }))
}

/// `(1 − σ(s)) γ(t) + σ(s) γ'(t)` with a sitting step in `s`.
pub fn interpolate(a: SharedPath, b: SharedPath) -> SharedBigon {
    Arc::new(FnBigon(move |s, t| {
        let (w, dw) = smooth_step(s);
        let (xa, va) = a.eval(t);
        let (xb, vb) = b.eval(t);
        let x = vadd(&vscale(&xa, 1.0 - w), &vscale(&xb, w));
        let ds = vscale(&vsub(&xb, &xa), dw);
        let dt = vadd(&vscale(&va, 1.0 - w), &vscale(&vb, w));
        (x, ds, dt)
    }))
}

pub fn reparam_s(b: SharedBigon, r: Reparam) -> SharedBigon {
    Arc::new(FnBigon(move |s, t| {
        let (w, dw) = r.apply(s);
        let (x, ds, dt) = b.eval(w, t);
        (x, vscale(&ds, dw), dt)
    }))
}

pub fn reparam_t(b: SharedBigon, r: Reparam) -> SharedBigon {
    Arc::new(FnBigon(move |s, t| {
        let (w, dw) = r.apply(t);
        let (x, ds, dt) = b.eval(s, w);
        (x, ds, vscale(&dt, dw))
    }))
}

/// `Σ' • Σ`: `Σ` for `s ∈ [0, ½]`, then `Σ'`.
pub fn vcompose(second: SharedBigon, first: SharedBigon) -> SharedBigon {
    Arc::new(FnBigon(move |s, t| {
        let (b, w) = if s <= 0.5 { (&first, 2.0 * s) } else { (&second, 2.0 * s - 1.0) };
        let (w, dw) = smooth_step(w);
        let (x, ds, dt) = b.eval(w, t);
        (x, vscale(&ds, 2.0 * dw), dt)
    }))
}

/// `Σ̃ ∘ Σ`: `Σ` for `t ∈ [0, ½]`, then `Σ̃` (which starts where `Σ` ends).
pub fn hcompose(second: SharedBigon, first: SharedBigon) -> SharedBigon {
    Arc::new(FnBigon(move |s, t| {
        let (b, w) = if t <= 0.5 { (&first, 2.0 * t) } else { (&second, 2.0 * t - 1.0) };
        let (w, dw) = smooth_step(w);
        let (x, ds, dt) = b.eval(s, w);
        (x, ds, vscale(&dt, 2.0 * dw))
    }))
}

/// `Σ(s, t) ↦ Σ(1 − s, t)`.
pub fn reverse_bigon(b: SharedBigon) -> SharedBigon {
    Arc::new(FnBigon(move |s, t| {
        let (x, ds, dt) = b.eval(1.0 - s, t);
        (x, vscale(&ds, -1.0), dt)
    }))
}

/// Restrict to `s ∈ [a, b]`.
pub fn restrict_s(b: SharedBigon, lo: f64, hi: f64) -> SharedBigon {
    Arc::new(FnBigon(move |s, t| {
        let (x, ds, dt) = b.eval(lo + (hi - lo) * s, t);
        (x, vscale(&ds, hi - lo), dt)
    }))
}

/// Swap the roles of `s` and `t` (not a bigon in general).
pub fn transpose(b: SharedBigon) -> SharedBigon {
    Arc::new(FnBigon(move |s, t| {
        let (x, ds, dt) = b.eval(t, s);
        (x, dt, ds)
    }))
}

/// Corner residual of a bigon over a 64×64 grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryReport {
    pub x: Vec3,
    pub y: Vec3,
    pub residual: f64,
}

impl BoundaryReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.residual < tol
    }
}

/// Check `Σ(s,0) = x`, `Σ(s,1) = y`; corners default to `Σ(0,0)`, `Σ(0,1)`.
pub fn boundary_check_bigon(b: &dyn Bigon, corners: Option<(Vec3, Vec3)>) -> BoundaryReport {
    let (x, y) = corners.unwrap_or_else(|| (b.point(0.0, 0.0), b.point(0.0, 1.0)));
    let mut residual = 0.0f64;
    for k in 0..64 {
        let s = k as f64 / 63.0;
        residual = residual.max(super::vnorm(&vsub(&b.point(s, 0.0), &x)));
        residual = residual.max(super::vnorm(&vsub(&b.point(s, 1.0), &y)));
    }
    BoundaryReport { x, y, residual }
}

/// Fail unless `b` is a bigon.
pub fn require_bigon(b: &dyn Bigon, tol: f64) -> Result<BoundaryReport> {
    let r = boundary_check_bigon(b, None);
    if !(r.residual < tol) {
        return Err(Error::NotABigon { residual: r.residual });
    }
    Ok(r)
}

/// Fail unless 512 samples of `p` lie in `chart`.
pub fn require_path_in_chart(p: &dyn Path, chart: &Chart, what: &str) -> Result<()> {
    for k in 0..512 {
        let u = k as f64 / 511.0;
        let x = p.point(u);
        if !chart.contains(&x, 0.0) || x.iter().any(|c| !c.is_finite()) {
            return Err(Error::OutsideChart(what.to_string()));
        }
    }
    Ok(())
}

/// Fail unless a 64×64 grid of `b` lies in `chart`.
pub fn require_bigon_in_chart(b: &dyn Bigon, chart: &Chart, what: &str) -> Result<()> {
    for i in 0..64 {
        for j in 0..64 {
            let x = b.point(i as f64 / 63.0, j as f64 / 63.0);
            if !chart.contains(&x, 0.0) || x.iter().any(|c| !c.is_finite()) {
                return Err(Error::OutsideChart(what.to_string()));
            }
        }
    }
    Ok(())
}
