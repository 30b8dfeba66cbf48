//! Charts, Lie-algebra-valued forms, group-valued maps, paths and bigons.

pub mod calculus;
pub mod expr;
pub mod paths;
pub mod quadrature;

use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lie::{self, coeffs_zero, Coeffs, Group, Side, TOLERANCES};
use crate::linalg::CMat;
use expr::{parse_expr, Expr, Var};

/// Points and tangent vectors; components beyond the chart dimension are 0.
pub type Vec3 = [f64; 3];

pub fn vadd(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn vsub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn vscale(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn vnorm(a: &Vec3) -> f64 {
    crate::math::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2])
}

/// An axis-aligned box in ℝᵈ, d ≤ 3.
#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    dim: usize,
    lo: Vec3,
    hi: Vec3,
}

impl Chart {
    pub fn new(dim: usize, lo: &[f64], hi: &[f64]) -> Result<Self> {
        if !(1..=3).contains(&dim) || lo.len() != dim || hi.len() != dim {
            return Err(Error::Invalid("chart needs 1 to 3 axes with matching bounds".to_string()));
        }
        let mut l = [0.0; 3];
        let mut h = [0.0; 3];
        for i in 0..dim {
            if !(lo[i] < hi[i]) {
                return Err(Error::Invalid(alloc::format!("empty chart interval on axis {}", i + 1)));
            }
            l[i] = lo[i];
            h[i] = hi[i];
        }
        Ok(Chart { dim, lo: l, hi: h })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn lo(&self) -> &Vec3 {
        &self.lo
    }
    pub fn hi(&self) -> &Vec3 {
        &self.hi
    }

    /// Inside the box shrunk by `margin` on every side.
    pub fn contains(&self, p: &Vec3, margin: f64) -> bool {
        (0..self.dim).all(|i| p[i] >= self.lo[i] + margin && p[i] <= self.hi[i] - margin)
            && (self.dim..3).all(|i| p[i] == 0.0)
    }

    pub fn center(&self) -> Vec3 {
        let mut c = [0.0; 3];
        for i in 0..self.dim {
            c[i] = 0.5 * (self.lo[i] + self.hi[i]);
        }
        c
    }

    /// Regular probe grid with `k` points per axis, shrunk by `margin`.
    pub fn grid(&self, k: usize, margin: f64) -> Vec<Vec3> {
        let mut pts = Vec::new();
        let axis = |i: usize, j: usize| {
            let (a, b) = (self.lo[i] + margin, self.hi[i] - margin);
            if k == 1 {
                0.5 * (a + b)
            } else {
                a + (b - a) * j as f64 / (k - 1) as f64
            }
        };
        let n = [k, if self.dim > 1 { k } else { 1 }, if self.dim > 2 { k } else { 1 }];
        for a in 0..n[0] {
            for b in 0..n[1] {
                for c in 0..n[2] {
                    let mut p = [0.0; 3];
                    let idx = [a, b, c];
                    for i in 0..self.dim {
                        p[i] = axis(i, idx[i]);
                    }
                    pts.push(p);
                }
            }
        }
        pts
    }

    /// The box with `margin` removed; `None` if that empties it.
    pub fn shrink(&self, margin: f64) -> Option<Chart> {
        let lo: Vec<f64> = (0..self.dim).map(|i| self.lo[i] + margin).collect();
        let hi: Vec<f64> = (0..self.dim).map(|i| self.hi[i] - margin).collect();
        Chart::new(self.dim, &lo, &hi).ok()
    }

    pub fn coordinate_vars(&self) -> Vec<Var> {
        (0..self.dim as u8).map(Var::X).collect()
    }
}

/// A Lie-algebra-valued 1-form on a chart.
pub trait OneForm: Send + Sync {
    fn algebra(&self) -> &Group;
    fn eval(&self, p: &Vec3, v: &Vec3) -> Coeffs;
}

/// A Lie-algebra-valued 2-form; antisymmetric in its two vectors.
pub trait TwoForm: Send + Sync {
    fn algebra(&self) -> &Group;
    fn eval(&self, p: &Vec3, x: &Vec3, y: &Vec3) -> Coeffs;
}

/// A smooth map from a chart into a matrix group.
pub trait GroupMap: Send + Sync {
    fn group(&self) -> &Group;
    fn value(&self, p: &Vec3) -> CMat;

    /// Right-invariant Maurer–Cartan pullback `(∂_v g) g⁻¹`.
    fn mc_right(&self, p: &Vec3, v: &Vec3) -> Coeffs {
        mc_along(self, p, v, Side::Right)
    }

    /// Left-invariant Maurer–Cartan pullback `g⁻¹ (∂_v g)`.
    fn mc_left(&self, p: &Vec3, v: &Vec3) -> Coeffs {
        mc_along(self, p, v, Side::Left)
    }
}

fn mc_along<M: GroupMap + ?Sized>(m: &M, p: &Vec3, v: &Vec3, side: Side) -> Coeffs {
    if m.group().dim() == 0 || *v == [0.0; 3] {
        return coeffs_zero(m.group().dim());
    }
    lie::mc_coeffs(m.group(), &|e| m.value(&vadd(p, &vscale(v, e))), 0.0, side, TOLERANCES.mc_step)
}

pub type Form1 = Arc<dyn OneForm>;
pub type Form2 = Arc<dyn TwoForm>;
pub type Map = Arc<dyn GroupMap>;

fn parse_all(texts: &[&str], allowed: &[Var]) -> Result<Vec<Expr>> {
    texts
        .iter()
        .map(|t| {
            let e = parse_expr(t)?;
            e.check_vars(allowed)?;
            Ok(e)
        })
        .collect()
}

/// `Σ_i Σ_k c_{ik}(x) dx_i ⊗ E_k`.
#[derive(Clone, Debug)]
pub struct ExprOneForm {
    algebra: Group,
    comps: Vec<Vec<Expr>>,
}

impl ExprOneForm {
    /// `rows[i][k]`: coefficient of `E_k` in the `dx_{i+1}` component.
    pub fn new(algebra: &Group, chart: &Chart, rows: Vec<Vec<Expr>>) -> Result<Self> {
        if rows.len() != chart.dim() || rows.iter().any(|r| r.len() != algebra.dim()) {
            return Err(Error::Invalid(alloc::format!(
                "1-form needs {} rows of {} coefficients",
                chart.dim(),
                algebra.dim()
            )));
        }
        let vars = chart.coordinate_vars();
        for e in rows.iter().flatten() {
            e.check_vars(&vars)?;
        }
        Ok(ExprOneForm { algebra: algebra.clone(), comps: rows })
    }

    pub fn parse(algebra: &Group, chart: &Chart, rows: &[Vec<&str>]) -> Result<Self> {
        let vars = chart.coordinate_vars();
        let rows = rows.iter().map(|r| parse_all(r, &vars)).collect::<Result<Vec<_>>>()?;
        Self::new(algebra, chart, rows)
    }

    pub fn zero(algebra: &Group, chart: &Chart) -> Self {
        let rows = (0..chart.dim()).map(|_| (0..algebra.dim()).map(|_| Expr::num(0.0)).collect()).collect();
        ExprOneForm { algebra: algebra.clone(), comps: rows }
    }

    pub fn rows(&self) -> &[Vec<Expr>] {
        &self.comps
    }
}

impl OneForm for ExprOneForm {
    fn algebra(&self) -> &Group {
        &self.algebra
    }
    fn eval(&self, p: &Vec3, v: &Vec3) -> Coeffs {
        let mut out = coeffs_zero(self.algebra.dim());
        for (i, row) in self.comps.iter().enumerate() {
            if v[i] == 0.0 {
                continue;
            }
            for (k, e) in row.iter().enumerate() {
                if !e.is_zero() {
                    out[k] += v[i] * e.at(p);
                }
            }
        }
        out
    }
}

/// `Σ_{i<j} Σ_k c_{ijk}(x) dx_i∧dx_j ⊗ E_k`.
#[derive(Clone, Debug)]
pub struct ExprTwoForm {
    algebra: Group,
    comps: Vec<((usize, usize), Vec<Expr>)>,
}

impl ExprTwoForm {
    /// `comps`: `((i, j), coefficients)` with `i < j`, zero-based axes.
    pub fn new(algebra: &Group, chart: &Chart, comps: Vec<((usize, usize), Vec<Expr>)>) -> Result<Self> {
        let vars = chart.coordinate_vars();
        for ((i, j), c) in &comps {
            if !(i < j && *j < chart.dim()) || c.len() != algebra.dim() {
                return Err(Error::Invalid(alloc::format!("bad 2-form component ({}, {})", i + 1, j + 1)));
            }
            for e in c {
                e.check_vars(&vars)?;
            }
        }
        Ok(ExprTwoForm { algebra: algebra.clone(), comps })
    }

    pub fn parse(algebra: &Group, chart: &Chart, comps: &[((usize, usize), Vec<&str>)]) -> Result<Self> {
        let vars = chart.coordinate_vars();
        let comps = comps.iter().map(|(ij, c)| Ok((*ij, parse_all(c, &vars)?))).collect::<Result<Vec<_>>>()?;
        Self::new(algebra, chart, comps)
    }

    pub fn zero(algebra: &Group) -> Self {
        ExprTwoForm { algebra: algebra.clone(), comps: Vec::new() }
    }

    pub fn components(&self) -> &[((usize, usize), Vec<Expr>)] {
        &self.comps
    }
}

impl TwoForm for ExprTwoForm {
    fn algebra(&self) -> &Group {
        &self.algebra
    }
    fn eval(&self, p: &Vec3, x: &Vec3, y: &Vec3) -> Coeffs {
        let mut out = coeffs_zero(self.algebra.dim());
        for ((i, j), c) in &self.comps {
            let w = x[*i] * y[*j] - x[*j] * y[*i];
            if w == 0.0 {
                continue;
            }
            for (k, e) in c.iter().enumerate() {
                if !e.is_zero() {
                    out[k] += w * e.at(p);
                }
            }
        }
        out
    }
}

/// A 1-form given by a closure.
pub struct FnOneForm<F> {
    algebra: Group,
    f: F,
}

impl<F: Fn(&Vec3, &Vec3) -> Coeffs + Send + Sync> FnOneForm<F> {
    pub fn new(algebra: &Group, f: F) -> Self {
        FnOneForm { algebra: algebra.clone(), f }
    }
}

impl<F: Fn(&Vec3, &Vec3) -> Coeffs + Send + Sync> OneForm for FnOneForm<F> {
    fn algebra(&self) -> &Group {
        &self.algebra
    }
    fn eval(&self, p: &Vec3, v: &Vec3) -> Coeffs {
        (self.f)(p, v)
    }
}

/// A 2-form given by a closure; callers keep it antisymmetric.
pub struct FnTwoForm<F> {
    algebra: Group,
    f: F,
}

impl<F: Fn(&Vec3, &Vec3, &Vec3) -> Coeffs + Send + Sync> FnTwoForm<F> {
    pub fn new(algebra: &Group, f: F) -> Self {
        FnTwoForm { algebra: algebra.clone(), f }
    }
}

impl<F: Fn(&Vec3, &Vec3, &Vec3) -> Coeffs + Send + Sync> TwoForm for FnTwoForm<F> {
    fn algebra(&self) -> &Group {
        &self.algebra
    }
    fn eval(&self, p: &Vec3, x: &Vec3, y: &Vec3) -> Coeffs {
        (self.f)(p, x, y)
    }
}

pub fn zero_one_form(algebra: &Group) -> Form1 {
    let d = algebra.dim();
    Arc::new(FnOneForm::new(algebra, move |_, _| coeffs_zero(d)))
}

pub fn zero_two_form(algebra: &Group) -> Form2 {
    Arc::new(ExprTwoForm::zero(algebra))
}

/// `c · ω`.
pub fn scaled_one_form(form: Form1, c: f64) -> Form1 {
    let alg = form.algebra().clone();
    Arc::new(FnOneForm::new(&alg, move |p, v| lie::coeffs_scale(&form.eval(p, v), c)))
}

/// `x ↦ exp(Σ ξ_k(x) E_k)`.
#[derive(Clone, Debug)]
pub struct ExprGroupMap {
    group: Group,
    gens: Vec<Expr>,
}

impl ExprGroupMap {
    pub fn new(group: &Group, chart: &Chart, gens: Vec<Expr>) -> Result<Self> {
        if gens.len() != group.dim() {
            return Err(Error::Invalid(alloc::format!("group map needs {} generator components", group.dim())));
        }
        let vars = chart.coordinate_vars();
        for e in &gens {
            e.check_vars(&vars)?;
        }
        Ok(ExprGroupMap { group: group.clone(), gens })
    }

    pub fn parse(group: &Group, chart: &Chart, gens: &[&str]) -> Result<Self> {
        Self::new(group, chart, parse_all(gens, &chart.coordinate_vars())?)
    }

    pub fn generators(&self) -> &[Expr] {
        &self.gens
    }

    pub fn generator(&self, p: &Vec3) -> Coeffs {
        self.gens.iter().map(|e| e.at(p)).collect()
    }
}

impl GroupMap for ExprGroupMap {
    fn group(&self) -> &Group {
        &self.group
    }
    fn value(&self, p: &Vec3) -> CMat {
        self.group.exp_coeffs(&self.generator(p))
    }
}

/// A group map given by a closure.
pub struct FnGroupMap<F> {
    group: Group,
    f: F,
}

impl<F: Fn(&Vec3) -> CMat + Send + Sync> FnGroupMap<F> {
    pub fn new(group: &Group, f: F) -> Self {
        FnGroupMap { group: group.clone(), f }
    }
}

impl<F: Fn(&Vec3) -> CMat + Send + Sync> GroupMap for FnGroupMap<F> {
    fn group(&self) -> &Group {
        &self.group
    }
    fn value(&self, p: &Vec3) -> CMat {
        (self.f)(p)
    }
}

pub fn constant_map(group: &Group, value: CMat) -> Map {
    Arc::new(FnGroupMap::new(group, move |_| value))
}

pub fn identity_map(group: &Group) -> Map {
    constant_map(group, group.identity())
}

/// Pointwise product `x ↦ a(x) b(x)`.
pub fn product_map(a: Map, b: Map) -> Map {
    let g = a.group().clone();
    Arc::new(FnGroupMap::new(&g, move |p| a.value(p) * b.value(p)))
}

/// Pointwise inverse.
pub fn inverse_map(a: Map) -> Map {
    let g = a.group().clone();
    let id = g.identity();
    Arc::new(FnGroupMap::new(&g, move |p| a.value(p).inverse().unwrap_or(id)))
}
