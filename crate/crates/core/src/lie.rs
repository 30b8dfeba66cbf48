//! Matrix Lie groups and their algebras.
//!
//! A [`GroupDescriptor`] fixes a matrix representation together with a real
//! basis of the Lie algebra. Algebra elements are coefficient vectors over
//! that basis; re-expansion of an arbitrary matrix uses the real Gram matrix
//! `⟨E_k, E_l⟩ = Re tr(E_k† E_l)`.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use arrayvec::ArrayVec;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};
use crate::math;

/// Coefficient vector over an algebra basis.
pub type Coeffs = ArrayVec<f64, 9>;

pub type Group = Arc<GroupDescriptor>;

/// Numerical thresholds used across the crate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub basis_closure: f64,
    pub membership: f64,
    pub reexpansion: f64,
    pub log_radius: f64,
    pub fd_step: f64,
    pub mc_step: f64,
    pub fake_flat: f64,
    pub bigon_corner: f64,
    pub composable: f64,
}

pub const TOLERANCES: Tolerances = Tolerances {
    basis_closure: 1e-9,
    membership: 1e-7,
    reexpansion: 1e-8,
    log_radius: 1.0,
    fd_step: 1e-4,
    mc_step: 1e-3,
    fake_flat: 1e-4,
    bigon_corner: 1e-9,
    composable: 1e-7,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarField {
    Real,
    Complex,
}

/// Which constraint (and projection) the matrices obey.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupKind {
    Trivial,
    Unitary1,
    SpecialUnitary,
    SpecialOrthogonal,
}

#[derive(Debug)]
pub struct GroupDescriptor {
    name: String,
    n: usize,
    field: ScalarField,
    kind: GroupKind,
    basis: Vec<CMat>,
    gram_inv: Vec<f64>,
}

pub fn coeffs_zero(dim: usize) -> Coeffs {
    (0..dim).map(|_| 0.0).collect()
}

pub fn coeffs_add(a: &[f64], b: &[f64]) -> Coeffs {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn coeffs_sub(a: &[f64], b: &[f64]) -> Coeffs {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn coeffs_scale(a: &[f64], s: f64) -> Coeffs {
    a.iter().map(|x| x * s).collect()
}

pub fn coeffs_norm(a: &[f64]) -> f64 {
    math::sqrt(a.iter().map(|x| x * x).sum())
}

pub fn coeffs_dist(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    coeffs_norm(&coeffs_sub(a, b))
}

fn invert_real(n: usize, m: &[f64]) -> Option<Vec<f64>> {
    // Gauss-Jordan with partial pivoting; n ≤ 9.
    let mut a: Vec<f64> = m.to_vec();
    let mut inv: Vec<f64> = (0..n * n).map(|k| if k / n == k % n { 1.0 } else { 0.0 }).collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))?;
        if a[piv * n + col].abs() < 1e-14 {
            return None;
        }
        for k in 0..n {
            a.swap(col * n + k, piv * n + k);
            inv.swap(col * n + k, piv * n + k);
        }
        let d = a[col * n + col];
        for k in 0..n {
            a[col * n + k] /= d;
            inv[col * n + k] /= d;
        }
        for r in 0..n {
            if r != col {
                let f = a[r * n + col];
                if f != 0.0 {
                    for k in 0..n {
                        a[r * n + k] -= f * a[col * n + k];
                        inv[r * n + k] -= f * inv[col * n + k];
                    }
                }
            }
        }
    }
    Some(inv)
}

impl GroupDescriptor {
    /// Validate a basis and build the descriptor.
    pub fn new(name: &str, n: usize, field: ScalarField, kind: GroupKind, basis: Vec<CMat>) -> Result<Group> {
        let k = basis.len();
        if k > 9 || basis.iter().any(|b| b.n() != n) {
            return Err(Error::Invalid("algebra basis has wrong shape".to_string()));
        }
        let mut gram = Vec::with_capacity(k * k);
        for a in &basis {
            for b in &basis {
                gram.push((a.dagger() * *b).trace().re);
            }
        }
        let gram_inv = if k == 0 {
            Vec::new()
        } else {
            invert_real(k, &gram).ok_or_else(|| Error::Invalid("algebra basis is linearly dependent".to_string()))?
        };
        let g = GroupDescriptor { name: name.to_string(), n, field, kind, basis, gram_inv };
        let closure = g.closure_residual();
        if closure > TOLERANCES.basis_closure {
            return Err(Error::Reexpansion { residual: closure });
        }
        for b in &g.basis {
            let r = g.constraint_residual(&b.exp());
            if r > TOLERANCES.basis_closure {
                return Err(Error::Invalid(alloc::format!("exp of a basis element leaves {name} (residual {r})")));
            }
        }
        Ok(Arc::new(g))
    }

    /// The one-element group, as 1×1 matrices.
    pub fn trivial() -> Group {
        Self::new("1", 1, ScalarField::Real, GroupKind::Trivial, Vec::new()).expect("trivial group")
    }

    pub fn u1() -> Group {
        Self::new("U(1)", 1, ScalarField::Complex, GroupKind::Unitary1, alloc::vec![CMat::scalar(C64::new(0.0, 1.0))])
            .expect("u(1)")
    }

    /// SU(2) with basis `e_k = -i σ_k / 2`, so that `[e_1, e_2] = e_3`.
    pub fn su2() -> Group {
        let h = |re: f64, im: f64| C64::new(re, im);
        let e1 = CMat::from_fn(2, |i, j| if i != j { h(0.0, -0.5) } else { h(0.0, 0.0) });
        let e2 = CMat::from_fn(2, |i, j| match (i, j) {
            (0, 1) => h(-0.5, 0.0),
            (1, 0) => h(0.5, 0.0),
            _ => h(0.0, 0.0),
        });
        let e3 = CMat::from_fn(2, |i, j| match (i, j) {
            (0, 0) => h(0.0, -0.5),
            (1, 1) => h(0.0, 0.5),
            _ => h(0.0, 0.0),
        });
        Self::new("SU(2)", 2, ScalarField::Complex, GroupKind::SpecialUnitary, alloc::vec![e1, e2, e3]).expect("su(2)")
    }

    /// SO(3) with basis `(L_k)_{ij} = -ε_{kij}`, so that `[L_1, L_2] = L_3`.
    pub fn so3() -> Group {
        let basis = (0..3)
            .map(|k| CMat::from_fn(3, |i, j| C64::new(-levi_civita(k, i, j), 0.0)))
            .collect();
        Self::new("SO(3)", 3, ScalarField::Real, GroupKind::SpecialOrthogonal, basis).expect("so(3)")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn matrix_dim(&self) -> usize {
        self.n
    }

    pub fn scalar_field(&self) -> ScalarField {
        self.field
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    /// Dimension of the Lie algebra.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[CMat] {
        &self.basis
    }

    pub fn identity(&self) -> CMat {
        CMat::identity(self.n)
    }

    pub fn is_abelian(&self) -> bool {
        self.basis.iter().all(|a| self.basis.iter().all(|b| a.commutator(b).norm() < 1e-14))
    }

    /// Largest re-expansion residual over all basis brackets.
    pub fn closure_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in &self.basis {
            for b in &self.basis {
                worst = worst.max(self.expand(&a.commutator(b)).1);
            }
        }
        worst
    }

    /// Zero on the group.
    pub fn constraint_residual(&self, m: &CMat) -> f64 {
        if m.n() != self.n || !m.is_finite() {
            return f64::INFINITY;
        }
        let id = self.identity();
        match self.kind {
            GroupKind::Trivial => m.dist(&id),
            GroupKind::Unitary1 => (m[(0, 0)].norm() - 1.0).abs(),
            GroupKind::SpecialUnitary => (m.dagger() * *m).dist(&id) + (m.det() - C64::new(1.0, 0.0)).norm(),
            GroupKind::SpecialOrthogonal => {
                let imag: f64 = (0..self.n)
                    .flat_map(|i| (0..self.n).map(move |j| (i, j)))
                    .map(|ij| m[ij].im.abs())
                    .sum();
                (m.transpose() * *m).dist(&id) + (m.det() - C64::new(1.0, 0.0)).norm() + imag
            }
        }
    }

    /// Nearest group element (polar retraction, then determinant fix).
    pub fn project(&self, m: &CMat) -> CMat {
        match self.kind {
            GroupKind::Trivial => self.identity(),
            GroupKind::Unitary1 => {
                let z = m[(0, 0)];
                let r = z.norm();
                if r > 0.0 {
                    CMat::scalar(z / r)
                } else {
                    self.identity()
                }
            }
            GroupKind::SpecialUnitary => {
                let u = m.polar_unitary().unwrap_or_else(|| self.identity());
                let d = u.det();
                let phase = math::atan2(d.im, d.re) / self.n as f64;
                u.scale(C64::new(math::cos(phase), -math::sin(phase)))
            }
            GroupKind::SpecialOrthogonal => {
                let re = CMat::from_fn(self.n, |i, j| C64::new(m[(i, j)].re, 0.0));
                re.polar_unitary().unwrap_or_else(|| self.identity())
            }
        }
    }

    /// Σ c_k E_k.
    pub fn reconstruct(&self, c: &[f64]) -> CMat {
        debug_assert_eq!(c.len(), self.dim());
        let mut m = CMat::zeros(self.n);
        for (ck, e) in c.iter().zip(&self.basis) {
            if *ck != 0.0 {
                m = m + e.scale_re(*ck);
            }
        }
        m
    }

    /// Coefficients by orthogonal projection; no residual computed.
    pub fn expand_unchecked(&self, m: &CMat) -> Coeffs {
        let k = self.dim();
        let mut b: ArrayVec<f64, 9> = ArrayVec::new();
        for e in &self.basis {
            let mut s = 0.0;
            for i in 0..self.n {
                for j in 0..self.n {
                    s += (e[(i, j)].conj() * m[(i, j)]).re;
                }
            }
            b.push(s);
        }
        (0..k).map(|r| (0..k).map(|c| self.gram_inv[r * k + c] * b[c]).sum()).collect()
    }

    /// Coefficients together with the reconstruction residual.
    pub fn expand(&self, m: &CMat) -> (Coeffs, f64) {
        let c = self.expand_unchecked(m);
        let r = self.reconstruct(&c).dist(m);
        (c, r)
    }

    pub fn expand_checked(&self, m: &CMat) -> Result<Coeffs> {
        let (c, r) = self.expand(m);
        if r > TOLERANCES.reexpansion * (1.0 + m.norm()) {
            return Err(Error::Reexpansion { residual: r });
        }
        Ok(c)
    }

    /// exp of an algebra element given by coefficients.
    #[inline]
    pub fn exp_coeffs(&self, c: &[f64]) -> CMat {
        if self.kind == GroupKind::Trivial {
            return self.identity();
        }
        self.reconstruct(c).exp()
    }

    /// `Ad_g(X)` on coefficients, with `g` any invertible matrix.
    pub fn adjoint_coeffs(&self, g: &CMat, c: &[f64]) -> Coeffs {
        if self.dim() == 0 {
            return Coeffs::new();
        }
        let gi = g.inverse().unwrap_or_else(|| self.identity());
        self.expand_unchecked(&(*g * self.reconstruct(c) * gi))
    }

    pub fn bracket_coeffs(&self, x: &[f64], y: &[f64]) -> Coeffs {
        if self.dim() == 0 {
            return Coeffs::new();
        }
        self.expand_unchecked(&self.reconstruct(x).commutator(&self.reconstruct(y)))
    }

    pub fn random_coeffs<R: Rng + ?Sized>(&self, rng: &mut R, scale: f64) -> Coeffs {
        (0..self.dim()).map(|_| rng.gen_range(-scale..scale)).collect()
    }

    pub fn random_matrix<R: Rng + ?Sized>(&self, rng: &mut R, scale: f64) -> CMat {
        let c = self.random_coeffs(rng, scale);
        self.exp_coeffs(&c)
    }
}

pub(crate) fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

fn check_same(a: &Group, b: &Group) -> Result<()> {
    if Arc::ptr_eq(a, b) || (a.name == b.name && a.n == b.n && a.basis == b.basis) {
        Ok(())
    } else {
        Err(Error::DescriptorMismatch { left: a.name.clone(), right: b.name.clone() })
    }
}

#[derive(Clone, Debug)]
pub struct GroupElement {
    group: Group,
    matrix: CMat,
}

impl GroupElement {
    /// Wrap a matrix, projecting it onto the group.
    pub fn new(group: &Group, m: CMat) -> Result<Self> {
        if m.n() != group.matrix_dim() {
            return Err(Error::Invalid("matrix has wrong dimension".to_string()));
        }
        if !m.is_finite() {
            return Err(Error::NonFinite("group element".to_string()));
        }
        Ok(GroupElement { group: group.clone(), matrix: group.project(&m) })
    }

    pub fn identity(group: &Group) -> Self {
        GroupElement { group: group.clone(), matrix: group.identity() }
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn constraint_residual(&self) -> f64 {
        self.group.constraint_residual(&self.matrix)
    }

    pub fn dist(&self, o: &GroupElement) -> f64 {
        self.matrix.dist(&o.matrix)
    }
}

#[derive(Clone, Debug)]
pub struct AlgebraElement {
    group: Group,
    coeffs: Coeffs,
}

impl AlgebraElement {
    pub fn new(group: &Group, coeffs: &[f64]) -> Result<Self> {
        if coeffs.len() != group.dim() {
            return Err(Error::Invalid(alloc::format!(
                "{} coefficients given for an algebra of dimension {}",
                coeffs.len(),
                group.dim()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("algebra element".to_string()));
        }
        Ok(AlgebraElement { group: group.clone(), coeffs: coeffs.iter().copied().collect() })
    }

    pub fn zero(group: &Group) -> Self {
        AlgebraElement { group: group.clone(), coeffs: coeffs_zero(group.dim()) }
    }

    /// Re-expand a matrix in the basis.
    pub fn from_matrix(group: &Group, m: &CMat) -> Result<Self> {
        Ok(AlgebraElement { group: group.clone(), coeffs: group.expand_checked(m)? })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn matrix(&self) -> CMat {
        self.group.reconstruct(&self.coeffs)
    }

    pub fn norm(&self) -> f64 {
        coeffs_norm(&self.coeffs)
    }

    pub fn dist(&self, o: &AlgebraElement) -> f64 {
        coeffs_dist(&self.coeffs, &o.coeffs)
    }
}

pub fn mul(a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
    check_same(&a.group, &b.group)?;
    GroupElement::new(&a.group, a.matrix * b.matrix)
}

pub fn inv(g: &GroupElement) -> Result<GroupElement> {
    let m = g.matrix.inverse().ok_or(Error::Singular)?;
    GroupElement::new(&g.group, m)
}

pub fn exp_map(x: &AlgebraElement) -> GroupElement {
    GroupElement { group: x.group.clone(), matrix: x.group.project(&x.group.exp_coeffs(&x.coeffs)) }
}

/// Principal logarithm; only defined when |g - 1| is below the branch radius.
pub fn log_map(g: &GroupElement) -> Result<AlgebraElement> {
    let id = g.group.identity();
    let distance = g.matrix.dist(&id);
    if distance >= TOLERANCES.log_radius {
        return Err(Error::OutOfBranch { distance });
    }
    if g.group.dim() == 0 {
        return Ok(AlgebraElement::zero(&g.group));
    }
    let l = g.matrix.log_near_identity().ok_or(Error::OutOfBranch { distance })?;
    AlgebraElement::from_matrix(&g.group, &l)
}

pub fn adjoint(g: &GroupElement, x: &AlgebraElement) -> Result<AlgebraElement> {
    check_same(&g.group, &x.group)?;
    let gi = g.matrix.inverse().ok_or(Error::Singular)?;
    AlgebraElement::from_matrix(&x.group, &(g.matrix * x.matrix() * gi))
}

pub fn bracket(x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
    check_same(&x.group, &y.group)?;
    AlgebraElement::from_matrix(&x.group, &x.matrix().commutator(&y.matrix()))
}

/// Which Maurer–Cartan form to pull back.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `g⁻¹ ġ` (left-invariant θ)
    Left,
    /// `ġ g⁻¹` (right-invariant θ̄)
    Right,
}

/// Fourth-order central difference of a matrix-valued curve.
pub fn central_derivative(f: &dyn Fn(f64) -> CMat, u: f64, h: f64) -> CMat {
    let a = f(u + h);
    let b = f(u - h);
    let c = f(u + 2.0 * h);
    let d = f(u - 2.0 * h);
    ((a - b).scale_re(8.0) - (c - d)).scale_re(1.0 / (12.0 * h))
}

/// Maurer–Cartan pullback of a curve in the group, by central differences.
pub fn left_log_derivative(group: &Group, g: &dyn Fn(f64) -> CMat, u: f64, side: Side) -> AlgebraElement {
    let coeffs = mc_coeffs(group, g, u, side, TOLERANCES.mc_step);
    AlgebraElement { group: group.clone(), coeffs }
}

pub(crate) fn mc_coeffs(group: &Group, g: &dyn Fn(f64) -> CMat, u: f64, side: Side, h: f64) -> Coeffs {
    if group.dim() == 0 {
        return Coeffs::new();
    }
    let d = central_derivative(g, u, h);
    let gi = g(u).inverse().unwrap_or_else(|| group.identity());
    let m = match side {
        Side::Left => gi * d,
        Side::Right => d * gi,
    };
    group.expand_unchecked(&m)
}
