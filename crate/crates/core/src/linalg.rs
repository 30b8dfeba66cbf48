//! Small dense complex matrices (n ≤ 3) stored inline.
//!
//! Everything here is `Copy`; the integrators call these routines millions of
//! times per surface so heap traffic is avoided on purpose.

use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::math;

pub type C64 = Complex64;

pub const MAX_DIM: usize = 3;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Row-major `n×n` complex matrix with fixed stride 3.
#[derive(Clone, Copy, PartialEq)]
pub struct CMat {
    n: usize,
    a: [C64; 9],
}

impl core::fmt::Debug for CMat {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("[")?;
        for i in 0..self.n {
            if i > 0 {
                f.write_str("; ")?;
            }
            for j in 0..self.n {
                let z = self[(i, j)];
                write!(f, "{}{:+.6}{:+.6}i", if j > 0 { ", " } else { "" }, z.re, z.im)?;
            }
        }
        f.write_str("]")
    }
}

impl core::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.a[i * 3 + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for CMat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.a[i * 3 + j]
    }
}

impl CMat {
    #[inline]
    pub fn zeros(n: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&n), "matrix dimension {n} unsupported");
        CMat { n, a: [ZERO; 9] }
    }

    #[inline]
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Build from real rows.
    pub fn from_real(rows: &[&[f64]]) -> Self {
        Self::from_fn(rows.len(), |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn scalar(z: C64) -> Self {
        let mut m = Self::zeros(1);
        m[(0, 0)] = z;
        m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn scale(&self, z: C64) -> Self {
        let mut m = *self;
        for i in 0..self.n {
            for j in 0..self.n {
                m[(i, j)] *= z;
            }
        }
        m
    }

    #[inline]
    pub fn scale_re(&self, x: f64) -> Self {
        let mut m = *self;
        for v in m.a.iter_mut() {
            *v *= x;
        }
        m
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                s += self[(i, j)].norm_sqr();
            }
        }
        math::sqrt(s)
    }

    /// Frobenius distance; dimension mismatch counts as infinite.
    pub fn dist(&self, o: &CMat) -> f64 {
        if self.n != o.n {
            return f64::INFINITY;
        }
        (*self - *o).norm()
    }

    /// Induced 1-norm, used for exponential scaling.
    fn norm1(&self) -> f64 {
        let mut best = 0.0f64;
        for j in 0..self.n {
            let mut s = 0.0;
            for i in 0..self.n {
                s += self[(i, j)].norm();
            }
            best = best.max(s);
        }
        best
    }

    pub fn is_finite(&self) -> bool {
        self.a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn det(&self) -> C64 {
        let m = |i, j| self[(i, j)];
        match self.n {
            1 => m(0, 0),
            2 => m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0),
            _ => {
                m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
                    - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
                    + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
            }
        }
    }

    /// Inverse via the adjugate; `None` when |det| is negligible.
    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if !(d.norm() > 1e-300) || !d.re.is_finite() || !d.im.is_finite() {
            return None;
        }
        let inv_d = ONE / d;
        let m = |i, j| self[(i, j)];
        let adj = match self.n {
            1 => Self::scalar(ONE),
            2 => Self::from_fn(2, |i, j| match (i, j) {
                (0, 0) => m(1, 1),
                (0, 1) => -m(0, 1),
                (1, 0) => -m(1, 0),
                _ => m(0, 0),
            }),
            _ => Self::from_fn(3, |i, j| {
                // cofactor of (j, i)
                let r = [(j + 1) % 3, (j + 2) % 3];
                let c = [(i + 1) % 3, (i + 2) % 3];
                m(r[0], c[0]) * m(r[1], c[1]) - m(r[0], c[1]) * m(r[1], c[0])
            }),
        };
        Some(adj.scale(inv_d))
    }

    pub fn commutator(&self, o: &CMat) -> Self {
        *self * *o - *o * *self
    }

    /// Matrix exponential by scaling and squaring around a Taylor series.
    pub fn exp(&self) -> Self {
        let n1 = self.norm1();
        if n1 == 0.0 {
            return Self::identity(self.n);
        }
        let mut squarings = 0u32;
        let mut x = *self;
        if n1 > 0.5 {
            squarings = math::ceil(math::log2(n1 / 0.5)) as u32;
            x = x.scale_re(math::powi(0.5, squarings as i32));
        }
        let mut term = Self::identity(self.n);
        let mut sum = term;
        for k in 1..40 {
            term = (term * x).scale_re(1.0 / k as f64);
            sum = sum + term;
            if term.norm1() < 1e-18 {
                break;
            }
        }
        for _ in 0..squarings {
            sum = sum * sum;
        }
        sum
    }

    /// Principal square root near the identity (Denman–Beavers).
    fn sqrt_near_identity(&self) -> Option<Self> {
        let mut y = *self;
        let mut z = Self::identity(self.n);
        for _ in 0..60 {
            let yi = y.inverse()?;
            let zi = z.inverse()?;
            let y2 = (y + zi).scale_re(0.5);
            let z2 = (z + yi).scale_re(0.5);
            let delta = y2.dist(&y);
            y = y2;
            z = z2;
            if delta < 1e-15 * (1.0 + y.norm()) {
                break;
            }
        }
        Some(y)
    }

    /// Principal logarithm; callers guarantee |self - 1| < 1.
    pub fn log_near_identity(&self) -> Option<Self> {
        let id = Self::identity(self.n);
        let mut x = *self;
        let mut doublings = 0;
        while x.dist(&id) > 0.05 {
            x = x.sqrt_near_identity()?;
            doublings += 1;
            if doublings > 40 {
                return None;
            }
        }
        let y = x - id;
        let mut pow = y;
        let mut sum = y;
        for k in 2..60 {
            pow = pow * y;
            let term = pow.scale_re(if k % 2 == 0 { -1.0 } else { 1.0 } / k as f64);
            sum = sum + term;
            if term.norm() < 1e-18 {
                break;
            }
        }
        Some(sum.scale_re(math::powi(2.0, doublings)))
    }

    /// Unitary factor of the polar decomposition by Newton iteration.
    pub fn polar_unitary(&self) -> Option<Self> {
        let mut x = *self;
        for _ in 0..50 {
            let xi = x.inverse()?;
            let next = (x + xi.dagger()).scale_re(0.5);
            let delta = next.dist(&x);
            x = next;
            if delta < 1e-15 {
                break;
            }
        }
        Some(x)
    }
}

impl Add for CMat {
    type Output = CMat;
    #[inline]
    fn add(mut self, o: CMat) -> CMat {
        for (a, b) in self.a.iter_mut().zip(o.a.iter()) {
            *a += *b;
        }
        self
    }
}

impl Sub for CMat {
    type Output = CMat;
    #[inline]
    fn sub(mut self, o: CMat) -> CMat {
        for (a, b) in self.a.iter_mut().zip(o.a.iter()) {
            *a -= *b;
        }
        self
    }
}

impl Neg for CMat {
    type Output = CMat;
    #[inline]
    fn neg(self) -> CMat {
        self.scale_re(-1.0)
    }
}

impl Mul for CMat {
    type Output = CMat;
    #[inline]
    fn mul(self, o: CMat) -> CMat {
        debug_assert_eq!(self.n, o.n);
        let n = self.n;
        let mut r = CMat { n, a: [ZERO; 9] };
        for i in 0..n {
            for k in 0..n {
                let x = self.a[i * 3 + k];
                for j in 0..n {
                    r.a[i * 3 + j] += x * o.a[k * 3 + j];
                }
            }
        }
        r
    }
}
