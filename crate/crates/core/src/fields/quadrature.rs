//! Composite Gauss–Legendre quadrature of forms over paths and bigons.
//!
//! Used as an oracle for abelian transport, where `poe` and `soe` reduce
//! to exponentials of ordinary integrals.

use alloc::vec::Vec;

use super::paths::{Bigon, Path};
use super::{OneForm, TwoForm};
use crate::math;

/// Nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = math::cos(math::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes.push(0.5 * (1.0 - x));
        weights.push(1.0 / ((1.0 - x * x) * dp * dp));
    }
    (nodes, weights)
}

const ORDER: usize = 16;
const CELLS: usize = 12;

/// `∫_γ ω` for component `comp` of the algebra coefficients.
pub fn line_integral(form: &dyn OneForm, gamma: &dyn Path, comp: usize) -> f64 {
    let (xs, ws) = gauss_legendre(ORDER);
    let mut acc = 0.0;
    for c in 0..CELLS {
        for (x, w) in xs.iter().zip(&ws) {
            let (p, v) = gamma.eval((c as f64 + x) / CELLS as f64);
            acc += w / CELLS as f64 * form.eval(&p, &v)[comp];
        }
    }
    acc
}

/// `∬ B(∂_s Σ, ∂_t Σ) ds dt` for component `comp`.
pub fn surface_integral(form: &dyn TwoForm, sigma: &dyn Bigon, comp: usize) -> f64 {
    let (xs, ws) = gauss_legendre(ORDER);
    let h = 1.0 / CELLS as f64;
    let mut acc = 0.0;
    for ci in 0..CELLS {
        for cj in 0..CELLS {
            for (x, wx) in xs.iter().zip(&ws) {
                for (y, wy) in xs.iter().zip(&ws) {
                    let (p, ds, dt) = sigma.eval((ci as f64 + x) * h, (cj as f64 + y) * h);
                    acc += wx * wy * h * h * form.eval(&p, &ds, &dt)[comp];
                }
            }
        }
    }
    acc
}
