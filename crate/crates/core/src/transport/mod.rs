//! Path- and surface-ordered exponentials.
//!
//! * `poe_ω(γ)`: endpoint of `ġ = −ω(γ̇) g`, `g(0) = 1`.
//! * `h_{g,φ}(γ)`: H-component of the poe of `(φ, A')` in `H ⋊ G`.
//! * `soe_{A,B}(Σ)`: for a bigon `Σ: γ ⇒ γ'` with inner transports
//!   `W(s, t)` of `A` along `Σ(s, ·)` and `P(s) = W(s, 1)`, the solution at
//!   `s = 1` of `k̇ = −(∫₀¹ (α_{P W⁻¹})_* B(∂_sΣ, ∂_tΣ) dt) k`. For fake-flat
//!   data it satisfies `t(soe) · poe(γ) = poe(γ')`.

pub mod calibration;
pub mod engine;

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fields::paths::{Bigon, Path};
use crate::fields::{OneForm, TwoForm};
use crate::lie::{Coeffs, Group};
use crate::linalg::CMat;
use crate::two_group::CrossedModule;
pub use engine::SurfaceSample;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// `g ← exp(−Δτ ω(τ_mid)) g`
    CfMidpoint,
    /// classical RK4 followed by projection onto the group
    Rk4Projected,
}

impl Scheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::CfMidpoint => "cf_midpoint",
            Scheme::Rk4Projected => "rk4_projected",
        }
    }
}

impl core::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cf_midpoint" => Ok(Scheme::CfMidpoint),
            "rk4_projected" => Ok(Scheme::Rk4Projected),
            _ => Err(Error::Invalid(alloc::format!("unknown scheme `{s}`"))),
        }
    }
}

/// Step counts and scheme. Surfaces use their own (smaller) grid because
/// their cost is quadratic in the step count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub n_steps: usize,
    pub surface_steps: usize,
    pub scheme: Scheme,
    pub richardson: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig { n_steps: 2000, surface_steps: 160, scheme: Scheme::CfMidpoint, richardson: true }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, n) in [("n_steps", self.n_steps), ("surface_steps", self.surface_steps)] {
            if n < 8 || n % 2 != 0 {
                return Err(Error::Invalid(alloc::format!("{name} must be even and at least 8 (got {n})")));
            }
        }
        Ok(())
    }

    pub fn with_steps(mut self, n: usize) -> Self {
        self.n_steps = n;
        self
    }
}

/// Which variable the inner paths run along.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArgOrder {
    /// inner paths `Σ(s, ·)`; the 2-form is evaluated on `(∂_t, ∂_s)`
    Ts,
    /// inner paths `Σ(·, t)`; the 2-form is evaluated on `(∂_s, ∂_t)`
    St,
}

/// The two binary choices in the surface-ordered exponential.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SoeConventions {
    /// `𝒜 = ode_sign · ∫ (α_U)_* B(∂_inner, ∂_outer)`, outer flow `k̇ = −𝒜 k`
    pub ode_sign: i8,
    pub arg_order: ArgOrder,
}

/// Frozen by the calibration suite (see [`calibration`]).
pub const CONVENTIONS: SoeConventions = SoeConventions { ode_sign: -1, arg_order: ArgOrder::Ts };

impl SoeConventions {
    pub const ALL: [SoeConventions; 4] = [
        SoeConventions { ode_sign: 1, arg_order: ArgOrder::Ts },
        SoeConventions { ode_sign: -1, arg_order: ArgOrder::Ts },
        SoeConventions { ode_sign: 1, arg_order: ArgOrder::St },
        SoeConventions { ode_sign: -1, arg_order: ArgOrder::St },
    ];

    pub fn label(&self) -> String {
        alloc::format!(
            "ode_sign={:+},arg_order={}",
            self.ode_sign,
            match self.arg_order {
                ArgOrder::Ts => "ts",
                ArgOrder::St => "st",
            }
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Warning {
    /// Surface transport on data whose fake curvature exceeds the threshold.
    NotFakeFlat { residual: f64 },
}

#[derive(Clone, Debug)]
pub struct TransportResult<T> {
    pub value: T,
    /// `|result(N) − result(N/2)|`; 0 when extrapolation is off.
    pub error_estimate: f64,
    pub warnings: Vec<Warning>,
}

impl<T> TransportResult<T> {
    fn new(value: T, error_estimate: f64) -> Self {
        TransportResult { value, error_estimate, warnings: Vec::new() }
    }
}

fn path_generator<'a>(omega: &'a dyn OneForm, gamma: &'a dyn Path) -> impl Fn(f64) -> crate::lie::Coeffs + 'a {
    move |u| {
        let (p, v) = gamma.eval(u);
        omega.eval(&p, &v)
    }
}

/// Values of the flow `u ↦ g(u)` at the integrator nodes.
#[derive(Clone, Debug)]
pub struct PrefixFlow {
    pub nodes: Vec<f64>,
    pub values: Vec<CMat>,
    pub error_estimate: f64,
}

impl PrefixFlow {
    pub fn last(&self) -> CMat {
        *self.values.last().expect("flow has nodes")
    }

    /// Value at the node nearest to `u`.
    pub fn nearest(&self, u: f64) -> CMat {
        let n = self.nodes.len() - 1;
        let k = crate::math::floor(u.clamp(0.0, 1.0) * n as f64 + 0.5) as usize;
        self.values[k.min(n)]
    }
}

/// The flow of `ġ = −ω(γ̇) g` at all nodes; with extrapolation on, the
/// nodes are those of the coarse grid and values are Richardson-combined.
pub fn poe_prefix(omega: &dyn OneForm, gamma: &dyn Path, cfg: &IntegratorConfig) -> Result<PrefixFlow> {
    poe_prefix_gen(omega.algebra(), &path_generator(omega, gamma), cfg)
}

/// [`poe_prefix`] for an arbitrary generator `τ ↦ X(τ)`.
pub fn poe_prefix_gen(group: &Group, gen: &dyn Fn(f64) -> Coeffs, cfg: &IntegratorConfig) -> Result<PrefixFlow> {
    cfg.validate()?;
    let mut fine = Vec::with_capacity(cfg.n_steps + 1);
    engine::march(group, cfg.n_steps, cfg.scheme, gen, Some(&mut fine));
    if !cfg.richardson {
        let nodes = (0..=cfg.n_steps).map(|k| k as f64 / cfg.n_steps as f64).collect();
        return Ok(PrefixFlow { nodes, values: fine, error_estimate: 0.0 });
    }
    let half = cfg.n_steps / 2;
    let mut coarse = Vec::with_capacity(half + 1);
    engine::march(group, half, cfg.scheme, gen, Some(&mut coarse));
    let mut values = Vec::with_capacity(half + 1);
    let mut err = 0.0;
    for k in 0..=half {
        let (v, e) = engine::extrapolate(group, cfg.scheme, &fine[2 * k], &coarse[k]);
        values.push(v);
        if k == half {
            err = e;
        }
    }
    let nodes = (0..=half).map(|k| k as f64 / half as f64).collect();
    Ok(PrefixFlow { nodes, values, error_estimate: err })
}

/// Path-ordered exponential `poe_ω(γ)`.
pub fn poe(omega: &dyn OneForm, gamma: &dyn Path, cfg: &IntegratorConfig) -> Result<TransportResult<CMat>> {
    poe_gen(omega.algebra(), &path_generator(omega, gamma), cfg)
}

/// Solution at `τ = 1` of `ġ = −X(τ) g`, `g(0) = 1`.
pub fn poe_gen(group: &Group, gen: &dyn Fn(f64) -> Coeffs, cfg: &IntegratorConfig) -> Result<TransportResult<CMat>> {
    cfg.validate()?;
    let fine = engine::march(group, cfg.n_steps, cfg.scheme, gen, None);
    if !cfg.richardson {
        return Ok(TransportResult::new(fine, 0.0));
    }
    let coarse = engine::march(group, cfg.n_steps / 2, cfg.scheme, gen, None);
    let (v, e) = engine::extrapolate(group, cfg.scheme, &fine, &coarse);
    Ok(TransportResult::new(v, e))
}

/// `(h_{g,φ}(γ), poe_{A'}(γ))`: the poe of `(φ, A')` in `H ⋊ G`.
pub fn semidirect_poe(
    cm: &dyn CrossedModule,
    phi: &dyn OneForm,
    a_target: &dyn OneForm,
    gamma: &dyn Path,
    cfg: &IntegratorConfig,
) -> Result<TransportResult<(CMat, CMat)>> {
    let gen = |u: f64| {
        let (p, v) = gamma.eval(u);
        (phi.eval(&p, &v), a_target.eval(&p, &v))
    };
    semidirect_gen(cm, &gen, cfg)
}

/// Poe in `H ⋊ G` of an arbitrary generator `τ ↦ (Y(τ), X(τ))`.
pub fn semidirect_gen(cm: &dyn CrossedModule, gen: &dyn Fn(f64) -> (Coeffs, Coeffs), cfg: &IntegratorConfig) -> Result<TransportResult<(CMat, CMat)>> {
    cfg.validate()?;
    let (hf, gf) = engine::semidirect_march(cm, cfg.n_steps, cfg.scheme, gen, None);
    if !cfg.richardson {
        return Ok(TransportResult::new((hf, gf), 0.0));
    }
    let (hc, gc) = engine::semidirect_march(cm, cfg.n_steps / 2, cfg.scheme, gen, None);
    let (h, eh) = engine::extrapolate(cm.h(), cfg.scheme, &hf, &hc);
    let (g, eg) = engine::extrapolate(cm.g(), cfg.scheme, &gf, &gc);
    Ok(TransportResult::new((h, g), eh.max(eg)))
}

/// Node values of the `H`-component of [`semidirect_gen`].
pub fn semidirect_prefix_gen(cm: &dyn CrossedModule, gen: &dyn Fn(f64) -> (Coeffs, Coeffs), cfg: &IntegratorConfig) -> Result<PrefixFlow> {
    cfg.validate()?;
    let mut fine = Vec::with_capacity(cfg.n_steps + 1);
    engine::semidirect_march(cm, cfg.n_steps, cfg.scheme, gen, Some(&mut fine));
    if !cfg.richardson {
        let nodes = (0..=cfg.n_steps).map(|k| k as f64 / cfg.n_steps as f64).collect();
        return Ok(PrefixFlow { nodes, values: fine, error_estimate: 0.0 });
    }
    let half = cfg.n_steps / 2;
    let mut coarse = Vec::with_capacity(half + 1);
    engine::semidirect_march(cm, half, cfg.scheme, gen, Some(&mut coarse));
    let mut values = Vec::with_capacity(half + 1);
    let mut err = 0.0;
    for k in 0..=half {
        let (v, e) = engine::extrapolate(cm.h(), cfg.scheme, &fine[2 * k], &coarse[k]);
        values.push(v);
        if k == half {
            err = e;
        }
    }
    let nodes = (0..=half).map(|k| k as f64 / half as f64).collect();
    Ok(PrefixFlow { nodes, values, error_estimate: err })
}

/// Surface-ordered exponential of `(A, B)` over `Σ` with the frozen
/// conventions. No fake-flatness or bigon checks; see
/// [`crate::gauge::GammaConnection::soe`] for the checked entry point.
pub fn soe_raw(cm: &dyn CrossedModule, a: &dyn OneForm, b: &dyn TwoForm, sigma: &dyn Bigon, cfg: &IntegratorConfig) -> Result<TransportResult<CMat>> {
    soe_with(cm, a, b, sigma, cfg, CONVENTIONS)
}

/// Surface-ordered exponential under an explicit convention choice.
pub fn soe_with(
    cm: &dyn CrossedModule,
    a: &dyn OneForm,
    b: &dyn TwoForm,
    sigma: &dyn Bigon,
    cfg: &IntegratorConfig,
    conv: SoeConventions,
) -> Result<TransportResult<CMat>> {
    let sample = |outer: f64, inner: f64| {
        let (p, d_inner, d_outer) = match conv.arg_order {
            ArgOrder::Ts => {
                let (p, ds, dt) = sigma.eval(outer, inner);
                (p, dt, ds)
            }
            ArgOrder::St => {
                let (p, ds, dt) = sigma.eval(inner, outer);
                (p, ds, dt)
            }
        };
        SurfaceSample { a_inner: a.eval(&p, &d_inner), b: b.eval(&p, &d_inner, &d_outer) }
    };
    surface(cm, cfg, conv.ode_sign as f64, &sample)
}

/// Run the surface engine with extrapolation on an arbitrary integrand.
pub fn surface(
    cm: &dyn CrossedModule,
    cfg: &IntegratorConfig,
    sign: f64,
    sample: &dyn Fn(f64, f64) -> SurfaceSample,
) -> Result<TransportResult<CMat>> {
    cfg.validate()?;
    let m = cfg.surface_steps;
    let fine = engine::surface_march(cm, m, sign, sample);
    if !cfg.richardson {
        return Ok(TransportResult::new(fine, 0.0));
    }
    let coarse = engine::surface_march(cm, m / 2, sign, sample);
    let (v, e) = engine::extrapolate(cm.h(), Scheme::CfMidpoint, &fine, &coarse);
    Ok(TransportResult::new(v, e))
}
