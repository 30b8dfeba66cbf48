//! Selection of the surface-transport conventions.
//!
//! Every candidate in [`SoeConventions::ALL`] is run against identities
//! that any correct surface transport must satisfy; exactly one candidate
//! is expected to pass them all.

use alloc::vec::Vec;

use super::{poe, soe_with, IntegratorConfig, SoeConventions};
use crate::error::{Error, Result};
use crate::fields::paths::{hcompose, restrict_s, source_path, target_path, SharedBigon};
use crate::fields::{Form1, Form2};
use crate::linalg::CMat;
use crate::math;
use crate::two_group::SharedCm;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Check {
    /// `t(soe(Σ)) · poe(γ) = poe(γ')`
    TargetSource,
    /// `|log soe(Σ)| = |∬ Σ*B|` for an abelian gerbe
    Abelian,
    /// `soe(Σ) = soe(Σ|[½,1]) · soe(Σ|[0,½])`
    Vertical,
    /// `soe(Σ̃ ∘ Σ) = soe(Σ̃) · α(poe(γ̃), soe(Σ))`
    Horizontal,
}

impl Check {
    pub const ALL: [Check; 4] = [Check::TargetSource, Check::Abelian, Check::Vertical, Check::Horizontal];

    pub fn as_str(&self) -> &'static str {
        match self {
            Check::TargetSource => "target_source",
            Check::Abelian => "abelian_quadrature",
            Check::Vertical => "vertical_split",
            Check::Horizontal => "horizontal_split",
        }
    }
}

pub const CALIBRATION_TOLERANCE: f64 = 1e-6;

/// Connection data plus a bigon.
#[derive(Clone)]
pub struct SurfaceCase {
    pub cm: SharedCm,
    pub a: Form1,
    pub b: Form2,
    pub sigma: SharedBigon,
}

/// Abelian data with the known value of `∬ B(∂_s, ∂_t) ds dt`.
#[derive(Clone)]
pub struct AbelianCase {
    pub case: SurfaceCase,
    pub integral: f64,
}

/// Two horizontally composable bigons; `second` starts where `first` ends.
#[derive(Clone)]
pub struct HorizontalCase {
    pub case: SurfaceCase,
    pub second: SharedBigon,
}

#[derive(Clone, Default)]
pub struct CalibrationInput {
    pub target_source: Vec<SurfaceCase>,
    pub abelian: Vec<AbelianCase>,
    pub vertical: Vec<SurfaceCase>,
    pub horizontal: Vec<HorizontalCase>,
}

#[derive(Clone, Debug)]
pub struct CandidateEvidence {
    pub conventions: SoeConventions,
    /// Largest residual per enabled check.
    pub residuals: Vec<(Check, f64)>,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct Calibration {
    pub evidence: Vec<CandidateEvidence>,
    /// The unique passing candidate, or `NoUniqueConvention`.
    pub outcome: core::result::Result<SoeConventions, Error>,
}

fn soe_value(c: &SurfaceCase, sigma: &SharedBigon, cfg: &IntegratorConfig, conv: SoeConventions) -> Result<CMat> {
    Ok(soe_with(&*c.cm, &*c.a, &*c.b, &**sigma, cfg, conv)?.value)
}

fn residual(check: Check, input: &CalibrationInput, cfg: &IntegratorConfig, conv: SoeConventions) -> Result<f64> {
    let mut worst = 0.0f64;
    let mut keep = |r: f64| {
        if !(r <= worst) {
            worst = r;
        }
    };
    match check {
        Check::TargetSource => {
            for c in &input.target_source {
                let k = soe_value(c, &c.sigma, cfg, conv)?;
                let src = poe(&*c.a, &*source_path(c.sigma.clone()), cfg)?.value;
                let tgt = poe(&*c.a, &*target_path(c.sigma.clone()), cfg)?.value;
                keep((c.cm.t(&k) * src).dist(&tgt));
            }
        }
        Check::Abelian => {
            for ab in &input.abelian {
                let k = soe_value(&ab.case, &ab.case.sigma, cfg, conv)?;
                let z = k[(0, 0)];
                keep((math::atan2(z.im, z.re).abs() - ab.integral.abs()).abs());
            }
        }
        Check::Vertical => {
            for c in &input.vertical {
                let whole = soe_value(c, &c.sigma, cfg, conv)?;
                let bottom = soe_value(c, &restrict_s(c.sigma.clone(), 0.0, 0.5), cfg, conv)?;
                let top = soe_value(c, &restrict_s(c.sigma.clone(), 0.5, 1.0), cfg, conv)?;
                keep(whole.dist(&(top * bottom)));
            }
        }
        Check::Horizontal => {
            for hc in &input.horizontal {
                let c = &hc.case;
                let whole = soe_value(c, &hcompose(hc.second.clone(), c.sigma.clone()), cfg, conv)?;
                let first = soe_value(c, &c.sigma, cfg, conv)?;
                let second = soe_value(c, &hc.second, cfg, conv)?;
                let g = poe(&*c.a, &*source_path(hc.second.clone()), cfg)?.value;
                keep(whole.dist(&(second * c.cm.alpha(&g, &first))));
            }
        }
    }
    Ok(worst.abs())
}

/// Evaluate all candidates on the enabled checks.
pub fn calibrate(input: &CalibrationInput, cfg: &IntegratorConfig, enabled: &[Check]) -> Result<Calibration> {
    let mut evidence = Vec::with_capacity(4);
    for conv in SoeConventions::ALL {
        let mut residuals = Vec::with_capacity(enabled.len());
        for &check in enabled {
            residuals.push((check, residual(check, input, cfg, conv)?));
        }
        let passed = residuals.iter().all(|(_, r)| *r < CALIBRATION_TOLERANCE);
        evidence.push(CandidateEvidence { conventions: conv, residuals, passed });
    }
    let passing: Vec<SoeConventions> = evidence.iter().filter(|e| e.passed).map(|e| e.conventions).collect();
    let outcome = if passing.len() == 1 { Ok(passing[0]) } else { Err(Error::NoUniqueConvention { passing: passing.len() }) };
    Ok(Calibration { evidence, outcome })
}
