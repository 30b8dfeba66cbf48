//! Deterministic JSON reports.
//!
//! Object keys are sorted (serde_json's default map), floats are printed
//! by shortest round-trip, and nothing time-dependent is recorded.

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use gerbe_core::functor::AxiomReport;
use gerbe_core::linalg::CMat;
use gerbe_core::transport::{IntegratorConfig, Warning};

#[derive(Clone, Debug, Serialize)]
pub struct ResidualRow {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Estimate {
    pub name: String,
    pub estimate: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegratorSummary {
    pub n_steps: usize,
    pub surface_steps: usize,
    pub scheme: &'static str,
    pub richardson: bool,
}

impl From<&IntegratorConfig> for IntegratorSummary {
    fn from(c: &IntegratorConfig) -> Self {
        IntegratorSummary { n_steps: c.n_steps, surface_steps: c.surface_steps, scheme: c.scheme.as_str(), richardson: c.richardson }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs_digest: String,
    pub crossed_module: String,
    pub seed: u64,
    pub integrator: IntegratorSummary,
    pub results: serde_json::Map<String, Value>,
    pub residuals: Vec<ResidualRow>,
    pub error_estimates: Vec<Estimate>,
    pub warnings: Vec<String>,
    pub passed: bool,
}

impl Report {
    pub fn new(command: &str, digest: String, crossed_module: &str, seed: u64, cfg: &IntegratorConfig) -> Self {
        Report {
            command: command.to_string(),
            inputs_digest: digest,
            crossed_module: crossed_module.to_string(),
            seed,
            integrator: cfg.into(),
            results: serde_json::Map::new(),
            residuals: Vec::new(),
            error_estimates: Vec::new(),
            warnings: Vec::new(),
            passed: true,
        }
    }

    pub fn result(&mut self, name: &str, value: Value) {
        self.results.insert(name.to_string(), value);
    }

    pub fn matrix(&mut self, name: &str, m: &CMat) {
        self.result(name, matrix_json(m));
    }

    pub fn residual(&mut self, name: &str, residual: f64, tolerance: f64) {
        // NaN never passes
        let passed = residual < tolerance;
        self.passed &= passed;
        self.residuals.push(ResidualRow { name: name.to_string(), residual, tolerance, passed });
    }

    pub fn axioms(&mut self, prefix: &str, rep: &AxiomReport) {
        for r in &rep.rows {
            let name = if prefix.is_empty() { r.name.clone() } else { format!("{prefix}.{}", r.name) };
            self.residual(&name, r.residual, r.tolerance);
        }
    }

    pub fn estimate(&mut self, name: &str, estimate: f64) {
        self.error_estimates.push(Estimate { name: name.to_string(), estimate });
    }

    pub fn warnings(&mut self, what: &str, ws: &[Warning]) {
        for w in ws {
            match w {
                Warning::NotFakeFlat { residual } => self.warnings.push(format!("{what}: fake curvature {residual:e} exceeds the fake-flat threshold")),
            }
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Rows of `[re, im]` pairs.
pub fn matrix_json(m: &CMat) -> Value {
    let n = m.n();
    Value::Array((0..n).map(|i| Value::Array((0..n).map(|j| json!([m[(i, j)].re, m[(i, j)].im])).collect())).collect())
}

/// SHA-256 over the command line and the scenario bytes.
pub fn digest(command: &str, flags: &str, scenario: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(command.as_bytes());
    h.update([0]);
    h.update(flags.as_bytes());
    h.update([0]);
    h.update(scenario);
    format!("{:x}", h.finalize())
}
