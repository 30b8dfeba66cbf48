//! Scenario files: a single JSON document (`"version": 1`) naming charts,
//! connections, gauge data, paths, bigons, bundles and calibration cases.
//!
//! Everything is resolved eagerly at load, so a scenario that loads has
//! no dangling references and every expression parses.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;

use gerbe_core::bundle::{BundleData, CocycleSpec, CoverChart, Leg, TransitionSpec};
use gerbe_core::fields::paths::{interpolate, ExprBigon, ExprPath, SharedBigon, SharedPath};
use gerbe_core::fields::quadrature::surface_integral;
use gerbe_core::fields::{Chart, ExprGroupMap, ExprOneForm, ExprTwoForm, Form1, Form2, Map};
use gerbe_core::gauge::{compose_gauge, make_fake_flat, GammaConnection, Gauge2Transformation, GaugeTransformation};
use gerbe_core::transport::calibration::{AbelianCase, CalibrationInput, Check, HorizontalCase, SurfaceCase};
use gerbe_core::transport::{IntegratorConfig, Scheme};
use gerbe_core::two_group::{instance, SharedCm};

use crate::error::{LoadError, Result};

pub const DEFAULT_SAMPLES: usize = 3;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub version: u32,
    #[serde(default)]
    pub description: String,
    pub crossed_module: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub integrator: IntegratorDef,
    #[serde(default)]
    pub charts: BTreeMap<String, ChartDef>,
    #[serde(default)]
    pub connections: BTreeMap<String, ConnectionDef>,
    #[serde(default)]
    pub gauges: BTreeMap<String, GaugeDef>,
    #[serde(default)]
    pub gauge2: BTreeMap<String, Gauge2Def>,
    #[serde(default)]
    pub paths: BTreeMap<String, PathDef>,
    #[serde(default)]
    pub bigons: BTreeMap<String, BigonDef>,
    #[serde(default)]
    pub bundles: BTreeMap<String, BundleDef>,
    #[serde(default)]
    pub calibration: Option<CalibrationDef>,
    #[serde(default)]
    pub run: RunDef,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorDef {
    #[serde(default = "default_steps")]
    pub n_steps: usize,
    #[serde(default = "default_surface_steps")]
    pub surface_steps: usize,
    #[serde(default = "default_scheme")]
    pub scheme: String,
    #[serde(default = "yes")]
    pub richardson: bool,
}

fn default_steps() -> usize {
    IntegratorConfig::default().n_steps
}
fn default_surface_steps() -> usize {
    IntegratorConfig::default().surface_steps
}
fn default_scheme() -> String {
    IntegratorConfig::default().scheme.as_str().to_string()
}
fn yes() -> bool {
    true
}

impl Default for IntegratorDef {
    fn default() -> Self {
        IntegratorDef { n_steps: default_steps(), surface_steps: default_surface_steps(), scheme: default_scheme(), richardson: true }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartDef {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

/// One component `B_{ij}` of a 2-form.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoFormComponent {
    pub dx: (usize, usize),
    pub coeffs: Vec<String>,
}

/// Either explicit `(a, b)` on a chart, `a` completed to a fake-flat pair,
/// or the target of a named gauge transformation.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionDef {
    pub chart: Option<String>,
    pub crossed_module: Option<String>,
    pub a: Option<Vec<Vec<String>>>,
    pub b: Option<Vec<TwoFormComponent>>,
    #[serde(default)]
    pub fake_flat: bool,
    pub gauge_target: Option<String>,
}

/// `(g, φ)` from a source connection, a composite `[second, first]`, or the
/// target of a 2-cell `a` out of a named gauge transformation.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeDef {
    pub source: Option<String>,
    pub g: Option<Vec<String>>,
    pub phi: Option<Vec<Vec<String>>>,
    pub compose: Option<(String, String)>,
    pub twist: Option<TwistDef>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwistDef {
    pub gauge: String,
    pub a: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Gauge2Def {
    pub source: String,
    pub a: Vec<String>,
    pub target: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathDef {
    pub expr: Vec<String>,
    #[serde(default)]
    pub sitting: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BigonDef {
    pub expr: Option<Vec<String>>,
    pub interpolate: Option<(String, String)>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleDef {
    pub charts: Vec<BundleChartDef>,
    #[serde(default)]
    pub transitions: Vec<TransitionDef>,
    #[serde(default)]
    pub cocycles: Vec<CocycleDef>,
    #[serde(default)]
    pub fake_flat: bool,
    #[serde(default)]
    pub itineraries: BTreeMap<String, Vec<LegDef>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleChartDef {
    pub name: String,
    pub connection: String,
    pub chart: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionDef {
    pub from: String,
    pub to: String,
    pub overlap: String,
    pub gauge: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CocycleDef {
    pub i: String,
    pub j: String,
    pub k: String,
    pub overlap: String,
    pub a: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LegDef {
    pub chart: String,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseDef {
    pub connection: String,
    pub bigon: String,
    pub second: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationDef {
    #[serde(default)]
    pub target_source: Vec<CaseDef>,
    #[serde(default)]
    pub abelian: Vec<CaseDef>,
    #[serde(default)]
    pub vertical: Vec<CaseDef>,
    #[serde(default)]
    pub horizontal: Vec<CaseDef>,
    #[serde(default)]
    pub disable: Vec<String>,
}

/// The objects a command acts on.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunDef {
    pub connection: Option<String>,
    pub path: Option<String>,
    pub bigon: Option<String>,
    pub gauge: Option<String>,
    pub gauge2: Option<String>,
    pub bundle: Option<String>,
    pub itinerary: Option<String>,
    pub itinerary_b: Option<String>,
    pub strips: Option<String>,
    pub suite: Option<String>,
    pub tolerance: Option<f64>,
}

/// A named bundle with its itineraries resolved to chart indices.
#[derive(Clone)]
pub struct LoadedBundle {
    pub data: BundleData,
    pub itineraries: BTreeMap<String, Vec<Leg>>,
}

/// A loaded scenario: every named object built and checked.
pub struct Scenario {
    pub version: u32,
    pub description: String,
    pub cm: SharedCm,
    pub seed: u64,
    pub samples: usize,
    pub integrator: IntegratorConfig,
    pub charts: BTreeMap<String, Chart>,
    pub connections: BTreeMap<String, GammaConnection>,
    pub gauges: BTreeMap<String, GaugeTransformation>,
    pub gauge2: BTreeMap<String, Gauge2Transformation>,
    pub paths: BTreeMap<String, SharedPath>,
    pub bigons: BTreeMap<String, SharedBigon>,
    pub bundles: BTreeMap<String, LoadedBundle>,
    pub calibration: Option<(CalibrationInput, Vec<Check>)>,
    pub run: RunDef,
    /// Raw bytes of the file, for the report digest.
    pub bytes: Vec<u8>,
}

fn lookup<'a, T>(map: &'a BTreeMap<String, T>, kind: &'static str, name: &str) -> Result<&'a T> {
    map.get(name).ok_or_else(|| LoadError::Unknown { kind, name: name.to_string() })
}

fn def_err(kind: &'static str, name: &str, message: impl Into<String>) -> LoadError {
    LoadError::Definition { kind, name: name.to_string(), message: message.into() }
}

/// Attaches the definition's name to errors raised while building it.
fn named<T>(kind: &'static str, name: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        LoadError::Core(e) => def_err(kind, name, e.to_string()),
        e => e,
    })
}

fn strs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

fn rows(v: &[Vec<String>]) -> Vec<Vec<&str>> {
    v.iter().map(|r| strs(r)).collect()
}

/// Resolves definitions on demand, memoizing and detecting cycles.
struct Resolver<'a> {
    file: &'a ScenarioFile,
    cm: SharedCm,
    charts: BTreeMap<String, Chart>,
    connections: BTreeMap<String, GammaConnection>,
    gauges: BTreeMap<String, GaugeTransformation>,
    visiting: BTreeSet<(&'static str, String)>,
}

impl Resolver<'_> {
    fn chart(&self, name: &str) -> Result<Chart> {
        lookup(&self.charts, "chart", name).cloned()
    }

    fn enter(&mut self, kind: &'static str, name: &str) -> Result<()> {
        if !self.visiting.insert((kind, name.to_string())) {
            return Err(LoadError::Cycle { kind, name: name.to_string() });
        }
        Ok(())
    }

    fn leave(&mut self, kind: &'static str, name: &str) {
        self.visiting.remove(&(kind, name.to_string()));
    }

    fn connection(&mut self, name: &str) -> Result<GammaConnection> {
        if let Some(c) = self.connections.get(name) {
            return Ok(c.clone());
        }
        let def = lookup(&self.file.connections, "connection", name)?;
        self.enter("connection", name)?;
        let built = self.build_connection(name, def);
        self.leave("connection", name);
        let c = named("connection", name, built)?;
        self.connections.insert(name.to_string(), c.clone());
        Ok(c)
    }

    fn build_connection(&mut self, name: &str, def: &ConnectionDef) -> Result<GammaConnection> {
        const KIND: &str = "connection";
        if let Some(gt) = &def.gauge_target {
            if def.a.is_some() || def.b.is_some() || def.fake_flat || def.crossed_module.is_some() {
                return Err(def_err(KIND, name, "`gauge_target` excludes `a`, `b`, `fake_flat` and `crossed_module`"));
            }
            let target = self.gauge(gt)?.target().clone();
            return Ok(match &def.chart {
                Some(c) => target.with_chart(&self.chart(c)?)?,
                None => target,
            });
        }
        let chart_name = def.chart.as_deref().ok_or_else(|| def_err(KIND, name, "needs `chart` or `gauge_target`"))?;
        let chart = self.chart(chart_name)?;
        let cm = match &def.crossed_module {
            Some(n) => instance(n)?,
            None => self.cm.clone(),
        };
        let a: Form1 = match &def.a {
            Some(r) => Arc::new(ExprOneForm::parse(cm.g(), &chart, &rows(r))?),
            None => Arc::new(ExprOneForm::zero(cm.g(), &chart)),
        };
        if def.fake_flat {
            if def.b.is_some() {
                return Err(def_err(KIND, name, "`fake_flat` derives `b`; do not give both"));
            }
            return Ok(make_fake_flat(&cm, &chart, a)?);
        }
        let b: Form2 = match &def.b {
            Some(comps) => {
                let comps: Vec<((usize, usize), Vec<&str>)> = comps.iter().map(|c| (c.dx, strs(&c.coeffs))).collect();
                Arc::new(ExprTwoForm::parse(cm.h(), &chart, &comps)?)
            }
            None => Arc::new(ExprTwoForm::zero(cm.h())),
        };
        Ok(GammaConnection::new(cm, chart, a, b)?)
    }

    fn gauge(&mut self, name: &str) -> Result<GaugeTransformation> {
        if let Some(g) = self.gauges.get(name) {
            return Ok(g.clone());
        }
        let def = lookup(&self.file.gauges, "gauge", name)?;
        self.enter("gauge", name)?;
        let built = self.build_gauge(name, def);
        self.leave("gauge", name);
        let g = named("gauge", name, built)?;
        self.gauges.insert(name.to_string(), g.clone());
        Ok(g)
    }

    fn build_gauge(&mut self, name: &str, def: &GaugeDef) -> Result<GaugeTransformation> {
        const KIND: &str = "gauge";
        let explicit = def.source.is_some() || def.g.is_some() || def.phi.is_some();
        match (explicit, &def.compose, &def.twist) {
            (true, None, None) => {
                let src_name = def.source.as_deref().ok_or_else(|| def_err(KIND, name, "needs `source`"))?;
                let src = self.connection(src_name)?;
                let cm = src.cm().clone();
                let chart = src.chart().clone();
                let g: Map = match &def.g {
                    Some(gens) => Arc::new(ExprGroupMap::parse(cm.g(), &chart, &strs(gens))?),
                    None => gerbe_core::fields::identity_map(cm.g()),
                };
                let phi: Form1 = match &def.phi {
                    Some(r) => Arc::new(ExprOneForm::parse(cm.h(), &chart, &rows(r))?),
                    None => Arc::new(ExprOneForm::zero(cm.h(), &chart)),
                };
                Ok(GaugeTransformation::from_source(&src, g, phi)?)
            }
            (false, Some((second, first)), None) => {
                let (second, first) = (self.gauge(second)?, self.gauge(first)?);
                Ok(compose_gauge(&second, &first)?)
            }
            (false, None, Some(tw)) => {
                let base = self.gauge(&tw.gauge)?;
                let chart = base.source().chart().clone();
                let a: Map = Arc::new(ExprGroupMap::parse(base.cm().h(), &chart, &strs(&tw.a))?);
                Ok(Gauge2Transformation::from_source(a, base)?.target().clone())
            }
            _ => Err(def_err(KIND, name, "give exactly one of `source`/`g`/`phi`, `compose` or `twist`")),
        }
    }
}

fn check_names(names: &[&str]) -> Result<Vec<Check>> {
    names
        .iter()
        .map(|n| {
            Check::ALL
                .iter()
                .copied()
                .find(|c| c.as_str() == *n)
                .ok_or_else(|| LoadError::Unknown { kind: "calibration check", name: n.to_string() })
        })
        .collect()
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|source| LoadError::Io { path: path.to_path_buf(), source })?;
        Self::from_bytes(bytes)
    }

    pub fn from_bytes(bytes: Vec<u8>) -> Result<Self> {
        let file: ScenarioFile = serde_json::from_slice(&bytes)?;
        if file.version != 1 {
            return Err(LoadError::Version(file.version));
        }
        let cm = instance(&file.crossed_module)?;
        let scheme: Scheme = file.integrator.scheme.parse()?;
        let integrator = IntegratorConfig {
            n_steps: file.integrator.n_steps,
            surface_steps: file.integrator.surface_steps,
            scheme,
            richardson: file.integrator.richardson,
        };
        integrator.validate()?;

        let mut charts = BTreeMap::new();
        for (name, c) in &file.charts {
            if c.lo.len() != c.hi.len() {
                return Err(def_err("chart", name, "`lo` and `hi` differ in length"));
            }
            charts.insert(name.clone(), named("chart", name, Chart::new(c.lo.len(), &c.lo, &c.hi).map_err(Into::into))?);
        }

        let mut r = Resolver {
            file: &file,
            cm: cm.clone(),
            charts: charts.clone(),
            connections: BTreeMap::new(),
            gauges: BTreeMap::new(),
            visiting: BTreeSet::new(),
        };
        for name in file.connections.keys() {
            r.connection(name)?;
        }
        for name in file.gauges.keys() {
            r.gauge(name)?;
        }

        let mut gauge2 = BTreeMap::new();
        for (name, d) in &file.gauge2 {
            let source = r.gauge(&d.source)?;
            let target = d.target.as_deref().map(|t| r.gauge(t)).transpose()?;
            let built = (|| {
                let chart = source.source().chart().clone();
                let a: Map = Arc::new(ExprGroupMap::parse(source.cm().h(), &chart, &strs(&d.a))?);
                Ok(match target {
                    Some(t) => Gauge2Transformation::new(a, source, t)?,
                    None => Gauge2Transformation::from_source(a, source)?,
                })
            })();
            gauge2.insert(name.clone(), named("gauge2", name, built)?);
        }

        let mut paths: BTreeMap<String, SharedPath> = BTreeMap::new();
        for (name, d) in &file.paths {
            let p = named("path", name, ExprPath::parse(d.expr.len(), &strs(&d.expr), d.sitting).map_err(Into::into))?;
            paths.insert(name.clone(), Arc::new(p));
        }
        let mut bigons: BTreeMap<String, SharedBigon> = BTreeMap::new();
        for (name, d) in &file.bigons {
            let b: SharedBigon = match (&d.expr, &d.interpolate) {
                (Some(e), None) => Arc::new(named("bigon", name, ExprBigon::parse(e.len(), &strs(e)).map_err(Into::into))?),
                (None, Some((a, b))) => interpolate(lookup(&paths, "path", a)?.clone(), lookup(&paths, "path", b)?.clone()),
                _ => return Err(def_err("bigon", name, "give exactly one of `expr` or `interpolate`")),
            };
            bigons.insert(name.clone(), b);
        }

        let mut bundles = BTreeMap::new();
        for (name, d) in &file.bundles {
            bundles.insert(name.clone(), named("bundle", name, build_bundle(&mut r, &cm, name, d))?);
        }

        let calibration = match &file.calibration {
            None => None,
            Some(c) => Some(build_calibration(&mut r, &bigons, c)?),
        };

        let run = &file.run;
        for (kind, sel, known) in [
            ("connection", &run.connection, file.connections.contains_key(run.connection.as_deref().unwrap_or(""))),
            ("path", &run.path, paths.contains_key(run.path.as_deref().unwrap_or(""))),
            ("bigon", &run.bigon, bigons.contains_key(run.bigon.as_deref().unwrap_or(""))),
            ("gauge", &run.gauge, file.gauges.contains_key(run.gauge.as_deref().unwrap_or(""))),
            ("gauge2", &run.gauge2, gauge2.contains_key(run.gauge2.as_deref().unwrap_or(""))),
            ("bundle", &run.bundle, bundles.contains_key(run.bundle.as_deref().unwrap_or(""))),
        ] {
            if let Some(n) = sel {
                if !known {
                    return Err(LoadError::Unknown { kind, name: n.clone() });
                }
            }
        }
        if let Some(b) = &run.bundle {
            let lb = &bundles[b];
            for sel in [&run.itinerary, &run.itinerary_b, &run.strips].into_iter().flatten() {
                lookup(&lb.itineraries, "itinerary", sel)?;
            }
        }

        let Resolver { connections, gauges, .. } = r;
        Ok(Scenario {
            version: file.version,
            description: file.description,
            cm,
            seed: file.seed,
            samples: file.samples.unwrap_or(DEFAULT_SAMPLES).max(1),
            integrator,
            charts,
            connections,
            gauges,
            gauge2,
            paths,
            bigons,
            bundles,
            calibration,
            run: file.run,
            bytes,
        })
    }

    pub fn connection(&self) -> Result<&GammaConnection> {
        let n = self.run.connection.as_deref().ok_or(LoadError::MissingSelection("connection"))?;
        lookup(&self.connections, "connection", n)
    }

    pub fn path(&self) -> Result<&SharedPath> {
        let n = self.run.path.as_deref().ok_or(LoadError::MissingSelection("path"))?;
        lookup(&self.paths, "path", n)
    }

    pub fn bigon(&self) -> Result<&SharedBigon> {
        let n = self.run.bigon.as_deref().ok_or(LoadError::MissingSelection("bigon"))?;
        lookup(&self.bigons, "bigon", n)
    }

    pub fn gauge(&self) -> Result<&GaugeTransformation> {
        let n = self.run.gauge.as_deref().ok_or(LoadError::MissingSelection("gauge"))?;
        lookup(&self.gauges, "gauge", n)
    }

    pub fn gauge2(&self) -> Result<&Gauge2Transformation> {
        let n = self.run.gauge2.as_deref().ok_or(LoadError::MissingSelection("gauge2"))?;
        lookup(&self.gauge2, "gauge2", n)
    }

    pub fn bundle(&self) -> Result<&LoadedBundle> {
        let n = self.run.bundle.as_deref().ok_or(LoadError::MissingSelection("bundle"))?;
        lookup(&self.bundles, "bundle", n)
    }

    /// The itinerary selected by `run.<field>` in the selected bundle.
    pub fn itinerary(&self, field: &'static str) -> Result<&[Leg]> {
        let sel = match field {
            "itinerary" => &self.run.itinerary,
            "itinerary_b" => &self.run.itinerary_b,
            _ => &self.run.strips,
        };
        let n = sel.as_deref().ok_or(LoadError::MissingSelection(field))?;
        Ok(lookup(&self.bundle()?.itineraries, "itinerary", n)?)
    }
}

fn build_bundle(r: &mut Resolver, cm: &SharedCm, name: &str, d: &BundleDef) -> Result<LoadedBundle> {
    let mut index = BTreeMap::new();
    let mut charts = Vec::new();
    for (i, c) in d.charts.iter().enumerate() {
        if index.insert(c.name.clone(), i).is_some() {
            return Err(def_err("bundle", name, format!("duplicate chart `{}`", c.name)));
        }
        let conn = r.connection(&c.connection)?;
        let conn = match &c.chart {
            Some(ch) => conn.with_chart(&r.chart(ch)?)?,
            None => conn,
        };
        charts.push(CoverChart::new(&c.name, conn));
    }
    let idx = |n: &str| index.get(n).copied().ok_or_else(|| LoadError::Unknown { kind: "bundle chart", name: n.to_string() });
    let mut transitions = Vec::new();
    for t in &d.transitions {
        let gt = r.gauge(&t.gauge)?;
        transitions.push(TransitionSpec { from: idx(&t.from)?, to: idx(&t.to)?, overlap: r.chart(&t.overlap)?, g: gt.g.clone(), phi: gt.phi.clone() });
    }
    let mut cocycles = Vec::new();
    for c in &d.cocycles {
        let overlap = r.chart(&c.overlap)?;
        let a: Map = Arc::new(ExprGroupMap::parse(cm.h(), &overlap, &strs(&c.a))?);
        cocycles.push(CocycleSpec { i: idx(&c.i)?, j: idx(&c.j)?, k: idx(&c.k)?, overlap, a });
    }
    let data = BundleData::new(cm.clone(), charts, transitions, cocycles, d.fake_flat)?;
    let mut itineraries = BTreeMap::new();
    for (iname, legs) in &d.itineraries {
        let legs = legs.iter().map(|l| Ok(Leg { chart: idx(&l.chart)?, lo: l.lo, hi: l.hi })).collect::<Result<Vec<_>>>()?;
        itineraries.insert(iname.clone(), legs);
    }
    Ok(LoadedBundle { data, itineraries })
}

fn build_calibration(r: &mut Resolver, bigons: &BTreeMap<String, SharedBigon>, d: &CalibrationDef) -> Result<(CalibrationInput, Vec<Check>)> {
    let mut case = |c: &CaseDef| -> Result<SurfaceCase> {
        let conn = r.connection(&c.connection)?;
        Ok(SurfaceCase { cm: conn.cm().clone(), a: conn.a().clone(), b: conn.b().clone(), sigma: lookup(bigons, "bigon", &c.bigon)?.clone() })
    };
    let mut input = CalibrationInput::default();
    for c in &d.target_source {
        input.target_source.push(case(c)?);
    }
    for c in &d.vertical {
        input.vertical.push(case(c)?);
    }
    for c in &d.abelian {
        let sc = case(c)?;
        if sc.cm.h().dim() != 1 {
            return Err(def_err("calibration case", &c.connection, "the abelian check needs a one-dimensional H"));
        }
        let integral = surface_integral(&*sc.b, &*sc.sigma, 0);
        input.abelian.push(AbelianCase { case: sc, integral });
    }
    for c in &d.horizontal {
        let second = c.second.as_deref().ok_or_else(|| def_err("calibration case", &c.bigon, "horizontal cases need `second`"))?;
        let second = lookup(bigons, "bigon", second)?.clone();
        input.horizontal.push(HorizontalCase { case: case(c)?, second });
    }
    let disabled = check_names(&d.disable.iter().map(String::as_str).collect::<Vec<_>>())?;
    let enabled = Check::ALL.iter().copied().filter(|c| !disabled.contains(c)).collect();
    Ok((input, enabled))
}
