//! Principal Γ-bundles given by descent data over a cover of coordinate
//! charts, and transport along paths and bigons that cross charts.
//!
//! Transition data `g_ij, φ_ij` are gauge transformations from the
//! connection of chart `i` to that of chart `j` on their overlap; cocycles
//! `a_ijk: (g_jk, φ_jk) ∘ (g_ij, φ_ij) ⇒ (g_ik, φ_ik)` live on triple
//! overlaps. Only one orientation of each datum is stored; the others are
//! derived, and data with a repeated index are trivial.

pub mod laws;
pub mod total;

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fields::paths::{require_path_in_chart, restrict_path, smooth_step, FnBigon, FnPath, SharedBigon, SharedPath};
use crate::fields::{Chart, Form1, Map, Vec3};
use crate::functor::{f_bigon, f_path, AxiomReport};
use crate::gauge::{check_gauge, check_gauge2, compose_gauge, Gauge2Transformation, GammaConnection, GaugeTransformation};
use crate::linalg::CMat;
use crate::transport::IntegratorConfig;
use crate::two_group::{mor_product, SharedCm, TwoGroupMorphism};

/// Slack allowed between consecutive legs of an itinerary.
pub const ITINERARY_SLACK: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct CoverChart {
    pub name: String,
    pub conn: GammaConnection,
}

impl CoverChart {
    pub fn new(name: &str, conn: GammaConnection) -> Self {
        CoverChart { name: name.to_string(), conn }
    }
    pub fn chart(&self) -> &Chart {
        self.conn.chart()
    }
}

/// Transition data from chart `from` to chart `to`.
#[derive(Clone)]
pub struct TransitionSpec {
    pub from: usize,
    pub to: usize,
    pub overlap: Chart,
    pub g: Map,
    pub phi: Form1,
}

/// The value of `a_ijk` on a triple overlap.
#[derive(Clone)]
pub struct CocycleSpec {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub overlap: Chart,
    pub a: Map,
}

#[derive(Clone, Debug)]
pub struct TransitionDatum {
    pub from: usize,
    pub to: usize,
    pub overlap: Chart,
    pub gt: GaugeTransformation,
}

#[derive(Clone, Debug)]
pub struct Cocycle2 {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub overlap: Chart,
    pub a2: Gauge2Transformation,
}

/// Descent data of a principal Γ-bundle with connection.
#[derive(Clone, Debug)]
pub struct BundleData {
    cm: SharedCm,
    charts: Vec<CoverChart>,
    transitions: Vec<TransitionDatum>,
    cocycles: Vec<Cocycle2>,
    /// Whether every chart connection is claimed to be fake-flat.
    pub fake_flat: bool,
}

/// `[lo, hi]` box common to both charts, if any.
pub fn intersect(a: &Chart, b: &Chart) -> Option<Chart> {
    if a.dim() != b.dim() {
        return None;
    }
    let d = a.dim();
    let lo: Vec<f64> = (0..d).map(|i| a.lo()[i].max(b.lo()[i])).collect();
    let hi: Vec<f64> = (0..d).map(|i| a.hi()[i].min(b.hi()[i])).collect();
    Chart::new(d, &lo, &hi).ok()
}

fn inside(small: &Chart, big: &Chart) -> bool {
    small.dim() == big.dim() && (0..small.dim()).all(|i| small.lo()[i] >= big.lo()[i] - 1e-12 && small.hi()[i] <= big.hi()[i] + 1e-12)
}

impl BundleData {
    /// Assemble and index the data. Overlaps must lie inside the charts
    /// they join; every cocycle needs transitions for all three pairs.
    pub fn new(cm: SharedCm, charts: Vec<CoverChart>, transitions: Vec<TransitionSpec>, cocycles: Vec<CocycleSpec>, fake_flat: bool) -> Result<Self> {
        let n = charts.len();
        if n == 0 {
            return Err(Error::Invalid("a bundle needs at least one chart".into()));
        }
        for c in &charts {
            if c.conn.cm().name() != cm.name() {
                return Err(Error::DescriptorMismatch { left: c.conn.cm().name().to_string(), right: cm.name().to_string() });
            }
        }
        let mut out = BundleData { cm, charts, transitions: Vec::new(), cocycles: Vec::new(), fake_flat };
        for t in transitions {
            if t.from >= n || t.to >= n || t.from == t.to {
                return Err(Error::Invalid(format!("transition {} -> {}", t.from, t.to)));
            }
            if out.find_transition(t.from, t.to).is_some() {
                return Err(Error::Invalid(format!("duplicate transition {} -> {}", t.from, t.to)));
            }
            let (ci, cj) = (out.charts[t.from].chart(), out.charts[t.to].chart());
            if !inside(&t.overlap, ci) || !inside(&t.overlap, cj) {
                return Err(Error::OutsideChart(format!("overlap of {} and {}", t.from, t.to)));
            }
            let src = out.charts[t.from].conn.with_chart(&t.overlap)?;
            let tgt = out.charts[t.to].conn.with_chart(&t.overlap)?;
            let gt = GaugeTransformation::new(t.g, t.phi, src, tgt)?;
            out.transitions.push(TransitionDatum { from: t.from, to: t.to, overlap: t.overlap, gt });
        }
        for c in cocycles {
            let (i, j, k) = (c.i, c.j, c.k);
            if i >= n || j >= n || k >= n || i == j || j == k || i == k {
                return Err(Error::Invalid(format!("cocycle ({i}, {j}, {k})")));
            }
            let mut ends = Vec::with_capacity(3);
            for (a, b) in [(i, j), (j, k), (i, k)] {
                let gt = out.transition(a, b).ok_or(Error::MissingTransition { from: a, to: b })?;
                if !inside(&c.overlap, gt.source().chart()) {
                    return Err(Error::OutsideChart(format!("triple overlap ({i}, {j}, {k})")));
                }
                ends.push(gt.restrict(&c.overlap)?);
            }
            let source = compose_gauge(&ends[1], &ends[0])?;
            let a2 = Gauge2Transformation::new(c.a, source, ends[2].clone())?;
            out.cocycles.push(Cocycle2 { i, j, k, overlap: c.overlap, a2 });
        }
        Ok(out)
    }

    /// A single chart with no descent data.
    pub fn trivial(name: &str, conn: GammaConnection) -> Self {
        let fake_flat = conn.is_fake_flat();
        BundleData { cm: conn.cm().clone(), charts: alloc::vec![CoverChart::new(name, conn)], transitions: Vec::new(), cocycles: Vec::new(), fake_flat }
    }

    pub fn cm(&self) -> &SharedCm {
        &self.cm
    }
    pub fn charts(&self) -> &[CoverChart] {
        &self.charts
    }
    pub fn transitions(&self) -> &[TransitionDatum] {
        &self.transitions
    }
    pub fn cocycles(&self) -> &[Cocycle2] {
        &self.cocycles
    }

    pub fn chart_index(&self, name: &str) -> Option<usize> {
        self.charts.iter().position(|c| c.name == name)
    }

    fn find_transition(&self, i: usize, j: usize) -> Option<&TransitionDatum> {
        self.transitions.iter().find(|t| t.from == i && t.to == j)
    }

    /// `(g_ij, φ_ij)` on the overlap, either as declared or as the inverse
    /// of the declared `(g_ji, φ_ji)`. `None` for `i = j`.
    pub fn transition(&self, i: usize, j: usize) -> Option<GaugeTransformation> {
        if let Some(t) = self.find_transition(i, j) {
            return Some(t.gt.clone());
        }
        self.find_transition(j, i).map(|t| t.gt.inverse())
    }

    fn require_transition(&self, i: usize, j: usize) -> Result<GaugeTransformation> {
        self.transition(i, j).ok_or(Error::MissingTransition { from: i, to: j })
    }

    /// `g_ij(p)`, with `g_ii = 1`.
    pub fn g_at(&self, i: usize, j: usize, p: &Vec3) -> Result<CMat> {
        if i == j {
            return Ok(self.cm.g().identity());
        }
        let gt = self.require_transition(i, j)?;
        if !gt.source().chart().contains(p, 1e-12) {
            return Err(Error::OutsideChart(format!("transition point {i} -> {j}")));
        }
        Ok(gt.g.value(p))
    }

    /// `a_ijk(p)` satisfying `t(a_ijk) g_jk g_ij = g_ik`, derived from the
    /// stored orientation; `1` when an index repeats.
    pub fn cocycle_at(&self, i: usize, j: usize, k: usize, p: &Vec3) -> Result<CMat> {
        if i == j || j == k || i == k {
            return Ok(self.cm.h().identity());
        }
        let (c, perm) = self
            .cocycles
            .iter()
            .find_map(|c| {
                let (x, y, z) = (c.i, c.j, c.k);
                let perm = match (i, j, k) {
                    _ if (i, j, k) == (x, y, z) => 0,
                    _ if (i, j, k) == (x, z, y) => 1,
                    _ if (i, j, k) == (y, x, z) => 2,
                    _ if (i, j, k) == (y, z, x) => 3,
                    _ if (i, j, k) == (z, x, y) => 4,
                    _ if (i, j, k) == (z, y, x) => 5,
                    _ => return None,
                };
                Some((c, perm))
            })
            .ok_or(Error::MissingCocycle { i, j, k })?;
        if !c.overlap.contains(p, 1e-12) {
            return Err(Error::OutsideChart(format!("cocycle point ({i}, {j}, {k})")));
        }
        let cm = &self.cm;
        let a = c.a2.a.value(p);
        let ai = a.inverse().unwrap_or_else(|| cm.h().identity());
        let g_yz = self.g_at(c.j, c.k, p)?;
        let g_xy = self.g_at(c.i, c.j, p)?;
        let inv = |m: CMat| m.inverse().unwrap_or_else(|| cm.g().identity());
        Ok(match perm {
            0 => a,
            1 => cm.alpha(&inv(g_yz), &ai),
            2 => ai,
            3 => cm.alpha(&inv(g_yz * g_xy), &a),
            4 => cm.alpha(&inv(g_yz), &a),
            _ => cm.alpha(&inv(g_yz * g_xy), &ai),
        })
    }
}

/// One leg of an itinerary: the parameter interval `[lo, hi]` travelled in
/// chart `chart`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Leg {
    pub chart: usize,
    pub lo: f64,
    pub hi: f64,
}

pub type Itinerary = Vec<Leg>;

fn validate_itinerary(b: &BundleData, itin: &[Leg]) -> Result<()> {
    let first = itin.first().ok_or_else(|| Error::ItineraryGap("empty itinerary".into()))?;
    if first.lo.abs() > ITINERARY_SLACK {
        return Err(Error::ItineraryGap(format!("starts at {}", first.lo)));
    }
    let last = itin.last().expect("non-empty");
    if (last.hi - 1.0).abs() > ITINERARY_SLACK {
        return Err(Error::ItineraryGap(format!("ends at {}", last.hi)));
    }
    for (k, l) in itin.iter().enumerate() {
        if l.chart >= b.charts.len() {
            return Err(Error::Invalid(format!("leg {k}: unknown chart {}", l.chart)));
        }
        if !(l.lo < l.hi) {
            return Err(Error::ItineraryGap(format!("leg {k} is empty")));
        }
        if let Some(n) = itin.get(k + 1) {
            if (n.lo - l.hi).abs() > ITINERARY_SLACK {
                return Err(Error::ItineraryGap(format!("between legs {k} and {}", k + 1)));
            }
        }
    }
    Ok(())
}

/// One letter of a transport word, in order of travel.
#[derive(Clone, Debug)]
pub enum WordElement {
    /// `poe` of the chart connection on `γ|[lo, hi]`.
    Segment { chart: usize, lo: f64, hi: f64, start: Vec3, end: Vec3, value: CMat },
    /// The identity 2-cell on `g_{from,to}(γ(at))`.
    Jump { from: usize, to: usize, at: f64, point: Vec3, cell: TwoGroupMorphism },
}

impl WordElement {
    pub fn value(&self) -> CMat {
        match self {
            WordElement::Segment { value, .. } => *value,
            WordElement::Jump { cell, .. } => *cell.g(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TransportWord {
    pub elements: Vec<WordElement>,
    pub start_chart: usize,
    pub end_chart: usize,
}

impl TransportWord {
    /// The product of the word, last letter leftmost; a map from the fibre
    /// at `γ(0)` in the start chart to the fibre at `γ(1)` in the end chart.
    pub fn normalize(&self) -> CMat {
        let mut it = self.elements.iter();
        let mut acc = it.next().expect("non-empty word").value();
        for e in it {
            acc = e.value() * acc;
        }
        acc
    }

    /// Largest gap between the end of one letter and the start of the next,
    /// in the base and in chart labels (a label mismatch counts as infinite).
    pub fn adjacency_residual(&self) -> f64 {
        let ends = |e: &WordElement| match e {
            WordElement::Segment { chart, start, end, .. } => ((*chart, *start), (*chart, *end)),
            WordElement::Jump { from, to, point, .. } => ((*from, *point), (*to, *point)),
        };
        let mut worst = 0.0f64;
        for w in self.elements.windows(2) {
            let ((c0, p0), (c1, p1)) = (ends(&w[0]).1, ends(&w[1]).0);
            if c0 != c1 {
                return f64::INFINITY;
            }
            worst = worst.max(crate::fields::vnorm(&crate::fields::vsub(&p0, &p1)));
        }
        worst
    }
}

/// Parallel transport of `γ` along an itinerary.
pub fn transport_path(b: &BundleData, gamma: &SharedPath, itin: &[Leg], cfg: &IntegratorConfig) -> Result<TransportWord> {
    validate_itinerary(b, itin)?;
    let mut elements = Vec::with_capacity(2 * itin.len());
    for (k, l) in itin.iter().enumerate() {
        if k > 0 {
            let prev = itin[k - 1].chart;
            if prev != l.chart {
                let p = gamma.point(l.lo);
                let g = b.g_at(prev, l.chart, &p)?;
                elements.push(WordElement::Jump { from: prev, to: l.chart, at: l.lo, point: p, cell: TwoGroupMorphism::identity(&b.cm, g) });
            }
        }
        let piece = restrict_path(gamma.clone(), l.lo, l.hi);
        let value = f_path(&b.charts[l.chart].conn, &*piece, cfg)?;
        elements.push(WordElement::Segment { chart: l.chart, lo: l.lo, hi: l.hi, start: piece.point(0.0), end: piece.point(1.0), value });
    }
    Ok(TransportWord { elements, start_chart: itin[0].chart, end_chart: itin[itin.len() - 1].chart })
}

fn chart_at(itin: &[Leg], u: f64) -> usize {
    itin.iter().find(|l| l.lo <= u && u <= l.hi).map(|l| l.chart).expect("validated itinerary covers [0, 1]")
}

fn stack(m2: &TwoGroupMorphism, m1: &TwoGroupMorphism) -> TwoGroupMorphism {
    TwoGroupMorphism::new(m1.cm(), *m2.h() * *m1.h(), *m1.g())
}

/// A 2-cell `g_{a_n b_n}(γ(1)) · w_A ⇒ w_B · g_{a_0 b_0}(γ(0))` between
/// the words of two itineraries, with the residuals of its boundary.
#[derive(Clone, Debug)]
pub struct ItineraryComparison {
    pub cell: TwoGroupMorphism,
    pub word_a: TransportWord,
    pub word_b: TransportWord,
    /// `|s(cell) − g_{a_n b_n}(γ(1)) w_A|`
    pub source_residual: f64,
    /// `|t(cell) − w_B g_{a_0 b_0}(γ(0))|`
    pub target_residual: f64,
}

/// Compare two itineraries of the same path.
pub fn compare_itineraries(b: &BundleData, gamma: &SharedPath, ia: &[Leg], ib: &[Leg], cfg: &IntegratorConfig) -> Result<ItineraryComparison> {
    compare_itineraries_with(b, gamma, ia, ib, cfg, true)
}

/// As [`compare_itineraries`]; with `use_cocycle = false` every `a_ijk`
/// is replaced by `1`, which is only correct for strictly flat descent data.
pub fn compare_itineraries_with(b: &BundleData, gamma: &SharedPath, ia: &[Leg], ib: &[Leg], cfg: &IntegratorConfig, use_cocycle: bool) -> Result<ItineraryComparison> {
    let word_a = transport_path(b, gamma, ia, cfg)?;
    let word_b = transport_path(b, gamma, ib, cfg)?;
    let cm = &b.cm;
    let mut cuts: Vec<f64> = ia.iter().chain(ib).flat_map(|l| [l.lo, l.hi]).collect();
    cuts.sort_by(|x, y| x.partial_cmp(y).expect("finite cuts"));
    cuts.dedup_by(|x, y| (*x - *y).abs() <= ITINERARY_SLACK);

    let cocycle = |i, j, k, p: &Vec3| if use_cocycle { b.cocycle_at(i, j, k, p) } else { Ok(cm.h().identity()) };
    let x = gamma.point(0.0);
    let (mut ca, mut cb) = (chart_at(ia, 0.5 * (cuts[0] + cuts[1])), chart_at(ib, 0.5 * (cuts[0] + cuts[1])));
    let mut phi = TwoGroupMorphism::identity(cm, b.g_at(ca, cb, &x)?);
    let mut aw = cm.g().identity();
    for k in 0..cuts.len() - 1 {
        let (lo, hi) = (cuts[k], cuts[k + 1]);
        let mid = 0.5 * (lo + hi);
        let (na, nb) = (chart_at(ia, mid), chart_at(ib, mid));
        if k > 0 && (na != ca || nb != cb) {
            let p = gamma.point(lo);
            let g_aa = b.g_at(ca, na, &p)?;
            let g_bb = b.g_at(cb, nb, &p)?;
            let g_ab2 = b.g_at(ca, nb, &p)?;
            let inner = TwoGroupMorphism::new(cm, cocycle(ca, na, nb, &p)?, b.g_at(na, nb, &p)? * g_aa);
            let c2 = cocycle(ca, cb, nb, &p)?;
            let outer = TwoGroupMorphism::new(cm, c2.inverse().unwrap_or_else(|| cm.h().identity()), g_ab2);
            let jump = stack(&outer, &inner);
            phi = stack(&mor_product(&TwoGroupMorphism::identity(cm, g_bb), &phi), &mor_product(&jump, &TwoGroupMorphism::identity(cm, aw)));
            aw = g_aa * aw;
        }
        let (ca2, cb2) = (na, nb);
        let piece = restrict_path(gamma.clone(), lo, hi);
        let poe_a = f_path(&b.charts[ca2].conn, &*piece, cfg)?;
        let rho = if ca2 == cb2 {
            TwoGroupMorphism::identity(cm, poe_a)
        } else {
            let gt = b.require_transition(ca2, cb2)?;
            require_path_in_chart(&*piece, gt.source().chart(), "segment between itineraries")?;
            crate::functor::rho_path(&gt, &*piece, cfg)?
        };
        let poe_b = f_path(&b.charts[cb2].conn, &*piece, cfg)?;
        phi = stack(&mor_product(&TwoGroupMorphism::identity(cm, poe_b), &phi), &mor_product(&rho, &TwoGroupMorphism::identity(cm, aw)));
        aw = poe_a * aw;
        ca = ca2;
        cb = cb2;
    }
    let y = gamma.point(1.0);
    let lhs = b.g_at(word_a.end_chart, word_b.end_chart, &y)? * word_a.normalize();
    let rhs = word_b.normalize() * b.g_at(word_a.start_chart, word_b.start_chart, &x)?;
    Ok(ItineraryComparison {
        source_residual: phi.source().dist(&lhs),
        target_residual: phi.target().dist(&rhs),
        cell: phi,
        word_a,
        word_b,
    })
}

/// Surface transport across charts together with its boundary check.
#[derive(Clone, Debug)]
pub struct BigonTransport {
    /// `(h, g_tot(γ))` with `γ` the source path.
    pub cell: TwoGroupMorphism,
    pub source_word: TransportWord,
    pub target_word: TransportWord,
    /// `|t(h) g_tot(γ) − g_tot(γ')|`
    pub target_residual: f64,
}

/// `Σ(·, t)` as a path in `s`.
fn cut_path(sigma: &SharedBigon, t: f64) -> SharedPath {
    let sigma = sigma.clone();
    Arc::new(FnPath(move |s| {
        let (x, ds, _) = sigma.eval(s, t);
        (x, ds)
    }))
}

/// The square bigon `c_{k+1} ∘ γ_k ⇒ γ'_k ∘ c_k` spanned by the strip
/// `[t0, t1]` of `Σ`: for each `σ` it runs up `c_k` to height `σ`, across
/// the row `s = σ`, and up `c_{k+1}` to the top.
fn strip_bigon(sigma: &SharedBigon, t0: f64, t1: f64) -> SharedBigon {
    let sigma = sigma.clone();
    Arc::new(FnBigon(move |sg: f64, u: f64| {
        let vs = crate::fields::vscale;
        if u <= 0.25 {
            let (w, dw) = smooth_step(4.0 * u);
            let (x, ds, _) = sigma.eval(sg * w, t0);
            (x, vs(&ds, w), vs(&ds, sg * 4.0 * dw))
        } else if u <= 0.75 {
            let (w, dw) = smooth_step(2.0 * u - 0.5);
            let (x, ds, dt) = sigma.eval(sg, t0 + (t1 - t0) * w);
            (x, ds, vs(&dt, (t1 - t0) * 2.0 * dw))
        } else {
            let (w, dw) = if u >= 1.0 { (1.0, 0.0) } else { smooth_step(4.0 * u - 3.0) };
            let r = sg + (1.0 - sg) * w;
            let (x, ds, _) = sigma.eval(r, t1);
            (x, vs(&ds, 1.0 - w), vs(&ds, (1.0 - sg) * 4.0 * dw))
        }
    }))
}

/// Surface transport of `Σ` cut into strips `t ∈ [lo, hi]`, each strip lying
/// in one chart. Consecutive strips in different charts must share a cut
/// `Σ(·, t)` inside the overlap.
pub fn transport_bigon(b: &BundleData, sigma: &SharedBigon, strips: &[Leg], cfg: &IntegratorConfig) -> Result<BigonTransport> {
    validate_itinerary(b, strips)?;
    let cm = &b.cm;
    let bottom: SharedPath = crate::fields::paths::source_path(sigma.clone());
    let top: SharedPath = crate::fields::paths::target_path(sigma.clone());
    let source_word = transport_path(b, &bottom, strips, cfg)?;
    let target_word = transport_path(b, &top, strips, cfg)?;
    let n = strips.len();

    // pre[k] = transport along the top from Σ(1, t_k) in chart i_k to the end.
    let mut pre = alloc::vec![cm.g().identity(); n + 1];
    for k in (0..n).rev() {
        let l = strips[k];
        let piece = restrict_path(top.clone(), l.lo, l.hi);
        let seg = f_path(&b.charts[l.chart].conn, &*piece, cfg)?;
        let jump = if k + 1 < n { b.g_at(l.chart, strips[k + 1].chart, &top.point(l.hi))? } else { cm.g().identity() };
        pre[k] = pre[k + 1] * jump * seg;
    }

    let mut h = cm.h().identity();
    for (k, l) in strips.iter().enumerate() {
        let conn = &b.charts[l.chart].conn;
        let cell = f_bigon(conn, &strip_bigon(sigma, l.lo, l.hi), cfg)?;
        let mut step = *cell.h();
        if k + 1 < n && strips[k + 1].chart != l.chart {
            let next = strips[k + 1].chart;
            let gt = b.require_transition(l.chart, next)?;
            let cut = cut_path(sigma, l.hi);
            let (hg, _) = gt.hg_phi(&*cut, cfg)?.value;
            let gy = gt.g.value(&top.point(l.hi));
            step = cm.alpha(&gy, &step) * hg;
        }
        h = h * cm.alpha(&pre[k + 1], &step);
    }
    let src = source_word.normalize();
    let target_residual = (cm.t(&h) * src).dist(&target_word.normalize());
    Ok(BigonTransport { cell: TwoGroupMorphism::new(cm, h, src), source_word, target_word, target_residual })
}

/// Check the descent data: every transition is a gauge transformation on
/// its overlap, every cocycle a gauge 2-transformation on its triple
/// overlap, and (if claimed) every chart connection is fake-flat.
pub fn validate_bundle(b: &BundleData, n_samples: usize, seed: u64, tol: f64) -> AxiomReport {
    let mut rep = AxiomReport::default();
    if b.fake_flat {
        for (i, c) in b.charts.iter().enumerate() {
            rep.push(&format!("chart[{i}].fake_flat"), c.conn.fake_curvature_residual(), crate::lie::TOLERANCES.fake_flat);
        }
    }
    for t in &b.transitions {
        let r = check_gauge(&t.gt, n_samples, seed);
        rep.push(&format!("transition[{}->{}].a", t.from, t.to), r.a_residual, tol);
        rep.push(&format!("transition[{}->{}].b", t.from, t.to), r.b_residual, tol);
    }
    for c in &b.cocycles {
        let r = check_gauge2(&c.a2, n_samples, seed);
        rep.push(&format!("cocycle[{},{},{}].g", c.i, c.j, c.k), r.g_residual, tol);
        rep.push(&format!("cocycle[{},{},{}].phi", c.i, c.j, c.k), r.phi_residual, tol);
    }
    rep
}
