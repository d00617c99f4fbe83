//! Verdict engine and bound kernels.
//!
//! Kernels are the bracketed quantities of the known distance bounds with
//! their absolute constants dropped; they are indicators, not bounds.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

use crate::enumerate::{
    enumerate_copies, influential_sets, max_edge_influence, max_pair_influence, InfluenceIndex,
    InfluentialSets,
};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::moments::{
    exact_moments_bruteforce, exact_moments_kernel, m4_value, triangle_fourth_closed_form,
    triangle_gaussian_fourth_closed_form, triangle_sixth_asymptotic, MomentKernel, MomentMethod,
    SixthMomentTerms,
};
use crate::pattern::Pattern;
use crate::poly::{build_form, mean, variance};
use crate::rational::{int, serialize_exact, to_f64, Rational};
use crate::spectral::{mixture_limit, spectrum_of, MixtureLimit, Spectrum, TriangleForm};

pub const SCHEMA: &str = "chromacount/1";

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Thresholds {
    pub eps_pair: f64,
    pub eps_vertex: f64,
    pub eps_strong: f64,
    pub moment_tol: f64,
    /// Largest influential-vertex count treated as "bounded".
    pub vertex_bound: usize,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            eps_pair: 0.25,
            eps_vertex: 0.25,
            eps_strong: 0.1,
            moment_tol: 0.05,
            vertex_bound: 16,
        }
    }
}

/// A value that may be missing because a capability limit was hit or the
/// quantity does not apply.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Section<T> {
    Available(T),
    Unavailable { unavailable: String },
}

impl<T> Section<T> {
    pub fn missing(reason: impl Into<String>) -> Self {
        Section::Unavailable {
            unavailable: reason.into(),
        }
    }

    pub fn from_result(r: Result<T>) -> Self {
        match r {
            Ok(v) => Section::Available(v),
            Err(e) => Section::missing(e.to_string()),
        }
    }

    pub fn get(&self) -> Option<&T> {
        match self {
            Section::Available(v) => Some(v),
            Section::Unavailable { .. } => None,
        }
    }
}

/// Exact fourth moment of `Z` under one input law.
#[derive(Debug, Clone, Serialize)]
pub struct FourthMoment {
    pub kernel: MomentKernel,
    pub method: MomentMethod,
    #[serde(serialize_with = "serialize_exact")]
    pub fourth: Rational,
    pub fourth_float: f64,
    /// `E[Z⁴] − 3`.
    #[serde(serialize_with = "serialize_exact")]
    pub discrepancy: Rational,
    pub discrepancy_float: f64,
}

impl FourthMoment {
    fn new(kernel: MomentKernel, method: MomentMethod, fourth: Rational) -> Self {
        let discrepancy = &fourth - int(3);
        FourthMoment {
            kernel,
            method,
            fourth_float: to_f64(&fourth),
            discrepancy_float: to_f64(&discrepancy),
            fourth,
            discrepancy,
        }
    }
}

/// `E[Z⁴]` by the cheapest exact route: closed form for triangles, then
/// the tuple kernel, then exhaustive enumeration on small hosts.
pub fn fourth_moment(
    g: &Graph,
    h: &Pattern,
    idx: &InfluenceIndex,
    kernel: MomentKernel,
) -> Result<FourthMoment> {
    if idx.is_triangle() {
        let v = match kernel {
            MomentKernel::Rademacher => triangle_fourth_closed_form(idx)?,
            MomentKernel::Gaussian => triangle_gaussian_fourth_closed_form(idx)?,
        };
        return Ok(FourthMoment::new(kernel, MomentMethod::ClosedForm, v));
    }
    let form = build_form(idx)?;
    match exact_moments_kernel(&form, 4, kernel) {
        Ok(r) => {
            let v = r
                .normalized_exact(4)
                .cloned()
                .ok_or_else(|| Error::Degenerate("variance is zero".into()))?;
            Ok(FourthMoment::new(kernel, MomentMethod::TupleKernel, v))
        }
        Err(e) if e.is_capability() && kernel == MomentKernel::Rademacher => {
            let r = exact_moments_bruteforce(g, h, 4)?;
            let v = r
                .normalized_exact(4)
                .cloned()
                .ok_or_else(|| Error::Degenerate("variance is zero".into()))?;
            Ok(FourthMoment::new(kernel, MomentMethod::Bruteforce, v))
        }
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InfluenceSummary {
    pub sigma: f64,
    pub max_vertex_influence: u64,
    pub max_vertex_ratio: f64,
    pub max_pair_influence: u64,
    pub max_pair: Option<(u32, u32)>,
    /// `M_n` over all pairs.
    pub max_pair_ratio: f64,
    pub max_edge_influence: u64,
    /// `M_n` over edges only.
    pub max_edge_ratio: f64,
    /// Largest `D_w / N` over pairs.
    pub max_pair_share: f64,
}

fn influence_summary(g: &Graph, idx: &InfluenceIndex, sigma: f64) -> InfluenceSummary {
    let dv = idx.vertex_influences().iter().copied().max().unwrap_or(0);
    let (pair, dp) = max_pair_influence(idx)
        .map(|(w, d)| (Some((w.as_slice()[0], w.as_slice()[1])), d))
        .unwrap_or((None, 0));
    let de = max_edge_influence(g, idx);
    let n = idx.copies_count();
    InfluenceSummary {
        sigma,
        max_vertex_influence: dv,
        max_vertex_ratio: dv as f64 / sigma,
        max_pair_influence: dp,
        max_pair: pair,
        max_pair_ratio: dp as f64 / sigma,
        max_edge_influence: de,
        max_edge_ratio: de as f64 / sigma,
        max_pair_share: if n == 0 { 0.0 } else { dp as f64 / n as f64 },
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundKernels {
    /// `max_v (D_v² / Var T)^{1/4}`.
    pub vertex_term: f64,
    /// `√Δ_G + Δ_G^{1/4}` from the Gaussian fourth moment, floored at zero.
    pub m4: Option<f64>,
    /// `max_v [(D_v²/Var T)^{1/4} + D_v m4]`.
    pub wasserstein: Option<f64>,
    /// `max_v [(D_v²/Var T)^{1/4} + m4]`.
    pub smooth: Option<f64>,
    /// `min(wasserstein^{1/2}, smooth^{1/3})`.
    pub kolmogorov_general: Option<f64>,
    /// `smooth^{1/2}`, triangles only.
    pub kolmogorov_triangle: Option<f64>,
    /// `(M^{1/2} + Δ⁺)^{1/5}` with `M` over edges; triangles only.
    pub triangle: Option<f64>,
    /// `(M² + Δ⁺)^{1/5}`, the squared-`M` variant.
    pub triangle_squared: Option<f64>,
    /// `(M² + Δ⁺)^{1/20}` with `M` over all pairs.
    pub general: Option<f64>,
    /// Rademacher `E[Z⁴] − 3` before flooring.
    pub fourth_discrepancy: Option<f64>,
}

pub fn bound_kernels(
    influence: &InfluenceSummary,
    triangle: bool,
    rademacher_discrepancy: Option<f64>,
    gaussian_discrepancy: Option<f64>,
) -> BoundKernels {
    let vertex_term = influence.max_vertex_ratio.sqrt();
    let m4 = gaussian_discrepancy.map(m4_value);
    let dv = influence.max_vertex_influence as f64;
    let wasserstein = m4.map(|m| vertex_term + dv * m);
    let smooth = m4.map(|m| vertex_term + m);
    let kolmogorov_general = wasserstein
        .zip(smooth)
        .map(|(w, s)| w.sqrt().min(s.cbrt()));
    let delta = rademacher_discrepancy.map(|d| d.max(0.0));
    let me = influence.max_edge_ratio;
    let mp = influence.max_pair_ratio;
    BoundKernels {
        vertex_term,
        m4,
        wasserstein,
        smooth,
        kolmogorov_general,
        kolmogorov_triangle: smooth.filter(|_| triangle).map(f64::sqrt),
        triangle: delta
            .filter(|_| triangle)
            .map(|d| (me.sqrt() + d).powf(0.2)),
        triangle_squared: delta.filter(|_| triangle).map(|d| (me * me + d).powf(0.2)),
        general: delta.map(|d| (mp * mp + d).powf(0.05)),
        fourth_discrepancy: rademacher_discrepancy,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    CltSupported,
    CltPrecluded,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// Triangles: an influential edge with boundedly many influential vertices.
    InfluentialEdgeBoundedVertices,
    /// One pair lies in a constant fraction of all copies.
    StronglyInfluentialPair,
    /// No influential pair and fourth moment close to 3.
    NoInfluentialPairFourthMoment,
    /// Influential pair for a non-triangle pattern; non-normality is conjectured only.
    InfluentialPairConjectural,
    /// Triangles with an influential edge but too many influential vertices.
    InfluentialEdgeUnboundedVertices,
    /// No influential pair, but the fourth moment is not close to 3.
    FourthMomentAway,
}

#[derive(Debug, Clone, Serialize)]
pub struct Evidence {
    pub max_pair_ratio: f64,
    pub max_edge_ratio: f64,
    pub max_vertex_ratio: f64,
    pub fourth_discrepancy: Option<f64>,
    pub lambda1: Option<f64>,
    pub strong_share: f64,
    pub influential_vertices: usize,
    pub influential_pairs: usize,
    pub influential_edges: usize,
    pub strong_pairs: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub classification: Classification,
    pub rule: Rule,
    /// Other rules whose conditions also hold.
    pub supporting: Vec<Rule>,
    pub notes: Vec<String>,
    pub evidence: Evidence,
    pub thresholds: Thresholds,
}

impl Verdict {
    pub fn flags(&self, rule: Rule) -> bool {
        self.rule == rule || self.supporting.contains(&rule)
    }
}

pub fn decide(triangle: bool, evidence: Evidence, thresholds: Thresholds) -> Verdict {
    use Classification::*;
    let e = &evidence;
    let triangle_edge =
        triangle && e.influential_edges > 0 && e.influential_vertices <= thresholds.vertex_bound;
    let strong = e.strong_pairs > 0;
    let moment_ok = e
        .fourth_discrepancy
        .is_some_and(|d| d.abs() <= thresholds.moment_tol);
    let no_pair = e.influential_pairs == 0;

    let mut candidates = Vec::new();
    if triangle_edge {
        candidates.push((CltPrecluded, Rule::InfluentialEdgeBoundedVertices));
    }
    if strong {
        candidates.push((CltPrecluded, Rule::StronglyInfluentialPair));
    }
    if no_pair && moment_ok {
        candidates.push((CltSupported, Rule::NoInfluentialPairFourthMoment));
    }
    if !no_pair && !triangle {
        candidates.push((Inconclusive, Rule::InfluentialPairConjectural));
    }
    if triangle && e.influential_edges > 0 && !triangle_edge {
        candidates.push((Inconclusive, Rule::InfluentialEdgeUnboundedVertices));
    }
    if no_pair && !moment_ok {
        candidates.push((Inconclusive, Rule::FourthMomentAway));
    }
    let (classification, rule) = candidates[0];
    let supporting = candidates[1..]
        .iter()
        .filter(|c| c.0 == CltPrecluded || c.1 == Rule::InfluentialPairConjectural)
        .map(|c| c.1)
        .collect();

    let mut notes = Vec::new();
    if classification == CltSupported && e.influential_vertices > 0 {
        notes.push(if e.influential_vertices == 1 {
            "single influential vertex: conditioning on its color leaves the limit unchanged"
                .to_string()
        } else {
            format!(
                "{} influential vertices but no influential pair",
                e.influential_vertices
            )
        });
    }
    if rule == Rule::InfluentialEdgeBoundedVertices {
        notes.push(format!(
            "influential-vertex count {} is compared with the configured bound {}; the characterization is asymptotic",
            e.influential_vertices, thresholds.vertex_bound
        ));
    }
    if rule == Rule::InfluentialPairConjectural {
        notes.push(
            "an influential pair is conjectured, not proven, to preclude normality for this pattern"
                .to_string(),
        );
    }
    if e.fourth_discrepancy.is_none() {
        notes.push("fourth moment unavailable".to_string());
    }
    Verdict {
        classification,
        rule,
        supporting,
        notes,
        evidence,
        thresholds,
    }
}

fn influential(
    g: &Graph,
    idx: &InfluenceIndex,
    sigma: f64,
    th: &Thresholds,
) -> Result<(InfluentialSets, usize)> {
    let sets = influential_sets(g, idx, sigma, idx.copies_count(), th.eps_pair)?;
    let vertices = if th.eps_vertex == th.eps_pair {
        sets.vertices.len()
    } else {
        influential_sets(g, idx, sigma, idx.copies_count(), th.eps_vertex)?
            .vertices
            .len()
    };
    Ok((sets, vertices))
}

fn evidence(
    summary: &InfluenceSummary,
    sets: &InfluentialSets,
    vertices: usize,
    strong_pairs: usize,
    fourth: Option<f64>,
    lambda1: Option<f64>,
) -> Evidence {
    Evidence {
        max_pair_ratio: summary.max_pair_ratio,
        max_edge_ratio: summary.max_edge_ratio,
        max_vertex_ratio: summary.max_vertex_ratio,
        fourth_discrepancy: fourth,
        lambda1,
        strong_share: summary.max_pair_share,
        influential_vertices: vertices,
        influential_pairs: sets.pairs.len(),
        influential_edges: sets.edges.len(),
        strong_pairs,
    }
}

fn strong_count(idx: &InfluenceIndex, eps: f64) -> usize {
    let n = idx.copies_count() as f64;
    idx.entries_of_size_unsorted(2)
        .filter(|(_, &d)| d as f64 >= eps * n)
        .count()
}

fn sigma_of(idx: &InfluenceIndex) -> Result<(Rational, Rational, f64)> {
    let form = build_form(idx)?;
    let var = variance(&form);
    if var == Rational::default() {
        return Err(Error::Degenerate("Var(T) = 0 (no copies or a forced value)".into()));
    }
    let sigma = to_f64(&var).sqrt();
    Ok((mean(&form), var, sigma))
}

pub fn verdict(g: &Graph, h: &Pattern, thresholds: Thresholds) -> Result<Verdict> {
    let (_, idx) = enumerate_copies(g, h)?;
    let (_, _, sigma) = sigma_of(&idx)?;
    let summary = influence_summary(g, &idx, sigma);
    let (sets, vertices) = influential(g, &idx, sigma, &thresholds)?;
    let fourth = fourth_moment(g, h, &idx, MomentKernel::Rademacher)
        .ok()
        .map(|f| f.discrepancy_float);
    let lambda1 = if idx.is_triangle() {
        TriangleForm::from_index(&idx)
            .and_then(|f| spectrum_of(&f))
            .ok()
            .and_then(|s| s.top())
    } else {
        None
    };
    let strong = strong_count(&idx, thresholds.eps_strong);
    Ok(decide(
        idx.is_triangle(),
        evidence(&summary, &sets, vertices, strong, fourth, lambda1),
        thresholds,
    ))
}

#[derive(Debug, Clone, Copy)]
pub struct ReportOptions {
    pub thresholds: Thresholds,
    /// Eigenvalues listed in the report (all are used for derived values).
    pub eigenvalues_listed: usize,
    /// Skip the sixth-moment itemization above this many host edges.
    pub sixth_edge_cap: usize,
    /// Omit timings so identical inputs give identical output.
    pub deterministic: bool,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            thresholds: Thresholds::default(),
            eigenvalues_listed: 32,
            sixth_edge_cap: 200_000,
            deterministic: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumSummary {
    pub method: crate::spectral::SpectrumMethod,
    pub complete: bool,
    pub computed: usize,
    pub eigenvalues: Vec<f64>,
    pub lambda1: Option<f64>,
    pub two_sum_squares: f64,
    pub two_sum_squares_computed: f64,
    pub gaussian_fourth: Option<f64>,
}

impl SpectrumSummary {
    fn new(s: Spectrum, listed: usize) -> Self {
        SpectrumSummary {
            method: s.method,
            complete: s.complete,
            computed: s.eigenvalues.len(),
            lambda1: s.top(),
            eigenvalues: s.eigenvalues.iter().take(listed).copied().collect(),
            two_sum_squares: s.two_sum_squares,
            two_sum_squares_computed: s.two_sum_squares_computed,
            gaussian_fourth: s.gaussian_fourth,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphSummary {
    pub vertices: usize,
    pub edges: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsReport {
    pub schema: &'static str,
    pub graph: GraphSummary,
    pub pattern: String,
    pub copies: u64,
    pub status: &'static str,
    #[serde(serialize_with = "crate::rational::serialize_opt")]
    pub mean: Option<Rational>,
    #[serde(serialize_with = "crate::rational::serialize_opt")]
    pub variance: Option<Rational>,
    pub influence: Section<InfluenceSummary>,
    pub influential: Section<InfluentialSets>,
    pub moments: Section<FourthMoment>,
    pub gaussian_moments: Section<FourthMoment>,
    pub sixth_moment: Section<SixthMomentTerms>,
    pub spectrum: Section<SpectrumSummary>,
    pub mixture: Section<MixtureLimit>,
    pub kernels: Section<BoundKernels>,
    pub verdict: Section<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<&'static str, f64>>,
}

struct Clock {
    on: bool,
    t: Instant,
    out: BTreeMap<&'static str, f64>,
}

impl Clock {
    fn lap(&mut self, name: &'static str) {
        if self.on {
            let now = Instant::now();
            self.out
                .insert(name, now.duration_since(self.t).as_secs_f64() * 1e3);
            self.t = now;
        }
    }
}

/// Aggregates every diagnostic into one document. Component failures are
/// recorded as unavailable sections rather than aborting the report.
pub fn report(g: &Graph, h: &Pattern, options: ReportOptions) -> Result<DiagnosticsReport> {
    let th = options.thresholds;
    let mut clock = Clock {
        on: !options.deterministic,
        t: Instant::now(),
        out: BTreeMap::new(),
    };
    let (copies, idx) = enumerate_copies(g, h)?;
    clock.lap("enumerate");
    let mut rep = DiagnosticsReport {
        schema: SCHEMA,
        graph: GraphSummary {
            vertices: g.vertex_count(),
            edges: g.edge_count(),
        },
        pattern: h.name().to_string(),
        copies,
        status: "ok",
        mean: None,
        variance: None,
        influence: Section::missing("not computed"),
        influential: Section::missing("not computed"),
        moments: Section::missing("not computed"),
        gaussian_moments: Section::missing("not computed"),
        sixth_moment: Section::missing("triangle pattern only"),
        spectrum: Section::missing("triangle pattern only"),
        mixture: Section::missing("triangle pattern only"),
        kernels: Section::missing("not computed"),
        verdict: Section::missing("not computed"),
        timings_ms: None,
    };
    let (mu, var, sigma) = match sigma_of(&idx) {
        Ok(v) => v,
        Err(e @ Error::Degenerate(_)) => {
            rep.status = "degenerate";
            let reason = e.to_string();
            for s in [&mut rep.moments, &mut rep.gaussian_moments] {
                *s = Section::missing(reason.clone());
            }
            rep.influence = Section::missing(reason.clone());
            rep.influential = Section::missing(reason.clone());
            rep.kernels = Section::missing(reason.clone());
            rep.verdict = Section::missing(reason.clone());
            if idx.is_triangle() {
                rep.sixth_moment = Section::missing(reason.clone());
                rep.spectrum = Section::missing(reason.clone());
                rep.mixture = Section::missing(reason);
            }
            rep.timings_ms = clock.on.then_some(clock.out);
            return Ok(rep);
        }
        Err(e) => return Err(e),
    };
    rep.mean = Some(mu);
    rep.variance = Some(var);
    let summary = influence_summary(g, &idx, sigma);
    let (sets, vertex_count) = influential(g, &idx, sigma, &th)?;
    clock.lap("influence");

    let rad = fourth_moment(g, h, &idx, MomentKernel::Rademacher);
    let gau = fourth_moment(g, h, &idx, MomentKernel::Gaussian);
    clock.lap("moments");

    let mut lambda1 = None;
    if idx.is_triangle() {
        rep.sixth_moment = if g.edge_count() > options.sixth_edge_cap {
            Section::missing(format!(
                "host has more than {} edges",
                options.sixth_edge_cap
            ))
        } else {
            Section::from_result(triangle_sixth_asymptotic(&idx))
        };
        clock.lap("sixth_moment");
        match TriangleForm::from_index(&idx) {
            Ok(form) => {
                let spec = spectrum_of(&form);
                lambda1 = spec.as_ref().ok().and_then(|s| s.top());
                rep.spectrum = Section::from_result(
                    spec.map(|s| SpectrumSummary::new(s, options.eigenvalues_listed)),
                );
                clock.lap("spectrum");
                let mut cond: Vec<u32> =
                    sets.pairs.iter().flat_map(|p| [p.pair.0, p.pair.1]).collect();
                cond.sort_unstable();
                cond.dedup();
                rep.mixture = Section::from_result(mixture_limit(&form, &cond));
                clock.lap("mixture");
            }
            Err(e) => {
                rep.spectrum = Section::missing(e.to_string());
                rep.mixture = Section::missing(e.to_string());
            }
        }
    }

    let rd = rad.as_ref().ok().map(|f| f.discrepancy_float);
    let gd = gau.as_ref().ok().map(|f| f.discrepancy_float);
    rep.kernels = Section::Available(bound_kernels(&summary, idx.is_triangle(), rd, gd));
    let strong = strong_count(&idx, th.eps_strong);
    rep.verdict = Section::Available(decide(
        idx.is_triangle(),
        evidence(&summary, &sets, vertex_count, strong, rd, lambda1),
        th,
    ));
    rep.moments = Section::from_result(rad);
    rep.gaussian_moments = Section::from_result(gau);
    rep.influence = Section::Available(summary);
    rep.influential = Section::Available(sets);
    clock.lap("verdict");
    rep.timings_ms = clock.on.then_some(clock.out);
    Ok(rep)
}

fn tag(v: &impl Serialize) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

pub const CSV_HEADER: &str = "vertices,edges,pattern,copies,variance,max_pair_ratio,max_vertex_ratio,fourth_moment,lambda1,triangle_kernel,general_kernel,classification,rule";

impl DiagnosticsReport {
    /// One summary row matching [`CSV_HEADER`]; missing values are empty.
    pub fn csv_row(&self) -> String {
        let f = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        let inf = self.influence.get();
        let ker = self.kernels.get();
        let ver = self.verdict.get();
        [
            self.graph.vertices.to_string(),
            self.graph.edges.to_string(),
            self.pattern.clone(),
            self.copies.to_string(),
            self.variance
                .as_ref()
                .map(crate::rational::display)
                .unwrap_or_default(),
            f(inf.map(|i| i.max_pair_ratio)),
            f(inf.map(|i| i.max_vertex_ratio)),
            f(self.moments.get().map(|m| m.fourth_float)),
            f(self.spectrum.get().and_then(|s| s.lambda1)),
            f(ker.and_then(|k| k.triangle)),
            f(ker.and_then(|k| k.general)),
            ver.map(|v| tag(&v.classification)).unwrap_or_default(),
            ver.map(|v| tag(&v.rule)).unwrap_or_default(),
        ]
        .join(",")
    }
}
