//! Closed forms for the triangle pattern, where `T' = 4(T − E T) = Σ_e D_e x_u x_v`
//! is a quadratic form over the edges with positive influence.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::enumerate::{enumerate_copies, InfluenceIndex};
use crate::error::{Error, Result};
use crate::families::{ExbadLayout, FamilySpec, Rounding};
use crate::pattern::Pattern;
use crate::rational::{serialize_bigint, serialize_exact, serialize_opt, to_f64, Rational};

/// Edge-influence sums entering the fourth- and sixth-moment formulas.
#[derive(Debug, Clone, Serialize)]
pub struct TriangleEdgeStats {
    /// Edges with `D_e > 0`.
    pub edges: usize,
    #[serde(serialize_with = "serialize_bigint")]
    pub s2: BigInt,
    #[serde(serialize_with = "serialize_bigint")]
    pub s4: BigInt,
    #[serde(serialize_with = "serialize_bigint")]
    pub s6: BigInt,
    /// `Σ_{C4} Π D_e` over unordered 4-cycles.
    #[serde(serialize_with = "serialize_bigint")]
    pub c4: BigInt,
    #[serde(serialize_with = "serialize_bigint")]
    pub c4_count: BigInt,
    /// `Σ_{C4} (Π D_e)(Σ D_e²)`.
    #[serde(serialize_with = "serialize_bigint")]
    pub c4_weighted: BigInt,
    /// `Σ D_e² D_f²` over unordered pairs of edges sharing a vertex.
    #[serde(serialize_with = "serialize_bigint")]
    pub adjacent_pairs: BigInt,
}

/// Weighted adjacency of the edges with positive influence.
struct EdgeWeights {
    adj: Vec<Vec<(u32, u64)>>,
}

impl EdgeWeights {
    fn from_index(idx: &InfluenceIndex) -> Result<Self> {
        if !idx.is_triangle() {
            return Err(Error::InvalidPattern(
                "closed forms are only available for the triangle pattern".into(),
            ));
        }
        let mut adj = vec![Vec::new(); idx.vertex_count()];
        for (w, &d) in idx.entries_of_size_unsorted(2) {
            let (a, b) = (w.as_slice()[0], w.as_slice()[1]);
            if d > 0 {
                adj[a as usize].push((b, d));
                adj[b as usize].push((a, d));
            }
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        Ok(EdgeWeights { adj })
    }

    fn n(&self) -> usize {
        self.adj.len()
    }

    fn edges(&self) -> impl Iterator<Item = (u32, u32, u64)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, l)| {
            l.iter()
                .filter(move |&&(v, _)| v > u as u32)
                .map(move |&(v, d)| (u as u32, v, d))
        })
    }

    /// Relabels vertices by descending degree, so that cycle searches rooted at
    /// the smallest label start from the hubs and never pass through a hub twice
    /// in the same direction.
    fn by_degree(&self) -> EdgeWeights {
        let mut order: Vec<u32> = (0..self.n() as u32).collect();
        order.sort_by_key(|&v| (std::cmp::Reverse(self.adj[v as usize].len()), v));
        let mut rank = vec![0u32; self.n()];
        for (i, &v) in order.iter().enumerate() {
            rank[v as usize] = i as u32;
        }
        let adj = order
            .iter()
            .map(|&v| {
                let mut l: Vec<(u32, u64)> = self.adj[v as usize]
                    .iter()
                    .map(|&(x, d)| (rank[x as usize], d))
                    .collect();
                l.sort_unstable();
                l
            })
            .collect();
        EdgeWeights { adj }
    }
}

/// Unsigned accumulator that spills into a `BigInt` on overflow.
#[derive(Default)]
struct Acc {
    small: u128,
    big: BigInt,
}

impl Acc {
    fn add(&mut self, x: u128) {
        match self.small.checked_add(x) {
            Some(s) => self.small = s,
            None => {
                self.big += self.small;
                self.small = x;
            }
        }
    }

    fn add_big(&mut self, x: BigInt) {
        self.big += x;
    }

    fn merge(mut self, other: Acc) -> Acc {
        self.big += other.big;
        self.add(other.small);
        self
    }

    fn total(self) -> BigInt {
        self.big + self.small
    }
}

fn big(x: u128) -> BigInt {
    BigInt::from(x)
}

fn overflow() -> Error {
    Error::Capability("edge influences too large for exact cycle sums".into())
}

impl TriangleEdgeStats {
    pub fn from_index(idx: &InfluenceIndex) -> Result<Self> {
        let w = EdgeWeights::from_index(idx)?;
        Self::compute(&w)
    }

    fn compute(w: &EdgeWeights) -> Result<Self> {
        let (mut s2, mut s4, mut s6) = (Acc::default(), Acc::default(), Acc::default());
        let mut edges = 0;
        for (_, _, d) in w.edges() {
            let d = d as u128;
            edges += 1;
            let d2 = d * d;
            s2.add(d2);
            s4.add(d2.checked_mul(d2).ok_or_else(overflow)?);
            s6.add(d2.checked_mul(d2).and_then(|x| x.checked_mul(d2)).ok_or_else(overflow)?);
        }
        let mut adjacent = BigInt::zero();
        for l in &w.adj {
            let mut sq = Acc::default();
            let mut fourth = Acc::default();
            for &(_, d) in l {
                let d2 = d as u128 * d as u128;
                sq.add(d2);
                fourth.add(d2 * d2);
            }
            let sq = sq.total();
            adjacent += (&sq * &sq - fourth.total()) / 2;
        }
        let (c4, c4_count, c4_weighted) = four_cycles(w)?;
        Ok(TriangleEdgeStats {
            edges,
            s2: s2.total(),
            s4: s4.total(),
            s6: s6.total(),
            c4,
            c4_count,
            c4_weighted,
            adjacent_pairs: adjacent,
        })
    }

    /// `E[T'⁴] = 3 S2² − 2 S4 + 24 C4`.
    pub fn fourth_moment(&self) -> BigInt {
        BigInt::from(3) * &self.s2 * &self.s2 - BigInt::from(2) * &self.s4
            + BigInt::from(24) * &self.c4
    }

    /// Same expectation with Gaussian inputs: `3 S2² + 6 S4 + 12 P + 24 C4`.
    pub fn gaussian_fourth_moment(&self) -> BigInt {
        BigInt::from(3) * &self.s2 * &self.s2
            + BigInt::from(6) * &self.s4
            + BigInt::from(12) * &self.adjacent_pairs
            + BigInt::from(24) * &self.c4
    }
}

/// Weighted 4-cycle sums via wedges `u – a – w`: every pair of distinct
/// wedges with the same ends closes a 4-cycle, and each cycle is seen from
/// both of its diagonals.
fn four_cycles(w: &EdgeWeights) -> Result<(BigInt, BigInt, BigInt)> {
    let n = w.n();
    struct Scratch {
        x: Vec<u128>,
        q: Vec<u128>,
        xy: Vec<u128>,
        qy: Vec<u128>,
        cnt: Vec<u64>,
        touched: Vec<u32>,
    }
    let init = || Scratch {
        x: vec![0; n],
        q: vec![0; n],
        xy: vec![0; n],
        qy: vec![0; n],
        cnt: vec![0; n],
        touched: Vec::new(),
    };
    let part = (0..n as u32)
        .into_par_iter()
        .map_init(init, |sc, u| -> Result<(Acc, Acc, Acc)> {
            let (mut sum, mut count, mut weighted) = (Acc::default(), Acc::default(), Acc::default());
            for &(a, dua) in &w.adj[u as usize] {
                let dua = dua as u128;
                for &(v, dav) in &w.adj[a as usize] {
                    if v <= u {
                        continue;
                    }
                    let dav = dav as u128;
                    let x = dua * dav;
                    let y = dua * dua + dav * dav;
                    let vi = v as usize;
                    if sc.cnt[vi] == 0 {
                        sc.touched.push(v);
                    }
                    let x2 = x.checked_mul(x).ok_or_else(overflow)?;
                    sc.cnt[vi] += 1;
                    sc.x[vi] = sc.x[vi].checked_add(x).ok_or_else(overflow)?;
                    sc.q[vi] = sc.q[vi].checked_add(x2).ok_or_else(overflow)?;
                    let xy = x.checked_mul(y).ok_or_else(overflow)?;
                    sc.xy[vi] = sc.xy[vi].checked_add(xy).ok_or_else(overflow)?;
                    let qy = x2.checked_mul(y).ok_or_else(overflow)?;
                    sc.qy[vi] = sc.qy[vi].checked_add(qy).ok_or_else(overflow)?;
                }
            }
            for v in sc.touched.drain(..) {
                let vi = v as usize;
                let c = sc.cnt[vi] as u128;
                count.add(c * (c - 1) / 2);
                let (x, q, xy, qy) = (sc.x[vi], sc.q[vi], sc.xy[vi], sc.qy[vi]);
                match x.checked_mul(x) {
                    Some(xx) => sum.add((xx - q) / 2),
                    None => sum.add_big((big(x) * big(x) - big(q)) / 2),
                }
                match x.checked_mul(xy) {
                    Some(p) => weighted.add(p - qy),
                    None => weighted.add_big(big(x) * big(xy) - big(qy)),
                }
                sc.x[vi] = 0;
                sc.q[vi] = 0;
                sc.xy[vi] = 0;
                sc.qy[vi] = 0;
                sc.cnt[vi] = 0;
            }
            Ok((sum, count, weighted))
        })
        .try_reduce(
            || (Acc::default(), Acc::default(), Acc::default()),
            |a, b| Ok((a.0.merge(b.0), a.1.merge(b.1), a.2.merge(b.2))),
        )?;
    Ok((part.0.total() / 2, part.1.total() / 2, part.2.total() / 2))
}

/// `Σ_{C6} Π D_e` and the number of 6-cycles.
///
/// Each cycle is rooted at its smallest (degree-ranked) vertex `s`. Paths
/// `s p1 p2 p3 p4` are walked explicitly and closed through a precomputed
/// two-step sum `cw[p4] = Σ_y D_sy D_y,p4`, from which the terms with
/// `y ∈ {p1, p2, p3}` are removed. Both orientations are found, hence the
/// final halving.
fn six_cycles(w: &EdgeWeights) -> Result<(BigInt, BigInt)> {
    let w = w.by_degree();
    let n = w.n();
    struct Scratch {
        ws: Vec<u64>,
        cw: Vec<u128>,
        cc: Vec<u64>,
        n1: Vec<u64>,
        n2: Vec<u64>,
        touched: Vec<u32>,
    }
    let init = || Scratch {
        ws: vec![0; n],
        cw: vec![0; n],
        cc: vec![0; n],
        n1: vec![0; n],
        n2: vec![0; n],
        touched: Vec::new(),
    };
    let mul = |a: u128, b: u128| a.checked_mul(b).ok_or_else(overflow);
    let (sum, count) = (0..n as u32)
        .into_par_iter()
        .map_init(init, |sc, s| -> Result<(Acc, Acc)> {
            let mut sum = Acc::default();
            let mut count = Acc::default();
            let nbrs = |v: u32| w.adj[v as usize].iter().filter(move |&&(x, _)| x > s);
            for &(y, d) in nbrs(s) {
                sc.ws[y as usize] = d;
            }
            for &(y, dsy) in nbrs(s) {
                for &(x, dyx) in nbrs(y) {
                    let xi = x as usize;
                    if sc.cc[xi] == 0 {
                        sc.touched.push(x);
                    }
                    sc.cc[xi] += 1;
                    sc.cw[xi] = sc.cw[xi]
                        .checked_add(dsy as u128 * dyx as u128)
                        .ok_or_else(overflow)?;
                }
            }
            for &(p1, d1) in nbrs(s) {
                for &(x, d) in &w.adj[p1 as usize] {
                    sc.n1[x as usize] = d;
                }
                for &(p2, d2) in nbrs(p1) {
                    let p2_closes = sc.ws[p2 as usize] > 0;
                    if p2_closes {
                        for &(x, d) in &w.adj[p2 as usize] {
                            sc.n2[x as usize] = d;
                        }
                    }
                    let w12 = d1 as u128 * d2 as u128;
                    for &(p3, d3) in nbrs(p2) {
                        if p3 == p1 {
                            continue;
                        }
                        let w123 = mul(w12, d3 as u128)?;
                        let s3 = sc.ws[p3 as usize];
                        for &(p4, d4) in nbrs(p3) {
                            if p4 == p1 || p4 == p2 {
                                continue;
                            }
                            let p4i = p4 as usize;
                            let mut close = sc.cw[p4i];
                            let mut close_n = sc.cc[p4i];
                            if sc.n1[p4i] > 0 {
                                close -= d1 as u128 * sc.n1[p4i] as u128;
                                close_n -= 1;
                            }
                            if p2_closes && sc.n2[p4i] > 0 {
                                close -= sc.ws[p2 as usize] as u128 * sc.n2[p4i] as u128;
                                close_n -= 1;
                            }
                            if s3 > 0 {
                                close -= s3 as u128 * d4 as u128;
                                close_n -= 1;
                            }
                            if close_n > 0 {
                                sum.add(mul(mul(w123, d4 as u128)?, close)?);
                                count.add(close_n as u128);
                            }
                        }
                    }
                    if p2_closes {
                        for &(x, _) in &w.adj[p2 as usize] {
                            sc.n2[x as usize] = 0;
                        }
                    }
                }
                for &(x, _) in &w.adj[p1 as usize] {
                    sc.n1[x as usize] = 0;
                }
            }
            for &(y, _) in nbrs(s) {
                sc.ws[y as usize] = 0;
            }
            for x in sc.touched.drain(..) {
                sc.cw[x as usize] = 0;
                sc.cc[x as usize] = 0;
            }
            Ok((sum, count))
        })
        .try_reduce(
            || (Acc::default(), Acc::default()),
            |a, b| Ok((a.0.merge(b.0), a.1.merge(b.1))),
        )?;
    Ok((sum.total() / 2, count.total() / 2))
}

/// `Σ Π D` over unordered pairs of edge-disjoint triangles (12 vertices or a
/// bowtie), each triangle weighted by the product over its three edges.
fn triangle_pairs(idx: &InfluenceIndex) -> Result<BigInt> {
    let copies = idx.copies().ok_or_else(|| {
        Error::Capability("triangle list not cached; exact sixth moment unavailable".into())
    })?;
    let mut per_edge: std::collections::HashMap<(u32, u32), (BigInt, BigInt)> =
        std::collections::HashMap::new();
    let mut total = BigInt::zero();
    let mut total_sq = BigInt::zero();
    for t in copies {
        let v = t.as_slice();
        let pairs = [(v[0], v[1]), (v[0], v[2]), (v[1], v[2])];
        let pi: BigInt = pairs
            .iter()
            .map(|&(a, b)| BigInt::from(idx.pair_influence(a, b)))
            .product();
        let pi2 = &pi * &pi;
        total += &pi;
        total_sq += &pi2;
        for e in pairs {
            let slot = per_edge.entry(e).or_default();
            slot.0 += &pi;
            slot.1 += &pi2;
        }
    }
    let mut sharing = BigInt::zero();
    for (s, sq) in per_edge.into_values() {
        sharing += (&s * &s - sq) / 2;
    }
    Ok((&total * &total - total_sq) / 2 - sharing)
}

fn s2_rational(stats: &TriangleEdgeStats) -> Result<Rational> {
    if stats.s2.is_zero() {
        return Err(Error::Degenerate("no triangles: variance is zero".into()));
    }
    Ok(Rational::from_integer(stats.s2.clone()))
}

/// Exact `E[Z⁴]` for the triangle pattern.
pub fn triangle_fourth_closed_form(idx: &InfluenceIndex) -> Result<Rational> {
    let stats = TriangleEdgeStats::from_index(idx)?;
    let s2 = s2_rational(&stats)?;
    Ok(Rational::from_integer(stats.fourth_moment()) / (&s2 * &s2))
}

/// Exact `E[Z⁴]` when the colors are replaced by independent standard normals.
pub fn triangle_gaussian_fourth_closed_form(idx: &InfluenceIndex) -> Result<Rational> {
    let stats = TriangleEdgeStats::from_index(idx)?;
    let s2 = s2_rational(&stats)?;
    Ok(Rational::from_integer(stats.gaussian_fourth_moment()) / (&s2 * &s2))
}

/// The four-term sixth-moment estimate
/// `720 C6 − 240 Σ_{C4}(ΠD)(ΣD²) + 15 S2³ + 16 S6`, itemized, together with
/// the exact value where the triangle list is available.
#[derive(Debug, Clone, Serialize)]
pub struct SixthMomentTerms {
    /// Always `"asymptotic estimate"`; the omitted terms are not negligible on small graphs.
    pub label: &'static str,
    #[serde(serialize_with = "serialize_bigint")]
    pub six_cycle_term: BigInt,
    #[serde(serialize_with = "serialize_bigint")]
    pub four_cycle_term: BigInt,
    #[serde(serialize_with = "serialize_bigint")]
    pub square_sum_term: BigInt,
    #[serde(serialize_with = "serialize_bigint")]
    pub sixth_power_term: BigInt,
    #[serde(serialize_with = "serialize_bigint")]
    pub estimate: BigInt,
    #[serde(serialize_with = "serialize_bigint")]
    pub six_cycle_count: BigInt,
    #[serde(serialize_with = "serialize_bigint")]
    pub four_cycle_count: BigInt,
    /// `estimate / S2³`, the implied `E[Z⁶]`.
    #[serde(serialize_with = "serialize_exact")]
    pub normalized_estimate: Rational,
    /// Exact `E[T'⁶]`.
    #[serde(serialize_with = "serialize_opt")]
    pub exact: Option<Rational>,
    /// Exact `E[Z⁶]`.
    #[serde(serialize_with = "serialize_opt")]
    pub normalized_exact: Option<Rational>,
    /// `exact − estimate` (unnormalized).
    #[serde(serialize_with = "serialize_opt")]
    pub remainder: Option<Rational>,
}

struct SixthParts {
    stats: TriangleEdgeStats,
    c6: BigInt,
    c6_count: BigInt,
}

fn sixth_parts(idx: &InfluenceIndex) -> Result<SixthParts> {
    let w = EdgeWeights::from_index(idx)?;
    let stats = TriangleEdgeStats::compute(&w)?;
    let (c6, c6_count) = six_cycles(&w)?;
    Ok(SixthParts {
        stats,
        c6,
        c6_count,
    })
}

/// Exact `E[T'⁶]`: the six-edge even multigraphs are three doubled edges, a
/// 4-cycle with one extra doubled edge (or one tripled cycle edge), a 6-cycle,
/// or two edge-disjoint triangles.
fn sixth_exact_unnormalized(p: &SixthParts, tt: &BigInt) -> BigInt {
    let st = &p.stats;
    let b = |x: i64| BigInt::from(x);
    b(15) * &st.s2 * &st.s2 * &st.s2 - b(30) * &st.s2 * &st.s4 + b(16) * &st.s6
        + b(360) * &st.s2 * &st.c4
        - b(240) * &st.c4_weighted
        + b(720) * &p.c6
        + b(720) * tt
}

pub fn triangle_sixth_asymptotic(idx: &InfluenceIndex) -> Result<SixthMomentTerms> {
    let p = sixth_parts(idx)?;
    let s2 = s2_rational(&p.stats)?;
    let st = &p.stats;
    let six_cycle_term = BigInt::from(720) * &p.c6;
    let four_cycle_term = BigInt::from(-240) * &st.c4_weighted;
    let square_sum_term = BigInt::from(15) * &st.s2 * &st.s2 * &st.s2;
    let sixth_power_term = BigInt::from(16) * &st.s6;
    let estimate = &six_cycle_term + &four_cycle_term + &square_sum_term + &sixth_power_term;
    let s2_cubed = &s2 * &s2 * &s2;
    let exact = match triangle_pairs(idx) {
        Ok(tt) => Some(Rational::from_integer(sixth_exact_unnormalized(&p, &tt))),
        Err(e) if e.is_capability() => None,
        Err(e) => return Err(e),
    };
    Ok(SixthMomentTerms {
        label: "asymptotic estimate",
        normalized_estimate: Rational::from_integer(estimate.clone()) / &s2_cubed,
        normalized_exact: exact.as_ref().map(|e| e / &s2_cubed),
        remainder: exact
            .as_ref()
            .map(|e| e - Rational::from_integer(estimate.clone())),
        exact,
        six_cycle_term,
        four_cycle_term,
        square_sum_term,
        sixth_power_term,
        estimate,
        six_cycle_count: p.c6_count,
        four_cycle_count: p.stats.c4_count.clone(),
    })
}

/// Exact `E[Z⁶]` for the triangle pattern.
pub fn triangle_sixth_exact(idx: &InfluenceIndex) -> Result<Rational> {
    let p = sixth_parts(idx)?;
    let s2 = s2_rational(&p.stats)?;
    let tt = triangle_pairs(idx)?;
    Ok(Rational::from_integer(sixth_exact_unnormalized(&p, &tt)) / (&s2 * &s2 * &s2))
}

/// One `n` of the three-part family's moment table.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub hubs: usize,
    pub apexes: usize,
    pub vertices: usize,
    pub edges: usize,
    pub triangles: u64,
    /// `Σ D_e²` split over the three constituents (square, book, hub pairs).
    pub s2_by_part: [String; 3],
    #[serde(serialize_with = "serialize_exact")]
    pub fourth_exact: Rational,
    /// The specialized display `3S2² − 2(4n⁴ + (cn)⁴) + 24(n⁴ + C(bn², 2))`, over `S2²`.
    #[serde(serialize_with = "serialize_exact")]
    pub fourth_printed: Rational,
    #[serde(serialize_with = "serialize_exact")]
    pub fourth_gap: Rational,
    /// `−2 Σ_B D_e⁴` and `24 Σ_B C4`, the hub-pair terms that cancel each other.
    #[serde(serialize_with = "serialize_bigint")]
    pub hub_fourth_power_term: BigInt,
    #[serde(serialize_with = "serialize_bigint")]
    pub hub_four_cycle_term: BigInt,
    /// Share of `S2` carried by the hub-pair part.
    pub hub_variance_share: f64,
    pub sixth: SixthMomentTerms,
    /// `−960 n⁶ + 15 S2³ + 16(4n⁶ + (cn)⁶)`, over `S2³`.
    #[serde(serialize_with = "serialize_exact")]
    pub sixth_printed: Rational,
    pub target_fourth: f64,
    pub target_sixth: f64,
}

impl ConvergenceRow {
    pub fn fourth_float(&self) -> f64 {
        to_f64(&self.fourth_exact)
    }

    pub fn sixth_float(&self) -> Option<f64> {
        self.sixth.normalized_exact.as_ref().map(to_f64)
    }
}

/// Exact moments of `S_n ⊔ P_n ⊔ B_n` next to the specialized printed
/// expressions, for each `n` in `ns`.
pub fn exbad_convergence_table(
    ns: &[usize],
    b: f64,
    c: f64,
    rounding: Rounding,
) -> Result<Vec<ConvergenceRow>> {
    let h = Pattern::triangle();
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let spec = FamilySpec::ExbadFull { n, b, c, rounding };
        let g = spec.generate()?;
        let layout = ExbadLayout::new(n, b, c, rounding);
        let (triangles, idx) = enumerate_copies(&g, &h)?;
        let sixth = triangle_sixth_asymptotic(&idx)?;
        let stats = TriangleEdgeStats::from_index(&idx)?;
        let s2 = s2_rational(&stats)?;

        let mut parts = [BigInt::zero(), BigInt::zero(), BigInt::zero()];
        let mut hub_fourth = BigInt::zero();
        for (w, &d) in idx.entries_of_size_unsorted(2) {
            let u = w.as_slice()[0] as usize;
            let k = if layout.s_range.contains(&u) {
                0
            } else if layout.p_range.contains(&u) {
                1
            } else {
                2
            };
            let d = BigInt::from(d);
            let d2 = &d * &d;
            if k == 2 {
                hub_fourth += &d2 * &d2;
            }
            parts[k] += d2;
        }
        let pairs = BigInt::from(layout.hubs) * BigInt::from(layout.hubs.saturating_sub(1)) / 2;
        // Each hub pair spans exactly one 4-cycle y_i ℓ0 y_j r0 with unit influences.
        let hub_four_cycle_term = BigInt::from(24) * &pairs;
        let hub_fourth_power_term = BigInt::from(-2) * hub_fourth;

        let nn = BigInt::from(n);
        let p = BigInt::from(layout.apexes);
        let n4 = nn.pow(4);
        let n6 = nn.pow(6);
        let s2i = &stats.s2;
        let printed4 = BigInt::from(3) * s2i * s2i
            - BigInt::from(2) * (BigInt::from(4) * &n4 + p.pow(4))
            + BigInt::from(24) * (&n4 + &pairs);
        let printed6 = BigInt::from(-960) * &n6
            + BigInt::from(15) * s2i * s2i * s2i
            + BigInt::from(16) * (BigInt::from(4) * &n6 + p.pow(6));
        let fourth_exact = Rational::from_integer(stats.fourth_moment()) / (&s2 * &s2);
        let fourth_printed = Rational::from_integer(printed4) / (&s2 * &s2);
        let share = parts[2].to_f64().unwrap_or(f64::NAN) / s2i.to_f64().unwrap_or(f64::NAN);
        rows.push(ConvergenceRow {
            n,
            hubs: layout.hubs,
            apexes: layout.apexes,
            vertices: g.vertex_count(),
            edges: g.edge_count(),
            triangles,
            s2_by_part: parts.map(|x| x.to_string()),
            fourth_gap: &fourth_exact - &fourth_printed,
            fourth_exact,
            fourth_printed,
            hub_fourth_power_term,
            hub_four_cycle_term,
            hub_variance_share: share,
            sixth_printed: Rational::from_integer(printed6) / (&s2 * &s2 * &s2),
            sixth,
            target_fourth: 3.0,
            target_sixth: 15.0,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::*;
    use crate::moments::exact_moments_bruteforce;
    use crate::rational::{int, ratio};
    use crate::Graph;

    fn idx(g: &Graph) -> InfluenceIndex {
        enumerate_copies(g, &Pattern::triangle()).unwrap().1
    }

    /// Weighted cycle sums by brute force over vertex sequences.
    fn cycles_oracle(g: &Graph, ix: &InfluenceIndex, len: usize) -> (BigInt, u64) {
        let n = g.vertex_count() as u32;
        let d = |a: u32, b: u32| ix.pair_influence(a, b);
        let mut sum = BigInt::zero();
        let mut count = 0u64;
        let mut seq = vec![0u32; len];
        fn rec(
            depth: usize,
            seq: &mut Vec<u32>,
            n: u32,
            len: usize,
            d: &dyn Fn(u32, u32) -> u64,
            sum: &mut BigInt,
            count: &mut u64,
        ) {
            if depth == len {
                let w = d(seq[len - 1], seq[0]);
                if w == 0 {
                    return;
                }
                let mut p = BigInt::from(w);
                for i in 0..len - 1 {
                    p *= d(seq[i], seq[i + 1]);
                }
                *sum += p;
                *count += 1;
                return;
            }
            for v in 0..n {
                if seq[..depth].contains(&v) {
                    continue;
                }
                if depth > 0 && (v < seq[0] || d(seq[depth - 1], v) == 0) {
                    continue;
                }
                seq[depth] = v;
                rec(depth + 1, seq, n, len, d, sum, count);
            }
        }
        rec(0, &mut seq, n, len, &d, &mut sum, &mut count);
        // each cycle: fixed minimal start, two directions
        (sum / 2, count / 2)
    }

    #[test]
    fn spec_examples() {
        assert_eq!(triangle_fourth_closed_form(&idx(&complete(3))).unwrap(), ratio(7, 3));
        assert_eq!(triangle_fourth_closed_form(&idx(&complete(4))).unwrap(), ratio(14, 3));
        for n in 1..6 {
            let v = triangle_fourth_closed_form(&idx(&disjoint_triangles(n))).unwrap();
            assert_eq!(v, int(3) - ratio(2, 3 * n as i64));
        }
        let st = TriangleEdgeStats::from_index(&idx(&complete(4))).unwrap();
        assert_eq!(st.s2, BigInt::from(24));
        assert_eq!(st.s4, BigInt::from(96));
        assert_eq!(st.c4, BigInt::from(48));
        assert_eq!(st.c4_count, BigInt::from(3));
    }

    #[test]
    fn k3_gaussian_is_nine() {
        assert_eq!(
            triangle_gaussian_fourth_closed_form(&idx(&complete(3))).unwrap(),
            int(9)
        );
    }

    #[test]
    fn cycle_sums_match_oracle() {
        for g in [
            complete(5),
            complete(6),
            book(4),
            windmill(3),
            exbad_s(2),
            exbad_b(3),
            erdos_renyi(9, 0.6, 1),
            erdos_renyi(10, 0.5, 7),
        ] {
            let ix = idx(&g);
            let w = EdgeWeights::from_index(&ix).unwrap();
            let (c4, c4n, _) = four_cycles(&w).unwrap();
            let (o4, o4n) = cycles_oracle(&g, &ix, 4);
            assert_eq!((c4, c4n), (o4, BigInt::from(o4n)));
            let (c6, c6n) = six_cycles(&w).unwrap();
            let (o6, o6n) = cycles_oracle(&g, &ix, 6);
            assert_eq!((c6, c6n), (o6, BigInt::from(o6n)));
        }
    }

    #[test]
    fn book_four_cycle_count() {
        let t = triangle_sixth_asymptotic(&idx(&book(6))).unwrap();
        assert_eq!(t.four_cycle_count, BigInt::from(15));
        assert_eq!(t.label, "asymptotic estimate");
    }

    #[test]
    fn closed_forms_match_bruteforce() {
        for g in [
            complete(3),
            complete(4),
            complete(5),
            complete(6),
            book(5),
            windmill(4),
            disjoint_triangles(3),
            exbad_s(2),
            erdos_renyi(11, 0.5, 3),
            erdos_renyi(12, 0.6, 5),
        ] {
            let ix = idx(&g);
            let bf = exact_moments_bruteforce(&g, &Pattern::triangle(), 6).unwrap();
            assert_eq!(
                &triangle_fourth_closed_form(&ix).unwrap(),
                bf.normalized_exact(4).unwrap()
            );
            assert_eq!(
                &triangle_sixth_exact(&ix).unwrap(),
                bf.normalized_exact(6).unwrap()
            );
        }
    }

    #[test]
    fn sixth_terms_on_k3() {
        let t = triangle_sixth_asymptotic(&idx(&complete(3))).unwrap();
        assert_eq!(t.estimate, BigInt::from(15 * 27 + 16 * 3));
        assert_eq!(t.exact, Some(int(183)));
        assert_eq!(t.remainder, Some(int(183 - 453)));
    }

    #[test]
    fn disjoint_triangle_estimate_tends_to_fifteen() {
        let t = triangle_sixth_asymptotic(&idx(&disjoint_triangles(200))).unwrap();
        assert!((to_f64(&t.normalized_estimate) - 15.0).abs() < 0.01);
    }

    #[test]
    fn wrong_pattern_rejected() {
        let ix = enumerate_copies(&complete(4), &Pattern::parse("path:3").unwrap())
            .unwrap()
            .1;
        assert!(triangle_fourth_closed_form(&ix).is_err());
        assert!(matches!(
            triangle_fourth_closed_form(&idx(&path(4))),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn exbad_small_table() {
        let rows = exbad_convergence_table(&[4], 3.0 / 16.0, 2.0, Rounding::Floor).unwrap();
        let r = &rows[0];
        assert_eq!(r.triangles, 36);
        assert_eq!((r.hubs, r.apexes), (3, 8));
        // hub-pair terms cancel: 12 unit edges and one unit 4-cycle per pair
        assert_eq!(&r.hub_fourth_power_term + &r.hub_four_cycle_term, BigInt::zero());
        let g = FamilySpec::ExbadFull {
            n: 4,
            b: 3.0 / 16.0,
            c: 2.0,
            rounding: Rounding::Floor,
        }
        .generate()
        .unwrap();
        let ix = idx(&g);
        assert_eq!(r.fourth_exact, triangle_fourth_closed_form(&ix).unwrap());
    }
}
