//! Backtracking enumeration of (non-induced) copies of a pattern and the
//! influence index `D_w(H, G)` over vertex subsets of those copies.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::pattern::{Pattern, MAX_PATTERN_VERTICES};

/// Sorted set of at most eight host vertices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexTuple {
    len: u8,
    v: [u32; MAX_PATTERN_VERTICES],
}

impl VertexTuple {
    /// Builds from any slice; the result is sorted.
    pub fn new(vertices: &[u32]) -> Self {
        assert!(vertices.len() <= MAX_PATTERN_VERTICES);
        let mut v = [0u32; MAX_PATTERN_VERTICES];
        v[..vertices.len()].copy_from_slice(vertices);
        v[..vertices.len()].sort_unstable();
        VertexTuple {
            len: vertices.len() as u8,
            v,
        }
    }

    pub(crate) fn from_sorted(vertices: &[u32]) -> Self {
        let mut v = [0u32; MAX_PATTERN_VERTICES];
        v[..vertices.len()].copy_from_slice(vertices);
        VertexTuple {
            len: vertices.len() as u8,
            v,
        }
    }

    pub fn pair(a: u32, b: u32) -> Self {
        VertexTuple::new(&[a, b])
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.v[..self.len as usize]
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, x: u32) -> bool {
        self.as_slice().binary_search(&x).is_ok()
    }

    /// Sub-tuple picked by the bits of `mask`.
    pub fn select(&self, mask: u32) -> VertexTuple {
        let mut out = [0u32; MAX_PATTERN_VERTICES];
        let mut n = 0;
        for (i, &x) in self.as_slice().iter().enumerate() {
            if mask >> i & 1 == 1 {
                out[n] = x;
                n += 1;
            }
        }
        VertexTuple { len: n as u8, v: out }
    }
}

impl fmt::Debug for VertexTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.as_slice()).finish()
    }
}

impl Serialize for VertexTuple {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.as_slice().serialize(s)
    }
}

/// Which subset sizes the influence index stores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Coverage {
    /// Every size `1..=r`.
    Full,
    /// Sizes 1 and every even size (memory fallback).
    VerticesAndEven,
    /// Sizes 1 and 2 only.
    VerticesAndPairs,
}

impl Coverage {
    fn stores(self, m: usize) -> bool {
        match self {
            Coverage::Full => true,
            Coverage::VerticesAndEven => m == 1 || m.is_multiple_of(2),
            Coverage::VerticesAndPairs => m <= 2,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EnumerationLimits {
    /// Largest copy count for which the copy list is retained.
    pub copy_cache_cap: u64,
    /// Largest number of stored subset entries (estimated as copies × subsets per copy).
    pub subset_entry_cap: u64,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        EnumerationLimits {
            copy_cache_cap: 10_000_000,
            subset_entry_cap: 60_000_000,
        }
    }
}

/// Exact influences `D_w(H, G)` keyed by sorted vertex tuples.
#[derive(Debug, Clone)]
pub struct InfluenceIndex {
    r: usize,
    triangle: bool,
    vertex_count: usize,
    copies_count: u64,
    labeled_embeddings: u128,
    coverage: Coverage,
    vertex: Vec<u64>,
    by_size: Vec<HashMap<VertexTuple, u64>>,
    copies: Option<Vec<VertexTuple>>,
}

impl InfluenceIndex {
    pub fn pattern_order(&self) -> usize {
        self.r
    }

    /// Whether the pattern was the triangle K3.
    pub fn is_triangle(&self) -> bool {
        self.triangle
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// N(H, G): number of unlabeled copies.
    pub fn copies_count(&self) -> u64 {
        self.copies_count
    }

    pub fn labeled_embeddings(&self) -> u128 {
        self.labeled_embeddings
    }

    pub fn coverage(&self) -> Coverage {
        self.coverage
    }

    /// Vertex sets of the copies (a multiset), when under the cache cap.
    pub fn copies(&self) -> Option<&[VertexTuple]> {
        self.copies.as_deref()
    }

    pub fn stores_size(&self, m: usize) -> bool {
        m >= 1 && m <= self.r && self.coverage.stores(m)
    }

    pub fn vertex_influence(&self, v: u32) -> u64 {
        self.vertex.get(v as usize).copied().unwrap_or(0)
    }

    pub fn vertex_influences(&self) -> &[u64] {
        &self.vertex
    }

    pub fn pair_influence(&self, a: u32, b: u32) -> u64 {
        if a == b {
            return self.vertex_influence(a);
        }
        self.get(&VertexTuple::pair(a, b))
    }

    /// D_w for a sorted tuple; zero when absent.
    pub fn get(&self, w: &VertexTuple) -> u64 {
        match w.len() {
            0 => self.copies_count,
            1 => self.vertex_influence(w.as_slice()[0]),
            m if m <= self.r => self.by_size[m].get(w).copied().unwrap_or(0),
            _ => 0,
        }
    }

    /// Nonzero entries of size `m` (m ≥ 2), in sorted key order.
    pub fn entries_of_size(&self, m: usize) -> Vec<(VertexTuple, u64)> {
        if m < 2 || m > self.r {
            return Vec::new();
        }
        let mut v: Vec<_> = self.by_size[m].iter().map(|(k, &d)| (*k, d)).collect();
        v.sort_unstable();
        v
    }

    pub fn entries_of_size_unsorted(&self, m: usize) -> impl Iterator<Item = (&VertexTuple, &u64)> {
        self.by_size.get(m).into_iter().flat_map(|h| h.iter())
    }

    pub fn size_count(&self, m: usize) -> usize {
        self.by_size.get(m).map_or(0, |h| h.len())
    }

    /// Sum of D_w over stored tuples of size `m`.
    pub fn size_sum(&self, m: usize) -> u128 {
        if m == 1 {
            return self.vertex.iter().map(|&d| d as u128).sum();
        }
        self.by_size
            .get(m)
            .map_or(0, |h| h.values().map(|&d| d as u128).sum())
    }

    /// Checks `Σ_{|w|=m} D_w = C(r, m)·N` for every stored size.
    pub fn check_size_sums(&self) -> bool {
        (1..=self.r).filter(|&m| self.stores_size(m)).all(|m| {
            self.size_sum(m) == binomial(self.r as u64, m as u64) as u128 * self.copies_count as u128
        })
    }
}

pub(crate) fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Matching plan: pattern vertices in search order, each with an anchor
/// (an earlier neighbor) and the full list of earlier neighbors.
#[derive(Debug, Clone)]
pub(crate) struct SearchPlan {
    order: Vec<usize>,
    anchor: Vec<usize>,
    back: Vec<Vec<usize>>,
    degree: Vec<usize>,
    r: usize,
}

impl SearchPlan {
    pub(crate) fn new(h: &Graph) -> Self {
        let r = h.vertex_count();
        let degree: Vec<usize> = (0..r as u32).map(|v| h.degree(v)).collect();
        let mut order = Vec::with_capacity(r);
        let mut placed = vec![false; r];
        let first = (0..r).max_by_key(|&v| (degree[v], std::cmp::Reverse(v))).unwrap();
        order.push(first);
        placed[first] = true;
        while order.len() < r {
            let next = (0..r)
                .filter(|&v| !placed[v])
                .filter(|&v| h.neighbors(v as u32).iter().any(|&u| placed[u as usize]))
                .max_by_key(|&v| {
                    let links = h
                        .neighbors(v as u32)
                        .iter()
                        .filter(|&&u| placed[u as usize])
                        .count();
                    (links, degree[v], std::cmp::Reverse(v))
                })
                .expect("pattern is connected");
            order.push(next);
            placed[next] = true;
        }
        let pos: Vec<usize> = {
            let mut p = vec![0; r];
            for (i, &v) in order.iter().enumerate() {
                p[v] = i;
            }
            p
        };
        let mut anchor = vec![0; r];
        let mut back = vec![Vec::new(); r];
        for (i, &v) in order.iter().enumerate().skip(1) {
            let mut earlier: Vec<usize> = h
                .neighbors(v as u32)
                .iter()
                .map(|&u| u as usize)
                .filter(|&u| pos[u] < i)
                .collect();
            earlier.sort_by_key(|&u| pos[u]);
            anchor[i] = earlier[0];
            back[i] = earlier;
        }
        SearchPlan {
            order,
            anchor,
            back,
            degree,
            r,
        }
    }

    /// Calls `visit` with every labeled embedding (indexed by pattern
    /// vertex) whose first-ordered vertex maps to `start` and whose image
    /// lies inside `allow`.
    pub(crate) fn embeddings_from<A, F>(&self, g: &Graph, start: u32, allow: &A, visit: &mut F)
    where
        A: Fn(u32) -> bool,
        F: FnMut(&[u32]),
    {
        if !allow(start) || g.degree(start) < self.degree[self.order[0]] {
            return;
        }
        let mut phi = [u32::MAX; MAX_PATTERN_VERTICES];
        phi[self.order[0]] = start;
        self.extend(g, 1, &mut phi, allow, visit);
    }

    fn extend<A, F>(
        &self,
        g: &Graph,
        depth: usize,
        phi: &mut [u32; MAX_PATTERN_VERTICES],
        allow: &A,
        visit: &mut F,
    ) where
        A: Fn(u32) -> bool,
        F: FnMut(&[u32]),
    {
        if depth == self.r {
            visit(&phi[..self.r]);
            return;
        }
        let pv = self.order[depth];
        let host_anchor = phi[self.anchor[depth]];
        'cand: for &c in g.neighbors(host_anchor) {
            if g.degree(c) < self.degree[pv] || !allow(c) {
                continue;
            }
            for &u in &self.order[..depth] {
                if phi[u] == c {
                    continue 'cand;
                }
            }
            for &b in &self.back[depth][1..] {
                if !g.has_edge(phi[b], c) {
                    continue 'cand;
                }
            }
            phi[pv] = c;
            self.extend(g, depth + 1, phi, allow, visit);
            phi[pv] = u32::MAX;
        }
    }
}

/// True when `phi` is the lexicographically smallest embedding in its
/// automorphism orbit, so each unlabeled copy is visited once.
fn is_canonical(phi: &[u32], auts: &[Vec<u8>]) -> bool {
    'aut: for a in auts {
        for (i, &x) in phi.iter().enumerate() {
            let y = phi[a[i] as usize];
            if y < x {
                return false;
            }
            if y > x {
                continue 'aut;
            }
        }
    }
    true
}

/// Counts labeled embeddings of `h` inside the vertex subset `allow`.
pub(crate) fn count_labeled<A>(g: &Graph, plan: &SearchPlan, allow: &A) -> u128
where
    A: Fn(u32) -> bool + Sync,
{
    let mut total = 0u128;
    for s in 0..g.vertex_count() as u32 {
        plan.embeddings_from(g, s, allow, &mut |_| total += 1);
    }
    total
}

/// Unlabeled copies of `h` in `g` (vertex sets, with multiplicity), in
/// deterministic order. Parallel over the first embedded vertex.
pub fn copy_vertex_sets(g: &Graph, h: &Pattern) -> Vec<VertexTuple> {
    let plan = SearchPlan::new(h.graph());
    let auts = h.automorphisms();
    let allow = |_: u32| true;
    (0..g.vertex_count() as u32)
        .into_par_iter()
        .flat_map_iter(|s| {
            let mut out = Vec::new();
            plan.embeddings_from(g, s, &allow, &mut |phi| {
                if is_canonical(phi, auts) {
                    out.push(VertexTuple::new(phi));
                }
            });
            out
        })
        .collect()
}

/// Enumerates copies and builds the influence index.
pub fn enumerate_copies(g: &Graph, h: &Pattern) -> Result<(u64, InfluenceIndex)> {
    enumerate_copies_with(g, h, EnumerationLimits::default())
}

pub fn enumerate_copies_with(
    g: &Graph,
    h: &Pattern,
    limits: EnumerationLimits,
) -> Result<(u64, InfluenceIndex)> {
    let r = h.order();
    let plan = SearchPlan::new(h.graph());
    let auts = h.automorphisms();
    let aut = h.automorphism_count() as u128;
    let allow = |_: u32| true;

    let labeled: u128 = (0..g.vertex_count() as u32)
        .into_par_iter()
        .map(|s| {
            let mut c = 0u128;
            plan.embeddings_from(g, s, &allow, &mut |_| c += 1);
            c
        })
        .sum();
    if !labeled.is_multiple_of(aut) {
        return Err(Error::InvalidArgument(
            "labeled embedding count not divisible by |Aut(H)|".into(),
        ));
    }
    let copies_count: u64 = (labeled / aut)
        .try_into()
        .map_err(|_| Error::Capability("copy count exceeds 64 bits".into()))?;

    let full_entries = copies_count as u128 * ((1u128 << r) - 1);
    let even_entries = copies_count as u128 * (1u128 << (r - 1));
    let coverage = if full_entries <= limits.subset_entry_cap as u128 {
        Coverage::Full
    } else if even_entries <= limits.subset_entry_cap as u128 {
        Coverage::VerticesAndEven
    } else {
        Coverage::VerticesAndPairs
    };
    let masks: Vec<(u32, usize)> = (1u32..(1 << r))
        .map(|m| (m, m.count_ones() as usize))
        .filter(|&(_, size)| size >= 2 && coverage.stores(size))
        .collect();

    type Partial = (Vec<u64>, Vec<HashMap<VertexTuple, u64>>);
    let empty = || -> Partial { (vec![0u64; g.vertex_count()], vec![HashMap::new(); r + 1]) };
    let (vertex, by_size) = (0..g.vertex_count() as u32)
        .into_par_iter()
        .fold(empty, |mut acc, s| {
            plan.embeddings_from(g, s, &allow, &mut |phi| {
                if !is_canonical(phi, auts) {
                    return;
                }
                let copy = VertexTuple::new(phi);
                for &v in copy.as_slice() {
                    acc.0[v as usize] += 1;
                }
                for &(m, size) in &masks {
                    *acc.1[size].entry(copy.select(m)).or_insert(0) += 1;
                }
            });
            acc
        })
        .reduce(empty, |mut a, b| {
            for (x, y) in a.0.iter_mut().zip(b.0) {
                *x += y;
            }
            for (ha, hb) in a.1.iter_mut().zip(b.1) {
                if ha.len() < hb.len() {
                    let small = std::mem::replace(ha, hb);
                    for (k, d) in small {
                        *ha.entry(k).or_insert(0) += d;
                    }
                } else {
                    for (k, d) in hb {
                        *ha.entry(k).or_insert(0) += d;
                    }
                }
            }
            a
        });

    let copies = if copies_count <= limits.copy_cache_cap {
        let mut list = copy_vertex_sets(g, h);
        list.sort_unstable();
        Some(list)
    } else {
        None
    };

    let idx = InfluenceIndex {
        r,
        triangle: h.is_triangle(),
        vertex_count: g.vertex_count(),
        copies_count,
        labeled_embeddings: labeled,
        coverage,
        vertex,
        by_size,
        copies,
    };
    Ok((copies_count, idx))
}

#[derive(Debug, Clone, Serialize)]
pub struct InfluentialVertex {
    pub vertex: u32,
    pub influence: u64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InfluentialPair {
    pub pair: (u32, u32),
    pub influence: u64,
    /// D_w / σ.
    pub ratio: f64,
    /// D_w / N.
    pub share: f64,
    pub is_edge: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct InfluentialSets {
    pub epsilon: f64,
    pub vertices: Vec<InfluentialVertex>,
    pub pairs: Vec<InfluentialPair>,
    pub edges: Vec<InfluentialPair>,
    pub strong_pairs: Vec<InfluentialPair>,
}

/// ε-influential vertices, pairs, edges (D ≥ εσ) and ε-strongly
/// influential pairs (D ≥ εN). Lists are sorted by decreasing influence.
pub fn influential_sets(
    g: &Graph,
    idx: &InfluenceIndex,
    sigma: f64,
    copies: u64,
    eps: f64,
) -> Result<InfluentialSets> {
    if sigma <= 0.0 || !sigma.is_finite() {
        return Err(Error::Degenerate("variance is zero; influences are undefined".into()));
    }
    let mut vertices: Vec<InfluentialVertex> = idx
        .vertex_influences()
        .iter()
        .enumerate()
        .filter(|(_, &d)| d as f64 >= eps * sigma)
        .map(|(v, &d)| InfluentialVertex {
            vertex: v as u32,
            influence: d,
            ratio: d as f64 / sigma,
        })
        .collect();
    vertices.sort_by(|a, b| b.influence.cmp(&a.influence).then(a.vertex.cmp(&b.vertex)));

    let make = |w: &VertexTuple, d: u64| {
        let (a, b) = (w.as_slice()[0], w.as_slice()[1]);
        InfluentialPair {
            pair: (a, b),
            influence: d,
            ratio: d as f64 / sigma,
            share: if copies == 0 { 0.0 } else { d as f64 / copies as f64 },
            is_edge: g.has_edge(a, b),
        }
    };
    let mut pairs = Vec::new();
    let mut strong_pairs = Vec::new();
    for (w, &d) in idx.entries_of_size_unsorted(2) {
        if d as f64 >= eps * sigma {
            pairs.push(make(w, d));
        }
        if d as f64 >= eps * copies as f64 {
            strong_pairs.push(make(w, d));
        }
    }
    let order = |a: &InfluentialPair, b: &InfluentialPair| {
        b.influence.cmp(&a.influence).then(a.pair.cmp(&b.pair))
    };
    pairs.sort_by(order);
    strong_pairs.sort_by(order);
    let edges = pairs.iter().filter(|p| p.is_edge).cloned().collect();
    Ok(InfluentialSets {
        epsilon: eps,
        vertices,
        pairs,
        edges,
        strong_pairs,
    })
}

/// Largest pair influence and its tuple.
pub fn max_pair_influence(idx: &InfluenceIndex) -> Option<(VertexTuple, u64)> {
    idx.entries_of_size_unsorted(2)
        .map(|(w, &d)| (*w, d))
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
}

/// Largest D_w over edges of `g` only.
pub fn max_edge_influence(g: &Graph, idx: &InfluenceIndex) -> u64 {
    idx.entries_of_size_unsorted(2)
        .filter(|(w, _)| g.has_edge(w.as_slice()[0], w.as_slice()[1]))
        .map(|(_, &d)| d)
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::*;

    /// Brute force over all injective maps; returns (N, vertex influences).
    fn oracle(g: &Graph, h: &Pattern) -> (u64, Vec<u64>, HashMap<VertexTuple, u64>) {
        let n = g.vertex_count() as u32;
        let r = h.order();
        let mut labeled = 0u64;
        let mut dv = vec![0u64; n as usize];
        let mut dp: HashMap<VertexTuple, u64> = HashMap::new();
        let mut phi = vec![0u32; r];
        fn rec(
            i: usize,
            n: u32,
            phi: &mut Vec<u32>,
            g: &Graph,
            h: &Graph,
            f: &mut dyn FnMut(&[u32]),
        ) {
            if i == phi.len() {
                if h
                    .edges()
                    .iter()
                    .all(|&(a, b)| g.has_edge(phi[a as usize], phi[b as usize]))
                {
                    f(phi);
                }
                return;
            }
            for c in 0..n {
                if phi[..i].contains(&c) {
                    continue;
                }
                phi[i] = c;
                rec(i + 1, n, phi, g, h, f);
            }
        }
        rec(0, n, &mut phi, g, h.graph(), &mut |p| {
            labeled += 1;
            for &v in p {
                dv[v as usize] += 1;
            }
            for a in 0..p.len() {
                for b in a + 1..p.len() {
                    *dp.entry(VertexTuple::pair(p[a], p[b])).or_insert(0) += 1;
                }
            }
        });
        let aut = h.automorphism_count();
        let dv = dv.into_iter().map(|d| d / aut).collect();
        let dp = dp.into_iter().map(|(k, d)| (k, d / aut)).collect();
        (labeled / aut, dv, dp)
    }

    #[test]
    fn k4_triangles() {
        let (n, idx) = enumerate_copies(&complete(4), &Pattern::triangle()).unwrap();
        assert_eq!(n, 4);
        for &(u, v) in complete(4).edges() {
            assert_eq!(idx.pair_influence(u, v), 2);
        }
        assert!(idx.vertex_influences().iter().all(|&d| d == 3));
        assert_eq!(idx.copies().unwrap().len(), 4);
    }

    #[test]
    fn book_shared_edge() {
        for k in 1..6 {
            let (n, idx) = enumerate_copies(&book(k), &Pattern::triangle()).unwrap();
            assert_eq!(n, k as u64);
            assert_eq!(idx.pair_influence(0, 1), k as u64);
            for p in 2..(k + 2) as u32 {
                assert_eq!(idx.pair_influence(0, p), 1);
                assert_eq!(idx.pair_influence(1, p), 1);
            }
        }
    }

    #[test]
    fn edges_of_triangle() {
        let (n, idx) = enumerate_copies(&complete(3), &Pattern::edge()).unwrap();
        assert_eq!(n, 3);
        assert!(idx.vertex_influences().iter().all(|&d| d == 2));
    }

    #[test]
    fn matches_bruteforce_oracle() {
        let graphs = [
            complete(5),
            book(3),
            windmill(3),
            cycle(6),
            exbad_s(1),
            erdos_renyi(8, 0.5, 3),
            erdos_renyi(7, 0.7, 9),
        ];
        let patterns = ["edge", "triangle", "path:3", "path:4", "cycle:4", "complete:4"];
        for g in &graphs {
            for spec in patterns {
                let h = Pattern::parse(spec).unwrap();
                let (n, idx) = enumerate_copies(g, &h).unwrap();
                let (on, dv, dp) = oracle(g, &h);
                assert_eq!(n, on, "{spec}");
                assert_eq!(idx.vertex_influences(), &dv[..], "{spec}");
                for (k, d) in dp {
                    assert_eq!(idx.get(&k), d, "{spec} {k:?}");
                }
                assert_eq!(idx.size_count(2), idx.entries_of_size(2).len());
                assert!(idx.check_size_sums(), "{spec}");
            }
        }
    }

    #[test]
    fn union_book_windmill_triangles() {
        let g = crate::graph::disjoint_union([&book(2), &windmill(2)]);
        assert_eq!(g.vertex_count(), 9);
        let (n, _) = enumerate_copies(&g, &Pattern::triangle()).unwrap();
        assert_eq!(n, 4);
    }

    #[test]
    fn coverage_fallback() {
        let limits = EnumerationLimits {
            copy_cache_cap: 1,
            subset_entry_cap: 20,
        };
        // K5 has 10 triangles: 70 subsets full, 40 with even sizes.
        let (n, idx) = enumerate_copies_with(&complete(5), &Pattern::triangle(), limits).unwrap();
        assert_eq!(n, 10);
        assert_eq!(idx.coverage(), Coverage::VerticesAndPairs);
        assert!(idx.copies().is_none());
        assert!(idx.check_size_sums());
        let limits = EnumerationLimits {
            copy_cache_cap: 100,
            subset_entry_cap: 45,
        };
        let (_, idx) = enumerate_copies_with(&complete(5), &Pattern::triangle(), limits).unwrap();
        assert_eq!(idx.coverage(), Coverage::VerticesAndEven);
        assert!(!idx.stores_size(3));
    }

    #[test]
    fn influential_book_and_triangles() {
        let g = book(100);
        let (n, idx) = enumerate_copies(&g, &Pattern::triangle()).unwrap();
        let sigma = ((100.0f64 * 100.0 + 200.0) / 16.0).sqrt();
        let s = influential_sets(&g, &idx, sigma, n, 1.0).unwrap();
        assert_eq!(s.edges.len(), 1);
        assert_eq!(s.edges[0].pair, (0, 1));
        assert!((s.edges[0].ratio - 400.0 / 10200f64.sqrt()).abs() < 1e-12);
        let strong = influential_sets(&g, &idx, sigma, n, 0.9).unwrap();
        assert_eq!(strong.strong_pairs.len(), 1);

        let g = disjoint_triangles(100);
        let (n, idx) = enumerate_copies(&g, &Pattern::triangle()).unwrap();
        let sigma = (300.0f64 / 16.0).sqrt();
        let s = influential_sets(&g, &idx, sigma, n, 0.5).unwrap();
        assert!(s.pairs.is_empty());
        assert!(matches!(
            influential_sets(&g, &idx, 0.0, n, 0.5),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(8, 4), 70);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(100, 2), 4950);
    }
}
