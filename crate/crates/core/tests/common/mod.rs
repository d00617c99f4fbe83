//! Naive oracles shared by the integration tests. They only use the host's
//! adjacency and never the library's enumeration or moment code.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use chromacount::rational::Rational;
use chromacount::Graph;
use num_bigint::BigInt;
use num_traits::Zero;

/// Vertex sets of all copies of the pattern given by `h_edges` on `r`
/// vertices, found by trying every injective map.
pub fn copies(g: &Graph, h_edges: &[(u32, u32)], r: usize) -> Vec<Vec<u32>> {
    let n = g.vertex_count() as u32;
    let mut seen: BTreeSet<Vec<(u32, u32)>> = BTreeSet::new();
    let mut out = Vec::new();
    let mut phi = vec![0u32; r];
    #[allow(clippy::too_many_arguments)]
    fn rec(
        i: usize,
        r: usize,
        n: u32,
        g: &Graph,
        h: &[(u32, u32)],
        phi: &mut Vec<u32>,
        seen: &mut BTreeSet<Vec<(u32, u32)>>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if i == r {
            let mut es: Vec<(u32, u32)> = h
                .iter()
                .map(|&(a, b)| {
                    let (x, y) = (phi[a as usize], phi[b as usize]);
                    (x.min(y), x.max(y))
                })
                .collect();
            es.sort_unstable();
            if seen.insert(es) {
                let mut vs = phi.clone();
                vs.sort_unstable();
                out.push(vs);
            }
            return;
        }
        for v in 0..n {
            if phi[..i].contains(&v) {
                continue;
            }
            phi[i] = v;
            let ok = h.iter().all(|&(a, b)| {
                let (a, b) = (a as usize, b as usize);
                if a.max(b) != i {
                    return true;
                }
                g.has_edge(phi[a], phi[b])
            });
            if ok {
                rec(i + 1, r, n, g, h, phi, seen, out);
            }
        }
    }
    rec(0, r, n, g, h_edges, &mut phi, &mut seen, &mut out);
    out
}

pub fn triangles(g: &Graph) -> Vec<Vec<u32>> {
    let n = g.vertex_count() as u32;
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if !g.has_edge(a, b) {
                continue;
            }
            for c in b + 1..n {
                if g.has_edge(a, c) && g.has_edge(b, c) {
                    out.push(vec![a, b, c]);
                }
            }
        }
    }
    out
}

/// Law of `T` over all `2^n` colorings, as value → number of colorings.
pub fn law(n: usize, copies: &[Vec<u32>], pinned: &[(u32, bool)]) -> (u64, BTreeMap<u64, u64>) {
    let masks: Vec<u64> = copies
        .iter()
        .map(|c| c.iter().fold(0u64, |m, &v| m | 1 << v))
        .collect();
    let mut counts = BTreeMap::new();
    let mut total = 0;
    for x in 0u64..1 << n {
        if pinned.iter().any(|&(v, s)| (x >> v & 1 == 1) != s) {
            continue;
        }
        total += 1;
        let t = masks
            .iter()
            .filter(|&&m| x & m == m || x & m == 0)
            .count() as u64;
        *counts.entry(t).or_insert(0) += 1;
    }
    (total, counts)
}

/// Exact `(E T, E (T − E T)^k for k in ks)`.
pub fn central_moments(total: u64, counts: &BTreeMap<u64, u64>, ks: &[u32]) -> (Rational, Vec<Rational>) {
    let tot = Rational::from_integer(BigInt::from(total));
    let mean = counts
        .iter()
        .map(|(&t, &c)| Rational::from_integer(BigInt::from(t * c)))
        .fold(Rational::zero(), |a, b| a + b)
        / &tot;
    let ms = ks
        .iter()
        .map(|&k| {
            counts
                .iter()
                .map(|(&t, &c)| {
                    let d = Rational::from_integer(BigInt::from(t)) - &mean;
                    let mut p = Rational::from_integer(BigInt::from(c));
                    for _ in 0..k {
                        p *= &d;
                    }
                    p
                })
                .fold(Rational::zero(), |a, b| a + b)
                / &tot
        })
        .collect();
    (mean, ms)
}

/// `E[Z⁴]` by enumeration.
pub fn fourth_moment(n: usize, copies: &[Vec<u32>]) -> Rational {
    let (total, counts) = law(n, copies, &[]);
    let (_, m) = central_moments(total, &counts, &[2, 4]);
    &m[1] / (&m[0] * &m[0])
}

/// Number of triangles through each pair, over the host's edges.
pub fn edge_influences(g: &Graph) -> BTreeMap<(u32, u32), u64> {
    let mut d = BTreeMap::new();
    for t in triangles(g) {
        for (a, b) in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
            *d.entry((a, b)).or_insert(0) += 1;
        }
    }
    d
}

/// Binomial coefficient as an exact integer.
pub fn binom(n: u64, k: u64) -> BigInt {
    let mut r = BigInt::from(1);
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}
