//! Four-fold joins of pattern copies and the fourth cumulant of `T`.
//!
//! Writing `T − E T = Σ_c Z_c` over copies with `Z_c = 1{c monochromatic} − 2^{1−r}`,
//! copies with disjoint vertex sets are independent, so
//! `κ4(T) = Σ_conn E[Z1 Z2 Z3 Z4] − 3 Σ E[Z1 Z2] E[Z3 Z4]`, the second sum over
//! ordered tuples with `1 ~ 2`, `3 ~ 4` and some overlap across the two pairs.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{exact_moments_kernel, MomentKernel};
use crate::enumerate::{enumerate_copies, VertexTuple};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::pattern::Pattern;
use crate::poly::build_form;
use crate::rational::{int, pow2, serialize_exact, serialize_opt, Rational};

#[derive(Debug, Clone, Copy)]
pub struct JoinLimits {
    /// Largest `N(H, G)⁴` accepted.
    pub max_ordered_tuples: u128,
}

impl Default for JoinLimits {
    fn default() -> Self {
        JoinLimits {
            max_ordered_tuples: 1_000_000_000,
        }
    }
}

/// Sums of `E[Z1 Z2] E[Z3 Z4]` over ordered 4-tuples of copies.
#[derive(Debug, Clone, Serialize)]
pub struct PairProduct {
    /// `1 ~ 2`, `3 ~ 4`, and the pairs overlap each other (the exact cumulant term).
    #[serde(serialize_with = "serialize_exact")]
    pub overlapping: Rational,
    /// `|s1 ∩ s2| ≥ 2`, `|s3 ∩ s4| ≥ 2`, `|(s1 ∪ s2) ∩ (s3 ∪ s4)| ≥ 2`.
    #[serde(serialize_with = "serialize_exact")]
    pub pair_restricted: Rational,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdenticalCopies {
    #[serde(serialize_with = "serialize_exact")]
    pub corrected: Rational,
    #[serde(serialize_with = "serialize_exact")]
    pub printed: Rational,
}

#[derive(Debug, Clone, Serialize)]
pub struct JoinCensus {
    pub pattern_order: usize,
    pub copies: u64,
    pub connected_multisets: u64,
    pub connected_ordered: u64,
    pub good_joins: u64,
    pub good_joins_ordered: u64,
    /// Sorted pairwise intersection sizes → number of connected 4-multisets.
    pub profiles: BTreeMap<String, u64>,
    #[serde(serialize_with = "serialize_exact")]
    pub variance: Rational,
    /// `Σ E[Z1 Z2 Z3 Z4]` over connected ordered tuples.
    #[serde(serialize_with = "serialize_exact")]
    pub connected_sum: Rational,
    pub pair_products: PairProduct,
    #[serde(serialize_with = "serialize_exact")]
    pub fourth_cumulant: Rational,
    /// `κ4 / Var²  =  E[Z⁴] − 3`.
    #[serde(serialize_with = "serialize_exact")]
    pub fourth_discrepancy: Rational,
    /// `Σ E[Z1 Z2 Z3 Z4]` restricted to ordered good joins.
    #[serde(serialize_with = "serialize_exact")]
    pub good_join_sum: Rational,
    /// The same sum with the printed inclusion–exclusion constant.
    #[serde(serialize_with = "serialize_exact")]
    pub good_join_sum_printed: Rational,
    /// `(good_join_sum − 3 · pair_restricted) / Var²`.
    #[serde(serialize_with = "serialize_exact")]
    pub decomposition_value: Rational,
    /// `decomposition_value − fourth_discrepancy`.
    #[serde(serialize_with = "serialize_exact")]
    pub decomposition_gap: Rational,
    pub identical_copies: IdenticalCopies,
    /// `E[Z⁴] − 3` from the tuple kernel, when the form is small enough.
    #[serde(serialize_with = "serialize_opt")]
    pub kernel_discrepancy: Option<Rational>,
    pub identity_verified: Option<bool>,
}

/// Local bitmask encoding of four vertex sets (at most 32 distinct vertices).
fn masks(sets: [&[u32]; 4]) -> [u32; 4] {
    let mut all: Vec<u32> = sets.iter().flat_map(|s| s.iter().copied()).collect();
    all.sort_unstable();
    all.dedup();
    assert!(all.len() <= 32, "four sets span more than 32 vertices");
    sets.map(|s| {
        s.iter()
            .fold(0u32, |m, v| m | 1 << all.binary_search(v).unwrap())
    })
}

/// Components of the overlap graph on the sets selected by `a`; returns
/// `Σ_C (1 − |V(C)|)`.
fn component_exponent(m: &[u32; 4], a: u32) -> i32 {
    let mut seen = 0u32;
    let mut exp = 0i32;
    for i in 0..4 {
        if a & (1 << i) == 0 || seen & (1 << i) != 0 {
            continue;
        }
        let mut comp = 1u32 << i;
        let mut verts = m[i];
        loop {
            let mut grew = false;
            for (j, &mj) in m.iter().enumerate() {
                if a & (1 << j) != 0 && comp & (1 << j) == 0 && mj & verts != 0 {
                    comp |= 1 << j;
                    verts |= mj;
                    grew = true;
                }
            }
            if !grew {
                break;
            }
        }
        seen |= comp;
        exp += 1 - verts.count_ones() as i32;
    }
    exp
}

/// `E[Z_{s1} Z_{s2} Z_{s3} Z_{s4}] · 2^{4r}`.
fn pie4_scaled(m: &[u32; 4], r: usize) -> i128 {
    let r = r as i32;
    let mut total = 0i128;
    for a in 0u32..16 {
        let k = a.count_ones() as i32;
        let e = (1 - r) * (4 - k) + component_exponent(m, a) + 4 * r;
        debug_assert!(e >= 0);
        let term = 1i128 << e;
        if (4 - k) % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// `E[Z_s Z_{s'}] · 2^{2r}`.
fn pair_scaled(a: u32, b: u32, r: usize) -> i128 {
    if a & b == 0 {
        return 0;
    }
    (1i128 << (1 + 2 * r as i32 - (a | b).count_ones() as i32)) - 4
}

/// Exact `E[Z_{s1} Z_{s2} Z_{s3} Z_{s4}]` by inclusion–exclusion over the
/// subsets of the four indicators, each joint probability factoring over the
/// overlap components.
pub fn pie4(sets: [&[u32]; 4], r: usize) -> Rational {
    let m = masks(sets);
    Rational::new(pie4_scaled(&m, r).into(), num_bigint::BigInt::from(1) << (4 * r))
}

/// The printed closed form
/// `−2^{5−4r} + 2^{3−2r} Σ_{i<j} 2^{−|si ∪ sj|} − 2^{2−r} Σ_i 2^{−|∪_{j≠i} sj|} + 2^{1−|∪ si|}`.
pub fn pie4_printed(sets: [&[u32]; 4], r: usize) -> Rational {
    let m = masks(sets);
    let r = r as i64;
    let size = |x: u32| x.count_ones() as i64;
    let mut v = -pow2(5 - 4 * r);
    for i in 0..4 {
        for j in i + 1..4 {
            v += pow2(3 - 2 * r - size(m[i] | m[j]));
        }
    }
    for i in 0..4 {
        let rest = (0..4).filter(|&j| j != i).fold(0, |acc, j| acc | m[j]);
        v -= pow2(2 - r - size(rest));
    }
    v + pow2(1 - size(m[0] | m[1] | m[2] | m[3]))
}

fn connected(m: &[u32; 4]) -> bool {
    component_exponent(m, 0b1111) == 1 - (m[0] | m[1] | m[2] | m[3]).count_ones() as i32
}

fn good_masks(m: &[u32; 4], r: usize) -> bool {
    if !connected(m) {
        return false;
    }
    let size = |x: u32| x.count_ones() as usize;
    let all = size(m[0] | m[1] | m[2] | m[3]);
    for i in 0..4 {
        let rest = (0..4).filter(|&j| j != i).fold(0, |acc, j| acc | m[j]);
        if all - size(rest) > r - 2 {
            return false;
        }
    }
    let pairings = [(0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2)];
    pairings
        .iter()
        .all(|&(a, b, c, d)| all + 2 <= size(m[a] | m[b]) + size(m[c] | m[d]))
}

/// Connected tuple satisfying both cardinality conditions of a good join.
pub fn is_good_join(sets: [&[u32]; 4], r: usize) -> bool {
    good_masks(&masks(sets), r)
}

/// Distinct orderings of a 4-multiset of indices.
fn orderings(t: [usize; 4]) -> Vec<[usize; 4]> {
    const PERMS: [[usize; 4]; 24] = {
        let mut out = [[0; 4]; 24];
        let mut n = 0;
        let mut a = 0;
        while a < 4 {
            let mut b = 0;
            while b < 4 {
                let mut c = 0;
                while c < 4 {
                    if a != b && a != c && b != c && a + b + c <= 6 {
                        let d = 6 - a - b - c;
                        if d < 4 && d != a && d != b && d != c {
                            out[n] = [a, b, c, d];
                            n += 1;
                        }
                    }
                    c += 1;
                }
                b += 1;
            }
            a += 1;
        }
        out
    };
    let mut v: Vec<[usize; 4]> = PERMS.iter().map(|p| p.map(|i| t[i])).collect();
    v.sort_unstable();
    v.dedup();
    v
}

pub fn good_join_census(g: &Graph, h: &Pattern, limits: JoinLimits) -> Result<JoinCensus> {
    let r = h.order();
    let (n_copies, idx) = enumerate_copies(g, h)?;
    let n4 = (n_copies as u128).pow(4);
    if n4 > limits.max_ordered_tuples {
        return Err(Error::Capability(format!(
            "N(H, G)⁴ = {n4} exceeds the join-census cap {}",
            limits.max_ordered_tuples
        )));
    }
    let copies: Vec<VertexTuple> = idx
        .copies()
        .ok_or_else(|| Error::Capability("copy list not cached".into()))?
        .to_vec();
    let nc = copies.len();

    // overlap graph
    let mut by_vertex: Vec<Vec<usize>> = vec![Vec::new(); g.vertex_count()];
    for (i, c) in copies.iter().enumerate() {
        for &v in c.as_slice() {
            by_vertex[v as usize].push(i);
        }
    }
    let mut overlap: Vec<Vec<usize>> = vec![Vec::new(); nc];
    for (i, c) in copies.iter().enumerate() {
        let mut nb: Vec<usize> = c
            .as_slice()
            .iter()
            .flat_map(|&v| by_vertex[v as usize].iter().copied())
            .collect();
        nb.sort_unstable();
        nb.dedup();
        overlap[i] = nb;
    }

    let scale2 = int(1u8) / pow2(2 * r as i64);
    let mut var_scaled = 0i128;
    for i in 0..nc {
        for &j in &overlap[i] {
            let m = masks([copies[i].as_slice(), copies[j].as_slice(), &[], &[]]);
            var_scaled += pair_scaled(m[0], m[1], r);
        }
    }
    let variance = int(var_scaled) * &scale2;
    if var_scaled == 0 {
        return Err(Error::Degenerate("no copies: variance is zero".into()));
    }

    let mut connected_multisets = 0u64;
    let mut connected_ordered = 0u64;
    let mut good = 0u64;
    let mut good_ordered = 0u64;
    let mut profiles: BTreeMap<String, u64> = BTreeMap::new();
    let (mut conn_sum, mut good_sum) = (0i128, 0i128);
    let mut good_sum_printed = Rational::from_integer(0.into());
    let (mut pair_overlap, mut pair_restricted) = (0i128, 0i128);

    let mut mark = vec![usize::MAX; nc];
    for i in 0..nc {
        // ball of radius 3 around i, restricted to indices ≥ i
        let mut ball = vec![i];
        mark[i] = i;
        let mut frontier = vec![i];
        for _ in 0..3 {
            let mut next = Vec::new();
            for &u in &frontier {
                for &v in &overlap[u] {
                    if v > i && mark[v] != i {
                        mark[v] = i;
                        ball.push(v);
                        next.push(v);
                    }
                }
            }
            frontier = next;
        }
        ball.sort_unstable();
        for (bj, &j) in ball.iter().enumerate() {
            for (bk, &k) in ball.iter().enumerate().skip(bj) {
                for &l in &ball[bk..] {
                    let t = [i, j, k, l];
                    let m = masks(t.map(|x| copies[x].as_slice()));
                    if !connected(&m) {
                        continue;
                    }
                    let ords = orderings(t);
                    let mult = ords.len() as u64;
                    connected_multisets += 1;
                    connected_ordered += mult;
                    let e4 = pie4_scaled(&m, r);
                    conn_sum += e4 * mult as i128;
                    let mut prof: Vec<u32> = Vec::with_capacity(6);
                    for a in 0..4 {
                        for b in a + 1..4 {
                            prof.push((m[a] & m[b]).count_ones());
                        }
                    }
                    prof.sort_unstable();
                    let key = prof
                        .iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(",");
                    *profiles.entry(key).or_insert(0) += 1;
                    if good_masks(&m, r) {
                        good += 1;
                        good_ordered += mult;
                        good_sum += e4 * mult as i128;
                        let sets = t.map(|x| copies[x].as_slice());
                        good_sum_printed += pie4_printed(sets, r) * int(mult);
                    }
                    for o in ords {
                        let mo = [0, 1, 2, 3].map(|p| m[t.iter().position(|&x| x == o[p]).unwrap()]);
                        let p12 = pair_scaled(mo[0], mo[1], r);
                        let p34 = pair_scaled(mo[2], mo[3], r);
                        if p12 == 0 || p34 == 0 {
                            continue;
                        }
                        let prod = p12 * p34;
                        // connectivity of the full tuple guarantees cross overlap here
                        pair_overlap += prod;
                        let inter = |x: u32| x.count_ones() >= 2;
                        if inter(mo[0] & mo[1])
                            && inter(mo[2] & mo[3])
                            && inter((mo[0] | mo[1]) & (mo[2] | mo[3]))
                        {
                            pair_restricted += prod;
                        }
                    }
                }
            }
        }
    }

    let scale4 = int(1u8) / pow2(4 * r as i64);
    let connected_sum = int(conn_sum) * &scale4;
    let pair_products = PairProduct {
        overlapping: int(pair_overlap) * &scale4,
        pair_restricted: int(pair_restricted) * &scale4,
    };
    let fourth_cumulant = &connected_sum - int(3) * &pair_products.overlapping;
    let var2 = &variance * &variance;
    let fourth_discrepancy = &fourth_cumulant / &var2;
    let good_join_sum = int(good_sum) * &scale4;
    let decomposition_value =
        (&good_join_sum - int(3) * &pair_products.pair_restricted) / &var2;
    let decomposition_gap = &decomposition_value - &fourth_discrepancy;

    let same: Vec<u32> = (0..r as u32).collect();
    let identical_copies = IdenticalCopies {
        corrected: pie4([&same, &same, &same, &same], r),
        printed: pie4_printed([&same, &same, &same, &same], r),
    };

    let kernel_discrepancy = match build_form(&idx)
        .and_then(|f| exact_moments_kernel(&f, 4, MomentKernel::Rademacher))
    {
        Ok(rep) => rep.fourth_discrepancy,
        Err(e) if e.is_capability() => None,
        Err(e) => return Err(e),
    };
    let identity_verified = kernel_discrepancy.as_ref().map(|k| *k == fourth_discrepancy);

    Ok(JoinCensus {
        pattern_order: r,
        copies: n_copies,
        connected_multisets,
        connected_ordered,
        good_joins: good,
        good_joins_ordered: good_ordered,
        profiles,
        variance,
        connected_sum,
        pair_products,
        fourth_cumulant,
        fourth_discrepancy,
        good_join_sum,
        good_join_sum_printed: good_sum_printed,
        decomposition_value,
        decomposition_gap,
        identical_copies,
        kernel_discrepancy,
        identity_verified,
    })
}
