//! Multilinear polynomial view of the monochromatic count.
//!
//! With `X ∈ {±1}^V` uniform, a copy on vertex set `s` (|s| = r) is
//! monochromatic iff `I(X_s) = 2^r`, where
//! `I(x) = ∏(1 + x_i) + ∏(1 − x_i) = 2 Σ_{|S| even} x^S`.
//! Summing over copies gives
//! `T = 2^{1−r} Σ_{|w| even} D_w x^w`, so `α_w = D_w / 2^{r−1}`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::enumerate::{count_labeled, InfluenceIndex, SearchPlan, VertexTuple};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::pattern::{Pattern, MAX_PATTERN_VERTICES};
use crate::rational::{pow2, ratio, Rational};

/// Coefficients of the indicator polynomial on `[r]`, keyed by bitmask.
pub fn indicator_poly(r: usize) -> Result<Vec<(u32, i64)>> {
    if !(2..=MAX_PATTERN_VERTICES).contains(&r) {
        return Err(Error::InvalidArgument(format!(
            "indicator polynomial defined for 2 <= r <= {MAX_PATTERN_VERTICES}"
        )));
    }
    Ok((0u32..1 << r)
        .map(|m| (m, if m.count_ones() % 2 == 0 { 2 } else { 0 }))
        .collect())
}

/// Evaluates a bitmask-keyed coefficient table at a sign vector.
pub fn eval_indicator(coeffs: &[(u32, i64)], x: &[i8]) -> i64 {
    coeffs
        .iter()
        .map(|&(m, c)| {
            let sign: i64 = (0..x.len())
                .filter(|&i| m >> i & 1 == 1)
                .map(|i| x[i] as i64)
                .product();
            c * sign
        })
        .sum()
}

/// A ±1 vertex coloring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring(Vec<i8>);

impl Coloring {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidArgument("coloring entries must be ±1".into()));
        }
        Ok(Coloring(signs))
    }

    /// Bit `v` of `mask` set means vertex `v` is +1.
    pub fn from_mask(mask: u64, n: usize) -> Self {
        Coloring((0..n).map(|v| if mask >> v & 1 == 1 { 1 } else { -1 }).collect())
    }

    pub fn signs(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn flipped(&self) -> Self {
        Coloring(self.0.iter().map(|&s| -s).collect())
    }
}

/// `F_{H,G}(x) = α_∅ + Σ_{|w| even ≥ 2} α_w x^w`, exact.
///
/// Coefficients are stored as the integers `D_w`; the common denominator
/// is `2^{r−1}`.
#[derive(Debug, Clone)]
pub struct MultilinearForm {
    r: usize,
    constant: u64,
    terms: Vec<(VertexTuple, u64)>,
}

impl MultilinearForm {
    pub fn degree(&self) -> usize {
        self.r
    }

    /// Integer numerators `D_w` of the non-constant monomials, sorted.
    pub fn terms(&self) -> &[(VertexTuple, u64)] {
        &self.terms
    }

    pub fn monomial_count(&self) -> usize {
        self.terms.len()
    }

    /// `2^{r−1}`.
    pub fn denominator(&self) -> u64 {
        1u64 << (self.r - 1)
    }

    pub fn constant(&self) -> Rational {
        ratio(self.constant, self.denominator())
    }

    pub fn coefficient(&self, w: &VertexTuple) -> Rational {
        if w.is_empty() {
            return self.constant();
        }
        match self.terms.binary_search_by(|(k, _)| k.cmp(w)) {
            Ok(i) => ratio(self.terms[i].1, self.denominator()),
            Err(_) => Rational::zero(),
        }
    }

    /// Homogeneous component of degree `m` (m even).
    pub fn component(&self, m: usize) -> impl Iterator<Item = &(VertexTuple, u64)> {
        self.terms.iter().filter(move |(w, _)| w.len() == m)
    }

    /// Exact evaluation at a ±1 vector.
    pub fn evaluate(&self, x: &Coloring) -> Rational {
        let mut acc = BigInt::from(self.constant);
        for (w, d) in &self.terms {
            let sign: i32 = w.as_slice().iter().map(|&v| x.signs()[v as usize] as i32).product();
            if sign > 0 {
                acc += *d;
            } else {
                acc -= *d;
            }
        }
        Rational::new(acc, BigInt::from(self.denominator()))
    }
}

/// Builds `F_{H,G}` from the influence index.
pub fn build_form(idx: &InfluenceIndex) -> Result<MultilinearForm> {
    let r = idx.pattern_order();
    let mut terms = Vec::new();
    for m in (2..=r).step_by(2) {
        if !idx.stores_size(m) {
            return Err(Error::Capability(format!(
                "influence index lacks subsets of size {m} (memory fallback active)"
            )));
        }
        terms.extend(idx.entries_of_size(m));
    }
    terms.sort_unstable();
    Ok(MultilinearForm {
        r,
        constant: idx.copies_count(),
        terms,
    })
}

/// Monochromatic copies: copies inside each color class, counted by
/// enumerating embeddings restricted to that class.
pub fn monochromatic_count(g: &Graph, h: &Pattern, x: &Coloring) -> u64 {
    let plan = SearchPlan::new(h.graph());
    monochromatic_count_with(g, h, &plan, x)
}

pub(crate) fn monochromatic_count_with(
    g: &Graph,
    h: &Pattern,
    plan: &SearchPlan,
    x: &Coloring,
) -> u64 {
    let s = x.signs();
    let plus = count_labeled(g, plan, &|v| s[v as usize] > 0);
    let minus = count_labeled(g, plan, &|v| s[v as usize] < 0);
    ((plus + minus) / h.automorphism_count() as u128) as u64
}

/// Same count via the cached copy list.
pub fn monochromatic_count_by_copies(copies: &[VertexTuple], x: &Coloring) -> u64 {
    let s = x.signs();
    copies
        .iter()
        .filter(|c| {
            let vs = c.as_slice();
            let first = s[vs[0] as usize];
            vs.iter().all(|&v| s[v as usize] == first)
        })
        .count() as u64
}

/// `Var(T) = Σ_{|w| even ≥ 2} α_w²`. Zero means degenerate.
pub fn variance(form: &MultilinearForm) -> Rational {
    let mut num = BigInt::zero();
    for (_, d) in &form.terms {
        num += BigInt::from(*d) * BigInt::from(*d);
    }
    Rational::new(num, BigInt::from(form.denominator()).pow(2))
}

/// Like [`variance`], but zero variance is an error.
pub fn checked_variance(form: &MultilinearForm) -> Result<Rational> {
    let v = variance(form);
    if v.is_zero() {
        Err(Error::Degenerate(
            "Var(T) = 0 (no copies or a forced value)".into(),
        ))
    } else {
        Ok(v)
    }
}

/// `E[T] = α_∅ = N / 2^{r−1}`.
pub fn mean(form: &MultilinearForm) -> Rational {
    form.constant()
}

#[derive(Debug, Clone, Serialize)]
pub struct BooleanInfluence {
    pub vertex: u32,
    #[serde(serialize_with = "crate::rational::serialize_exact")]
    pub influence: Rational,
    /// `D_v² / 2^{r−1}`.
    #[serde(serialize_with = "crate::rational::serialize_exact")]
    pub bound: Rational,
}

/// `inf_v(F) = Σ_{w ∋ v} α_w²`, together with the `D_v²/2^{r−1}` bound.
pub fn boolean_influence(form: &MultilinearForm, idx: &InfluenceIndex, v: u32) -> BooleanInfluence {
    let mut num = BigInt::zero();
    for (w, d) in &form.terms {
        if w.contains(v) {
            num += BigInt::from(*d) * BigInt::from(*d);
        }
    }
    let influence = Rational::new(num, BigInt::from(form.denominator()).pow(2));
    let dv = idx.vertex_influence(v);
    let bound = Rational::new(
        BigInt::from(dv) * BigInt::from(dv),
        BigInt::from(form.denominator()),
    );
    debug_assert!(influence <= bound);
    BooleanInfluence {
        vertex: v,
        influence,
        bound,
    }
}

/// All vertex influences at once, in vertex order.
pub fn boolean_influences(form: &MultilinearForm, idx: &InfluenceIndex) -> Vec<BooleanInfluence> {
    let mut acc: BTreeMap<u32, BigInt> = BTreeMap::new();
    for (w, d) in &form.terms {
        let sq = BigInt::from(*d) * BigInt::from(*d);
        for &v in w.as_slice() {
            *acc.entry(v).or_insert_with(BigInt::zero) += &sq;
        }
    }
    let den2 = BigInt::from(form.denominator()).pow(2);
    (0..idx.vertex_count() as u32)
        .map(|v| {
            let dv = idx.vertex_influence(v);
            BooleanInfluence {
                vertex: v,
                influence: Rational::new(
                    acc.get(&v).cloned().unwrap_or_else(BigInt::zero),
                    den2.clone(),
                ),
                bound: Rational::new(
                    BigInt::from(dv) * BigInt::from(dv),
                    BigInt::from(form.denominator()),
                ),
            }
        })
        .collect()
}

/// `2^{−(r−1)}` as a rational, the coefficient unit.
pub fn coefficient_unit(r: usize) -> Rational {
    pow2(1 - r as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::enumerate_copies;
    use crate::families::*;
    use crate::rational::int;

    fn form_of(g: &Graph, h: &Pattern) -> (InfluenceIndex, MultilinearForm) {
        let (_, idx) = enumerate_copies(g, h).unwrap();
        let f = build_form(&idx).unwrap();
        (idx, f)
    }

    /// Exact Var(T) over all 2^n colorings, independent of the form.
    fn brute_variance(g: &Graph, h: &Pattern) -> Rational {
        let n = g.vertex_count();
        let (mut s1, mut s2) = (BigInt::zero(), BigInt::zero());
        for mask in 0..(1u64 << n) {
            let t = monochromatic_count(g, h, &Coloring::from_mask(mask, n));
            s1 += t;
            s2 += t * t;
        }
        let total = BigInt::from(1u64 << n);
        let m1 = Rational::new(s1, total.clone());
        let m2 = Rational::new(s2, total);
        m2 - m1.clone() * m1
    }

    #[test]
    fn indicator_r3_matches_expansion() {
        let c = indicator_poly(3).unwrap();
        let nonzero: Vec<u32> = c.iter().filter(|(_, v)| *v != 0).map(|(m, _)| *m).collect();
        assert_eq!(nonzero, vec![0b000, 0b011, 0b101, 0b110]);
        assert!(c.iter().all(|&(_, v)| v == 0 || v == 2));
        assert_eq!(eval_indicator(&c, &[-1, 1, 1]), 0);
        assert_eq!(eval_indicator(&c, &[1, 1, 1]), 8);
        assert_eq!(eval_indicator(&c, &[-1, -1, -1]), 8);
    }

    #[test]
    fn indicator_is_monochromatic_test() {
        for r in 2..=8usize {
            let c = indicator_poly(r).unwrap();
            for m in 0u32..1 << r {
                let x: Vec<i8> = (0..r).map(|i| if m >> i & 1 == 1 { 1 } else { -1 }).collect();
                let mono = m == 0 || m == (1 << r) - 1;
                let expect = if mono { 1i64 << r } else { 0 };
                assert_eq!(eval_indicator(&c, &x), expect);
            }
        }
        let c2 = indicator_poly(2).unwrap();
        assert_eq!(c2, vec![(0, 2), (1, 0), (2, 0), (3, 2)]);
        assert_eq!(eval_indicator(&c2, &[1, 1]), 4);
        assert!(indicator_poly(1).is_err());
    }

    #[test]
    fn forms_for_small_graphs() {
        let (_, f) = form_of(&complete(3), &Pattern::triangle());
        assert_eq!(f.constant(), ratio(1, 4));
        assert_eq!(f.coefficient(&VertexTuple::pair(0, 1)), ratio(1, 4));
        assert_eq!(f.monomial_count(), 3);

        let (_, f) = form_of(&complete(2), &Pattern::edge());
        assert_eq!(f.coefficient(&VertexTuple::pair(0, 1)), ratio(1, 2));

        let (_, f) = form_of(&complete(4), &Pattern::triangle());
        assert_eq!(f.coefficient(&VertexTuple::pair(2, 3)), ratio(1, 2));
        assert_eq!(f.component(2).count(), 6);
        assert_eq!(f.coefficient(&VertexTuple::new(&[0, 1, 2])), Rational::zero());
    }

    #[test]
    fn monochromatic_examples() {
        let k3 = complete(3);
        let t = Pattern::triangle();
        assert_eq!(monochromatic_count(&k3, &t, &Coloring::new(vec![1, 1, 1]).unwrap()), 1);
        assert_eq!(monochromatic_count(&k3, &t, &Coloring::new(vec![1, 1, -1]).unwrap()), 0);
        let k4 = complete(4);
        assert_eq!(
            monochromatic_count(&k4, &t, &Coloring::new(vec![1, 1, 1, -1]).unwrap()),
            1
        );
    }

    #[test]
    fn variance_examples() {
        let t = Pattern::triangle();
        assert_eq!(variance(&form_of(&complete(3), &t).1), ratio(3, 16));
        assert_eq!(variance(&form_of(&complete(4), &t).1), ratio(3, 2));
        for k in 1..=8u64 {
            let g = book(k as usize);
            let f = form_of(&g, &t).1;
            assert_eq!(variance(&f), ratio(k * k + 2 * k, 16));
            assert_eq!(variance(&f), brute_variance(&g, &t));
        }
    }

    #[test]
    fn variance_matches_bruteforce_general_patterns() {
        for g in [complete(5), cycle(7), windmill(3), erdos_renyi(9, 0.5, 1)] {
            for spec in ["edge", "path:3", "cycle:4", "triangle"] {
                let h = Pattern::parse(spec).unwrap();
                let f = form_of(&g, &h).1;
                assert_eq!(variance(&f), brute_variance(&g, &h), "{spec}");
            }
        }
    }

    #[test]
    fn zero_variance_is_degenerate() {
        let (_, f) = form_of(&Graph::empty(4), &Pattern::triangle());
        assert!(matches!(checked_variance(&f), Err(Error::Degenerate(_))));
    }

    #[test]
    fn influence_examples() {
        let (idx, f) = form_of(&complete(2), &Pattern::edge());
        let inf = boolean_influence(&f, &idx, 0);
        assert_eq!(inf.influence, ratio(1, 4));
        assert_eq!(inf.bound, ratio(1, 2));

        let (idx, f) = form_of(&complete(3), &Pattern::triangle());
        for v in 0..3 {
            let inf = boolean_influence(&f, &idx, v);
            assert_eq!(inf.influence, ratio(1, 8));
            assert_eq!(inf.bound, ratio(1, 4));
        }

        let g = Graph::from_edges(4, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let (idx, f) = form_of(&g, &Pattern::triangle());
        assert_eq!(boolean_influence(&f, &idx, 3).influence, int(0));
        let all = boolean_influences(&f, &idx);
        assert_eq!(all[0].influence, ratio(1, 8));
    }

    #[test]
    fn form_agrees_with_counts_on_random_colorings() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for g in [complete(6), book(5), exbad_s(2), erdos_renyi(15, 0.4, 2)] {
            for spec in ["triangle", "path:3", "cycle:4"] {
                let h = Pattern::parse(spec).unwrap();
                let (idx, f) = form_of(&g, &h);
                for _ in 0..200 {
                    let x = Coloring::new(
                        (0..g.vertex_count())
                            .map(|_| if rng.random::<bool>() { 1 } else { -1 })
                            .collect(),
                    )
                    .unwrap();
                    let t = monochromatic_count(&g, &h, &x);
                    assert_eq!(f.evaluate(&x), int(t));
                    assert_eq!(monochromatic_count_by_copies(idx.copies().unwrap(), &x), t);
                    assert_eq!(monochromatic_count(&g, &h, &x.flipped()), t);
                }
            }
        }
    }
}
