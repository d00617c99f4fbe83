//! Central moments of a multilinear form by summing over tuples of
//! monomials, with the per-vertex multiplicity rule of the input law:
//! Rademacher `E[x^m] = [m even]`, Gaussian `E[x^m] = (m−1)!! [m even]`.
//!
//! A tuple contributes only if every vertex has even total multiplicity,
//! i.e. the symmetric differences of its two halves coincide. Halves are
//! therefore grouped by their parity set instead of enumerating all
//! `M^k` tuples.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use super::{MomentKernel, MomentMethod, MomentReport};
use crate::enumerate::VertexTuple;
use crate::error::{Error, Result};
use crate::poly::MultilinearForm;
use crate::rational::{gaussian_moment, Rational};

#[derive(Debug, Clone, Copy)]
pub struct KernelLimits {
    /// Largest monomial count accepted per moment order (index = order).
    pub max_monomials: [usize; 7],
}

impl Default for KernelLimits {
    fn default() -> Self {
        KernelLimits {
            max_monomials: [0, 0, 10_000_000, 3000, 3000, 150, 150],
        }
    }
}

/// Exact `μ_2..μ_k` of `F − E F` under the chosen kernel.
pub fn exact_moments_kernel(
    form: &MultilinearForm,
    k: usize,
    kernel: MomentKernel,
) -> Result<MomentReport> {
    exact_moments_kernel_with(form, k, kernel, KernelLimits::default())
}

pub fn exact_moments_kernel_with(
    form: &MultilinearForm,
    k: usize,
    kernel: MomentKernel,
    limits: KernelLimits,
) -> Result<MomentReport> {
    if !(2..=6).contains(&k) {
        return Err(Error::InvalidArgument(
            "tuple-kernel moment order must lie in 2..=6".into(),
        ));
    }
    let m = form.monomial_count();
    for order in 2..=k {
        if m > limits.max_monomials[order] {
            return Err(Error::Capability(format!(
                "form has {m} monomials; order-{order} tuple kernel is capped at {}",
                limits.max_monomials[order]
            )));
        }
    }
    let den = BigInt::from(form.denominator());
    let mut central = Vec::with_capacity(k - 1);
    for order in 2..=k {
        let num = match order {
            2 => order2(form),
            3 => order3(form),
            4 => order4(form, kernel)?,
            _ => generic(form, order, kernel)?,
        };
        central.push((order, Rational::new(num, den.pow(order as u32))));
    }
    Ok(MomentReport::from_central(
        kernel,
        MomentMethod::TupleKernel,
        central,
    ))
}

fn order2(form: &MultilinearForm) -> BigInt {
    form.terms()
        .iter()
        .map(|(_, d)| BigInt::from(*d) * BigInt::from(*d))
        .sum()
}

/// Sorted set of up to 16 vertices (symmetric difference of two monomials).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct Key16 {
    len: u8,
    v: [u32; 16],
}

/// Symmetric difference and intersection of two sorted tuples.
fn split(a: &[u32], b: &[u32]) -> (Key16, VertexTuple) {
    let mut diff = Key16 {
        len: 0,
        v: [0; 16],
    };
    let mut meet = [0u32; 8];
    let mut nm = 0;
    let (mut i, mut j) = (0, 0);
    let push = |x: u32, d: &mut Key16| {
        d.v[d.len as usize] = x;
        d.len += 1;
    };
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] < b[j]) {
            push(a[i], &mut diff);
            i += 1;
        } else if i == a.len() || b[j] < a[i] {
            push(b[j], &mut diff);
            j += 1;
        } else {
            meet[nm] = a[i];
            nm += 1;
            i += 1;
            j += 1;
        }
    }
    (diff, VertexTuple::new(&meet[..nm]))
}

/// `Σ_{p,q} D_p D_q D_{p Δ q}`; the weight is 1 under both kernels since
/// every vertex ends with multiplicity exactly 2.
fn order3(form: &MultilinearForm) -> BigInt {
    let r = form.degree();
    let lookup: HashMap<VertexTuple, u64> = form.terms().iter().copied().collect();
    let terms = form.terms();
    terms
        .par_iter()
        .map(|(p, dp)| {
            let mut acc = BigInt::zero();
            let mut local = 0u128;
            for (q, dq) in terms {
                let (s, _) = split(p.as_slice(), q.as_slice());
                if s.len == 0 || s.len as usize > r {
                    continue;
                }
                let key = VertexTuple::from_sorted(&s.v[..s.len as usize]);
                if let Some(&ds) = lookup.get(&key) {
                    let w = *dp as u128 * *dq as u128 * ds as u128;
                    match local.checked_add(w) {
                        Some(x) => local = x,
                        None => {
                            acc += local;
                            local = w;
                        }
                    }
                }
            }
            acc + local
        })
        .sum()
}

const ENTRIES_PER_PASS: u64 = 4_000_000;

/// Fourth moment via pair grouping. For the Gaussian kernel a pair of pairs
/// with common parity set `S` carries weight `3^{|I_l ∩ I_r|}`, expanded as
/// `Σ_{J ⊆ I_l ∩ I_r} 2^{|J|}` so that it still factors per group.
fn order4(form: &MultilinearForm, kernel: MomentKernel) -> Result<BigInt> {
    let terms = form.terms();
    let m = terms.len() as u64;
    let est = m * (m + 1) / 2;
    let passes = est.div_ceil(ENTRIES_PER_PASS).max(1);
    let overflow = || Error::Capability("fourth-moment accumulator overflow".into());

    let bucket = |s: &Key16, j: &VertexTuple| -> u64 {
        if passes == 1 {
            return 0;
        }
        let mut h = DefaultHasher::new();
        s.hash(&mut h);
        if kernel == MomentKernel::Gaussian {
            j.hash(&mut h);
        }
        h.finish() % passes
    };

    let mut total = BigInt::zero();
    for pass in 0..passes {
        let groups: HashMap<(Key16, VertexTuple), u128> = (0..terms.len())
            .into_par_iter()
            .fold(HashMap::new, |mut acc, i| {
                let (p, dp) = &terms[i];
                for (q, dq) in &terms[i..] {
                    let w = *dp as u128 * *dq as u128 * if p == q { 1 } else { 2 };
                    let (s, meet) = split(p.as_slice(), q.as_slice());
                    match kernel {
                        MomentKernel::Rademacher => {
                            let key = (s, VertexTuple::new(&[]));
                            if bucket(&s, &key.1) == pass {
                                let e = acc.entry(key).or_insert(0u128);
                                *e = e.saturating_add(w);
                            }
                        }
                        MomentKernel::Gaussian => {
                            let n = meet.len();
                            for mask in 0u32..(1 << n) {
                                let j = meet.select(mask);
                                if bucket(&s, &j) == pass {
                                    let e = acc.entry((s, j)).or_insert(0u128);
                                    *e = e.saturating_add(w);
                                }
                            }
                        }
                    }
                }
                acc
            })
            .reduce(HashMap::new, |mut a, b| {
                let (mut big, small) = if a.len() >= b.len() { (a, b) } else { (b, a) };
                for (k, v) in small {
                    let e = big.entry(k).or_insert(0u128);
                    *e = e.saturating_add(v);
                }
                a = big;
                a
            });
        for ((_, j), l) in groups {
            if l == u128::MAX {
                return Err(overflow());
            }
            let sq = BigInt::from(l) * BigInt::from(l);
            total += sq << j.len();
        }
    }
    Ok(total)
}

/// Parity set and the vertices of multiplicity ≥ 2 for one half-tuple.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct HalfKey {
    odd: Vec<u32>,
    heavy: Vec<(u32, u8)>,
}

fn half_tuples(
    form: &MultilinearForm,
    size: usize,
    kernel: MomentKernel,
) -> Result<HashMap<HalfKey, BigInt>> {
    let terms = form.terms();
    let mut out: HashMap<HalfKey, BigInt> = HashMap::new();
    let mut idx = vec![0usize; size];
    if terms.is_empty() {
        return Ok(out);
    }
    loop {
        let mut verts: Vec<u32> = Vec::with_capacity(size * form.degree());
        let mut w = BigInt::from(1u8);
        for &i in &idx {
            verts.extend_from_slice(terms[i].0.as_slice());
            w *= terms[i].1;
        }
        verts.sort_unstable();
        let mut odd = Vec::new();
        let mut heavy = Vec::new();
        let mut i = 0;
        while i < verts.len() {
            let mut j = i;
            while j < verts.len() && verts[j] == verts[i] {
                j += 1;
            }
            let mult = (j - i) as u8;
            if mult % 2 == 1 {
                odd.push(verts[i]);
            }
            if mult >= 2 && kernel == MomentKernel::Gaussian {
                heavy.push((verts[i], mult));
            }
            i = j;
        }
        *out.entry(HalfKey { odd, heavy }).or_insert_with(BigInt::zero) += w;

        // next index tuple (odometer)
        let mut pos = size;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < terms.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

fn generic(form: &MultilinearForm, order: usize, kernel: MomentKernel) -> Result<BigInt> {
    let left_size = order.div_ceil(2);
    let right_size = order - left_size;
    let left = half_tuples(form, left_size, kernel)?;
    let right_owned;
    let right = if right_size == left_size {
        &left
    } else {
        right_owned = half_tuples(form, right_size, kernel)?;
        &right_owned
    };
    let mut total = BigInt::zero();
    match kernel {
        MomentKernel::Rademacher => {
            for (k, lw) in &left {
                if let Some(rw) = right.get(k) {
                    total += lw * rw;
                }
            }
        }
        MomentKernel::Gaussian => {
            type Side<'a> = Vec<(&'a HalfKey, &'a BigInt)>;
            let mut by_odd: HashMap<&[u32], (Side, Side)> = HashMap::new();
            for (k, w) in &left {
                by_odd.entry(&k.odd).or_default().0.push((k, w));
            }
            for (k, w) in right {
                if let Some(e) = by_odd.get_mut(k.odd.as_slice()) {
                    e.1.push((k, w));
                }
            }
            for (odd, (ls, rs)) in by_odd {
                for (lk, lw) in &ls {
                    for (rk, rw) in &rs {
                        let weight = gaussian_pair_weight(odd, &lk.heavy, &rk.heavy);
                        total += BigInt::from(weight) * *lw * *rw;
                    }
                }
            }
        }
    }
    Ok(total)
}

fn gaussian_pair_weight(odd: &[u32], a: &[(u32, u8)], b: &[(u32, u8)]) -> u64 {
    let base = |v: u32| if odd.binary_search(&v).is_ok() { 1u32 } else { 0 };
    let mut weight = 1u64;
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let (ma, mb) = if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            let v = a[i].0;
            i += 1;
            (a[i - 1].1 as u32, base(v))
        } else if i == a.len() || b[j].0 < a[i].0 {
            let v = b[j].0;
            j += 1;
            (base(v), b[j - 1].1 as u32)
        } else {
            i += 1;
            j += 1;
            (a[i - 1].1 as u32, b[j - 1].1 as u32)
        };
        weight *= gaussian_moment(ma + mb);
    }
    weight
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::enumerate_copies;
    use crate::families::*;
    use crate::moments::exact_moments_bruteforce;
    use crate::pattern::Pattern;
    use crate::poly::build_form;
    use crate::rational::{int, ratio};

    fn form(g: &crate::Graph, h: &Pattern) -> MultilinearForm {
        build_form(&enumerate_copies(g, h).unwrap().1).unwrap()
    }

    #[test]
    fn k3_rademacher_and_gaussian() {
        let f = form(&complete(3), &Pattern::triangle());
        let rad = exact_moments_kernel(&f, 4, MomentKernel::Rademacher).unwrap();
        // μ4 of 4(T − ET) is 21
        assert_eq!(rad.central(4).unwrap() * int(256), int(21));
        assert_eq!(rad.normalized_exact(4).unwrap(), &ratio(7, 3));
        let gau = exact_moments_kernel(&f, 4, MomentKernel::Gaussian).unwrap();
        assert_eq!(gau.central(4).unwrap() * int(256), int(81));
        assert_eq!(gau.normalized_exact(4).unwrap(), &int(9));
        assert!((gau.m4.unwrap() - (6f64.sqrt() + 6f64.powf(0.25))).abs() < 1e-12);
    }

    #[test]
    fn disjoint_monomials_have_zero_third_moment() {
        let f = form(&Graph2::matching(4), &Pattern::edge());
        for kernel in [MomentKernel::Rademacher, MomentKernel::Gaussian] {
            let m = exact_moments_kernel(&f, 3, kernel).unwrap();
            assert_eq!(m.central(3).unwrap(), &int(0));
        }
    }

    struct Graph2;
    impl Graph2 {
        fn matching(k: u32) -> crate::Graph {
            crate::Graph::from_edges(2 * k as usize, (0..k).map(|i| (2 * i, 2 * i + 1))).unwrap()
        }
    }

    #[test]
    fn agrees_with_bruteforce() {
        let graphs = [
            complete(4),
            complete(5),
            book(4),
            windmill(3),
            cycle(6),
            exbad_s(1),
            erdos_renyi(9, 0.5, 4),
        ];
        for g in &graphs {
            for spec in ["edge", "triangle", "path:3", "cycle:4"] {
                let h = Pattern::parse(spec).unwrap();
                let f = form(g, &h);
                if f.monomial_count() == 0 {
                    continue;
                }
                let bf = exact_moments_bruteforce(g, &h, 6).unwrap();
                let k = if f.monomial_count() <= 40 { 6 } else { 4 };
                let kr = exact_moments_kernel(&f, k, MomentKernel::Rademacher).unwrap();
                for order in 2..=k {
                    assert_eq!(kr.central(order), bf.central(order), "{spec} order {order}");
                }
            }
        }
    }

    #[test]
    fn order4_specialization_matches_generic() {
        for g in [complete(5), book(5), erdos_renyi(10, 0.5, 8)] {
            for spec in ["triangle", "path:3", "cycle:4"] {
                let f = form(&g, &Pattern::parse(spec).unwrap());
                for kernel in [MomentKernel::Rademacher, MomentKernel::Gaussian] {
                    assert_eq!(
                        order4(&f, kernel).unwrap(),
                        generic(&f, 4, kernel).unwrap(),
                        "{spec} {kernel:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn gaussian_dominates_rademacher() {
        for g in [complete(5), book(6), windmill(4), erdos_renyi(12, 0.4, 2)] {
            for spec in ["triangle", "path:3", "edge"] {
                let f = form(&g, &Pattern::parse(spec).unwrap());
                if f.monomial_count() == 0 {
                    continue;
                }
                let r = exact_moments_kernel(&f, 4, MomentKernel::Rademacher).unwrap();
                let gs = exact_moments_kernel(&f, 4, MomentKernel::Gaussian).unwrap();
                assert!(gs.central(4).unwrap() >= r.central(4).unwrap());
            }
        }
    }

    #[test]
    fn gaussian_sixth_moment_of_single_monomial() {
        // F − EF = x0 x1 / 2 for one edge; E[(x0 x1)^6] = 15² under N(0,1).
        let f = form(&complete(2), &Pattern::edge());
        let m = exact_moments_kernel(&f, 6, MomentKernel::Gaussian).unwrap();
        assert_eq!(m.central(6).unwrap(), &ratio(225, 64));
        let r = exact_moments_kernel(&f, 6, MomentKernel::Rademacher).unwrap();
        assert_eq!(r.central(6).unwrap(), &ratio(1, 64));
    }

    #[test]
    fn caps_enforced() {
        let f = form(&complete(8), &Pattern::triangle());
        let limits = KernelLimits {
            max_monomials: [0, 0, 100, 100, 10, 10, 10],
        };
        assert!(matches!(
            exact_moments_kernel_with(&f, 4, MomentKernel::Rademacher, limits),
            Err(Error::Capability(_))
        ));
        assert!(exact_moments_kernel(&f, 7, MomentKernel::Rademacher).is_err());
    }
}
