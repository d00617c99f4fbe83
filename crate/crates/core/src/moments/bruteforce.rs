use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use super::{MomentKernel, MomentMethod, MomentReport};
use crate::enumerate::copy_vertex_sets;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::pattern::Pattern;
use crate::rational::Rational;

pub const MAX_BRUTEFORCE_VERTICES: usize = 26;
const MAX_BRUTEFORCE_ORDER: usize = 8;

/// Exact law of `T` as coloring counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoringCensus {
    /// Number of colorings enumerated (free vertices only).
    pub total: u64,
    /// `T` value → number of colorings attaining it.
    pub counts: BTreeMap<u64, u64>,
}

impl ColoringCensus {
    pub fn probability(&self, t: u64) -> Rational {
        Rational::new(
            BigInt::from(self.counts.get(&t).copied().unwrap_or(0)),
            BigInt::from(self.total),
        )
    }

    pub fn atoms(&self) -> Vec<(u64, Rational)> {
        self.counts
            .keys()
            .map(|&t| (t, self.probability(t)))
            .collect()
    }

    pub fn mean(&self) -> Rational {
        let s: BigInt = self
            .counts
            .iter()
            .map(|(&t, &c)| BigInt::from(t) * BigInt::from(c))
            .sum();
        Rational::new(s, BigInt::from(self.total))
    }

    /// `E[(T − E T)^k]`.
    pub fn central_moment(&self, k: usize) -> Rational {
        let mean = self.mean();
        let mut acc = Rational::zero();
        for (&t, &c) in &self.counts {
            let dev = Rational::from_integer(BigInt::from(t)) - &mean;
            acc += super::pow_rat(&dev, k) * Rational::from_integer(BigInt::from(c));
        }
        acc / Rational::from_integer(BigInt::from(self.total))
    }
}

/// Enumerates every coloring of the non-fixed vertices and tallies `T`.
///
/// `fixed` pins vertices to ±1. With nothing pinned, the global flip
/// symmetry `T(x) = T(−x)` halves the work.
pub fn exact_distribution_counts(
    g: &Graph,
    h: &Pattern,
    fixed: &[(u32, i8)],
) -> Result<ColoringCensus> {
    let n = g.vertex_count();
    if n > MAX_BRUTEFORCE_VERTICES {
        return Err(Error::Capability(format!(
            "exhaustive enumeration supports at most {MAX_BRUTEFORCE_VERTICES} vertices (graph has {n}); use the tuple kernel, closed form or Monte Carlo"
        )));
    }
    let copies: Vec<u32> = copy_vertex_sets(g, h)
        .iter()
        .map(|c| c.as_slice().iter().fold(0u32, |m, &v| m | 1 << v))
        .collect();

    let mut base = 0u32;
    let mut pinned = vec![false; n];
    for &(v, s) in fixed {
        if v as usize >= n {
            return Err(Error::InvalidArgument(format!("vertex {v} out of range")));
        }
        if s != 1 && s != -1 {
            return Err(Error::InvalidArgument("pinned colors must be ±1".into()));
        }
        pinned[v as usize] = true;
        if s > 0 {
            base |= 1 << v;
        }
    }
    let mut free: Vec<u32> = (0..n as u32).filter(|&v| !pinned[v as usize]).collect();
    // Without pins, fix the last vertex to −1 and double every count.
    let doubled = fixed.is_empty() && n > 0;
    if doubled {
        free.pop();
    }
    let f = free.len();
    let span = 1u64 << f;
    let chunk = 1u64 << 14;
    let chunks = span.div_ceil(chunk);

    let counts = (0..chunks)
        .into_par_iter()
        .fold(BTreeMap::<u64, u64>::new, |mut acc, ci| {
            let lo = ci * chunk;
            let hi = (lo + chunk).min(span);
            for m in lo..hi {
                let mut mask = base;
                let mut bits = m;
                while bits != 0 {
                    let i = bits.trailing_zeros() as usize;
                    mask |= 1 << free[i];
                    bits &= bits - 1;
                }
                let t = copies
                    .iter()
                    .filter(|&&c| c & mask == c || c & mask == 0)
                    .count() as u64;
                *acc.entry(t).or_insert(0) += 1;
            }
            acc
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (t, c) in b {
                *a.entry(t).or_insert(0) += c;
            }
            a
        });

    let factor = if doubled { 2 } else { 1 };
    Ok(ColoringCensus {
        total: span * factor,
        counts: counts.into_iter().map(|(t, c)| (t, c * factor)).collect(),
    })
}

/// Exact central moments `μ_2..μ_k` by exhaustive enumeration.
pub fn exact_moments_bruteforce(g: &Graph, h: &Pattern, k: usize) -> Result<MomentReport> {
    if !(2..=MAX_BRUTEFORCE_ORDER).contains(&k) {
        return Err(Error::InvalidArgument(format!(
            "brute-force moment order must lie in 2..={MAX_BRUTEFORCE_ORDER}"
        )));
    }
    let census = exact_distribution_counts(g, h, &[])?;
    let central = (2..=k).map(|j| (j, census.central_moment(j))).collect();
    Ok(MomentReport::from_central(
        MomentKernel::Rademacher,
        MomentMethod::Bruteforce,
        central,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::*;
    use crate::rational::{int, ratio};

    #[test]
    fn k3_distribution_and_moments() {
        let c = exact_distribution_counts(&complete(3), &Pattern::triangle(), &[]).unwrap();
        assert_eq!(c.atoms(), vec![(0, ratio(3, 4)), (1, ratio(1, 4))]);
        let m = exact_moments_bruteforce(&complete(3), &Pattern::triangle(), 4).unwrap();
        assert_eq!(m.variance, ratio(3, 16));
        assert_eq!(m.normalized_exact(4).unwrap(), &ratio(7, 3));
        assert_eq!(m.normalized(3).unwrap().squared, ratio(4, 3));
        assert!((m.normalized(3).unwrap().float - 2.0 / 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn k4_distribution_and_moments() {
        let c = exact_distribution_counts(&complete(4), &Pattern::triangle(), &[]).unwrap();
        assert_eq!(
            c.atoms(),
            vec![(0, ratio(3, 8)), (1, ratio(1, 2)), (4, ratio(1, 8))]
        );
        let m = exact_moments_bruteforce(&complete(4), &Pattern::triangle(), 4).unwrap();
        assert_eq!(m.central(4).unwrap(), &ratio(21, 2));
        assert_eq!(m.normalized_exact(4).unwrap(), &ratio(14, 3));
    }

    #[test]
    fn two_disjoint_triangles_excess() {
        let m = exact_moments_bruteforce(&disjoint_triangles(2), &Pattern::triangle(), 4).unwrap();
        assert_eq!(m.fourth_discrepancy.unwrap(), ratio(-1, 3));
    }

    #[test]
    fn pinned_book_vertices() {
        let g = book(4);
        let t = Pattern::triangle();
        let same = exact_distribution_counts(&g, &t, &[(0, 1), (1, 1)]).unwrap();
        // Bin(4, 1/2)
        let expect = [1, 4, 6, 4, 1];
        for (k, &c) in expect.iter().enumerate() {
            assert_eq!(same.probability(k as u64), ratio(c, 16));
        }
        let split = exact_distribution_counts(&g, &t, &[(0, 1), (1, -1)]).unwrap();
        assert_eq!(split.atoms(), vec![(0, int(1))]);
    }

    #[test]
    fn size_guard() {
        let g = disjoint_triangles(9);
        assert!(matches!(
            exact_distribution_counts(&g, &Pattern::triangle(), &[]),
            Err(Error::Capability(_))
        ));
        assert!(exact_moments_bruteforce(&complete(3), &Pattern::triangle(), 9).is_err());
    }

    #[test]
    fn empty_graph_single_atom() {
        let c = exact_distribution_counts(&Graph::empty(0), &Pattern::triangle(), &[]).unwrap();
        assert_eq!(c.total, 1);
        assert_eq!(c.atoms(), vec![(0, int(1))]);
    }
}
