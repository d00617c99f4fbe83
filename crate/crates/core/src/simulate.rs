//! Monte Carlo sampling of `T`, exact small-graph laws and Kolmogorov
//! distances to the standard normal.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::enumerate::{enumerate_copies, SearchPlan, VertexTuple};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::moments::{exact_distribution_counts, ColoringCensus};
use crate::pattern::Pattern;
use crate::poly::{build_form, checked_variance, mean, monochromatic_count_with, Coloring};
use crate::rational::{serialize_exact, to_f64, Rational};

/// Standard normal CDF.
pub fn normal_cdf(t: f64) -> f64 {
    0.5 * libm::erfc(-t / std::f64::consts::SQRT_2)
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleRun {
    pub seed: u64,
    pub samples: usize,
    pub workers: usize,
    #[serde(serialize_with = "serialize_exact")]
    pub exact_mean: Rational,
    #[serde(serialize_with = "serialize_exact")]
    pub exact_variance: Rational,
    /// Sample mean and variance of `T`.
    pub mean: f64,
    pub variance: f64,
    /// `Ê[Z^k]` for `k = 1..=6`, standardized with the exact mean and σ.
    pub moments: Vec<f64>,
    pub dkol: f64,
    /// Sorted standardized samples.
    #[serde(skip)]
    pub standardized: Vec<f64>,
}

impl SampleRun {
    pub fn moment(&self, k: usize) -> f64 {
        self.moments[k - 1]
    }

    /// Fraction of samples with `T == t`.
    pub fn frequency(&self, t: u64) -> f64 {
        let sigma = to_f64(&self.exact_variance).sqrt();
        let z = (t as f64 - to_f64(&self.exact_mean)) / sigma;
        let lo = self.standardized.partition_point(|&x| x < z - 1e-9);
        let hi = self.standardized.partition_point(|&x| x <= z + 1e-9);
        (hi - lo) as f64 / self.samples as f64
    }
}

enum Counter {
    Copies(Vec<VertexTuple>),
    Classes(SearchPlan),
}

/// Draws `count` colorings; sample `i` uses ChaCha8 seeded by `seed` on stream `i`,
/// so the output does not depend on how samples are split across workers.
pub fn sample_t(g: &Graph, h: &Pattern, count: usize, seed: u64) -> Result<SampleRun> {
    if count == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    let (_, idx) = enumerate_copies(g, h)?;
    let form = build_form(&idx)?;
    let var = checked_variance(&form)?;
    let mu = mean(&form);
    let (m, sigma) = (to_f64(&mu), to_f64(&var).sqrt());
    let counter = match idx.copies() {
        Some(c) => Counter::Copies(c.to_vec()),
        None => Counter::Classes(SearchPlan::new(h.graph())),
    };
    let n = g.vertex_count();
    let words = n.div_ceil(64);

    let mut values: Vec<u64> = (0..count as u64)
        .into_par_iter()
        .map_init(
            || vec![0i8; n],
            |signs, i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i);
                for w in 0..words {
                    let bits = rng.next_u64();
                    for (j, s) in signs[w * 64..n.min(w * 64 + 64)].iter_mut().enumerate() {
                        *s = if bits >> j & 1 == 1 { 1 } else { -1 };
                    }
                }
                match &counter {
                    Counter::Copies(copies) => copies
                        .iter()
                        .filter(|c| {
                            let vs = c.as_slice();
                            let first = signs[vs[0] as usize];
                            vs.iter().all(|&v| signs[v as usize] == first)
                        })
                        .count() as u64,
                    Counter::Classes(plan) => {
                        let x = Coloring::new(signs.clone()).expect("±1 signs");
                        monochromatic_count_with(g, h, plan, &x)
                    }
                }
            },
        )
        .collect();
    values.sort_unstable();

    let nf = count as f64;
    let smean = values.iter().map(|&t| t as f64).sum::<f64>() / nf;
    let svar = values
        .iter()
        .map(|&t| (t as f64 - smean).powi(2))
        .sum::<f64>()
        / nf;
    let standardized: Vec<f64> = values.iter().map(|&t| (t as f64 - m) / sigma).collect();
    let moments = (1..=6)
        .map(|k| standardized.iter().map(|z| z.powi(k)).sum::<f64>() / nf)
        .collect();
    let dkol = empirical_dkol(&standardized);
    Ok(SampleRun {
        seed,
        samples: count,
        workers: rayon::current_num_threads(),
        exact_mean: mu,
        exact_variance: var,
        mean: smean,
        variance: svar,
        moments,
        dkol,
        standardized,
    })
}

/// Kolmogorov distance between the empirical law of sorted samples and Φ,
/// taking both one-sided gaps at each order statistic.
pub fn empirical_dkol(sorted: &[f64]) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &z)| {
            let p = normal_cdf(z);
            ((i + 1) as f64 / n - p).abs().max((i as f64 / n - p).abs())
        })
        .fold(0.0, f64::max)
}

/// Histogram of standardized samples as `bin_left,bin_right,count`.
pub fn histogram_csv(sorted: &[f64], bins: usize) -> String {
    let mut out = String::from("bin_left,bin_right,count\n");
    if sorted.is_empty() || bins == 0 {
        return out;
    }
    let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut counts = vec![0usize; bins];
    for &z in sorted {
        let b = (((z - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    for (i, c) in counts.iter().enumerate() {
        let left = lo + i as f64 * width;
        out.push_str(&format!("{},{},{}\n", left, left + width, c));
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct Atom {
    pub value: u64,
    #[serde(serialize_with = "serialize_exact")]
    pub probability: Rational,
    pub standardized: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExactDistribution {
    pub pinned: Vec<(u32, i8)>,
    pub atoms: Vec<Atom>,
    #[serde(serialize_with = "serialize_exact")]
    pub mean: Rational,
    #[serde(serialize_with = "serialize_exact")]
    pub variance: Rational,
    /// Distance to Φ of the law standardized by the unconditional mean and σ.
    pub dkol: f64,
}

impl ExactDistribution {
    pub fn probability(&self, t: u64) -> Rational {
        self.atoms
            .iter()
            .find(|a| a.value == t)
            .map(|a| a.probability.clone())
            .unwrap_or_default()
    }
}

/// Exact law of `T` by enumerating all colorings (at most 26 vertices).
pub fn exact_distribution(g: &Graph, h: &Pattern) -> Result<ExactDistribution> {
    exact_distribution_pinned(g, h, &[])
}

/// Same, with some vertex colors pinned. Standardization always uses the
/// unconditional mean and variance.
pub fn exact_distribution_pinned(
    g: &Graph,
    h: &Pattern,
    pinned: &[(u32, i8)],
) -> Result<ExactDistribution> {
    let unconditional = exact_distribution_counts(g, h, &[])?;
    let var = unconditional.central_moment(2);
    if var == Rational::default() {
        return Err(Error::Degenerate("T is constant; variance is zero".into()));
    }
    let census = if pinned.is_empty() {
        unconditional.clone()
    } else {
        exact_distribution_counts(g, h, pinned)?
    };
    Ok(build_exact(census, &unconditional.mean(), var, pinned))
}

fn build_exact(
    census: ColoringCensus,
    mu: &Rational,
    var: Rational,
    pinned: &[(u32, i8)],
) -> ExactDistribution {
    let (m, sigma) = (to_f64(mu), to_f64(&var).sqrt());
    let atoms: Vec<Atom> = census
        .atoms()
        .into_iter()
        .map(|(value, probability)| Atom {
            value,
            probability,
            standardized: (value as f64 - m) / sigma,
        })
        .collect();
    let mut below = 0.0;
    let mut dkol: f64 = 0.0;
    for a in &atoms {
        let p = normal_cdf(a.standardized);
        let above = below + to_f64(&a.probability);
        dkol = dkol.max((below - p).abs()).max((above - p).abs());
        below = above;
    }
    ExactDistribution {
        pinned: pinned.to_vec(),
        atoms,
        mean: census.mean(),
        variance: var,
        dkol,
    }
}
