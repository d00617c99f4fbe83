//! Exact moments of the standardized count `Z = (T − E T)/σ`.

mod bruteforce;
mod joins;
mod kernel;
mod triangle;

pub use bruteforce::{
    exact_distribution_counts, exact_moments_bruteforce, ColoringCensus, MAX_BRUTEFORCE_VERTICES,
};
pub use joins::{
    good_join_census, is_good_join, pie4, pie4_printed, JoinCensus, JoinLimits, PairProduct,
};
pub use kernel::{exact_moments_kernel, KernelLimits};
pub use triangle::{
    exbad_convergence_table, triangle_fourth_closed_form, triangle_gaussian_fourth_closed_form,
    triangle_sixth_asymptotic, triangle_sixth_exact, ConvergenceRow, SixthMomentTerms,
    TriangleEdgeStats,
};

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::rational::{int, serialize_exact, serialize_opt, to_f64, Rational};

/// Which input distribution the moments refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentKernel {
    Rademacher,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentMethod {
    Bruteforce,
    TupleKernel,
    ClosedForm,
    MonteCarlo,
}

#[derive(Debug, Clone, Serialize)]
pub struct CentralMoment {
    pub order: usize,
    #[serde(serialize_with = "serialize_exact")]
    pub value: Rational,
}

#[derive(Debug, Clone, Serialize)]
pub struct NormalizedMoment {
    pub order: usize,
    /// `E[Z^k]`, exact for even `k`.
    #[serde(serialize_with = "serialize_opt")]
    pub exact: Option<Rational>,
    /// `E[Z^k]² = μ_k² / μ_2^k`, always exact.
    #[serde(serialize_with = "serialize_exact")]
    pub squared: Rational,
    pub float: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentReport {
    pub kernel: MomentKernel,
    pub method: MomentMethod,
    #[serde(serialize_with = "serialize_exact")]
    pub variance: Rational,
    pub central: Vec<CentralMoment>,
    pub normalized: Vec<NormalizedMoment>,
    /// `E[Z⁴] − 3`.
    #[serde(serialize_with = "serialize_opt")]
    pub fourth_discrepancy: Option<Rational>,
    /// `√Δ + Δ^{1/4}` for the Gaussian kernel's discrepancy Δ (floored at 0).
    pub m4: Option<f64>,
}

impl MomentReport {
    /// Builds from central moments `μ_2..μ_k` (index 0 ↔ order 2).
    pub(crate) fn from_central(
        kernel: MomentKernel,
        method: MomentMethod,
        central: Vec<(usize, Rational)>,
    ) -> Self {
        let variance = central
            .iter()
            .find(|(k, _)| *k == 2)
            .map(|(_, v)| v.clone())
            .unwrap_or_else(Rational::zero);
        let normalized = if variance.is_zero() {
            Vec::new()
        } else {
            central
                .iter()
                .map(|(k, mu)| normalize(*k, mu, &variance))
                .collect()
        };
        let fourth_discrepancy = normalized
            .iter()
            .find(|m| m.order == 4)
            .and_then(|m| m.exact.clone())
            .map(|e| e - int(3));
        let m4 = match kernel {
            MomentKernel::Gaussian => fourth_discrepancy.as_ref().map(|d| m4_value(to_f64(d))),
            MomentKernel::Rademacher => None,
        };
        MomentReport {
            kernel,
            method,
            variance,
            central: central
                .into_iter()
                .map(|(order, value)| CentralMoment { order, value })
                .collect(),
            normalized,
            fourth_discrepancy,
            m4,
        }
    }

    pub fn central(&self, k: usize) -> Option<&Rational> {
        self.central.iter().find(|m| m.order == k).map(|m| &m.value)
    }

    pub fn normalized(&self, k: usize) -> Option<&NormalizedMoment> {
        self.normalized.iter().find(|m| m.order == k)
    }

    /// Exact `E[Z^k]` for even `k`.
    pub fn normalized_exact(&self, k: usize) -> Option<&Rational> {
        self.normalized(k).and_then(|m| m.exact.as_ref())
    }
}

fn normalize(k: usize, mu: &Rational, var: &Rational) -> NormalizedMoment {
    let squared = mu * mu / pow_rat(var, k);
    let exact = if k.is_multiple_of(2) {
        Some(mu / pow_rat(var, k / 2))
    } else {
        None
    };
    let float = match &exact {
        Some(e) => to_f64(e),
        None => {
            let mag = to_f64(&squared).sqrt();
            if mu.is_negative() {
                -mag
            } else {
                mag
            }
        }
    };
    NormalizedMoment {
        order: k,
        exact,
        squared,
        float,
    }
}

pub(crate) fn pow_rat(r: &Rational, k: usize) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..k {
        acc *= r;
    }
    acc
}

/// `√Δ + Δ^{1/4}` with negative Δ floored at zero.
pub fn m4_value(discrepancy: f64) -> f64 {
    let d = discrepancy.max(0.0);
    d.sqrt() + d.powf(0.25)
}
