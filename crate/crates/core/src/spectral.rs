//! Spectral view of the triangle count: `Z = xᵀ A x` with
//! `A_uv = D_uv / (8σ)`, its eigenvalues, and the decomposition obtained by
//! fixing the colors of a few vertices.

use nalgebra::{DMatrix, SymmetricEigen};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::enumerate::{enumerate_copies, InfluenceIndex};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::pattern::Pattern;
use crate::rational::{to_f64, Rational};

/// Components up to this size are diagonalized densely.
pub const DENSE_LIMIT: usize = 2000;
/// Eigenvalues requested from each component solved iteratively.
pub const ITERATIVE_EIGENVALUES: usize = 24;
pub const MAX_CONDITIONED: usize = 16;

#[derive(Debug, Clone, Serialize)]
pub struct TriangleForm {
    pub vertex_count: usize,
    pub sigma: f64,
    /// `(u, v, A_uv)` with `u < v`; the matrix is symmetric with zero diagonal.
    pub entries: Vec<(u32, u32, f64)>,
}

impl TriangleForm {
    pub fn from_graph(g: &Graph) -> Result<Self> {
        let (_, idx) = enumerate_copies(g, &Pattern::triangle())?;
        Self::from_index(&idx)
    }

    pub fn from_index(idx: &InfluenceIndex) -> Result<Self> {
        if !idx.is_triangle() {
            return Err(Error::InvalidPattern(
                "the quadratic form exists only for the triangle pattern".into(),
            ));
        }
        let pairs = idx.entries_of_size(2);
        let s2: Rational = pairs
            .iter()
            .map(|(_, d)| Rational::from_integer((*d as i128 * *d as i128).into()))
            .fold(Rational::zero(), |a, b| a + b);
        if s2.is_zero() {
            return Err(Error::Degenerate("no triangles: variance is zero".into()));
        }
        let sigma = (to_f64(&s2) / 16.0).sqrt();
        let entries = pairs
            .iter()
            .map(|(w, d)| (w.as_slice()[0], w.as_slice()[1], *d as f64 / (8.0 * sigma)))
            .collect();
        Ok(TriangleForm {
            vertex_count: idx.vertex_count(),
            sigma,
            entries,
        })
    }

    /// `xᵀ A x` for a ±1 (or real) vector.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.entries
            .iter()
            .map(|&(u, v, a)| 2.0 * a * x[u as usize] * x[v as usize])
            .sum()
    }

    /// `2 ‖A‖_F²`, which equals `2 Σ λ²` and the Rademacher variance of `xᵀ A x`.
    pub fn variance(&self) -> f64 {
        4.0 * self.entries.iter().map(|e| e.2 * e.2).sum::<f64>()
    }

    pub fn dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.vertex_count, self.vertex_count);
        for &(u, v, a) in &self.entries {
            m[(u as usize, v as usize)] = a;
            m[(v as usize, u as usize)] = a;
        }
        m
    }

    /// Connected components of the support graph, isolated vertices dropped.
    fn components(&self) -> Vec<Vec<u32>> {
        let n = self.vertex_count;
        let mut parent: Vec<u32> = (0..n as u32).collect();
        fn find(p: &mut [u32], mut x: u32) -> u32 {
            while p[x as usize] != x {
                p[x as usize] = p[p[x as usize] as usize];
                x = p[x as usize];
            }
            x
        }
        let mut touched = vec![false; n];
        for &(u, v, _) in &self.entries {
            touched[u as usize] = true;
            touched[v as usize] = true;
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            if a != b {
                parent[a.max(b) as usize] = a.min(b);
            }
        }
        let mut groups: std::collections::BTreeMap<u32, Vec<u32>> = Default::default();
        for v in 0..n as u32 {
            if touched[v as usize] {
                let r = find(&mut parent, v);
                groups.entry(r).or_default().push(v);
            }
        }
        groups.into_values().collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumMethod {
    Dense,
    /// Some component exceeded the dense limit and was solved by Lanczos.
    Lanczos,
}

#[derive(Debug, Clone, Serialize)]
pub struct Spectrum {
    pub method: SpectrumMethod,
    pub dimension: usize,
    /// Ordered by `|λ|` descending, then by signed value descending.
    pub eigenvalues: Vec<f64>,
    /// Whether every eigenvalue of the support was computed.
    pub complete: bool,
    /// `2 ‖A‖_F²`, equal to `2 Σ λ²` over the full spectrum.
    pub two_sum_squares: f64,
    /// `2 Σ λ²` over the computed eigenvalues.
    pub two_sum_squares_computed: f64,
    /// `E[(Σ λ_i (M_i² − 1))⁴]` for independent standard normals `M_i`, when complete.
    pub gaussian_fourth: Option<f64>,
}

impl Spectrum {
    pub fn top(&self) -> Option<f64> {
        self.eigenvalues.first().copied()
    }
}

fn order_eigenvalues(v: &mut [f64]) {
    v.sort_by(|a, b| {
        b.abs()
            .partial_cmp(&a.abs())
            .unwrap()
            .then(b.partial_cmp(a).unwrap())
    });
}

/// `60 Σ λ⁴ + 24 Σ_{i<j} λ_i² λ_j²`.
pub fn gaussian_fourth_from_spectrum(lambda: &[f64]) -> f64 {
    let s2: f64 = lambda.iter().map(|l| l * l).sum();
    let s4: f64 = lambda.iter().map(|l| l.powi(4)).sum();
    60.0 * s4 + 12.0 * (s2 * s2 - s4)
}

pub fn triangle_spectrum(g: &Graph) -> Result<Spectrum> {
    spectrum_of(&TriangleForm::from_graph(g)?)
}

pub fn spectrum_of(form: &TriangleForm) -> Result<Spectrum> {
    let mut eigenvalues = Vec::new();
    let mut complete = true;
    let mut index = vec![usize::MAX; form.vertex_count];
    let mut by_comp: Vec<Vec<(u32, u32, f64)>> = Vec::new();
    let comps = form.components();
    for (ci, c) in comps.iter().enumerate() {
        for (i, &v) in c.iter().enumerate() {
            index[v as usize] = i;
        }
        by_comp.push(Vec::new());
        let _ = ci;
    }
    let mut comp_of = vec![usize::MAX; form.vertex_count];
    for (ci, c) in comps.iter().enumerate() {
        for &v in c {
            comp_of[v as usize] = ci;
        }
    }
    for &(u, v, a) in &form.entries {
        let ci = comp_of[u as usize];
        by_comp[ci].push((index[u as usize] as u32, index[v as usize] as u32, a));
    }
    for (c, entries) in comps.iter().zip(&by_comp) {
        let n = c.len();
        if n <= DENSE_LIMIT {
            let mut m = DMatrix::zeros(n, n);
            for &(u, v, a) in entries {
                m[(u as usize, v as usize)] = a;
                m[(v as usize, u as usize)] = a;
            }
            eigenvalues.extend(SymmetricEigen::new(m).eigenvalues.iter().copied());
        } else {
            complete = false;
            let found = lanczos(n, entries, ITERATIVE_EIGENVALUES, 1e-6)?;
            eigenvalues.extend(found);
        }
    }
    order_eigenvalues(&mut eigenvalues);
    let computed: f64 = 2.0 * eigenvalues.iter().map(|l| l * l).sum::<f64>();
    Ok(Spectrum {
        method: if complete {
            SpectrumMethod::Dense
        } else {
            SpectrumMethod::Lanczos
        },
        dimension: form.vertex_count,
        gaussian_fourth: complete.then(|| gaussian_fourth_from_spectrum(&eigenvalues)),
        eigenvalues,
        complete,
        two_sum_squares: form.variance(),
        two_sum_squares_computed: computed,
    })
}

/// Extremal eigenvalues of a sparse symmetric matrix by Lanczos with full
/// reorthogonalization; returns converged Ritz values (residual ≤ `tol`).
fn lanczos(n: usize, entries: &[(u32, u32, f64)], want: usize, tol: f64) -> Result<Vec<f64>> {
    let matvec = |x: &[f64], y: &mut [f64]| {
        y.iter_mut().for_each(|v| *v = 0.0);
        for &(u, v, a) in entries {
            y[u as usize] += a * x[v as usize];
            y[v as usize] += a * x[u as usize];
        }
    };
    let budget = (50_000_000 / n).max(40);
    let steps = n.min((8 * want + 100).max(200)).min(budget);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut q: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
    normalize(&mut q);
    let mut basis: Vec<Vec<f64>> = vec![q];
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    for j in 0..steps {
        matvec(&basis[j], &mut w);
        let a = dot(&basis[j], &w);
        alpha.push(a);
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &w);
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let bnorm = dot(&w, &w).sqrt();
        if j + 1 == steps || bnorm < 1e-12 {
            beta.push(bnorm);
            break;
        }
        beta.push(bnorm);
        basis.push(w.iter().map(|x| x / bnorm).collect());
    }
    let m = alpha.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let last_beta = beta[m - 1];
    let mut found: Vec<(f64, f64)> = (0..m)
        .map(|i| (eig.eigenvalues[i], (last_beta * eig.eigenvectors[(m - 1, i)]).abs()))
        .filter(|&(_, res)| res <= tol)
        .collect();
    found.sort_by(|a, b| b.0.abs().partial_cmp(&a.0.abs()).unwrap());
    found.truncate(want);
    if found.is_empty() {
        return Err(Error::Capability(
            "Lanczos iteration did not converge within its step budget".into(),
        ));
    }
    Ok(found.into_iter().map(|x| x.0).collect())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let n = dot(v, v).sqrt();
    v.iter_mut().for_each(|x| *x /= n);
}

/// `Z = constant + Σ_v linear_v x_v + reduced(x)` once the colors on
/// `conditioned` are fixed to `assignment`.
#[derive(Debug, Clone, Serialize)]
pub struct PartialColoringDecomposition {
    pub conditioned: Vec<u32>,
    pub assignment: Vec<i8>,
    pub constant: f64,
    /// Nonzero linear coefficients on unconditioned vertices.
    pub linear: Vec<(u32, f64)>,
    /// `Σ c_v²`.
    pub linear_variance: f64,
    /// Variance of the reduced quadratic part.
    pub quadratic_variance: f64,
    #[serde(skip)]
    pub reduced: TriangleForm,
}

impl PartialColoringDecomposition {
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.constant
            + self
                .linear
                .iter()
                .map(|&(v, c)| c * x[v as usize])
                .sum::<f64>()
            + self.reduced.evaluate(x)
    }
}

pub fn decompose(
    form: &TriangleForm,
    conditioned: &[u32],
    assignment: &[i8],
) -> Result<PartialColoringDecomposition> {
    if conditioned.len() != assignment.len() {
        return Err(Error::InvalidArgument(
            "assignment length must match the conditioned set".into(),
        ));
    }
    let mut rho = vec![0i8; form.vertex_count];
    for (&v, &s) in conditioned.iter().zip(assignment) {
        if v as usize >= form.vertex_count || rho[v as usize] != 0 {
            return Err(Error::InvalidArgument(format!(
                "conditioned vertex {v} out of range or repeated"
            )));
        }
        if s != 1 && s != -1 {
            return Err(Error::InvalidArgument("assignment must be ±1".into()));
        }
        rho[v as usize] = s;
    }
    let mut constant = 0.0;
    let mut linear = vec![0.0; form.vertex_count];
    let mut reduced = Vec::new();
    for &(u, v, a) in &form.entries {
        match (rho[u as usize], rho[v as usize]) {
            (0, 0) => reduced.push((u, v, a)),
            (0, s) => linear[u as usize] += 2.0 * a * s as f64,
            (s, 0) => linear[v as usize] += 2.0 * a * s as f64,
            (s, t) => constant += 2.0 * a * (s * t) as f64,
        }
    }
    let linear: Vec<(u32, f64)> = linear
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c != 0.0)
        .map(|(v, c)| (v as u32, c))
        .collect();
    let reduced = TriangleForm {
        vertex_count: form.vertex_count,
        sigma: form.sigma,
        entries: reduced,
    };
    Ok(PartialColoringDecomposition {
        conditioned: conditioned.to_vec(),
        assignment: assignment.to_vec(),
        constant,
        linear_variance: linear.iter().map(|c| c.1 * c.1).sum(),
        quadratic_variance: reduced.variance(),
        linear,
        reduced,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MixtureComponent {
    pub assignment: Vec<i8>,
    pub mean: f64,
    pub variance: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MixtureLimit {
    pub conditioned: Vec<u32>,
    pub components: Vec<MixtureComponent>,
    /// `max mean − min mean` over components.
    pub separation: f64,
}

impl MixtureLimit {
    /// Mixture CDF at `t`.
    pub fn cdf(&self, t: f64) -> f64 {
        self.components
            .iter()
            .map(|c| {
                let p = if c.variance > 0.0 {
                    crate::simulate::normal_cdf((t - c.mean) / c.variance.sqrt())
                } else if t >= c.mean {
                    1.0
                } else {
                    0.0
                };
                c.weight * p
            })
            .sum()
    }
}

/// Predicted limit law `2^{−|I|} Σ_ρ N(Z^{(0,ρ)}, σ_ρ² + η²)`.
pub fn mixture_limit(form: &TriangleForm, conditioned: &[u32]) -> Result<MixtureLimit> {
    let k = conditioned.len();
    if k > MAX_CONDITIONED {
        return Err(Error::Capability(format!(
            "conditioning on {k} vertices exceeds the limit of {MAX_CONDITIONED}"
        )));
    }
    let weight = 0.5f64.powi(k as i32);
    let mut components = Vec::with_capacity(1 << k);
    for mask in 0u32..(1 << k) {
        let assignment: Vec<i8> = (0..k)
            .map(|i| if mask & (1 << i) != 0 { -1 } else { 1 })
            .collect();
        let d = decompose(form, conditioned, &assignment)?;
        components.push(MixtureComponent {
            assignment,
            mean: d.constant,
            variance: d.linear_variance + d.quadratic_variance,
            weight,
        });
    }
    let means = components.iter().map(|c| c.mean);
    let separation = means.clone().fold(f64::MIN, f64::max) - means.fold(f64::MAX, f64::min);
    Ok(MixtureLimit {
        conditioned: conditioned.to_vec(),
        components,
        separation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::*;
    use crate::poly::{monochromatic_count, Coloring};

    #[test]
    fn k3_spectrum() {
        let s = triangle_spectrum(&complete(3)).unwrap();
        let r3 = 3f64.sqrt();
        let expect = [1.0 / r3, -0.5 / r3, -0.5 / r3];
        for (a, b) in s.eigenvalues.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((s.gaussian_fourth.unwrap() - 9.0).abs() < 1e-12);
        assert!((s.two_sum_squares - 1.0).abs() < 1e-12);
    }

    #[test]
    fn evaluation_matches_count() {
        let g = book(5);
        let form = TriangleForm::from_graph(&g).unwrap();
        let mean = 5.0 / 4.0;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let x: Vec<i8> = (0..g.vertex_count())
                .map(|_| if rng.random::<bool>() { 1 } else { -1 })
                .collect();
            let t = monochromatic_count(&g, &Pattern::triangle(), &Coloring::new(x.clone()).unwrap());
            let xf: Vec<f64> = x.iter().map(|&s| s as f64).collect();
            let z = (t as f64 - mean) / form.sigma;
            assert!((form.evaluate(&xf) - z).abs() < 1e-9);
        }
    }

    #[test]
    fn book_decomposition() {
        let k = 7.0;
        let form = TriangleForm::from_graph(&book(7)).unwrap();
        let same = decompose(&form, &[0, 1], &[1, 1]).unwrap();
        assert!((same.constant - k / (4.0 * form.sigma)).abs() < 1e-12);
        assert_eq!(same.linear.len(), 7);
        for &(_, c) in &same.linear {
            assert!((c - 2.0 / (4.0 * form.sigma)).abs() < 1e-12);
        }
        assert_eq!(same.quadratic_variance, 0.0);
        let split = decompose(&form, &[0, 1], &[1, -1]).unwrap();
        assert!((split.constant + k / (4.0 * form.sigma)).abs() < 1e-12);
        assert!(split.linear.is_empty());
        let none = decompose(&form, &[], &[]).unwrap();
        assert_eq!(none.constant, 0.0);
        assert!((none.quadratic_variance - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lanczos_matches_dense() {
        let g = erdos_renyi(300, 0.05, 11);
        let form = TriangleForm::from_graph(&g).unwrap();
        let dense = spectrum_of(&form).unwrap();
        let comp = form.components();
        let big = comp.iter().max_by_key(|c| c.len()).unwrap();
        let mut index = vec![usize::MAX; form.vertex_count];
        for (i, &v) in big.iter().enumerate() {
            index[v as usize] = i;
        }
        let entries: Vec<_> = form
            .entries
            .iter()
            .filter(|e| index[e.0 as usize] != usize::MAX)
            .map(|&(u, v, a)| (index[u as usize] as u32, index[v as usize] as u32, a))
            .collect();
        let it = lanczos(big.len(), &entries, 5, 1e-6).unwrap();
        for (a, b) in it.iter().zip(&dense.eigenvalues) {
            assert!((a.abs() - b.abs()).abs() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn mixture_cap() {
        let form = TriangleForm::from_graph(&complete(20)).unwrap();
        let set: Vec<u32> = (0..17).collect();
        assert!(matches!(mixture_limit(&form, &set), Err(Error::Capability(_))));
    }
}
