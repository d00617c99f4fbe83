//! Deterministic generators for every host-graph family used in the analysis.

use std::ops::Range;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{disjoint_union, Graph};

/// How real-valued sizes (`b·n²`, `c·n`) are turned into counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rounding {
    #[default]
    Floor,
    Round,
    Ceil,
}

impl Rounding {
    pub fn apply(self, x: f64) -> usize {
        let y = match self {
            Rounding::Floor => x.floor(),
            Rounding::Round => x.round(),
            Rounding::Ceil => x.ceil(),
        };
        y.max(0.0) as usize
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "floor" => Ok(Rounding::Floor),
            "round" => Ok(Rounding::Round),
            "ceil" => Ok(Rounding::Ceil),
            _ => Err(Error::InvalidFamily(format!("unknown rounding rule {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    Complete { n: usize },
    Cycle { n: usize },
    Path { n: usize },
    /// Center plus `n` leaves.
    Star { n: usize },
    DisjointTriangles { n: usize },
    /// One shared edge plus `k` apexes.
    Book { k: usize },
    /// `k` triangles sharing one vertex.
    Windmill { k: usize },
    /// `s` triangles glued along a common edge.
    PyramidStack { s: usize },
    /// A 4-cycle whose every side carries `n` triangles.
    ExbadS { n: usize },
    /// Book with `c·n` apexes.
    ExbadP { n: usize, c: f64, rounding: Rounding },
    /// `b·n²` hubs; each hub pair is joined by four triangle gadgets.
    ExbadB { n: usize, b: f64, rounding: Rounding },
    ExbadFull {
        n: usize,
        b: f64,
        c: f64,
        rounding: Rounding,
    },
    DisjointUnion { parts: Vec<FamilySpec> },
    ErdosRenyi { n: usize, p: f64, seed: u64 },
}

fn positive(name: &str, v: usize) -> Result<()> {
    if v == 0 {
        Err(Error::InvalidFamily(format!("{name} must be positive")))
    } else {
        Ok(())
    }
}

fn positive_real(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        Err(Error::InvalidFamily(format!("{name} must be a positive real")))
    } else {
        Ok(())
    }
}

/// Parses `3/16`, `1.0518` or `7`.
pub fn parse_real(s: &str) -> Result<f64> {
    let bad = || Error::InvalidFamily(format!("cannot parse number {s:?}"));
    if let Some((a, b)) = s.split_once('/') {
        let a: f64 = a.trim().parse().map_err(|_| bad())?;
        let b: f64 = b.trim().parse().map_err(|_| bad())?;
        if b == 0.0 {
            return Err(bad());
        }
        Ok(a / b)
    } else {
        s.trim().parse().map_err(|_| bad())
    }
}

impl FamilySpec {
    /// Builds a spec from a family name and `key=value` parameters.
    pub fn from_params(name: &str, params: &[(String, String)]) -> Result<Self> {
        let get = |key: &str| params.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
        let int = |key: &str| -> Result<usize> {
            let v = get(key)
                .ok_or_else(|| Error::InvalidFamily(format!("{name} requires parameter {key}")))?;
            v.parse()
                .map_err(|_| Error::InvalidFamily(format!("{key}={v} is not an integer")))
        };
        let real = |key: &str| -> Result<f64> {
            let v = get(key)
                .ok_or_else(|| Error::InvalidFamily(format!("{name} requires parameter {key}")))?;
            parse_real(v)
        };
        let rounding = match get("rounding") {
            Some(r) => Rounding::parse(r)?,
            None => Rounding::Floor,
        };
        let allowed: &[&str] = match name {
            "complete" | "cycle" | "path" | "star" | "disjoint_triangles" | "exbad_S" | "exbad_s" => {
                &["n"]
            }
            "book" | "windmill" => &["k"],
            "pyramid_stack" => &["s"],
            "exbad_P" | "exbad_p" => &["n", "c", "rounding"],
            "exbad_B" | "exbad_b" => &["n", "b", "rounding"],
            "exbad_full" => &["n", "b", "c", "rounding"],
            "erdos_renyi" => &["n", "p", "seed"],
            _ => return Err(Error::InvalidFamily(format!("unknown family {name:?}"))),
        };
        for (k, _) in params {
            if !allowed.contains(&k.as_str()) {
                return Err(Error::InvalidFamily(format!(
                    "unknown parameter {k:?} for family {name}"
                )));
            }
        }
        let spec = match name {
            "complete" => FamilySpec::Complete { n: int("n")? },
            "cycle" => FamilySpec::Cycle { n: int("n")? },
            "path" => FamilySpec::Path { n: int("n")? },
            "star" => FamilySpec::Star { n: int("n")? },
            "disjoint_triangles" => FamilySpec::DisjointTriangles { n: int("n")? },
            "book" => FamilySpec::Book { k: int("k")? },
            "windmill" => FamilySpec::Windmill { k: int("k")? },
            "pyramid_stack" => FamilySpec::PyramidStack { s: int("s")? },
            "exbad_S" | "exbad_s" => FamilySpec::ExbadS { n: int("n")? },
            "exbad_P" | "exbad_p" => FamilySpec::ExbadP {
                n: int("n")?,
                c: real("c")?,
                rounding,
            },
            "exbad_B" | "exbad_b" => FamilySpec::ExbadB {
                n: int("n")?,
                b: real("b")?,
                rounding,
            },
            "exbad_full" => FamilySpec::ExbadFull {
                n: int("n")?,
                b: real("b")?,
                c: real("c")?,
                rounding,
            },
            "erdos_renyi" => FamilySpec::ErdosRenyi {
                n: int("n")?,
                p: real("p")?,
                seed: get("seed").map(|s| s.parse()).transpose().map_err(|_| {
                    Error::InvalidFamily("seed must be a non-negative integer".into())
                })?
                .unwrap_or(0),
            },
            _ => unreachable!(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            FamilySpec::Complete { n } | FamilySpec::Path { n } => positive("n", n),
            FamilySpec::Cycle { n } => {
                if n < 3 {
                    Err(Error::InvalidFamily("cycle needs n >= 3".into()))
                } else {
                    Ok(())
                }
            }
            FamilySpec::Star { n }
            | FamilySpec::DisjointTriangles { n }
            | FamilySpec::ExbadS { n } => positive("n", n),
            FamilySpec::Book { k } | FamilySpec::Windmill { k } => positive("k", k),
            FamilySpec::PyramidStack { s } => positive("s", s),
            FamilySpec::ExbadP { n, c, rounding } => {
                positive("n", n)?;
                positive_real("c", c)?;
                positive("apex count c·n", rounding.apply(c * n as f64))
            }
            FamilySpec::ExbadB { n, b, rounding } => {
                positive("n", n)?;
                positive_real("b", b)?;
                let hubs = rounding.apply(b * (n * n) as f64);
                if hubs < 2 {
                    return Err(Error::InvalidFamily(format!(
                        "hub count b·n² = {hubs} must be at least 2"
                    )));
                }
                Ok(())
            }
            FamilySpec::ExbadFull { n, b, c, rounding } => {
                FamilySpec::ExbadP { n, c, rounding }.validate()?;
                FamilySpec::ExbadB { n, b, rounding }.validate()
            }
            FamilySpec::DisjointUnion { ref parts } => parts.iter().try_for_each(|p| p.validate()),
            FamilySpec::ErdosRenyi { n, p, .. } => {
                positive("n", n)?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::InvalidFamily("p must lie in [0, 1]".into()));
                }
                Ok(())
            }
        }
    }

    pub fn generate(&self) -> Result<Graph> {
        self.validate()?;
        Ok(match *self {
            FamilySpec::Complete { n } => complete(n),
            FamilySpec::Cycle { n } => cycle(n),
            FamilySpec::Path { n } => path(n),
            FamilySpec::Star { n } => star(n),
            FamilySpec::DisjointTriangles { n } => disjoint_triangles(n),
            FamilySpec::Book { k } => book(k),
            FamilySpec::Windmill { k } => windmill(k),
            FamilySpec::PyramidStack { s } => book(s),
            FamilySpec::ExbadS { n } => exbad_s(n),
            FamilySpec::ExbadP { n, c, rounding } => book(rounding.apply(c * n as f64)),
            FamilySpec::ExbadB { n, b, rounding } => {
                exbad_b(rounding.apply(b * (n * n) as f64))
            }
            FamilySpec::ExbadFull { n, b, c, rounding } => {
                let layout = ExbadLayout::new(n, b, c, rounding);
                disjoint_union([
                    &exbad_s(n),
                    &book(layout.apexes),
                    &exbad_b(layout.hubs),
                ])
            }
            FamilySpec::DisjointUnion { ref parts } => {
                let graphs = parts.iter().map(|p| p.generate()).collect::<Result<Vec<_>>>()?;
                disjoint_union(graphs.iter())
            }
            FamilySpec::ErdosRenyi { n, p, seed } => erdos_renyi(n, p, seed),
        })
    }
}

pub fn generate_family(spec: &FamilySpec) -> Result<Graph> {
    spec.generate()
}

fn graph(n: usize, edges: Vec<(u32, u32)>) -> Graph {
    Graph::from_edges(n, edges).expect("generator emits a simple graph")
}

pub fn complete(n: usize) -> Graph {
    let n32 = n as u32;
    graph(
        n,
        (0..n32)
            .flat_map(|u| (u + 1..n32).map(move |v| (u, v)))
            .collect(),
    )
}

pub fn cycle(n: usize) -> Graph {
    let n32 = n as u32;
    graph(n, (0..n32).map(|i| (i, (i + 1) % n32)).collect())
}

pub fn path(n: usize) -> Graph {
    let n32 = n as u32;
    graph(n, (1..n32).map(|i| (i - 1, i)).collect())
}

pub fn star(leaves: usize) -> Graph {
    graph(leaves + 1, (1..=leaves as u32).map(|i| (0, i)).collect())
}

pub fn disjoint_triangles(n: usize) -> Graph {
    let mut edges = Vec::with_capacity(3 * n);
    for t in 0..n as u32 {
        let a = 3 * t;
        edges.extend([(a, a + 1), (a, a + 2), (a + 1, a + 2)]);
    }
    graph(3 * n, edges)
}

/// Shared edge `(0, 1)`; apexes `2..k+2`.
pub fn book(k: usize) -> Graph {
    let mut edges = vec![(0, 1)];
    for p in 2..(k + 2) as u32 {
        edges.extend([(0, p), (1, p)]);
    }
    graph(k + 2, edges)
}

/// Center `0`; triangle `i` uses vertices `2i+1, 2i+2`.
pub fn windmill(k: usize) -> Graph {
    let mut edges = Vec::with_capacity(3 * k);
    for i in 0..k as u32 {
        let (a, b) = (2 * i + 1, 2 * i + 2);
        edges.extend([(0, a), (0, b), (a, b)]);
    }
    graph(2 * k + 1, edges)
}

/// Square `0-1-2-3` with `n` apexes `t_i^(k)` on each side `(v_k, v_{k+1})`.
pub fn exbad_s(n: usize) -> Graph {
    let mut edges = vec![(0, 1), (1, 2), (2, 3), (3, 0)];
    let mut next = 4u32;
    for k in 0..4u32 {
        let (a, b) = (k, (k + 1) % 4);
        for _ in 0..n {
            edges.extend([(a, next), (next, b)]);
            next += 1;
        }
    }
    graph(next as usize, edges)
}

/// Hubs `0..hubs`, then per pair `i < j` the six gadget vertices
/// `l0, li, lj, r0, ri, rj` in lexicographic pair order.
pub fn exbad_b(hubs: usize) -> Graph {
    let pairs = hubs * hubs.saturating_sub(1) / 2;
    let mut edges = Vec::with_capacity(12 * pairs);
    let mut next = hubs as u32;
    for i in 0..hubs as u32 {
        for j in (i + 1)..hubs as u32 {
            for _side in 0..2 {
                let (mid, ai, aj) = (next, next + 1, next + 2);
                edges.extend([
                    (i, mid),
                    (i, ai),
                    (ai, mid),
                    (j, mid),
                    (j, aj),
                    (aj, mid),
                ]);
                next += 3;
            }
        }
    }
    graph(next as usize, edges)
}

/// Counter-keyed G(n, p): the coin for pair `(i, j)` depends only on
/// `(seed, i, j)`.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Graph {
    let mut edges = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..n as u32 {
        rng.set_stream(i as u64);
        for j in (i + 1)..n as u32 {
            rng.set_word_pos(2 * j as u128);
            let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            if u < p {
                edges.push((i, j));
            }
        }
    }
    graph(n, edges)
}

/// Vertex ranges of the three constituents of `exbad_full`.
#[derive(Debug, Clone, Serialize)]
pub struct ExbadLayout {
    pub n: usize,
    pub apexes: usize,
    pub hubs: usize,
    pub s_range: Range<usize>,
    pub p_range: Range<usize>,
    pub b_range: Range<usize>,
}

impl ExbadLayout {
    pub fn new(n: usize, b: f64, c: f64, rounding: Rounding) -> Self {
        let apexes = rounding.apply(c * n as f64);
        let hubs = rounding.apply(b * (n * n) as f64);
        let s_len = 4 + 4 * n;
        let p_len = 2 + apexes;
        let b_len = hubs + 6 * (hubs * hubs.saturating_sub(1) / 2);
        ExbadLayout {
            n,
            apexes,
            hubs,
            s_range: 0..s_len,
            p_range: s_len..s_len + p_len,
            b_range: s_len + p_len..s_len + p_len + b_len,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn handshake(g: &Graph) {
        let deg: usize = (0..g.vertex_count() as u32).map(|v| g.degree(v)).sum();
        assert_eq!(deg, 2 * g.edge_count());
    }

    #[test]
    fn small_family_shapes() {
        let b = book(3);
        assert_eq!((b.vertex_count(), b.edge_count()), (5, 7));
        let t = disjoint_triangles(2);
        assert_eq!((t.vertex_count(), t.edge_count()), (6, 6));
        let w = windmill(2);
        assert_eq!((w.vertex_count(), w.edge_count()), (5, 6));
        assert_eq!(complete(4).edge_count(), 6);
        assert_eq!(cycle(5).edge_count(), 5);
        assert_eq!(path(5).edge_count(), 4);
        assert_eq!(star(4).edge_count(), 4);
        let s = exbad_s(4);
        assert_eq!((s.vertex_count(), s.edge_count()), (20, 36));
        let bb = exbad_b(3);
        assert_eq!((bb.vertex_count(), bb.edge_count()), (21, 36));
    }

    #[test]
    fn handshake_for_all_generators() {
        let specs = [
            FamilySpec::Complete { n: 6 },
            FamilySpec::Cycle { n: 7 },
            FamilySpec::Path { n: 4 },
            FamilySpec::Star { n: 5 },
            FamilySpec::DisjointTriangles { n: 3 },
            FamilySpec::Book { k: 4 },
            FamilySpec::Windmill { k: 4 },
            FamilySpec::PyramidStack { s: 3 },
            FamilySpec::ExbadFull {
                n: 4,
                b: 3.0 / 16.0,
                c: 2.0,
                rounding: Rounding::Floor,
            },
            FamilySpec::ErdosRenyi {
                n: 30,
                p: 0.2,
                seed: 7,
            },
        ];
        for s in &specs {
            handshake(&s.generate().unwrap());
        }
    }

    #[test]
    fn exbad_layout_matches_generated_sizes() {
        let g = FamilySpec::ExbadFull {
            n: 4,
            b: 3.0 / 16.0,
            c: 2.0,
            rounding: Rounding::Floor,
        }
        .generate()
        .unwrap();
        let lay = ExbadLayout::new(4, 3.0 / 16.0, 2.0, Rounding::Floor);
        assert_eq!((lay.hubs, lay.apexes), (3, 8));
        assert_eq!(lay.b_range.end, g.vertex_count());
    }

    #[test]
    fn erdos_renyi_is_seed_deterministic() {
        let a = erdos_renyi(40, 0.3, 11);
        let b = erdos_renyi(40, 0.3, 11);
        let c = erdos_renyi(40, 0.3, 12);
        assert_eq!(a, b);
        assert_ne!(a, c);
        // the coin for (i, j) is independent of n
        let small = erdos_renyi(20, 0.3, 11);
        for &(u, v) in small.edges() {
            assert!(a.has_edge(u, v));
        }
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(FamilySpec::Book { k: 0 }.generate().is_err());
        assert!(FamilySpec::Cycle { n: 2 }.generate().is_err());
        assert!(FamilySpec::ExbadB {
            n: 1,
            b: 1.0,
            rounding: Rounding::Floor
        }
        .generate()
        .is_err());
        assert!(FamilySpec::from_params("book", &[("n".into(), "3".into())]).is_err());
        assert!(FamilySpec::from_params("nope", &[]).is_err());
    }

    #[test]
    fn params_parse_fractions() {
        let s = FamilySpec::from_params(
            "exbad_full",
            &[
                ("n".into(), "4".into()),
                ("b".into(), "3/16".into()),
                ("c".into(), "2".into()),
            ],
        )
        .unwrap();
        assert_eq!(
            s,
            FamilySpec::ExbadFull {
                n: 4,
                b: 0.1875,
                c: 2.0,
                rounding: Rounding::Floor
            }
        );
    }
}
