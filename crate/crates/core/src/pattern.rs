//! Small connected reference graphs H and their automorphism groups.

use std::path::Path;

use crate::error::{Error, Result};
use crate::families;
use crate::graph::{load_edge_list, Graph};

pub const MAX_PATTERN_VERTICES: usize = 8;

/// A connected pattern graph with 2..=8 vertices and its automorphisms.
#[derive(Debug, Clone)]
pub struct Pattern {
    name: String,
    graph: Graph,
    automorphisms: Vec<Vec<u8>>,
}

impl Pattern {
    pub fn new(name: impl Into<String>, graph: Graph) -> Result<Self> {
        let r = graph.vertex_count();
        if r > MAX_PATTERN_VERTICES {
            return Err(Error::Capability(format!(
                "pattern has {r} vertices; at most {MAX_PATTERN_VERTICES} are supported"
            )));
        }
        if r < 2 {
            return Err(Error::InvalidPattern("pattern needs at least 2 vertices".into()));
        }
        if !graph.is_connected() {
            return Err(Error::InvalidPattern("pattern must be connected".into()));
        }
        let automorphisms = automorphisms(&graph)?;
        Ok(Pattern {
            name: name.into(),
            graph,
            automorphisms,
        })
    }

    pub fn edge() -> Self {
        Pattern::new("edge", families::complete(2)).unwrap()
    }

    pub fn triangle() -> Self {
        Pattern::new("triangle", families::complete(3)).unwrap()
    }

    /// Parses `edge`, `triangle`, `path:k`, `cycle:k`, `complete:k` or
    /// `file:<edge-list path>`; `k` counts vertices.
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = || Error::InvalidPattern(format!("unrecognized pattern {spec:?}"));
        match spec {
            "edge" => return Ok(Pattern::edge()),
            "triangle" => return Ok(Pattern::triangle()),
            _ => {}
        }
        let (kind, arg) = spec.split_once(':').ok_or_else(bad)?;
        if kind == "file" {
            let file = std::fs::File::open(Path::new(arg))?;
            let g = load_edge_list(std::io::BufReader::new(file))?.graph;
            return Pattern::new(spec, g);
        }
        let k: usize = arg.parse().map_err(|_| bad())?;
        if k > MAX_PATTERN_VERTICES {
            return Err(Error::Capability(format!(
                "pattern {spec} has {k} vertices; at most {MAX_PATTERN_VERTICES} are supported"
            )));
        }
        let g = match kind {
            "path" if k >= 2 => families::path(k),
            "cycle" if k >= 3 => families::cycle(k),
            "complete" if k >= 2 => families::complete(k),
            _ => return Err(bad()),
        };
        Pattern::new(spec, g)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Number of pattern vertices, `r`.
    pub fn order(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn automorphism_count(&self) -> u64 {
        self.automorphisms.len() as u64
    }

    pub fn automorphisms(&self) -> &[Vec<u8>] {
        &self.automorphisms
    }

    /// True when the pattern is K3.
    pub fn is_triangle(&self) -> bool {
        self.order() == 3 && self.graph.edge_count() == 3
    }
}

/// |Aut(H)| by exhaustive permutation check.
pub fn automorphism_count(graph: &Graph) -> Result<u64> {
    Ok(automorphisms(graph)?.len() as u64)
}

fn automorphisms(graph: &Graph) -> Result<Vec<Vec<u8>>> {
    let r = graph.vertex_count();
    if r > MAX_PATTERN_VERTICES {
        return Err(Error::Capability(format!(
            "automorphism search limited to {MAX_PATTERN_VERTICES} vertices"
        )));
    }
    let mut found = Vec::new();
    let mut perm: Vec<u8> = (0..r as u8).collect();
    // Heap's algorithm, iterative.
    let mut c = vec![0usize; r];
    let preserves = |p: &[u8]| {
        graph
            .edges()
            .iter()
            .all(|&(u, v)| graph.has_edge(p[u as usize] as u32, p[v as usize] as u32))
    };
    if preserves(&perm) {
        found.push(perm.clone());
    }
    let mut i = 0;
    while i < r {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            if preserves(&perm) {
                found.push(perm.clone());
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    found.sort();
    Ok(found)
}
