//! Simple undirected host graphs and the edge-list text format.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::{Error, Result};

/// Immutable simple undirected graph on vertices `0..vertex_count`.
///
/// Adjacency is stored in CSR form with each neighbor list sorted, so
/// `has_edge` is a binary search and the structure is cheap to share
/// across rayon workers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(u32, u32)>,
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Graph {
    pub fn empty(vertex_count: usize) -> Self {
        Self::from_edges(vertex_count, std::iter::empty()).expect("empty edge set")
    }

    /// Builds a graph, dropping duplicate edges. Self-loops and out-of-range
    /// endpoints are rejected.
    pub fn from_edges(
        vertex_count: usize,
        edges: impl IntoIterator<Item = (u32, u32)>,
    ) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::SelfLoop { line: 0, vertex: u });
            }
            if u as usize >= vertex_count || v as usize >= vertex_count {
                return Err(Error::InvalidArgument(format!(
                    "edge ({u}, {v}) out of range for {vertex_count} vertices"
                )));
            }
            set.insert((u.min(v), u.max(v)));
        }
        let edges: Vec<(u32, u32)> = set.into_iter().collect();
        let mut degree = vec![0usize; vertex_count];
        for &(u, v) in &edges {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(vertex_count + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0u32; offsets[vertex_count]];
        for &(u, v) in &edges {
            targets[fill[u as usize]] = v;
            fill[u as usize] += 1;
            targets[fill[v as usize]] = u;
            fill[v as usize] += 1;
        }
        for v in 0..vertex_count {
            targets[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        Ok(Graph {
            vertex_count,
            edges,
            offsets,
            targets,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        let v = v as usize;
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: u32) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        if u == v {
            return false;
        }
        let (a, b) = if self.degree(u) <= self.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        self.neighbors(a).binary_search(&b).is_ok()
    }

    pub fn is_connected(&self) -> bool {
        if self.vertex_count == 0 {
            return true;
        }
        let mut seen = vec![false; self.vertex_count];
        let mut stack = vec![0u32];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in self.neighbors(v) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.vertex_count
    }

    /// Relabels vertices: vertex `v` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[u32]) -> Result<Graph> {
        if perm.len() != self.vertex_count {
            return Err(Error::InvalidArgument("permutation length mismatch".into()));
        }
        Graph::from_edges(
            self.vertex_count,
            self.edges
                .iter()
                .map(|&(u, v)| (perm[u as usize], perm[v as usize])),
        )
    }

    /// Serializes to the edge-list format with a `v N` header.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(16 + self.edges.len() * 12);
        let _ = writeln!(out, "v {}", self.vertex_count);
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }
}

/// Disjoint union with vertex ids offset in input order.
pub fn disjoint_union<'a>(graphs: impl IntoIterator<Item = &'a Graph>) -> Graph {
    let mut offset = 0u32;
    let mut edges = Vec::new();
    for g in graphs {
        edges.extend(g.edges().iter().map(|&(u, v)| (u + offset, v + offset)));
        offset += g.vertex_count() as u32;
    }
    Graph::from_edges(offset as usize, edges).expect("offset edges are valid")
}

/// Result of parsing an edge list.
#[derive(Debug, Clone)]
pub struct EdgeListLoad {
    pub graph: Graph,
    /// Lines naming an edge already seen (in either orientation).
    pub duplicate_lines: usize,
}

/// Parses the edge-list text format: optional `v N` header, `#` comments,
/// one `u v` pair per line.
pub fn load_edge_list(reader: impl BufRead) -> Result<EdgeListLoad> {
    let mut declared: Option<usize> = None;
    let mut max_id: Option<u32> = None;
    let mut seen = BTreeSet::new();
    let mut duplicate_lines = 0;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let first = tokens.next().unwrap();
        if first == "v" {
            let tok = tokens.next().unwrap_or("");
            let n: usize = tok.parse().map_err(|_| Error::Parse {
                line: lineno,
                token: tok.to_string(),
            })?;
            declared = Some(n);
            if let Some(extra) = tokens.next() {
                return Err(Error::Parse {
                    line: lineno,
                    token: extra.to_string(),
                });
            }
            continue;
        }
        let parse = |tok: &str| -> Result<u32> {
            tok.parse().map_err(|_| Error::Parse {
                line: lineno,
                token: tok.to_string(),
            })
        };
        let u = parse(first)?;
        let v = match tokens.next() {
            Some(t) => parse(t)?,
            None => {
                return Err(Error::Parse {
                    line: lineno,
                    token: trimmed.to_string(),
                })
            }
        };
        if let Some(extra) = tokens.next() {
            return Err(Error::Parse {
                line: lineno,
                token: extra.to_string(),
            });
        }
        if u == v {
            return Err(Error::SelfLoop {
                line: lineno,
                vertex: u,
            });
        }
        if !seen.insert((u.min(v), u.max(v))) {
            duplicate_lines += 1;
        }
        max_id = Some(max_id.map_or(u.max(v), |m| m.max(u).max(v)));
    }
    let implied = max_id.map_or(0, |m| m as usize + 1);
    let vertex_count = match declared {
        Some(n) if n < implied => {
            return Err(Error::InvalidArgument(format!(
                "header declares {n} vertices but id {} appears",
                implied - 1
            )))
        }
        Some(n) => n,
        None => implied,
    };
    let graph = Graph::from_edges(vertex_count, seen)?;
    Ok(EdgeListLoad {
        graph,
        duplicate_lines,
    })
}

pub fn parse_edge_list(text: &str) -> Result<EdgeListLoad> {
    load_edge_list(text.as_bytes())
}
