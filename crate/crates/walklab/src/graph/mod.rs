//! Immutable undirected simple connected graphs.
//!
//! Vertices are dense integers `0..n`. A [`Graph`] is validated at
//! construction (simplicity, symmetry, connectivity) and never mutated
//! afterwards, so it can be shared freely across threads.

use serde::{Deserialize, Serialize};
use thiserror::Error;

mod algo;
mod generate;

pub use algo::{CutsetFamily, DiameterResult, VertexSet};
pub use generate::GraphSpec;

pub type Vertex = u32;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("validation error: {0}")]
    Validation(String),
    #[error("invalid parameters for {family}: {message}")]
    InvalidParams { family: String, message: String },
    #[error("generation failed for {family} after {retries} retries: {message}")]
    GenerationFailed { family: String, retries: u32, message: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Undirected simple connected graph with precomputed degree data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Graph {
    n: u32,
    /// Canonical edge list, each pair (u, v) with u < v, sorted.
    edges: Vec<(Vertex, Vertex)>,
    /// Per-vertex sorted neighbor lists.
    adjacency: Vec<Vec<Vertex>>,
    degrees: Vec<u32>,
    delta: u32,
    big_delta: u32,
    /// Provenance, e.g. "cycle(n=64)".
    family_tag: String,
    gen_seed: Option<u64>,
}

impl Graph {
    /// Build a graph from an edge list, enforcing every invariant:
    /// no self-loops, no duplicate edges, 0-based vertex ids below `n`,
    /// and connectivity.
    pub fn new(
        n: u32,
        edges: Vec<(Vertex, Vertex)>,
        family_tag: impl Into<String>,
        gen_seed: Option<u64>,
    ) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Validation("graph must have at least one vertex".into()));
        }
        let mut canon: Vec<(Vertex, Vertex)> = Vec::with_capacity(edges.len());
        for &(u, v) in &edges {
            if u == v {
                return Err(GraphError::Validation(format!("self-loop at vertex {u}")));
            }
            if u >= n || v >= n {
                return Err(GraphError::Validation(format!(
                    "edge ({u}, {v}) references a vertex >= n = {n}"
                )));
            }
            canon.push((u.min(v), u.max(v)));
        }
        canon.sort_unstable();
        if let Some(w) = canon.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::Validation(format!(
                "duplicate edge ({}, {})",
                w[0].0, w[0].1
            )));
        }

        let mut adjacency = vec![Vec::new(); n as usize];
        for &(u, v) in &canon {
            adjacency[u as usize].push(v);
            adjacency[v as usize].push(u);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        let degrees: Vec<u32> = adjacency.iter().map(|a| a.len() as u32).collect();

        let g = Graph {
            n,
            edges: canon,
            adjacency,
            delta: degrees.iter().copied().min().unwrap_or(0),
            big_delta: degrees.iter().copied().max().unwrap_or(0),
            degrees,
            family_tag: family_tag.into(),
            gen_seed,
        };
        if let Some(component) = g.disconnected_witness() {
            return Err(GraphError::Validation(format!(
                "graph is disconnected: vertex {component} is unreachable from vertex 0"
            )));
        }
        Ok(g)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Edge count |E|.
    pub fn m(&self) -> u64 {
        self.edges.len() as u64
    }

    /// Minimum degree.
    pub fn min_degree(&self) -> u32 {
        self.delta
    }

    /// Maximum degree.
    pub fn max_degree(&self) -> u32 {
        self.big_delta
    }

    pub fn degree(&self, v: Vertex) -> u32 {
        self.degrees[v as usize]
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adjacency[v as usize]
    }

    /// Canonical sorted edge list, each (u, v) with u < v.
    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adjacency[u as usize].binary_search(&v).is_ok()
    }

    pub fn family_tag(&self) -> &str {
        &self.family_tag
    }

    pub fn gen_seed(&self) -> Option<u64> {
        self.gen_seed
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        0..self.n
    }

    /// First vertex unreachable from 0, if any.
    fn disconnected_witness(&self) -> Option<Vertex> {
        let dist = self.bfs_distances(0);
        dist.iter().position(|d| d.is_none()).map(|i| i as Vertex)
    }

    /// Parse the edge-list document format: header "n m" then m lines "u v".
    pub fn from_edge_list(text: &str) -> Result<Self, GraphError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| GraphError::Parse { line: 1, message: "empty document".into() })?;
        let mut head = header.split(' ');
        let parse_u32 = |tok: Option<&str>, line: usize, what: &str| -> Result<u32, GraphError> {
            tok.ok_or_else(|| GraphError::Parse { line, message: format!("missing {what}") })?
                .parse::<u32>()
                .map_err(|e| GraphError::Parse { line, message: format!("bad {what}: {e}") })
        };
        let n = parse_u32(head.next(), 1, "vertex count")?;
        let m = parse_u32(head.next(), 1, "edge count")?;
        if head.next().is_some() {
            return Err(GraphError::Parse { line: 1, message: "trailing tokens in header".into() });
        }

        let mut edges = Vec::with_capacity(m as usize);
        for (idx, line) in lines {
            let lineno = idx + 1;
            if line.is_empty() && edges.len() == m as usize {
                continue; // tolerate a trailing newline
            }
            let mut toks = line.split(' ');
            let u = parse_u32(toks.next(), lineno, "endpoint")?;
            let v = parse_u32(toks.next(), lineno, "endpoint")?;
            if toks.next().is_some() {
                return Err(GraphError::Parse {
                    line: lineno,
                    message: "trailing tokens on edge line".into(),
                });
            }
            edges.push((u, v));
        }
        if edges.len() != m as usize {
            return Err(GraphError::Parse {
                line: edges.len() + 1,
                message: format!("expected {m} edge lines, found {}", edges.len()),
            });
        }
        Graph::new(n, edges, "edge-list", None)
    }

    /// Serialize to the edge-list format. Edges are emitted with u < v in
    /// sorted order, so write/parse round-trips are bit-exact.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(8 + self.edges.len() * 8);
        out.push_str(&format!("{} {}\n", self.n, self.edges.len()));
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}
