//! Combinatorial algorithms on graphs: BFS distances, diameter, the greedy
//! distance-2 cover, and BFS-layer cutset families.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{Graph, Vertex};

/// Sorted vertex subset of a particular graph.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VertexSet {
    pub members: Vec<Vertex>,
}

/// Ordered family of pairwise-disjoint edge cutsets separating two vertices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CutsetFamily {
    /// cuts[i] holds the edges between BFS layers i and i+1 from `endpoints.0`.
    pub cuts: Vec<Vec<(Vertex, Vertex)>>,
    pub endpoints: (Vertex, Vertex),
}

/// Diameter value; `exact` is false when it is a sampled lower bound.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DiameterResult {
    pub value: u32,
    pub exact: bool,
}

/// All-pairs BFS is used for exact diameters up to this size; beyond it a
/// sampled lower bound is returned instead.
const EXACT_DIAMETER_LIMIT: u32 = 4096;

impl Graph {
    /// BFS distances from `s`; `None` marks unreachable vertices (which the
    /// connectivity invariant rules out for constructed graphs).
    pub fn bfs_distances(&self, s: Vertex) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.n() as usize];
        dist[s as usize] = Some(0);
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u as usize].unwrap();
            for &w in self.neighbors(u) {
                if dist[w as usize].is_none() {
                    dist[w as usize] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Shortest-path hop count between two vertices.
    pub fn distance(&self, u: Vertex, v: Vertex) -> u32 {
        if u == v {
            return 0;
        }
        self.bfs_distances(u)[v as usize].expect("graph is connected")
    }

    /// Eccentricity of `s` and a vertex attaining it.
    pub fn eccentricity(&self, s: Vertex) -> (u32, Vertex) {
        let dist = self.bfs_distances(s);
        let (far, d) = dist
            .iter()
            .enumerate()
            .map(|(i, d)| (i, d.expect("graph is connected")))
            .max_by_key(|&(i, d)| (d, std::cmp::Reverse(i)))
            .unwrap();
        (d, far as Vertex)
    }

    /// Max over pairs of `distance`. Exact (all-pairs BFS) for n <= 4096;
    /// larger graphs get a lower bound from a double BFS sweep plus 32
    /// deterministic sample starts, flagged as inexact.
    pub fn diameter(&self) -> DiameterResult {
        if self.n() <= EXACT_DIAMETER_LIMIT {
            let value = self.vertices().map(|s| self.eccentricity(s).0).max().unwrap_or(0);
            return DiameterResult { value, exact: true };
        }
        let (_, far) = self.eccentricity(0);
        let mut best = self.eccentricity(far).0;
        let stride = (self.n() / 32).max(1);
        let mut s = 0;
        while s < self.n() {
            best = best.max(self.eccentricity(s).0);
            s += stride;
        }
        DiameterResult { value: best, exact: false }
    }

    /// Greedy distance-2 cover with |X| <= ceil(n / delta).
    ///
    /// Scans vertices in decreasing-degree order and keeps those whose closed
    /// neighborhood is disjoint from every previously kept one. The kept
    /// closed neighborhoods each contain at least delta + 1 vertices, which
    /// bounds |X| by n / (delta + 1); maximality of the family makes X a
    /// 2-cover. Both properties are re-verified before returning.
    pub fn two_cover(&self) -> VertexSet {
        let n = self.n() as usize;
        let mut order: Vec<Vertex> = self.vertices().collect();
        order.sort_by_key(|&v| (std::cmp::Reverse(self.degree(v)), v));

        let mut blocked = vec![false; n]; // vertex lies in N[x] of some chosen x
        let mut members = Vec::new();
        for v in order {
            let free = !blocked[v as usize]
                && self.neighbors(v).iter().all(|&w| !blocked[w as usize]);
            if free {
                members.push(v);
                blocked[v as usize] = true;
                for &w in self.neighbors(v) {
                    blocked[w as usize] = true;
                }
            }
        }
        members.sort_unstable();

        let bound = (n as u64).div_ceil(u64::from(self.min_degree()));
        assert!(
            members.len() as u64 <= bound,
            "2-cover of size {} exceeds ceil(n/delta) = {}",
            members.len(),
            bound
        );
        let cover = VertexSet { members };
        assert!(
            self.covers_within(&cover, 2),
            "greedy 2-cover violates the distance-2 property"
        );
        cover
    }

    /// Multi-source BFS check: is every vertex within `radius` of the set?
    pub fn covers_within(&self, set: &VertexSet, radius: u32) -> bool {
        let mut dist = vec![None; self.n() as usize];
        let mut queue = VecDeque::new();
        for &x in &set.members {
            dist[x as usize] = Some(0);
            queue.push_back(x);
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u as usize].unwrap();
            if du == radius {
                continue;
            }
            for &w in self.neighbors(u) {
                if dist[w as usize].is_none() {
                    dist[w as usize] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist.iter().all(|d| d.is_some())
    }

    /// BFS-layer cutsets from `u` toward `v`: cut i (1-based) is the set of
    /// edges between vertices at distance i-1 and distance i from `u`, for
    /// i = 1..=dist(u,v). The cuts are pairwise disjoint and each one
    /// separates `u` from `v`.
    pub fn layered_cutsets(&self, u: Vertex, v: Vertex) -> CutsetFamily {
        assert_ne!(u, v, "layered cutsets need distinct endpoints");
        let dist = self.bfs_distances(u);
        let target = dist[v as usize].expect("graph is connected");
        let mut cuts = vec![Vec::new(); target as usize];
        for &(a, b) in self.edges() {
            let (da, db) = (dist[a as usize].unwrap(), dist[b as usize].unwrap());
            let (lo, hi) = (da.min(db), da.max(db));
            // BFS layers differ by at most one across an edge.
            if hi == lo + 1 && hi <= target {
                cuts[lo as usize].push((a.min(b), a.max(b)));
            }
        }
        for cut in &mut cuts {
            cut.sort_unstable();
        }
        CutsetFamily { cuts, endpoints: (u, v) }
    }

    /// BFS 2-coloring test; bipartite walks are periodic under the plain
    /// kernel.
    pub fn is_bipartite(&self) -> bool {
        let mut color = vec![None; self.n() as usize];
        color[0] = Some(false);
        let mut queue = VecDeque::from([0]);
        while let Some(u) = queue.pop_front() {
            let cu = color[u as usize].unwrap();
            for &w in self.neighbors(u) {
                match color[w as usize] {
                    None => {
                        color[w as usize] = Some(!cu);
                        queue.push_back(w);
                    }
                    Some(cw) if cw == cu => return false,
                    _ => {}
                }
            }
        }
        true
    }
}

impl CutsetFamily {
    /// Nash-Williams sum over the family: sum_i 1/|cut_i|.
    pub fn inverse_size_sum(&self) -> f64 {
        self.cuts.iter().map(|c| 1.0 / c.len() as f64).sum()
    }
}
