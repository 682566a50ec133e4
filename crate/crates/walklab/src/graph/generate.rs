//! Graph family generators.
//!
//! Every generator is a pure function of (parameters, seed): deterministic
//! families ignore the seed, random families derive all randomness from it.
//! Vertex labeling conventions: hypercubes use the binary code of the vertex
//! id, tori are row-major, trees use heap order (children of i are k*i+1..).

use std::collections::HashSet;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng::trial_rng;

use super::{Graph, GraphError, Vertex};

const MAX_RETRIES: u32 = 100;

/// Parameterized graph family, parseable from compact strings like
/// `cycle:n=64` or `random-regular:d=3,n=64`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GraphSpec {
    Path { n: u32 },
    Cycle { n: u32 },
    Complete { n: u32 },
    Hypercube { dim: u32 },
    /// Complete k-ary tree with `height` levels below the root;
    /// n = (k^(h+1) - 1) / (k - 1).
    KaryTree { arity: u32, height: u32 },
    /// side x side torus grid, n = side^2.
    Torus2d { side: u32 },
    /// Clique on 2n/3 vertices with a pendant path of n/3 vertices attached
    /// to clique vertex 0. Requires n divisible by 3.
    Lollipop { n: u32 },
    /// K_{n/2} x K_2: two cliques joined by a perfect matching.
    Prism { n: u32 },
    /// Harary circulant H_{k,n}: offsets 1..k/2, plus the diametric offset
    /// n/2 when k is odd (which requires even n).
    Harary { k: u32, n: u32 },
    /// d-regular two-dimensional circulant on the side x side torus
    /// (n = side^2): each vertex joins its nearest neighbors along its row
    /// and column; odd d adds a half-turn matching within rows.
    HararyTorus { degree: u32, n: u32 },
    RandomRegular { degree: u32, n: u32 },
    /// Independent edges, edge {i,j} present with probability
    /// min(1, d_i * d_j / sum(d)); this generator uses a uniform expected
    /// degree vector d_i = expected_degree.
    GeneralizedRandom { n: u32, expected_degree: f64 },
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSpec::Path { n } => write!(f, "path:n={n}"),
            GraphSpec::Cycle { n } => write!(f, "cycle:n={n}"),
            GraphSpec::Complete { n } => write!(f, "complete:n={n}"),
            GraphSpec::Hypercube { dim } => write!(f, "hypercube:dim={dim}"),
            GraphSpec::KaryTree { arity, height } => write!(f, "kary-tree:k={arity},h={height}"),
            GraphSpec::Torus2d { side } => write!(f, "torus2d:side={side}"),
            GraphSpec::Lollipop { n } => write!(f, "lollipop:n={n}"),
            GraphSpec::Prism { n } => write!(f, "prism:n={n}"),
            GraphSpec::Harary { k, n } => write!(f, "harary:k={k},n={n}"),
            GraphSpec::HararyTorus { degree, n } => write!(f, "harary-torus:d={degree},n={n}"),
            GraphSpec::RandomRegular { degree, n } => write!(f, "random-regular:d={degree},n={n}"),
            GraphSpec::GeneralizedRandom { n, expected_degree } => {
                write!(f, "generalized-random:n={n},d={expected_degree}")
            }
        }
    }
}

fn invalid(family: &str, message: impl Into<String>) -> GraphError {
    GraphError::InvalidParams { family: family.to_string(), message: message.into() }
}

impl GraphSpec {
    /// Parse the `family:key=val,...` syntax used by the CLI and by tags.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let text = text.trim().replace('_', "-");
        let (family, args) = match text.split_once(':') {
            Some((f, a)) => (f, a),
            None => (text.as_str(), ""),
        };
        let mut kv = std::collections::BTreeMap::new();
        if !args.is_empty() {
            for part in args.split(',') {
                let (k, v) = part
                    .split_once('=')
                    .ok_or_else(|| invalid(family, format!("expected key=value, got '{part}'")))?;
                kv.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        let get_u32 = |key: &str| -> Result<u32, GraphError> {
            kv.get(key)
                .ok_or_else(|| invalid(family, format!("missing parameter '{key}'")))?
                .parse::<u32>()
                .map_err(|e| invalid(family, format!("bad '{key}': {e}")))
        };
        let get_f64 = |key: &str| -> Result<f64, GraphError> {
            kv.get(key)
                .ok_or_else(|| invalid(family, format!("missing parameter '{key}'")))?
                .parse::<f64>()
                .map_err(|e| invalid(family, format!("bad '{key}': {e}")))
        };
        let spec = match family {
            "path" => GraphSpec::Path { n: get_u32("n")? },
            "cycle" => GraphSpec::Cycle { n: get_u32("n")? },
            "complete" => GraphSpec::Complete { n: get_u32("n")? },
            "hypercube" => GraphSpec::Hypercube { dim: get_u32("dim")? },
            "kary-tree" => GraphSpec::KaryTree { arity: get_u32("k")?, height: get_u32("h")? },
            "torus2d" => GraphSpec::Torus2d { side: get_u32("side")? },
            "lollipop" => GraphSpec::Lollipop { n: get_u32("n")? },
            "prism" => GraphSpec::Prism { n: get_u32("n")? },
            "harary" => GraphSpec::Harary { k: get_u32("k")?, n: get_u32("n")? },
            "harary-torus" => GraphSpec::HararyTorus { degree: get_u32("d")?, n: get_u32("n")? },
            "random-regular" => {
                GraphSpec::RandomRegular { degree: get_u32("d")?, n: get_u32("n")? }
            }
            "generalized-random" => {
                GraphSpec::GeneralizedRandom { n: get_u32("n")?, expected_degree: get_f64("d")? }
            }
            other => return Err(invalid(other, "unknown family")),
        };
        Ok(spec)
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            GraphSpec::Path { .. } => "path",
            GraphSpec::Cycle { .. } => "cycle",
            GraphSpec::Complete { .. } => "complete",
            GraphSpec::Hypercube { .. } => "hypercube",
            GraphSpec::KaryTree { .. } => "kary-tree",
            GraphSpec::Torus2d { .. } => "torus2d",
            GraphSpec::Lollipop { .. } => "lollipop",
            GraphSpec::Prism { .. } => "prism",
            GraphSpec::Harary { .. } => "harary",
            GraphSpec::HararyTorus { .. } => "harary-torus",
            GraphSpec::RandomRegular { .. } => "random-regular",
            GraphSpec::GeneralizedRandom { .. } => "generalized-random",
        }
    }

    /// Generate the graph. Deterministic given (self, seed).
    pub fn generate(&self, seed: u64) -> Result<Graph, GraphError> {
        let tag = self.to_string();
        match *self {
            GraphSpec::Path { n } => {
                if n < 2 {
                    return Err(invalid("path", "n must be >= 2"));
                }
                let edges = (0..n - 1).map(|i| (i, i + 1)).collect();
                Graph::new(n, edges, tag, None)
            }
            GraphSpec::Cycle { n } => {
                if n < 3 {
                    return Err(invalid("cycle", "n must be >= 3"));
                }
                let mut edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
                edges.push((n - 1, 0));
                Graph::new(n, edges, tag, None)
            }
            GraphSpec::Complete { n } => {
                if n < 2 {
                    return Err(invalid("complete", "n must be >= 2"));
                }
                let mut edges = Vec::new();
                for u in 0..n {
                    for v in u + 1..n {
                        edges.push((u, v));
                    }
                }
                Graph::new(n, edges, tag, None)
            }
            GraphSpec::Hypercube { dim } => {
                if !(1..=20).contains(&dim) {
                    return Err(invalid("hypercube", "dim must be in 1..=20"));
                }
                let n = 1u32 << dim;
                let mut edges = Vec::new();
                for u in 0..n {
                    for bit in 0..dim {
                        let v = u ^ (1 << bit);
                        if u < v {
                            edges.push((u, v));
                        }
                    }
                }
                Graph::new(n, edges, tag, None)
            }
            GraphSpec::KaryTree { arity, height } => {
                if arity < 2 {
                    return Err(invalid("kary-tree", "arity must be >= 2"));
                }
                if height < 1 {
                    return Err(invalid("kary-tree", "height must be >= 1"));
                }
                let n = (0..=height).try_fold(0u64, |acc, level| {
                    let width = (arity as u64).checked_pow(level)?;
                    acc.checked_add(width)
                });
                let n = match n {
                    Some(n) if n <= u64::from(u32::MAX / 2) => n as u32,
                    _ => return Err(invalid("kary-tree", "tree too large")),
                };
                let mut edges = Vec::new();
                for parent in 0..n {
                    for c in 0..arity {
                        let child = parent as u64 * arity as u64 + 1 + c as u64;
                        if child < n as u64 {
                            edges.push((parent, child as u32));
                        }
                    }
                }
                Graph::new(n, edges, tag, None)
            }
            GraphSpec::Torus2d { side } => {
                if side < 3 {
                    return Err(invalid("torus2d", "side must be >= 3"));
                }
                let n = side * side;
                let mut edges = Vec::new();
                let at = |r: u32, c: u32| (r % side) * side + (c % side);
                for r in 0..side {
                    for c in 0..side {
                        edges.push((at(r, c), at(r, c + 1)));
                        edges.push((at(r, c), at(r + 1, c)));
                    }
                }
                Graph::new(n, edges, tag, None)
            }
            GraphSpec::Lollipop { n } => {
                if n < 6 || n % 3 != 0 {
                    return Err(invalid("lollipop", "n must be >= 6 and divisible by 3"));
                }
                let clique = 2 * n / 3;
                let mut edges = Vec::new();
                for u in 0..clique {
                    for v in u + 1..clique {
                        edges.push((u, v));
                    }
                }
                // Pendant path hangs off clique vertex 0.
                edges.push((0, clique));
                for p in clique..n - 1 {
                    edges.push((p, p + 1));
                }
                Graph::new(n, edges, tag, None)
            }
            GraphSpec::Prism { n } => {
                if n < 4 || n % 2 != 0 {
                    return Err(invalid("prism", "n must be even and >= 4"));
                }
                let half = n / 2;
                let mut edges = Vec::new();
                for side in 0..2 {
                    let base = side * half;
                    for u in 0..half {
                        for v in u + 1..half {
                            edges.push((base + u, base + v));
                        }
                    }
                }
                for u in 0..half {
                    edges.push((u, half + u));
                }
                Graph::new(n, edges, tag, None)
            }
            GraphSpec::Harary { k, n } => {
                if k < 2 || n <= k {
                    return Err(invalid("harary", "need 2 <= k < n"));
                }
                if k % 2 == 1 && n % 2 == 1 {
                    return Err(invalid("harary", "odd k requires even n"));
                }
                let mut edges = Vec::new();
                for offset in 1..=k / 2 {
                    for u in 0..n {
                        edges.push((u, (u + offset) % n));
                    }
                }
                if k % 2 == 1 {
                    for u in 0..n / 2 {
                        edges.push((u, u + n / 2));
                    }
                }
                Graph::new(n, edges, tag, None)
            }
            GraphSpec::HararyTorus { degree, n } => {
                let side = (n as f64).sqrt().round() as u32;
                if side < 3 || side * side != n {
                    return Err(invalid("harary-torus", "n must be a square of side >= 3"));
                }
                if degree < 4 {
                    return Err(invalid("harary-torus", "degree must be >= 4"));
                }
                // Split the circulant offsets between rows and columns; odd
                // degrees take the last unit from a half-turn row matching.
                let (half_turn, span) = if degree % 2 == 0 {
                    (false, degree / 2)
                } else {
                    if side % 2 != 0 {
                        return Err(invalid(
                            "harary-torus",
                            "odd degree requires an even torus side",
                        ));
                    }
                    (true, (degree - 1) / 2)
                };
                let row_span = span.div_ceil(2);
                let col_span = span - row_span;
                if col_span < 1 {
                    return Err(invalid("harary-torus", "degree too small to connect columns"));
                }
                if 2 * row_span >= side || 2 * col_span >= side {
                    return Err(invalid(
                        "harary-torus",
                        format!("degree {degree} too large for side {side}"),
                    ));
                }
                let at = |r: u32, c: u32| (r % side) * side + (c % side);
                let mut edges = Vec::new();
                for r in 0..side {
                    for c in 0..side {
                        for o in 1..=row_span {
                            edges.push((at(r, c), at(r, c + o)));
                        }
                        for o in 1..=col_span {
                            edges.push((at(r, c), at(r + o, c)));
                        }
                        if half_turn && c < side / 2 {
                            edges.push((at(r, c), at(r, c + side / 2)));
                        }
                    }
                }
                Graph::new(n, edges, tag, None)
            }
            GraphSpec::RandomRegular { degree, n } => generate_random_regular(degree, n, seed, &tag),
            GraphSpec::GeneralizedRandom { n, expected_degree } => {
                if n < 2 {
                    return Err(invalid("generalized-random", "n must be >= 2"));
                }
                if !(expected_degree > 0.0) {
                    return Err(invalid("generalized-random", "expected degree must be positive"));
                }
                let degrees = vec![expected_degree; n as usize];
                generate_generalized_random(&degrees, seed, &tag)
            }
        }
    }
}

/// Random near-uniform d-regular graph by incremental stub pairing with
/// restarts: propose uniform stub pairs, reject loops and repeats, restart
/// the pairing when no acceptable pair remains, and reject disconnected
/// results.
fn generate_random_regular(degree: u32, n: u32, seed: u64, tag: &str) -> Result<Graph, GraphError> {
    if degree == 0 || degree >= n {
        return Err(invalid("random-regular", "need 1 <= d < n"));
    }
    if (u64::from(degree) * u64::from(n)) % 2 != 0 {
        return Err(invalid("random-regular", "n * d must be even"));
    }
    for retry in 0..MAX_RETRIES {
        let mut rng = trial_rng(seed, u64::from(retry));
        let mut stubs: Vec<Vertex> = (0..n).flat_map(|v| std::iter::repeat(v).take(degree as usize)).collect();
        let mut present: HashSet<(Vertex, Vertex)> = HashSet::new();
        let mut edges: Vec<(Vertex, Vertex)> = Vec::with_capacity((n * degree / 2) as usize);
        let mut stuck = false;
        while !stubs.is_empty() && !stuck {
            let mut accepted = false;
            for _ in 0..200 {
                let i = rng.gen_range(0..stubs.len());
                let j = rng.gen_range(0..stubs.len());
                if i == j {
                    continue;
                }
                let (u, v) = (stubs[i], stubs[j]);
                if u == v || present.contains(&(u.min(v), u.max(v))) {
                    continue;
                }
                present.insert((u.min(v), u.max(v)));
                edges.push((u, v));
                let (hi, lo) = (i.max(j), i.min(j));
                stubs.swap_remove(hi);
                stubs.swap_remove(lo);
                accepted = true;
                break;
            }
            if !accepted {
                // Exhaustive check: any acceptable pair at all?
                let any = stubs.iter().enumerate().any(|(i, &u)| {
                    stubs[i + 1..]
                        .iter()
                        .any(|&v| u != v && !present.contains(&(u.min(v), u.max(v))))
                });
                if !any {
                    stuck = true;
                } // else: keep sampling, the acceptable pairs are just rare
            }
        }
        if stuck {
            continue;
        }
        match Graph::new(n, edges, tag, Some(seed)) {
            Ok(g) => return Ok(g),
            Err(GraphError::Validation(_)) => continue, // disconnected sample
            Err(e) => return Err(e),
        }
    }
    Err(GraphError::GenerationFailed {
        family: "random-regular".into(),
        retries: MAX_RETRIES,
        message: "no connected simple pairing found".into(),
    })
}

/// Independent-edge model: edge {i,j} with probability min(1, d_i d_j / sum d).
/// Disconnected samples are rejected and regenerated.
fn generate_generalized_random(degrees: &[f64], seed: u64, tag: &str) -> Result<Graph, GraphError> {
    let n = degrees.len() as u32;
    let total: f64 = degrees.iter().sum();
    for retry in 0..MAX_RETRIES {
        let mut rng = trial_rng(seed, u64::from(retry));
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let p = (degrees[i as usize] * degrees[j as usize] / total).min(1.0);
                if rng.gen::<f64>() < p {
                    edges.push((i, j));
                }
            }
        }
        match Graph::new(n, edges, tag, Some(seed)) {
            Ok(g) => return Ok(g),
            Err(GraphError::Validation(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(GraphError::GenerationFailed {
        family: "generalized-random".into(),
        retries: MAX_RETRIES,
        message: "all samples were disconnected".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen(s: &str, seed: u64) -> Graph {
        GraphSpec::parse(s).unwrap().generate(seed).unwrap()
    }

    #[test]
    fn hypercube_q3_shape() {
        let g = gen("hypercube:dim=3", 0);
        assert_eq!(g.n(), 8);
        assert_eq!(g.m(), 12);
        assert!(g.degrees().iter().all(|&d| d == 3));
    }

    #[test]
    fn lollipop_9_is_clique_6_plus_path_3() {
        let g = gen("lollipop:n=9", 0);
        assert_eq!(g.n(), 9);
        assert_eq!(g.m(), 15 + 3);
        // Clique vertices 1..6 have degree 5, junction 0 has 6, path interior 2, end 1.
        assert_eq!(g.degree(0), 6);
        assert_eq!(g.degree(5), 5);
        assert_eq!(g.degree(8), 1);
        assert_eq!(g.min_degree(), 1);
    }

    #[test]
    fn kary_tree_sizes() {
        let g = gen("kary-tree:k=2,h=3", 0);
        assert_eq!(g.n(), 15);
        assert_eq!(g.m(), 14);
        let g = gen("kary-tree:k=3,h=2", 0);
        assert_eq!(g.n(), 13);
    }

    #[test]
    fn torus_is_4_regular() {
        let g = gen("torus2d:side=4", 0);
        assert_eq!(g.n(), 16);
        assert!(g.degrees().iter().all(|&d| d == 4));
        assert_eq!(g.m(), 32);
    }

    #[test]
    fn prism_structure() {
        let g = gen("prism:n=8", 0);
        assert_eq!(g.n(), 8);
        assert!(g.degrees().iter().all(|&d| d == 4)); // K4 side (3) + matching (1)
    }

    #[test]
    fn harary_even_k_is_k_regular() {
        for &(k, n) in &[(4u32, 16u32), (6, 20), (4, 15)] {
            let g = gen(&format!("harary:k={k},n={n}"), 0);
            assert!(g.degrees().iter().all(|&d| d == k), "H_{{{k},{n}}} not regular");
        }
        // Odd k with even n: diametric edges give exact k-regularity.
        let g = gen("harary:k=5,n=16", 0);
        assert!(g.degrees().iter().all(|&d| d == 5));
    }

    #[test]
    fn harary_even_k_is_k_connected() {
        // Spot check: removing any k-1 vertices from H_{4,12} leaves it
        // connected.
        let g = gen("harary:k=4,n=12", 0);
        let n = g.n();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    let removed = [a, b, c];
                    let keep: Vec<Vertex> = (0..n).filter(|v| !removed.contains(v)).collect();
                    let start = keep[0];
                    let mut seen = vec![false; n as usize];
                    seen[start as usize] = true;
                    let mut stack = vec![start];
                    while let Some(u) = stack.pop() {
                        for &w in g.neighbors(u) {
                            if !removed.contains(&w) && !seen[w as usize] {
                                seen[w as usize] = true;
                                stack.push(w);
                            }
                        }
                    }
                    assert!(
                        keep.iter().all(|&v| seen[v as usize]),
                        "removing {removed:?} disconnects H_4,12"
                    );
                }
            }
        }
    }

    #[test]
    fn harary_torus_degrees() {
        let g = gen("harary-torus:d=4,n=64", 0);
        assert!(g.degrees().iter().all(|&d| d == 4));
        let g = gen("harary-torus:d=6,n=64", 0);
        assert!(g.degrees().iter().all(|&d| d == 6));
        let g = gen("harary-torus:d=5,n=64", 0); // odd degree, even side 8
        assert!(g.degrees().iter().all(|&d| d == 5));
        assert_eq!(g.min_degree(), 5);
        assert!(g.max_degree() <= 6);
    }

    #[test]
    fn random_regular_is_regular_connected_deterministic() {
        let g = gen("random-regular:d=3,n=32", 42);
        assert!(g.degrees().iter().all(|&d| d == 3));
        let g2 = gen("random-regular:d=3,n=32", 42);
        assert_eq!(g.edges(), g2.edges());
        let g3 = gen("random-regular:d=3,n=32", 43);
        assert_ne!(g.edges(), g3.edges());
    }

    #[test]
    fn random_regular_d8_n128_generates() {
        let g = gen("random-regular:d=8,n=128", 7);
        assert!(g.degrees().iter().all(|&d| d == 8));
    }

    #[test]
    fn generalized_random_mean_edge_count_matches_probability_sum() {
        // Oracle: sum of edge probabilities over pairs. Uniform d=4, n=50.
        let spec = GraphSpec::parse("generalized-random:n=50,d=4").unwrap();
        let n = 50u32;
        let p = 4.0 * 4.0 / (4.0 * n as f64);
        let expected = (n as f64) * (n as f64 - 1.0) / 2.0 * p;
        let mut total = 0u64;
        let seeds = 200u64;
        for s in 0..seeds {
            total += spec.generate(1000 + s).unwrap().m();
        }
        let mean = total as f64 / seeds as f64;
        // Connectivity rejection biases the count slightly upward; the 5%
        // window absorbs both that and sampling noise.
        assert!(
            (mean - expected).abs() <= 0.05 * expected,
            "mean edge count {mean:.2} not within 5% of {expected:.2}"
        );
    }

    #[test]
    fn deterministic_regeneration_bit_identical() {
        for spec in ["cycle:n=17", "random-regular:d=4,n=24", "generalized-random:n=30,d=5"] {
            let a = gen(spec, 99);
            let b = gen(spec, 99);
            assert_eq!(a.to_edge_list(), b.to_edge_list(), "{spec} not deterministic");
        }
    }

    #[test]
    fn invalid_params_are_rejected() {
        for spec in [
            "path:n=1",
            "cycle:n=2",
            "hypercube:dim=0",
            "lollipop:n=10",
            "prism:n=7",
            "harary:k=5,n=15",
            "harary-torus:d=3,n=16",
            "harary-torus:d=4,n=17",
            "random-regular:d=3,n=7",
            "torus2d:side=2",
        ] {
            let s = GraphSpec::parse(spec).unwrap();
            assert!(
                matches!(s.generate(0), Err(GraphError::InvalidParams { .. })),
                "{spec} should be invalid"
            );
        }
    }

    #[test]
    fn parse_rejects_unknown_family_and_garbage() {
        assert!(GraphSpec::parse("moebius:n=8").is_err());
        assert!(GraphSpec::parse("cycle:n").is_err());
        assert!(GraphSpec::parse("cycle:n=abc").is_err());
        assert!(GraphSpec::parse("cycle").is_err()); // missing n
    }

    #[test]
    fn display_round_trips_through_parse() {
        for spec in ["cycle:n=17", "kary-tree:k=3,h=2", "harary-torus:d=4,n=16"] {
            let s = GraphSpec::parse(spec).unwrap();
            assert_eq!(GraphSpec::parse(&s.to_string()).unwrap(), s);
        }
    }
}
