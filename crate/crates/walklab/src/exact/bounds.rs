//! Named bound table: the closed-form quantities the relation checks
//! compare against, each labeled with the inequality it belongs to.

use serde::{Deserialize, Serialize};

use crate::graph::{Graph, Vertex};

use super::{max_commute, ExactError, TransitionKernel};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundEntry {
    pub bound_name: String,
    pub theorem_tag: String,
    pub value: f64,
}

fn entry(name: impl Into<String>, tag: &str, value: f64) -> BoundEntry {
    BoundEntry { bound_name: name.into(), theorem_tag: tag.to_string(), value }
}

/// Compute the standard bound table for a graph: coupon-collector and cubic
/// cover bounds, the spectral cover bound, the distance-squared commute lower
/// bound, Nash-Williams sums for the requested pairs, and the cover/commute
/// sandwich ends.
pub fn bound_table(
    g: &Graph,
    kernel: &TransitionKernel<'_>,
    nash_williams_pairs: &[(Vertex, Vertex)],
) -> Result<Vec<BoundEntry>, ExactError> {
    let n = f64::from(g.n());
    let two_m = 2.0 * g.m() as f64;
    let mut table = vec![
        entry("n-ln-n", "thm3", n * n.ln()),
        entry("four-27-n-cubed", "thm3", 4.0 / 27.0 * n.powi(3)),
    ];

    let spectral = kernel.spectral();
    table.push(entry(
        "inv-gap-n-ln-n",
        "thm4",
        spectral.inverse_gap() * n * n.ln(),
    ));

    // Max of 2 dist(u,v)^2: exact via all-pairs BFS (cheap at dense-solve sizes).
    let max_dist = g.vertices().map(|s| g.eccentricity(s).0).max().unwrap_or(0);
    table.push(entry(
        "max-2-dist-squared",
        "cor12",
        2.0 * f64::from(max_dist) * f64::from(max_dist),
    ));

    for &(u, v) in nash_williams_pairs {
        let fam = g.layered_cutsets(u, v);
        table.push(entry(
            format!("nash-williams-2m:{u}-{v}"),
            "prop11",
            two_m * fam.inverse_size_sum(),
        ));
    }

    let (max_c, _) = max_commute(g)?;
    table.push(entry("half-max-commute", "sandwich", 0.5 * max_c));
    table.push(entry(
        "e3-max-commute-ln-n-plus-n",
        "sandwich",
        3.0f64.exp() * max_c * n.ln() + n,
    ));
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphSpec;

    #[test]
    fn k2_table_has_n_ln_n() {
        let g = GraphSpec::parse("complete:n=2").unwrap().generate(0).unwrap();
        let k = TransitionKernel::lazy(&g).unwrap();
        let table = bound_table(&g, &k, &[]).unwrap();
        let e = table.iter().find(|e| e.bound_name == "n-ln-n").unwrap();
        assert!((e.value - 2.0 * 2.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn nash_williams_is_tight_on_paths() {
        // P4 endpoints: three unit cutsets, sum of inverses 3 = exact resistance.
        let g = GraphSpec::parse("path:n=4").unwrap().generate(0).unwrap();
        let k = TransitionKernel::plain(&g).unwrap();
        let table = bound_table(&g, &k, &[(0, 3)]).unwrap();
        let nw = table.iter().find(|e| e.bound_name.starts_with("nash-williams")).unwrap();
        // 2m * 3 = 18 equals the commute time 2 * 3 * 3.
        assert!((nw.value - 18.0).abs() < 1e-9);
        let c = k.commute_time(0, 3).unwrap();
        assert!((nw.value - c).abs() < 1e-8);
    }

    #[test]
    fn nash_williams_on_antipodal_cycle_matches_parallel_paths() {
        // C8 antipodal: layers of size 2 except the last; the parallel-path
        // formula gives resistance a*b/n = 4*4/8 = 2.
        let g = GraphSpec::parse("cycle:n=8").unwrap().generate(0).unwrap();
        let fam = g.layered_cutsets(0, 4);
        assert!((fam.inverse_size_sum() - 2.0).abs() < 1e-12);
        let r = crate::exact::effective_resistance(&g, 0, 4).unwrap();
        assert!((r - 2.0).abs() < 1e-10);
    }
}
