//! Exact walk quantities via dense linear algebra: transition kernels,
//! stationary distributions, hitting/commute times from linear solves,
//! effective resistance from Laplacian solves, spectra and mixing times.
//!
//! Everything here is double-precision dense and supported to n <= 2048;
//! larger graphs are refused rather than silently degraded.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::graph::{Graph, Vertex};

mod bounds;
mod solve;
mod spectral;

pub use bounds::{bound_table, BoundEntry};
pub use solve::{effective_resistance, max_commute, resistance_matrix, resistances_to};
pub use spectral::{MixingResult, SpectralData};

/// Dense solves above this size are refused.
pub const MAX_EXACT_N: u32 = 2048;

#[derive(Debug, Error)]
pub enum ExactError {
    #[error("graph has {n} vertices; exact computations support n <= {limit}")]
    TooLarge { n: u32, limit: u32 },
    #[error("linear solve failed: {0}")]
    SolveFailed(String),
    #[error("mixing iteration from start {start} exceeded the step cap {cap} (l1 distance {l1:.3e} after {steps} steps)")]
    MixingCapExceeded { start: Vertex, cap: u64, steps: u64, l1: f64 },
    #[error("mixing tolerance eps must lie in (0, 2), got {0}")]
    BadEpsilon(f64),
}

fn check_size(g: &Graph) -> Result<(), ExactError> {
    if g.n() > MAX_EXACT_N {
        Err(ExactError::TooLarge { n: g.n(), limit: MAX_EXACT_N })
    } else {
        Ok(())
    }
}

/// Row-stochastic transition kernel of the random walk on a graph, either the
/// plain kernel P (uniform over neighbors) or the lazy kernel I/2 + P/2.
pub struct TransitionKernel<'g> {
    graph: &'g Graph,
    lazy: bool,
    matrix: DMatrix<f64>,
    pi: DVector<f64>,
}

impl<'g> TransitionKernel<'g> {
    pub fn plain(graph: &'g Graph) -> Result<Self, ExactError> {
        Self::build(graph, false)
    }

    pub fn lazy(graph: &'g Graph) -> Result<Self, ExactError> {
        Self::build(graph, true)
    }

    fn build(graph: &'g Graph, lazy: bool) -> Result<Self, ExactError> {
        check_size(graph)?;
        let n = graph.n() as usize;
        let mut matrix = DMatrix::zeros(n, n);
        for v in graph.vertices() {
            let row = v as usize;
            let step = 1.0 / f64::from(graph.degree(v));
            let weight = if lazy { 0.5 * step } else { step };
            for &w in graph.neighbors(v) {
                matrix[(row, w as usize)] = weight;
            }
            if lazy {
                matrix[(row, row)] = 0.5;
            }
        }
        let two_m = 2.0 * graph.m() as f64;
        let pi = DVector::from_iterator(
            n,
            graph.degrees().iter().map(|&d| f64::from(d) / two_m),
        );

        let kernel = TransitionKernel { graph, lazy, matrix, pi };
        kernel.assert_invariants();
        Ok(kernel)
    }

    /// Row-stochasticity within 1e-12 and stationarity pi P = pi within 1e-10.
    fn assert_invariants(&self) {
        for (i, row) in self.matrix.row_iter().enumerate() {
            let sum: f64 = row.iter().sum();
            assert!((sum - 1.0).abs() <= 1e-12, "row {i} sums to {sum}, not 1");
        }
        let image = self.matrix.transpose() * &self.pi;
        let residual = (&image - &self.pi).amax();
        assert!(residual <= 1e-10, "pi is not stationary: residual {residual:.3e}");
    }

    pub fn graph(&self) -> &Graph {
        self.graph
    }

    pub fn is_lazy(&self) -> bool {
        self.lazy
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Stationary distribution, pi(v) = deg(v) / (2|E|).
    pub fn stationary(&self) -> &DVector<f64> {
        &self.pi
    }

    /// Expected return time H(v, v) = 1 / pi(v) (Kac's formula, which holds
    /// for the lazy kernel as well since pi is unchanged).
    pub fn return_time(&self, v: Vertex) -> f64 {
        1.0 / self.pi[v as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphSpec;

    fn gen(s: &str) -> Graph {
        GraphSpec::parse(s).unwrap().generate(0).unwrap()
    }

    #[test]
    fn stationary_on_k3_is_uniform() {
        let g = gen("complete:n=3");
        let k = TransitionKernel::plain(&g).unwrap();
        for v in 0..3 {
            assert!((k.stationary()[v] - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn stationary_on_p3_is_degree_proportional() {
        let g = gen("path:n=3");
        let k = TransitionKernel::plain(&g).unwrap();
        let pi = k.stationary();
        assert!((pi[0] - 0.25).abs() < 1e-15);
        assert!((pi[1] - 0.5).abs() < 1e-15);
        assert!((pi[2] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn stationary_sums_to_one_and_is_fixed_point_on_lollipop() {
        let g = gen("lollipop:n=9");
        for k in [TransitionKernel::plain(&g).unwrap(), TransitionKernel::lazy(&g).unwrap()] {
            let pi = k.stationary();
            assert!((pi.sum() - 1.0).abs() < 1e-12);
            let residual = (k.matrix().transpose() * pi - pi).amax();
            assert!(residual < 1e-12, "fixed-point residual {residual:.3e}");
        }
    }

    #[test]
    fn lazy_kernel_has_half_self_loop() {
        let g = gen("cycle:n=4");
        let k = TransitionKernel::lazy(&g).unwrap();
        assert!((k.matrix()[(0, 0)] - 0.5).abs() < 1e-15);
        assert!((k.matrix()[(0, 1)] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn return_time_is_inverse_stationary() {
        let g = gen("path:n=3");
        let k = TransitionKernel::plain(&g).unwrap();
        assert!((k.return_time(1) - 2.0).abs() < 1e-12);
        assert!((k.return_time(0) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn oversized_graph_is_refused() {
        let g = GraphSpec::parse("harary:k=4,n=2500").unwrap().generate(0).unwrap();
        assert!(matches!(
            TransitionKernel::plain(&g),
            Err(ExactError::TooLarge { .. })
        ));
    }
}
