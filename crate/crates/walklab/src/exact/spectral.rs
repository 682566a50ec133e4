//! Spectrum of the symmetrized kernel and deterministic mixing times.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::graph::Vertex;

use super::{ExactError, TransitionKernel};

/// Real spectrum of D^{1/2} P D^{-1/2} (similar to P, hence the walk's
/// spectrum), sorted descending, with the spectral gap 1 - lambda_2.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralData {
    pub eigenvalues: Vec<f64>,
    pub gap: f64,
    /// Plain kernel on a bipartite graph: lambda_n = -1 and powers of P do
    /// not converge; callers wanting mixing should use the lazy kernel.
    pub periodic: bool,
}

impl SpectralData {
    pub fn lambda2(&self) -> f64 {
        self.eigenvalues[1]
    }

    pub fn lambda_min(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }

    /// (1 - lambda_2)^{-1}, the quantity tabulated per graph family.
    pub fn inverse_gap(&self) -> f64 {
        1.0 / self.gap
    }
}

/// Mixing time result. `steps` is None exactly when the kernel is periodic
/// (plain kernel, bipartite graph) and no finite mixing time exists.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MixingResult {
    pub steps: Option<u64>,
    pub eps: f64,
    /// False when the max ran over a documented start sample rather than all
    /// starts, making the value a lower bound.
    pub exact_starts: bool,
    pub periodic: bool,
}

const MIXING_EXHAUSTIVE_LIMIT: u32 = 512;

impl TransitionKernel<'_> {
    /// Full spectrum of the symmetrized kernel, eigenvalues descending.
    pub fn spectral(&self) -> SpectralData {
        let g = self.graph();
        let n = g.n() as usize;
        let mut s = DMatrix::<f64>::zeros(n, n);
        for u in g.vertices() {
            for &w in g.neighbors(u) {
                let val = 1.0 / (f64::from(g.degree(u)) * f64::from(g.degree(w))).sqrt();
                s[(u as usize, w as usize)] = if self.is_lazy() { 0.5 * val } else { val };
            }
            if self.is_lazy() {
                s[(u as usize, u as usize)] = 0.5;
            }
        }
        let mut eigenvalues: Vec<f64> = s.symmetric_eigenvalues().iter().copied().collect();
        eigenvalues.sort_by(|a, b| b.total_cmp(a));
        assert!(
            (eigenvalues[0] - 1.0).abs() <= 1e-9,
            "leading eigenvalue {} differs from 1",
            eigenvalues[0]
        );
        let gap = 1.0 - eigenvalues[1];
        let periodic = !self.is_lazy() && g.is_bipartite();
        if !periodic {
            let min = *eigenvalues.last().unwrap();
            assert!(min > -1.0 - 1e-9, "lambda_n = {min} for an aperiodic kernel");
        }
        SpectralData { eigenvalues, gap, periodic }
    }

    /// First step t at which || p_s(t) - pi ||_1 <= eps, maximized over
    /// starts. All starts are scanned for n <= 512; above that a documented
    /// deterministic sample of >= 32 starts is used and the result flagged
    /// as a lower bound. The per-start iteration cap is 64 n^2.
    pub fn mixing_time(&self, eps: f64) -> Result<MixingResult, ExactError> {
        if !(eps > 0.0 && eps < 2.0) {
            return Err(ExactError::BadEpsilon(eps));
        }
        let g = self.graph();
        if !self.is_lazy() && g.is_bipartite() {
            return Ok(MixingResult { steps: None, eps, exact_starts: true, periodic: true });
        }
        let n = g.n();
        let (starts, exact_starts): (Vec<Vertex>, bool) = if n <= MIXING_EXHAUSTIVE_LIMIT {
            (g.vertices().collect(), true)
        } else {
            // Documented sample: min-degree vertex, the far end of a double
            // BFS sweep, and an even stride over the vertex range.
            let min_deg = g.vertices().min_by_key(|&v| (g.degree(v), v)).unwrap();
            let (_, far) = g.eccentricity(min_deg);
            let (_, far2) = g.eccentricity(far);
            let mut starts = vec![min_deg, far, far2];
            let stride = (n / 32).max(1);
            let mut v = 0;
            while v < n {
                starts.push(v);
                v += stride;
            }
            starts.sort_unstable();
            starts.dedup();
            (starts, false)
        };

        let cap = 64 * u64::from(n) * u64::from(n);
        let mut worst = 0u64;
        for s in starts {
            let t = self.mixing_from(s, eps, cap)?;
            worst = worst.max(t);
        }
        Ok(MixingResult { steps: Some(worst), eps, exact_starts, periodic: false })
    }

    fn mixing_from(&self, s: Vertex, eps: f64, cap: u64) -> Result<u64, ExactError> {
        let g = self.graph();
        let n = g.n() as usize;
        let pi = self.stationary();
        let mut p = vec![0.0f64; n];
        p[s as usize] = 1.0;
        let mut next = vec![0.0f64; n];
        let mut t = 0u64;
        loop {
            let l1: f64 = p.iter().zip(pi.iter()).map(|(a, b)| (a - b).abs()).sum();
            if l1 <= eps {
                return Ok(t);
            }
            if t >= cap {
                return Err(ExactError::MixingCapExceeded { start: s, cap, steps: t, l1 });
            }
            // One step of p <- p P through the adjacency lists.
            next.iter_mut().for_each(|x| *x = 0.0);
            if self.is_lazy() {
                for u in 0..n {
                    let share = 0.5 * p[u] / f64::from(g.degree(u as Vertex));
                    next[u] += 0.5 * p[u];
                    for &w in g.neighbors(u as Vertex) {
                        next[w as usize] += share;
                    }
                }
            } else {
                for u in 0..n {
                    let share = p[u] / f64::from(g.degree(u as Vertex));
                    for &w in g.neighbors(u as Vertex) {
                        next[w as usize] += share;
                    }
                }
            }
            std::mem::swap(&mut p, &mut next);
            t += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphSpec;
    use crate::Graph;

    fn gen(s: &str) -> Graph {
        GraphSpec::parse(s).unwrap().generate(0).unwrap()
    }

    #[test]
    fn k4_plain_spectrum_matches_closed_form() {
        // K_n: lambda_2 = -1/(n-1), so the "gap" 1 - lambda_2 = n/(n-1).
        let g = gen("complete:n=4");
        let spec = TransitionKernel::plain(&g).unwrap().spectral();
        assert!((spec.lambda2() + 1.0 / 3.0).abs() < 1e-12);
        assert!((spec.gap - 4.0 / 3.0).abs() < 1e-12);
        assert!(!spec.periodic);
    }

    #[test]
    fn hypercube_plain_gap_is_2_over_d() {
        for d in [3u32, 4, 6] {
            let g = gen(&format!("hypercube:dim={d}"));
            let spec = TransitionKernel::plain(&g).unwrap().spectral();
            assert!(
                (spec.gap - 2.0 / f64::from(d)).abs() < 1e-9,
                "Q_{d} gap {} vs {}",
                spec.gap,
                2.0 / f64::from(d)
            );
            assert!(spec.periodic); // hypercubes are bipartite
            assert!((spec.lambda_min() + 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn lazy_cycle_gap_matches_cosine_formula() {
        for n in [8u32, 12, 16] {
            let g = gen(&format!("cycle:n={n}"));
            let spec = TransitionKernel::lazy(&g).unwrap().spectral();
            let expect = 0.5 * (1.0 - (2.0 * std::f64::consts::PI / f64::from(n)).cos());
            assert!((spec.gap - expect).abs() < 1e-10, "C_{n}");
        }
    }

    #[test]
    fn mixing_on_lazy_k2_is_one_step() {
        let g = gen("complete:n=2");
        let k = TransitionKernel::lazy(&g).unwrap();
        let m = k.mixing_time(0.5).unwrap();
        assert_eq!(m.steps, Some(1));
        assert!(m.exact_starts);
    }

    #[test]
    fn mixing_on_plain_complete_graph_is_one_step() {
        // After one step the distribution is uniform over the other n-1
        // vertices: L1 distance 2/n <= 1/e for n >= 6.
        let g = gen("complete:n=8");
        let k = TransitionKernel::plain(&g).unwrap();
        let m = k.mixing_time((-1.0f64).exp()).unwrap();
        assert_eq!(m.steps, Some(1));
    }

    #[test]
    fn mixing_on_plain_bipartite_graph_is_flagged_periodic() {
        let g = gen("cycle:n=8");
        let k = TransitionKernel::plain(&g).unwrap();
        let m = k.mixing_time(0.25).unwrap();
        assert!(m.periodic);
        assert_eq!(m.steps, None);
        // The lazy kernel mixes fine.
        let lazy = TransitionKernel::lazy(&g).unwrap();
        let m = lazy.mixing_time(0.25).unwrap();
        assert!(!m.periodic);
        assert!(m.steps.unwrap() > 0);
    }

    #[test]
    fn mixing_beyond_the_scan_limit_is_a_flagged_sampled_bound() {
        // Complete graphs mix in one step, so a large instance exercises the
        // sampled-start path cheaply.
        let g = gen("complete:n=600");
        let k = TransitionKernel::plain(&g).unwrap();
        let m = k.mixing_time((-1.0f64).exp()).unwrap();
        assert!(!m.exact_starts);
        assert_eq!(m.steps, Some(1));
    }

    #[test]
    fn bad_epsilon_is_rejected() {
        let g = gen("complete:n=3");
        let k = TransitionKernel::plain(&g).unwrap();
        assert!(matches!(k.mixing_time(0.0), Err(ExactError::BadEpsilon(_))));
        assert!(matches!(k.mixing_time(2.5), Err(ExactError::BadEpsilon(_))));
    }

    #[test]
    fn sinclair_upper_bound_with_factor_4_holds_on_lazy_kernels() {
        let eps = (-1.0f64).exp();
        for spec in ["path:n=16", "cycle:n=16", "complete:n=16", "lollipop:n=15", "prism:n=16"] {
            let g = gen(spec);
            let k = TransitionKernel::lazy(&g).unwrap();
            let mix = k.mixing_time(eps).unwrap().steps.unwrap() as f64;
            let sd = k.spectral();
            let bound = 4.0 / sd.gap * ((f64::from(g.n())).ln() + (1.0 / eps).ln());
            assert!(mix <= bound, "{spec}: mix {mix} > {bound}");
        }
    }
}
