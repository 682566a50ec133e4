//! Hitting times, commute times and effective resistances by LU solves.
//!
//! Hitting times come from the boundary-value linear system on the
//! transition kernel; resistances come from grounded Laplacian solves. The
//! two never share a code path, so the commute = 2|E| * resistance identity
//! is checked across genuinely independent routes.

use nalgebra::{DMatrix, DVector};

use crate::graph::{Graph, Vertex};

use super::{check_size, ExactError, TransitionKernel};

impl TransitionKernel<'_> {
    /// Expected steps to first reach `target` from every start, h(target) = 0.
    ///
    /// Solves h(u) = 1 + sum_w P(u,w) h(w) for u != target by LU with partial
    /// pivoting; the max-norm residual is asserted below 1e-8 * n.
    pub fn hitting_times_to(&self, target: Vertex) -> Result<DVector<f64>, ExactError> {
        let n = self.graph().n() as usize;
        let t = target as usize;
        // A = I - P with row t replaced by the boundary condition h(t) = 0.
        let mut a = DMatrix::<f64>::identity(n, n) - self.matrix();
        let mut b = DVector::from_element(n, 1.0);
        for j in 0..n {
            a[(t, j)] = 0.0;
        }
        a[(t, t)] = 1.0;
        b[t] = 0.0;

        let lu = a.clone().lu();
        let h = lu
            .solve(&b)
            .ok_or_else(|| ExactError::SolveFailed(format!("hitting system to {target} is singular")))?;
        let residual = (&a * &h - &b).amax();
        assert!(
            residual < 1e-8 * n as f64,
            "hitting-time residual {residual:.3e} too large"
        );
        Ok(h)
    }

    /// Commute time C(u,v) = H(u,v) + H(v,u) from two hitting solves.
    pub fn commute_time(&self, u: Vertex, v: Vertex) -> Result<f64, ExactError> {
        assert_ne!(u, v, "commute time needs distinct vertices");
        let to_v = self.hitting_times_to(v)?;
        let to_u = self.hitting_times_to(u)?;
        Ok(to_v[u as usize] + to_u[v as usize])
    }
}

/// Effective resistance between `u` and `v` with unit resistances per edge:
/// ground the Laplacian at `v`, solve L' phi = e_u, and read phi(u).
pub fn effective_resistance(g: &Graph, u: Vertex, v: Vertex) -> Result<f64, ExactError> {
    assert_ne!(u, v, "effective resistance needs distinct vertices");
    check_size(g)?;
    let lu = grounded_laplacian(g, v).lu();
    let n = g.n() as usize;
    let row = grounded_index(u, v);
    let mut b = DVector::zeros(n - 1);
    b[row] = 1.0;
    let phi = lu
        .solve(&b)
        .ok_or_else(|| ExactError::SolveFailed("grounded Laplacian is singular".into()))?;
    Ok(phi[row])
}

/// All effective resistances R(u, v) for a fixed `v`, one factorization.
pub fn resistances_to(g: &Graph, v: Vertex) -> Result<Vec<f64>, ExactError> {
    check_size(g)?;
    let inv = grounded_inverse(g, v)?;
    let mut out = vec![0.0; g.n() as usize];
    for u in g.vertices() {
        if u != v {
            let i = grounded_index(u, v);
            out[u as usize] = inv[(i, i)];
        }
    }
    Ok(out)
}

/// All-pairs effective resistances from a single Laplacian inversion:
/// R(u,v) = M_uu + M_vv - 2 M_uv with M grounded at vertex 0.
pub fn resistance_matrix(g: &Graph) -> Result<DMatrix<f64>, ExactError> {
    check_size(g)?;
    let inv = grounded_inverse(g, 0)?;
    let n = g.n() as usize;
    let mut r = DMatrix::zeros(n, n);
    for u in g.vertices() {
        for v in u + 1..g.n() {
            let val = if u == 0 {
                let j = grounded_index(v, 0);
                inv[(j, j)]
            } else {
                let i = grounded_index(u, 0);
                let j = grounded_index(v, 0);
                inv[(i, i)] + inv[(j, j)] - 2.0 * inv[(i, j)]
            };
            r[(u as usize, v as usize)] = val;
            r[(v as usize, u as usize)] = val;
        }
    }
    Ok(r)
}

/// Maximum commute time over all vertex pairs, via 2|E| * max resistance.
pub fn max_commute(g: &Graph) -> Result<(f64, (Vertex, Vertex)), ExactError> {
    let r = resistance_matrix(g)?;
    let mut best = (f64::NEG_INFINITY, (0, 0));
    for u in g.vertices() {
        for v in u + 1..g.n() {
            if r[(u as usize, v as usize)] > best.0 {
                best = (r[(u as usize, v as usize)], (u, v));
            }
        }
    }
    let (res, pair) = best;
    Ok((2.0 * g.m() as f64 * res, pair))
}

fn grounded_index(u: Vertex, grounded: Vertex) -> usize {
    if u < grounded {
        u as usize
    } else {
        u as usize - 1
    }
}

/// Laplacian with the row and column of `grounded` deleted.
fn grounded_laplacian(g: &Graph, grounded: Vertex) -> DMatrix<f64> {
    let n = g.n() as usize;
    let mut l = DMatrix::zeros(n - 1, n - 1);
    for u in g.vertices() {
        if u == grounded {
            continue;
        }
        let i = grounded_index(u, grounded);
        l[(i, i)] = f64::from(g.degree(u));
        for &w in g.neighbors(u) {
            if w != grounded {
                l[(i, grounded_index(w, grounded))] = -1.0;
            }
        }
    }
    l
}

fn grounded_inverse(g: &Graph, grounded: Vertex) -> Result<DMatrix<f64>, ExactError> {
    grounded_laplacian(g, grounded)
        .try_inverse()
        .ok_or_else(|| ExactError::SolveFailed("grounded Laplacian is singular".into()))
}
