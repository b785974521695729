//! Two-point effective conductance via a grounded Laplacian solve.

use std::collections::VecDeque;

use super::Graph;
use crate::error::{Error, Result};

const RELATIVE_RESIDUAL: f64 = 1e-10;

/// Electrical conductance between `s` and `t`, edge weights taken as branch
/// conductances (unweighted graphs use unit conductances).
///
/// Injects a unit current at `s` with `t` grounded and solves the reduced
/// Laplacian system of `s`'s component by Jacobi-preconditioned conjugate
/// gradients. Pairs in different components have conductance zero.
pub fn effective_conductance(g: &Graph, s: usize, t: usize) -> Result<f64> {
    let n = g.node_count();
    if s >= n || t >= n {
        return Err(Error::param("s/t", format!("node out of range for {n} nodes")));
    }
    if s == t {
        return Err(Error::param("s/t", "source equals target"));
    }

    // Local index for every node of s's component except t.
    let mut local = vec![usize::MAX; n];
    let mut nodes = Vec::new();
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([s]);
    seen[s] = true;
    let mut reached_t = false;
    while let Some(v) = queue.pop_front() {
        if v == t {
            reached_t = true;
        } else {
            local[v] = nodes.len();
            nodes.push(v);
        }
        for &w in g.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    if !reached_t {
        return Ok(0.0);
    }

    let system = GroundedLaplacian::new(g, &nodes, &local);
    let mut rhs = vec![0.0; nodes.len()];
    rhs[local[s]] = 1.0;
    let potential = system.solve(&rhs);
    Ok(1.0 / potential[local[s]])
}

struct GroundedLaplacian<'a> {
    g: &'a Graph,
    nodes: &'a [usize],
    local: &'a [usize],
    diag: Vec<f64>,
}

impl<'a> GroundedLaplacian<'a> {
    fn new(g: &'a Graph, nodes: &'a [usize], local: &'a [usize]) -> Self {
        let diag = nodes
            .iter()
            .map(|&v| g.incident_edges(v).iter().map(|&e| g.weight(e)).sum())
            .collect();
        GroundedLaplacian { g, nodes, local, diag }
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (i, &v) in self.nodes.iter().enumerate() {
            let mut acc = self.diag[i] * x[i];
            for (&w, &e) in self.g.neighbors(v).iter().zip(self.g.incident_edges(v)) {
                let j = self.local[w];
                if j != usize::MAX {
                    acc -= self.g.weight(e) * x[j];
                }
            }
            out[i] = acc;
        }
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let m = b.len();
        let mut x = vec![0.0; m];
        let mut r = b.to_vec();
        let mut z: Vec<f64> = r.iter().zip(&self.diag).map(|(r, d)| r / d).collect();
        let mut p = z.clone();
        let mut ap = vec![0.0; m];
        let b_norm = norm(b);
        let mut rz = dot(&r, &z);
        for _ in 0..(10 * m + 100) {
            if norm(&r) <= RELATIVE_RESIDUAL * b_norm {
                break;
            }
            self.apply(&p, &mut ap);
            let alpha = rz / dot(&p, &ap);
            for i in 0..m {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            for i in 0..m {
                z[i] = r[i] / self.diag[i];
            }
            let rz_next = dot(&r, &z);
            let beta = rz_next / rz;
            rz = rz_next;
            for i in 0..m {
                p[i] = z[i] + beta * p[i];
            }
        }
        x
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn series_and_parallel() {
        let w = 2.5;
        let single = Graph::weighted(2, [(0, 1, w)]).unwrap();
        assert_relative_eq!(effective_conductance(&single, 0, 1).unwrap(), w, max_relative = 1e-9);
        let series = Graph::weighted(3, [(0, 1, w), (1, 2, w)]).unwrap();
        assert_relative_eq!(effective_conductance(&series, 0, 2).unwrap(), w / 2.0, max_relative = 1e-9);
        // Two parallel branches realised as paths through distinct midpoints.
        let parallel = Graph::weighted(4, [(0, 1, 2.0 * w), (1, 3, 2.0 * w), (0, 2, 2.0 * w), (2, 3, 2.0 * w)])
            .unwrap();
        assert_relative_eq!(effective_conductance(&parallel, 0, 3).unwrap(), 2.0 * w, max_relative = 1e-9);
    }

    #[test]
    fn disconnected_pair_is_zero() {
        let g = Graph::weighted(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert_eq!(effective_conductance(&g, 0, 3).unwrap(), 0.0);
    }

    #[test]
    fn rejects_equal_endpoints() {
        let g = Graph::weighted(2, [(0, 1, 1.0)]).unwrap();
        assert!(effective_conductance(&g, 1, 1).is_err());
        assert!(effective_conductance(&g, 0, 2).is_err());
    }
}
