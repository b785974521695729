//! Undirected simple graphs with optional positive edge conductances.

mod conductance;
mod current;
mod generate;
pub mod io;
mod metrics;

pub use conductance::effective_conductance;
pub use current::current_flow_betweenness;
pub use generate::{
    generate, generate_with_report, sample_degree_sequence, DegreeDistribution, DegreeSequence,
    GenerationReport, GeneratorKind, GeneratorSpec,
};
pub use metrics::{
    average_path_length, betweenness, component_labels, degree_stats, giant_component,
    giant_component_masked, path_betweenness, DegreeStats, DEFAULT_PAIR_BUDGET,
};
pub use generate::configuration_model;
pub(crate) use metrics::{average_path_length_masked, giant_size_masked};

use crate::error::{Error, Result};

/// Immutable undirected simple graph.
///
/// Edges are stored canonically as `(u, v)` with `u < v`, sorted. When weights
/// are present they are aligned with the edge list and strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    weights: Option<Vec<f64>>,
    adj: Vec<Vec<usize>>,
    adj_edge: Vec<Vec<usize>>,
}

impl Graph {
    /// Edgeless graph on `n` nodes.
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            edges: Vec::new(),
            weights: None,
            adj: vec![Vec::new(); n],
            adj_edge: vec![Vec::new(); n],
        }
    }

    /// Builds a graph, rejecting self-loops, duplicate edges and out-of-range nodes.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut canon = Vec::new();
        for (u, v) in edges {
            canon.push(check_edge(n, u, v)?);
        }
        canon.sort_unstable();
        if let Some(w) = canon.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::param(
                "edges",
                format!("duplicate edge {{{}, {}}}", w[0].0, w[0].1),
            ));
        }
        Ok(Self::from_sorted(n, canon, None))
    }

    /// Builds a weighted graph; every weight must be finite and strictly positive.
    pub fn weighted(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut canon = Vec::new();
        for (u, v, w) in edges {
            check_weight(w)?;
            let (a, b) = check_edge(n, u, v)?;
            canon.push((a, b, w));
        }
        canon.sort_unstable_by_key(|x| (x.0, x.1));
        if let Some(w) = canon.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::param(
                "edges",
                format!("duplicate edge {{{}, {}}}", w[0].0, w[0].1),
            ));
        }
        let weights = canon.iter().map(|e| e.2).collect();
        let edges = canon.into_iter().map(|e| (e.0, e.1)).collect();
        Ok(Self::from_sorted(n, edges, Some(weights)))
    }

    /// `edges` must already be canonical, sorted and duplicate-free.
    pub(crate) fn from_sorted(n: usize, edges: Vec<(usize, usize)>, weights: Option<Vec<f64>>) -> Self {
        let mut adj = vec![Vec::new(); n];
        let mut adj_edge = vec![Vec::new(); n];
        for (id, &(u, v)) in edges.iter().enumerate() {
            adj[u].push(v);
            adj_edge[u].push(id);
            adj[v].push(u);
            adj_edge[v].push(id);
        }
        // Sorted edges give sorted neighbor lists for the `u` side only; fix up.
        for v in 0..n {
            if adj[v].windows(2).any(|w| w[0] > w[1]) {
                let mut pairs: Vec<_> = adj[v].iter().copied().zip(adj_edge[v].iter().copied()).collect();
                pairs.sort_unstable();
                adj[v] = pairs.iter().map(|p| p.0).collect();
                adj_edge[v] = pairs.iter().map(|p| p.1).collect();
            }
        }
        Graph {
            n,
            edges,
            weights,
            adj,
            adj_edge,
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    /// Weight of edge `id`, 1 on unweighted graphs.
    pub fn weight(&self, id: usize) -> f64 {
        self.weights.as_ref().map_or(1.0, |w| w[id])
    }

    /// Sorted neighbors of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    /// Edge ids incident to `v`, aligned with [`Graph::neighbors`].
    pub fn incident_edges(&self, v: usize) -> &[usize] {
        &self.adj_edge[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    /// Same topology with new per-edge weights (aligned with [`Graph::edges`]).
    pub fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.edges.len() {
            return Err(Error::SizeMismatch {
                left: weights.len(),
                right: self.edges.len(),
            });
        }
        for &w in &weights {
            check_weight(w)?;
        }
        let mut g = self.clone();
        g.weights = Some(weights);
        Ok(g)
    }

    pub fn without_weights(&self) -> Self {
        let mut g = self.clone();
        g.weights = None;
        g
    }

    /// Keeps node labels, drops every edge touching a node with `alive[v] == false`.
    pub fn retain_nodes(&self, alive: &[bool]) -> Self {
        let mut edges = Vec::new();
        let mut weights = self.weights.as_ref().map(|_| Vec::new());
        for (id, &(u, v)) in self.edges.iter().enumerate() {
            if alive[u] && alive[v] {
                edges.push((u, v));
                if let Some(w) = weights.as_mut() {
                    w.push(self.weight(id));
                }
            }
        }
        Self::from_sorted(self.n, edges, weights)
    }

    /// Adds one edge, returning a new graph. The new edge gets weight `w` on weighted graphs.
    pub fn with_edge(&self, u: usize, v: usize, w: f64) -> Result<Self> {
        if self.is_weighted() {
            let mut list: Vec<_> = self
                .edges
                .iter()
                .enumerate()
                .map(|(id, &(a, b))| (a, b, self.weight(id)))
                .collect();
            list.push((u, v, w));
            Graph::weighted(self.n, list)
        } else {
            Graph::new(self.n, self.edges.iter().copied().chain([(u, v)]))
        }
    }
}

/// Graph after node removal: original labels, removed nodes marked dead.
#[derive(Debug, Clone)]
pub struct Residual {
    pub graph: Graph,
    pub alive: Vec<bool>,
}

impl Residual {
    pub fn alive_count(&self) -> usize {
        self.alive.iter().filter(|&&a| a).count()
    }

    /// Largest component among surviving nodes; empty when nothing survives.
    pub fn giant_component(&self) -> Vec<usize> {
        giant_component_masked(&self.graph, Some(&self.alive))
    }
}

fn check_edge(n: usize, u: usize, v: usize) -> Result<(usize, usize)> {
    if u >= n || v >= n {
        return Err(Error::param(
            "edges",
            format!("edge {{{u}, {v}}} out of range for {n} nodes"),
        ));
    }
    if u == v {
        return Err(Error::param("edges", format!("self-loop at node {u}")));
    }
    Ok((u.min(v), u.max(v)))
}

fn check_weight(w: f64) -> Result<()> {
    if !(w.is_finite() && w > 0.0) {
        return Err(Error::param("weights", format!("weight {w} is not strictly positive")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_self_loops_and_duplicates() {
        assert!(Graph::new(3, [(0, 0)]).is_err());
        assert!(Graph::new(3, [(0, 1), (1, 0)]).is_err());
        assert!(Graph::new(3, [(0, 3)]).is_err());
        assert!(Graph::weighted(2, [(0, 1, 0.0)]).is_err());
        assert!(Graph::weighted(2, [(0, 1, f64::NAN)]).is_err());
    }

    #[test]
    fn adjacency_is_sorted_and_symmetric() {
        let g = Graph::new(5, [(3, 1), (0, 4), (1, 0), (4, 1)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (0, 4), (1, 3), (1, 4)]);
        assert_eq!(g.neighbors(1), &[0, 3, 4]);
        assert_eq!(g.neighbors(4), &[0, 1]);
        for v in 0..5 {
            for (&u, &id) in g.neighbors(v).iter().zip(g.incident_edges(v)) {
                let (a, b) = g.edges()[id];
                assert!((a, b) == (u.min(v), u.max(v)));
                assert!(g.has_edge(u, v));
            }
        }
    }

    #[test]
    fn retain_keeps_labels_and_weights() {
        let g = Graph::weighted(4, [(0, 1, 2.0), (1, 2, 3.0), (2, 3, 4.0)]).unwrap();
        let r = g.retain_nodes(&[true, true, false, true]);
        assert_eq!(r.node_count(), 4);
        assert_eq!(r.edges(), &[(0, 1)]);
        assert_eq!(r.weights(), Some(&[2.0][..]));
    }
}
