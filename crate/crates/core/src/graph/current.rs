//! Current-flow throughput: unit current between every pair of nodes, edges
//! acting as resistors with conductance equal to their weight.

use nalgebra::DMatrix;

use super::{component_labels, Graph};

/// Per-node throughput summed over all unordered source/target pairs of the
/// node's component, pairs where the node is an endpoint excluded. Dead
/// nodes and isolated nodes carry zero. On trees this equals shortest-path
/// betweenness.
pub fn current_flow_betweenness(g: &Graph, alive: Option<&[bool]>) -> Vec<f64> {
    let n = g.node_count();
    let (label, sizes) = component_labels(g, alive);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); sizes.len()];
    for v in 0..n {
        if label[v] != usize::MAX {
            members[label[v]].push(v);
        }
    }
    let mut edge_ids: Vec<Vec<usize>> = vec![Vec::new(); sizes.len()];
    for (id, &(u, v)) in g.edges().iter().enumerate() {
        if label[u] != usize::MAX && label[v] != usize::MAX {
            edge_ids[label[u]].push(id);
        }
    }
    let mut out = vec![0.0; n];
    for (c, nodes) in members.iter().enumerate() {
        if nodes.len() < 3 {
            continue;
        }
        component_throughput(g, nodes, &edge_ids[c], &mut out);
    }
    out
}

fn component_throughput(g: &Graph, nodes: &[usize], edge_ids: &[usize], out: &mut [f64]) {
    let size = nodes.len();
    // Local index; the last member is grounded and dropped from the system.
    let mut local = std::collections::HashMap::with_capacity(size);
    for (i, &v) in nodes.iter().enumerate() {
        local.insert(v, i);
    }
    let m = size - 1;
    let mut lap = DMatrix::<f64>::zeros(m, m);
    for &id in edge_ids {
        let (u, v) = g.edges()[id];
        let (a, b) = (local[&u], local[&v]);
        let w = g.weight(id);
        if a < m {
            lap[(a, a)] += w;
        }
        if b < m {
            lap[(b, b)] += w;
        }
        if a < m && b < m {
            lap[(a, b)] -= w;
            lap[(b, a)] -= w;
        }
    }
    let inv = lap
        .cholesky()
        .expect("grounded Laplacian of a connected component is positive definite")
        .inverse();
    // Potential at `row` under unit injection at `col`, ground at index m.
    let pot = |row: usize, col: usize| if row == m || col == m { 0.0 } else { inv[(row, col)] };
    let mut current = vec![0.0; size];
    let mut through = vec![0.0; size];
    for &id in edge_ids {
        let (u, v) = g.edges()[id];
        let (a, b) = (local[&u], local[&v]);
        let w = g.weight(id);
        // Current through the edge for pair (s, t) is current[s] - current[t].
        for (x, c) in current.iter_mut().enumerate() {
            *c = w * (pot(a, x) - pot(b, x));
        }
        current.sort_unstable_by(f64::total_cmp);
        let total: f64 = current
            .iter()
            .enumerate()
            .map(|(i, &c)| (2.0 * i as f64 - m as f64) * c)
            .sum();
        through[a] += total;
        through[b] += total;
    }
    // Half the incident current magnitude is the throughput; each node also
    // collects 1/2 per pair it terminates, which is removed here.
    for (i, &v) in nodes.iter().enumerate() {
        out[v] = (0.5 * through[i] - 0.5 * m as f64).max(0.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::betweenness;
    use approx::assert_relative_eq;

    #[test]
    fn tree_matches_shortest_paths() {
        let g = Graph::new(7, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (5, 6)]).unwrap();
        let cf = current_flow_betweenness(&g, None);
        for (a, b) in cf.iter().zip(betweenness(&g)) {
            assert_relative_eq!(*a, b, epsilon = 1e-9);
        }
    }

    #[test]
    fn square_splits_current() {
        // 4-cycle: the opposite pair routes 1/2 through each middle node,
        // adjacent pairs send 1/4 the long way round through two nodes.
        let g = Graph::new(4, [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let cf = current_flow_betweenness(&g, None);
        for x in cf {
            assert_relative_eq!(x, 0.5 + 2.0 * 0.25, epsilon = 1e-9);
        }
    }

    #[test]
    fn dead_and_small_components_carry_nothing() {
        let g = Graph::new(5, [(0, 1), (1, 2), (3, 4)]).unwrap();
        let cf = current_flow_betweenness(&g, Some(&[true, true, true, true, true]));
        assert_relative_eq!(cf[1], 1.0, epsilon = 1e-9);
        assert_eq!(cf[3], 0.0);
        let cf = current_flow_betweenness(&g, Some(&[true, false, true, true, true]));
        assert!(cf.iter().all(|&x| x == 0.0));
    }
}
