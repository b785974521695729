//! Weighted links with conductance `(k_i k_j)^beta`: network conductance and
//! overload cascades routed along conductance-respecting shortest paths.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{load_cascade, CascadeResult, Routing, TraceRow};
use crate::error::{Error, Result};
use crate::graph::{self, GeneratorSpec, Graph};
use crate::percolation::{self, check_grid, removal_count, removal_order, PercolationCurve};
use crate::percolation::{RemovalPlan, RemovalStrategy};
use crate::seed;

pub const BETA_SWEEP_HEADER: &str = "beta,f,S_mean,S_std,L_mean,replicates";
pub const BETA_TRACE_HEADER: &str = "beta,f,round,new_failures,cumulative_failed,survivor_fraction";

/// Path-length pair budget for survivor giants in beta sweeps.
const SURVIVOR_PATH_PAIRS: usize = 20_000;

/// Weights every edge `{i, j}` with `(k_i k_j)^beta`, degrees taken in `g`.
pub fn assign_degree_weights(g: &Graph, beta: f64) -> Graph {
    let weights: Vec<f64> = g
        .edges()
        .iter()
        .map(|&(u, v)| {
            if beta == 0.0 {
                1.0
            } else {
                ((g.degree(u) * g.degree(v)) as f64).powf(beta)
            }
        })
        .collect();
    g.with_weights(weights).expect("degree products are positive")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedFlowSpec {
    pub beta: f64,
    /// Endpoint sampling weight is proportional to `degree^rho`.
    pub rho: f64,
    pub pair_samples: usize,
    #[serde(default)]
    pub seed: u64,
}

/// Mean two-point conductance over `pair_samples` source/target pairs drawn
/// with probability proportional to `k^rho` (targets equal to the source are
/// redrawn).
pub fn mean_conductance(g: &Graph, spec: &WeightedFlowSpec) -> Result<f64> {
    if spec.pair_samples == 0 {
        return Err(Error::param("pair_samples", "need at least one pair"));
    }
    let n = g.node_count();
    if n < 2 || graph::giant_component(g).len() != n {
        return Err(Error::Disconnected);
    }
    let weighted = assign_degree_weights(g, spec.beta);
    let pairs = sample_pairs(g, spec.rho, spec.pair_samples, spec.seed)?;
    let mut total = 0.0;
    for (s, t) in pairs {
        total += graph::effective_conductance(&weighted, s, t)?;
    }
    Ok(total / spec.pair_samples as f64)
}

pub(crate) fn sample_pairs(g: &Graph, rho: f64, count: usize, seed: u64) -> Result<Vec<(usize, usize)>> {
    let weights: Vec<f64> = g.degrees().iter().map(|&k| (k as f64).powf(rho)).collect();
    let dist = WeightedIndex::new(&weights).map_err(|e| Error::param("rho", e.to_string()))?;
    let mut rng = seed::rng(seed);
    Ok((0..count)
        .map(|_| {
            let s = dist.sample(&mut rng);
            let mut t = dist.sample(&mut rng);
            while t == s {
                t = dist.sample(&mut rng);
            }
            (s, t)
        })
        .collect())
}

/// Flow routing used by weighted overload cascades.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowModel {
    /// Electrical current with link conductance `w`.
    #[default]
    Current,
    /// Shortest paths with link length `1 / w`.
    ShortestPath,
}

/// One overload cascade after the targeted removal of `floor(f n)` top-degree
/// nodes, on links weighted by `(k_i k_j)^beta`.
pub fn weighted_cascade_cell(g: &Graph, model: FlowModel, beta: f64, f: f64, alpha: f64, tie_seed: u64) -> CascadeResult {
    let order = removal_order(g, &RemovalPlan::new(RemovalStrategy::TargetedStaticDegree, tie_seed));
    let initial = &order[..removal_count(g.node_count(), f)];
    match model {
        FlowModel::Current => load_cascade(&assign_degree_weights(g, beta), alpha, initial, Routing::Current),
        FlowModel::ShortestPath if beta == 0.0 => load_cascade(g, alpha, initial, Routing::Hops),
        FlowModel::ShortestPath => {
            let weighted = assign_degree_weights(g, beta);
            let lengths: Vec<f64> = weighted.weights().expect("weighted").iter().map(|w| 1.0 / w).collect();
            load_cascade(g, alpha, initial, Routing::Lengths(&lengths))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaCurve {
    pub beta: f64,
    pub curve: PercolationCurve,
}

/// Cascade trace of replicate 0 for one `(beta, f)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaTrace {
    pub beta: f64,
    pub f: f64,
    pub trace: Vec<TraceRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaSweep {
    pub curves: Vec<BetaCurve>,
    pub first_replicate: Vec<BetaTrace>,
}

impl BetaSweep {
    pub fn sweep_csv(&self) -> String {
        let mut out = format!("{BETA_SWEEP_HEADER}\n");
        for c in &self.curves {
            for r in &c.curve.rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    c.beta, r.f, r.s_mean, r.s_std, r.l_mean, r.replicates
                ));
            }
        }
        out
    }

    pub fn trace_csv(&self) -> String {
        let mut out = format!("{BETA_TRACE_HEADER}\n");
        for t in &self.first_replicate {
            for r in &t.trace {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    t.beta, t.f, r.round, r.new_failures, r.cumulative_failed, r.survivor_fraction
                ));
            }
        }
        out
    }

    /// Mean `G'/G` per beta at grid point `f`.
    pub fn at(&self, f: f64) -> Vec<(f64, f64)> {
        self.curves
            .iter()
            .filter_map(|c| c.curve.at(f).map(|r| (c.beta, r.s_mean)))
            .collect()
    }
}

/// `G'/G` after targeted removal plus overload cascade, per `beta` and `f`.
///
/// Every `(beta, replicate)` cell is independent: replicate `r` generates its
/// graph from `seed ^ r`, so all betas are compared on the same graphs.
pub fn weighted_cascade_sweep(
    spec: &GeneratorSpec,
    beta_grid: &[f64],
    f_grid: &[f64],
    alpha: f64,
    model: FlowModel,
    replicates: usize,
    seed: u64,
) -> Result<BetaSweep> {
    if beta_grid.is_empty() {
        return Err(Error::param("beta_grid", "grid is empty"));
    }
    if beta_grid.iter().any(|b| !b.is_finite()) {
        return Err(Error::param("beta_grid", "values must be finite"));
    }
    check_grid("f_grid", f_grid)?;
    if replicates == 0 {
        return Err(Error::param("replicates", "need at least one replicate"));
    }
    if !(alpha >= 0.0) {
        return Err(Error::param("alpha", format!("{alpha} must be >= 0")));
    }
    spec.validate()?;
    let graphs: Vec<Graph> = (0..replicates)
        .into_par_iter()
        .map(|r| graph::generate(&spec.with_seed(seed::derive(seed::replicate_seed(seed, r), 0))))
        .collect::<Result<_>>()?;
    let cells: Vec<(usize, usize)> = (0..beta_grid.len())
        .flat_map(|b| (0..replicates).map(move |r| (b, r)))
        .collect();
    let results: Vec<Vec<(f64, f64, CascadeResult)>> = cells
        .par_iter()
        .map(|&(b, r)| {
            let rep = seed::replicate_seed(seed, r);
            let g = &graphs[r];
            f_grid
                .iter()
                .enumerate()
                .map(|(i, &f)| {
                    let res = weighted_cascade_cell(g, model, beta_grid[b], f, alpha, seed::derive(rep, 1));
                    let mut alive = vec![true; g.node_count()];
                    for &v in &res.failed {
                        alive[v] = false;
                    }
                    let l = graph::average_path_length_masked(
                        g,
                        Some(&alive),
                        Some(SURVIVOR_PATH_PAIRS),
                        seed::derive(rep, 2 + i as u64),
                    )
                    .unwrap_or(0.0);
                    (res.survivor_fraction, l, res)
                })
                .collect()
        })
        .collect();
    let mut curves = Vec::with_capacity(beta_grid.len());
    let mut first_replicate = Vec::new();
    for (b, &beta) in beta_grid.iter().enumerate() {
        let per_rep: Vec<Vec<(f64, f64)>> = results[b * replicates..(b + 1) * replicates]
            .iter()
            .map(|cells| cells.iter().map(|c| (c.0, c.1)).collect())
            .collect();
        curves.push(BetaCurve { beta, curve: percolation::aggregate(f_grid, &per_rep) });
        for (i, &f) in f_grid.iter().enumerate() {
            first_replicate.push(BetaTrace { beta, f, trace: results[b * replicates][i].2.trace.clone() });
        }
    }
    Ok(BetaSweep { curves, first_replicate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn star(n: usize) -> Graph {
        Graph::new(n, (1..n).map(|v| (0, v))).unwrap()
    }

    #[test]
    fn degree_weights() {
        let g = Graph::new(6, [(0, 1), (0, 2), (1, 3), (1, 4), (4, 5)]).unwrap();
        assert!(assign_degree_weights(&g, 0.0).weights().unwrap().iter().all(|&w| w == 1.0));
        // Edge {0, 1} joins degree 2 and degree 3.
        assert_relative_eq!(assign_degree_weights(&g, -1.0).weights().unwrap()[0], 1.0 / 6.0);
        assert!(assign_degree_weights(&star(5), 1.0).weights().unwrap().iter().all(|&w| w == 4.0));
    }

    #[test]
    fn single_edge_conductance() {
        let g = Graph::new(2, [(0, 1)]).unwrap();
        for rho in [-1.0, 0.0, 2.0] {
            let spec = WeightedFlowSpec { beta: 1.0, rho, pair_samples: 5, seed: 1 };
            assert_relative_eq!(mean_conductance(&g, &spec).unwrap(), 1.0, max_relative = 1e-9);
        }
    }

    #[test]
    fn disconnected_graph_is_rejected() {
        let g = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        let spec = WeightedFlowSpec { beta: 0.0, rho: 0.0, pair_samples: 5, seed: 1 };
        assert!(matches!(mean_conductance(&g, &spec), Err(Error::Disconnected)));
    }

    #[test]
    fn sampled_pairs_are_distinct() {
        let pairs = sample_pairs(&star(6), 3.0, 200, 9).unwrap();
        assert!(pairs.iter().all(|(s, t)| s != t && *s < 6 && *t < 6));
    }
}
