//! Failure risk of a typical node on trees versus disjoint cliques with the
//! same number of edges per node, under two propagation rules.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::percolation::mean_std;
use crate::seed;

/// Largest topology evaluated by exhaustive enumeration of initial failures.
pub const EXACT_ENUMERATION_MAX_NODES: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum PropagationModel {
    /// A node fails once `ceil(phi * k)` of its neighbours have failed, `k`
    /// being the nominal edges per node. Failure pressure grows with the
    /// number of failed neighbours.
    FractionThreshold { phi: f64 },
    /// A single failed neighbour brings a node down.
    AnyOneNeighbor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RiskTopology {
    /// Root with `k` children, every other internal node with `k - 1`
    /// children, filled breadth first; no node exceeds degree `k`.
    Tree,
    /// Disjoint cliques of `k + 1` nodes.
    Clique,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskSpec {
    pub model: PropagationModel,
    pub topology: RiskTopology,
    pub n: usize,
    pub edges_per_node: usize,
    /// Independent initial failure probability per node.
    pub p0: f64,
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskEstimate {
    /// Eventual failure probability averaged over nodes.
    pub mean: f64,
    pub per_node: Vec<f64>,
    /// Standard error of `mean`; zero for exact enumeration.
    pub std_error: f64,
    pub exact: bool,
}

pub fn risk_topology(topology: RiskTopology, n: usize, k: usize) -> Result<Graph> {
    if n == 0 || k == 0 {
        return Err(Error::Unrealizable("need n >= 1 and k >= 1".into()));
    }
    match topology {
        RiskTopology::Tree => {
            if k < 2 && n > 2 {
                return Err(Error::Unrealizable(format!("a tree with max degree {k} holds at most 2 nodes")));
            }
            let mut edges = Vec::with_capacity(n.saturating_sub(1));
            let mut parent = 0;
            let mut children = 0;
            for v in 1..n {
                let cap = if parent == 0 { k } else { k - 1 };
                if children == cap {
                    parent += 1;
                    children = 0;
                }
                edges.push((parent, v));
                children += 1;
            }
            Graph::new(n, edges)
        }
        RiskTopology::Clique => {
            let size = k + 1;
            if !n.is_multiple_of(size) {
                return Err(Error::Unrealizable(format!("{n} nodes do not split into cliques of {size}")));
            }
            let mut edges = Vec::new();
            for base in (0..n).step_by(size) {
                for a in base..base + size {
                    for b in a + 1..base + size {
                        edges.push((a, b));
                    }
                }
            }
            Graph::new(n, edges)
        }
    }
}

fn check_model(model: &PropagationModel, p0: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p0) {
        return Err(Error::param("p0", format!("{p0} outside [0, 1]")));
    }
    if let PropagationModel::FractionThreshold { phi } = model {
        if !(*phi > 0.0 && *phi <= 1.0) {
            return Err(Error::param("phi", format!("{phi} outside (0, 1]")));
        }
    }
    Ok(())
}

fn required_failures(model: &PropagationModel, k: usize) -> usize {
    match *model {
        PropagationModel::AnyOneNeighbor => 1,
        PropagationModel::FractionThreshold { phi } => ((phi * k as f64 - 1e-9).ceil() as usize).max(1),
    }
}

/// Closes `failed` under the propagation rule (monotone, so order-free).
fn propagate(g: &Graph, needed: usize, failed: &mut [bool]) {
    let mut count = vec![0usize; g.node_count()];
    let mut stack: Vec<usize> = (0..g.node_count()).filter(|&v| failed[v]).collect();
    while let Some(v) = stack.pop() {
        for &w in g.neighbors(v) {
            count[w] += 1;
            if !failed[w] && count[w] >= needed {
                failed[w] = true;
                stack.push(w);
            }
        }
    }
}

/// Exact per-node failure probabilities by enumerating all `2^n` initial
/// failure patterns.
pub fn failure_risk_exact(g: &Graph, model: &PropagationModel, k: usize, p0: f64) -> Result<RiskEstimate> {
    check_model(model, p0)?;
    let n = g.node_count();
    if n > 20 {
        return Err(Error::param("n", format!("{n} nodes is too many to enumerate")));
    }
    let needed = required_failures(model, k);
    let mut per_node = vec![0.0; n];
    let mut failed = vec![false; n];
    for mask in 0u32..(1u32 << n) {
        let seeds = mask.count_ones() as i32;
        let weight = p0.powi(seeds) * (1.0 - p0).powi(n as i32 - seeds);
        if weight == 0.0 {
            continue;
        }
        for (v, f) in failed.iter_mut().enumerate() {
            *f = mask >> v & 1 == 1;
        }
        propagate(g, needed, &mut failed);
        for v in 0..n {
            if failed[v] {
                per_node[v] += weight;
            }
        }
    }
    Ok(RiskEstimate {
        mean: per_node.iter().sum::<f64>() / n as f64,
        per_node,
        std_error: 0.0,
        exact: true,
    })
}

pub fn failure_risk_monte_carlo(
    g: &Graph,
    model: &PropagationModel,
    k: usize,
    p0: f64,
    trials: usize,
    seed: u64,
) -> Result<RiskEstimate> {
    check_model(model, p0)?;
    if trials == 0 {
        return Err(Error::param("trials", "need at least one trial"));
    }
    let n = g.node_count();
    let needed = required_failures(model, k);
    let mut rng = seed::rng(seed);
    let mut hits = vec![0usize; n];
    let mut fractions = Vec::with_capacity(trials);
    let mut failed = vec![false; n];
    for _ in 0..trials {
        for f in failed.iter_mut() {
            *f = rng.random_bool(p0);
        }
        propagate(g, needed, &mut failed);
        let mut count = 0;
        for v in 0..n {
            if failed[v] {
                hits[v] += 1;
                count += 1;
            }
        }
        fractions.push(count as f64 / n as f64);
    }
    let (mean, sd) = mean_std(&fractions);
    Ok(RiskEstimate {
        mean,
        per_node: hits.iter().map(|&h| h as f64 / trials as f64).collect(),
        std_error: sd / (trials as f64).sqrt(),
        exact: false,
    })
}

/// Failure risk on the requested topology: exact enumeration up to
/// [`EXACT_ENUMERATION_MAX_NODES`] nodes, Monte Carlo beyond.
pub fn topology_risk_compare(spec: &RiskSpec) -> Result<RiskEstimate> {
    let g = risk_topology(spec.topology, spec.n, spec.edges_per_node)?;
    if spec.n <= EXACT_ENUMERATION_MAX_NODES {
        failure_risk_exact(&g, &spec.model, spec.edges_per_node, spec.p0)
    } else {
        failure_risk_monte_carlo(&g, &spec.model, spec.edges_per_node, spec.p0, spec.trials, spec.seed)
    }
}
