//! Failure-propagation models: fraction-threshold contagion, load/capacity
//! overload cascades, weighted-link conductance experiments and the
//! tree-versus-clique propagation-model comparison.

mod flow;
mod load;
mod risk;
mod watts;

pub use flow::{
    assign_degree_weights, mean_conductance, weighted_cascade_cell, weighted_cascade_sweep, BetaCurve, BetaSweep, BetaTrace, FlowModel,
    WeightedFlowSpec, BETA_SWEEP_HEADER, BETA_TRACE_HEADER,
};
pub use load::{load_cascade, motter_lai_cascade, node_loads, LoadCascadeSpec, Routing, Trigger};
pub use risk::{
    failure_risk_exact, failure_risk_monte_carlo, risk_topology, topology_risk_compare, PropagationModel,
    RiskEstimate, RiskSpec, RiskTopology, EXACT_ENUMERATION_MAX_NODES,
};
pub use watts::{watts_cascade, watts_cascade_from, ThresholdCascadeSpec};

use serde::{Deserialize, Serialize};

use crate::graph::{self, Graph};

/// One propagation round: round 0 holds the initially failed nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub round: usize,
    pub new_failures: usize,
    pub cumulative_failed: usize,
    pub survivor_fraction: f64,
}

pub const TRACE_HEADER: &str = "round,new_failures,cumulative_failed,survivor_fraction";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeResult {
    /// Every failed node, initial failures included, sorted.
    pub failed: Vec<usize>,
    /// Surviving giant component relative to the intact graph's giant.
    pub survivor_fraction: f64,
    /// New failures per propagation round, initial failures excluded.
    pub rounds: Vec<usize>,
    pub trace: Vec<TraceRow>,
}

impl CascadeResult {
    pub fn initial_count(&self) -> usize {
        self.trace.first().map_or(0, |r| r.new_failures)
    }

    pub fn trace_csv(&self) -> String {
        let mut out = format!("{TRACE_HEADER}\n");
        for r in &self.trace {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.round, r.new_failures, r.cumulative_failed, r.survivor_fraction
            ));
        }
        out
    }
}

/// Accumulates rounds of a cascade over a fixed graph.
pub(crate) struct Recorder<'a> {
    g: &'a Graph,
    base: f64,
    alive: Vec<bool>,
    rounds: Vec<usize>,
    trace: Vec<TraceRow>,
    failed: usize,
}

impl<'a> Recorder<'a> {
    pub(crate) fn new(g: &'a Graph) -> Self {
        Recorder {
            g,
            base: graph::giant_component(g).len().max(1) as f64,
            alive: vec![true; g.node_count()],
            rounds: Vec::new(),
            trace: Vec::new(),
            failed: 0,
        }
    }

    pub(crate) fn alive(&self) -> &[bool] {
        &self.alive
    }

    /// Marks `nodes` failed as the next round; returns how many were newly failed.
    pub(crate) fn fail(&mut self, nodes: &[usize]) -> usize {
        let mut fresh = 0;
        for &v in nodes {
            if self.alive[v] {
                self.alive[v] = false;
                fresh += 1;
            }
        }
        self.failed += fresh;
        let round = self.trace.len();
        if round > 0 {
            self.rounds.push(fresh);
        }
        self.trace.push(TraceRow {
            round,
            new_failures: fresh,
            cumulative_failed: self.failed,
            survivor_fraction: self.survivor_fraction(),
        });
        fresh
    }

    fn survivor_fraction(&self) -> f64 {
        (graph::giant_size_masked(self.g, Some(&self.alive)) as f64 / self.base).clamp(0.0, 1.0)
    }

    pub(crate) fn finish(self) -> CascadeResult {
        let failed = (0..self.alive.len()).filter(|&v| !self.alive[v]).collect();
        let survivor_fraction = self.trace.last().map_or(1.0, |r| r.survivor_fraction);
        CascadeResult {
            failed,
            survivor_fraction,
            rounds: self.rounds,
            trace: self.trace,
        }
    }
}
