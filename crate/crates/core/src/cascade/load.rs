//! Overload cascades: every node sends one unit of flow to every other node
//! along shortest paths, capacity is `(1 + alpha)` times the intact load, and
//! nodes whose recomputed load exceeds capacity fail.

use log::warn;
use serde::{Deserialize, Serialize};

use super::{CascadeResult, Recorder};
use crate::error::{Error, Result};
use crate::graph::{self, Graph};
use crate::percolation::{removal_count, removal_order, RemovalPlan};

/// Initial removal that starts a load cascade.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Trigger {
    pub plan: RemovalPlan,
    pub fraction: f64,
}

impl Trigger {
    pub fn nodes(&self, g: &Graph) -> Result<Vec<usize>> {
        if !(0.0..=1.0).contains(&self.fraction) {
            return Err(Error::param("fraction", format!("{} outside [0, 1]", self.fraction)));
        }
        let order = removal_order(g, &self.plan);
        Ok(order[..removal_count(g.node_count(), self.fraction)].to_vec())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoadCascadeSpec {
    pub alpha: f64,
    pub trigger: Trigger,
}

// Loads equal to capacity up to round-off must not fail.
const OVERLOAD_SLACK: f64 = 1e-9;

/// How unit flows between node pairs are routed through the network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Routing<'a> {
    /// Hop-count shortest paths, split evenly among ties.
    Hops,
    /// Weighted shortest paths with the given per-edge lengths.
    Lengths(&'a [f64]),
    /// Electrical current, edge weights acting as conductances.
    Current,
}

/// Pass-through flow plus an endpoint credit of (component size - 1) for
/// every live node; dead nodes carry zero.
pub fn node_loads(g: &Graph, alive: Option<&[bool]>, routing: Routing) -> Vec<f64> {
    let mut load = match routing {
        Routing::Hops => graph::path_betweenness(g, alive, None),
        Routing::Lengths(l) => graph::path_betweenness(g, alive, Some(l)),
        Routing::Current => graph::current_flow_betweenness(g, alive),
    };
    let (label, sizes) = graph::component_labels(g, alive);
    for (v, l) in load.iter_mut().enumerate() {
        if label[v] != usize::MAX {
            *l += (sizes[label[v]] - 1) as f64;
        }
    }
    load
}

/// Motter-Lai cascade on hop-count shortest paths.
pub fn motter_lai_cascade(g: &Graph, spec: &LoadCascadeSpec) -> Result<CascadeResult> {
    if !(spec.alpha >= 0.0) {
        return Err(Error::param("alpha", format!("{} must be >= 0", spec.alpha)));
    }
    let (_, sizes) = graph::component_labels(g, None);
    if sizes.len() > 1 {
        warn!("load cascade on a graph with {} components; loads are per component", sizes.len());
    }
    let trigger = spec.trigger.nodes(g)?;
    Ok(load_cascade(g, spec.alpha, &trigger, Routing::Hops))
}

/// Generic overload cascade; loads are recomputed on the survivors each round.
pub fn load_cascade(g: &Graph, alpha: f64, initial: &[usize], routing: Routing) -> CascadeResult {
    let capacity: Vec<f64> = node_loads(g, None, routing)
        .into_iter()
        .map(|l| (1.0 + alpha) * l)
        .collect();
    let mut rec = Recorder::new(g);
    rec.fail(initial);
    if initial.is_empty() {
        return rec.finish();
    }
    loop {
        let load = node_loads(g, Some(rec.alive()), routing);
        let overloaded: Vec<usize> = (0..g.node_count())
            .filter(|&v| rec.alive()[v] && load[v] > capacity[v] * (1.0 + OVERLOAD_SLACK))
            .collect();
        if overloaded.is_empty() {
            break;
        }
        rec.fail(&overloaded);
    }
    rec.finish()
}
