use rand::seq::index;
use serde::{Deserialize, Serialize};

use super::{CascadeResult, Recorder};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdCascadeSpec {
    /// A node fails once at least this fraction of its neighbours has failed.
    pub phi: f64,
    #[serde(default = "one")]
    pub seed_count: usize,
    #[serde(default)]
    pub seed: u64,
}

fn one() -> usize {
    1
}

impl ThresholdCascadeSpec {
    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.phi > 0.0 && self.phi <= 1.0) {
            return Err(Error::param("phi", format!("{} outside (0, 1]", self.phi)));
        }
        if self.seed_count > n {
            return Err(Error::param(
                "seed_count",
                format!("{} exceeds node count {n}", self.seed_count),
            ));
        }
        Ok(())
    }
}

/// Fraction-threshold cascade from `seed_count` uniformly drawn initial failures.
pub fn watts_cascade(g: &Graph, spec: &ThresholdCascadeSpec) -> Result<CascadeResult> {
    spec.validate(g.node_count())?;
    let mut rng = seed::rng(spec.seed);
    let mut seeds = index::sample(&mut rng, g.node_count(), spec.seed_count).into_vec();
    seeds.sort_unstable();
    Ok(watts_cascade_from(g, spec.phi, &seeds))
}

/// Synchronous rounds: a live node of degree `d >= 1` fails in round `r + 1`
/// iff its failed neighbours after round `r`, divided by `d`, reach `phi`.
/// Isolated nodes only fail as seeds.
pub fn watts_cascade_from(g: &Graph, phi: f64, seeds: &[usize]) -> CascadeResult {
    let n = g.node_count();
    let mut rec = Recorder::new(g);
    let mut failed_nbrs = vec![0usize; n];
    let mut frontier: Vec<usize> = seeds.to_vec();
    frontier.sort_unstable();
    frontier.dedup();
    rec.fail(&frontier);
    loop {
        for &v in &frontier {
            for &w in g.neighbors(v) {
                failed_nbrs[w] += 1;
            }
        }
        let mut next: Vec<usize> = frontier
            .iter()
            .flat_map(|&v| g.neighbors(v).iter().copied())
            .filter(|&w| rec.alive()[w] && failed_nbrs[w] as f64 / g.degree(w) as f64 >= phi)
            .collect();
        next.sort_unstable();
        next.dedup();
        if next.is_empty() {
            break;
        }
        rec.fail(&next);
        frontier = next;
    }
    rec.finish()
}
