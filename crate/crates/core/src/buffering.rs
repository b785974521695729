//! Multi-functional agents with limited capacity: how much of a function
//! demand a pool can still cover after losing agents, as a function of agent
//! versatility and capacity.

use rand::seq::{index, SliceRandom};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::percolation::{mean_std, removal_count};
use crate::seed;

pub const SURFACE_HEADER: &str = "versatility,capacity,restored_mean,restored_std,replicates";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Agent {
    /// Sorted, distinct function ids this agent can perform.
    pub repertoire: Vec<usize>,
    /// Functions the agent can perform at the same time.
    pub capacity: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentPool {
    n_functions: usize,
    agents: Vec<Agent>,
}

impl AgentPool {
    pub fn new(n_functions: usize, mut agents: Vec<Agent>) -> Result<Self> {
        for (i, a) in agents.iter_mut().enumerate() {
            a.repertoire.sort_unstable();
            a.repertoire.dedup();
            if a.repertoire.is_empty() {
                return Err(Error::param("repertoire", format!("agent {i} can perform nothing")));
            }
            if a.capacity == 0 {
                return Err(Error::param("capacity", format!("agent {i} has zero capacity")));
            }
            if let Some(&f) = a.repertoire.iter().find(|&&f| f >= n_functions) {
                return Err(Error::param("repertoire", format!("agent {i} lists unknown function {f}")));
            }
        }
        Ok(AgentPool { n_functions, agents })
    }

    pub fn n_functions(&self) -> usize {
        self.n_functions
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    /// `# functions N` header, then one `capacity: f3 f7 f9` line per agent.
    pub fn to_text(&self) -> String {
        let mut out = format!("# functions {}\n", self.n_functions);
        for a in &self.agents {
            let fs: Vec<String> = a.repertoire.iter().map(|f| format!("f{f}")).collect();
            out.push_str(&format!("{}: {}\n", a.capacity, fs.join(" ")));
        }
        out
    }

    /// Inverse of [`AgentPool::to_text`]; without a header the function
    /// universe is the largest listed id plus one.
    pub fn parse(text: &str) -> Result<Self> {
        let mut declared = None;
        let mut agents = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let bad = |msg: String| Error::Parse { line: i + 1, msg };
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(n) = rest.trim().strip_prefix("functions") {
                    declared = Some(n.trim().parse().map_err(|_| bad(format!("bad header `{line}`")))?);
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let (cap, fs) = line.split_once(':').ok_or_else(|| bad(format!("expected `capacity: f..`, got `{line}`")))?;
            let capacity = cap.trim().parse().map_err(|_| bad(format!("bad capacity `{}`", cap.trim())))?;
            let repertoire = fs
                .split_whitespace()
                .map(|t| t.strip_prefix('f').and_then(|d| d.parse().ok()).ok_or_else(|| bad(format!("bad function `{t}`"))))
                .collect::<Result<Vec<usize>>>()?;
            agents.push(Agent { repertoire, capacity });
        }
        let seen = agents.iter().flat_map(|a| a.repertoire.iter()).max().map_or(0, |&f| f + 1);
        AgentPool::new(declared.unwrap_or(seen), agents)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionDemand {
    /// Required multiplicity per function.
    pub required: Vec<usize>,
}

impl FunctionDemand {
    pub fn new(required: Vec<usize>) -> Result<Self> {
        if required.iter().sum::<usize>() == 0 {
            return Err(Error::param("demand", "total demand must be at least 1"));
        }
        Ok(FunctionDemand { required })
    }

    pub fn uniform(n_functions: usize, per_function: usize) -> Result<Self> {
        Self::new(vec![per_function; n_functions])
    }

    pub fn total(&self) -> usize {
        self.required.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    /// Functions performed by each agent (repeats allowed, sorted).
    pub per_agent: Vec<Vec<usize>>,
    /// Unmet demand per function.
    pub shortfall: Vec<usize>,
}

impl Assignment {
    pub fn covered(&self) -> usize {
        self.per_agent.iter().map(Vec::len).sum()
    }

    pub fn is_complete(&self) -> bool {
        self.shortfall.iter().all(|&s| s == 0)
    }

    /// Checks repertoire, capacity and demand bounds.
    pub fn check(&self, pool: &AgentPool, demand: &FunctionDemand) -> Result<()> {
        let mut totals = vec![0usize; demand.required.len()];
        for (i, fs) in self.per_agent.iter().enumerate() {
            let agent = &pool.agents[i];
            if fs.len() > agent.capacity {
                return Err(Error::param("assignment", format!("agent {i} over capacity")));
            }
            for &f in fs {
                if agent.repertoire.binary_search(&f).is_err() {
                    return Err(Error::param("assignment", format!("agent {i} cannot perform f{f}")));
                }
                totals[f] += 1;
            }
        }
        for (f, (&t, &d)) in totals.iter().zip(&demand.required).enumerate() {
            if t > d || d - t != self.shortfall[f] {
                return Err(Error::param("assignment", format!("function {f} totals inconsistent")));
            }
        }
        Ok(())
    }
}

/// `n_agents` agents, each able to perform `versatility` distinct functions
/// drawn uniformly, all with the same capacity. Each agent's repertoire is a
/// prefix of its own random permutation of the functions, so pools built
/// from one seed are nested in `versatility`.
pub fn build_pool(n_agents: usize, n_functions: usize, versatility: usize, capacity: usize, seed: u64) -> Result<AgentPool> {
    if versatility == 0 || versatility > n_functions {
        return Err(Error::param("versatility", format!("{versatility} outside [1, {n_functions}]")));
    }
    if capacity == 0 {
        return Err(Error::param("capacity", "must be at least 1"));
    }
    let mut rng = seed::rng(seed);
    let agents = (0..n_agents)
        .map(|_| {
            let mut perm: Vec<usize> = (0..n_functions).collect();
            perm.shuffle(&mut rng);
            perm.truncate(versatility);
            Agent { repertoire: perm, capacity }
        })
        .collect();
    AgentPool::new(n_functions, agents)
}

/// Maximum-coverage assignment: a maximum flow from agents (supply =
/// capacity) to functions (sink = demand). Agents are saturated in index
/// order, so lower-indexed agents are preferred among maximum flows.
pub fn assign(pool: &AgentPool, demand: &FunctionDemand) -> Result<Assignment> {
    assign_among(pool, demand, &vec![true; pool.agents.len()])
}

fn assign_among(pool: &AgentPool, demand: &FunctionDemand, active: &[bool]) -> Result<Assignment> {
    let nf = pool.n_functions;
    if demand.required.len() != nf {
        return Err(Error::SizeMismatch { left: demand.required.len(), right: nf });
    }
    let na = pool.agents.len();
    // counts[i][f]: units of f performed by agent i.
    let mut counts = vec![vec![0usize; nf]; na];
    let mut load = vec![0usize; nf];
    let mut visited = vec![false; nf];
    for i in 0..na {
        if !active[i] {
            continue;
        }
        for _ in 0..pool.agents[i].capacity {
            visited.fill(false);
            let found = pool.agents[i]
                .repertoire
                .iter()
                .find(|&&f| augment(pool, demand, &mut counts, &mut load, &mut visited, f));
            match found {
                Some(&f) => counts[i][f] += 1,
                // No augmenting path now means none later either.
                None => break,
            }
        }
    }
    let per_agent = counts
        .iter()
        .map(|c| c.iter().enumerate().flat_map(|(f, &k)| std::iter::repeat_n(f, k)).collect())
        .collect();
    let shortfall = demand.required.iter().zip(&load).map(|(&d, &l)| d - l).collect();
    Ok(Assignment { per_agent, shortfall })
}

/// Finds room for one more unit of `f`, possibly by moving agents already
/// performing `f` to other functions. On success `load[f]` already accounts
/// for the new unit.
fn augment(
    pool: &AgentPool,
    demand: &FunctionDemand,
    counts: &mut [Vec<usize>],
    load: &mut [usize],
    visited: &mut [bool],
    f: usize,
) -> bool {
    if visited[f] {
        return false;
    }
    visited[f] = true;
    if load[f] < demand.required[f] {
        load[f] += 1;
        return true;
    }
    for j in 0..counts.len() {
        if counts[j][f] == 0 {
            continue;
        }
        for &g in &pool.agents[j].repertoire {
            if g != f && !visited[g] && augment(pool, demand, counts, load, visited, g) {
                counts[j][g] += 1;
                counts[j][f] -= 1;
                return true;
            }
        }
    }
    false
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    /// Covered demand over total demand after the loss.
    pub restored_fraction: f64,
    pub assignment: Assignment,
}

/// Reassigns functions among the agents not in `removed`.
pub fn perturb_recover(pool: &AgentPool, demand: &FunctionDemand, removed: &[usize]) -> Result<RecoveryReport> {
    let mut active = vec![true; pool.agents.len()];
    for &a in removed {
        if a >= active.len() {
            return Err(Error::param("removed_agents", format!("agent {a} not in pool")));
        }
        active[a] = false;
    }
    let assignment = assign_among(pool, demand, &active)?;
    Ok(RecoveryReport {
        restored_fraction: assignment.covered() as f64 / demand.total() as f64,
        assignment,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracySpec {
    pub n_agents: usize,
    pub n_functions: usize,
    pub versatility_grid: Vec<usize>,
    pub capacity_grid: Vec<usize>,
    pub removal_fraction: f64,
    pub demand: FunctionDemand,
    pub replicates: usize,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceCell {
    pub versatility: usize,
    pub capacity: usize,
    pub restored_mean: f64,
    pub restored_std: f64,
    pub replicates: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResilienceSurface {
    /// Versatility-major order.
    pub cells: Vec<SurfaceCell>,
}

impl ResilienceSurface {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{SURFACE_HEADER}\n");
        for c in &self.cells {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                c.versatility, c.capacity, c.restored_mean, c.restored_std, c.replicates
            ));
        }
        out
    }

    pub fn cell(&self, versatility: usize, capacity: usize) -> Option<&SurfaceCell> {
        self.cells.iter().find(|c| c.versatility == versatility && c.capacity == capacity)
    }
}

/// Mean restored fraction per (versatility, capacity) cell. Replicate `r`
/// fixes the repertoire permutations and the removed agents for every cell,
/// so cells are compared on paired draws.
pub fn degeneracy_sweep(spec: &DegeneracySpec) -> Result<ResilienceSurface> {
    if spec.versatility_grid.is_empty() || spec.capacity_grid.is_empty() {
        return Err(Error::param("grid", "versatility and capacity grids must be non-empty"));
    }
    if spec.replicates == 0 {
        return Err(Error::param("replicates", "need at least one replicate"));
    }
    if !(0.0..=1.0).contains(&spec.removal_fraction) {
        return Err(Error::param("removal_fraction", format!("{} outside [0, 1]", spec.removal_fraction)));
    }
    if spec.demand.required.len() != spec.n_functions {
        return Err(Error::SizeMismatch { left: spec.demand.required.len(), right: spec.n_functions });
    }
    FunctionDemand::new(spec.demand.required.clone())?;
    let cells: Vec<(usize, usize)> = spec
        .versatility_grid
        .iter()
        .flat_map(|&v| spec.capacity_grid.iter().map(move |&c| (v, c)))
        .collect();
    let surface = cells
        .par_iter()
        .map(|&(v, c)| {
            let values = (0..spec.replicates)
                .map(|r| {
                    let rep = seed::replicate_seed(spec.seed, r);
                    let pool = build_pool(spec.n_agents, spec.n_functions, v, c, seed::derive(rep, 0))?;
                    let k = removal_count(spec.n_agents, spec.removal_fraction);
                    let removed = index::sample(&mut seed::rng(seed::derive(rep, 1)), spec.n_agents, k).into_vec();
                    Ok(perturb_recover(&pool, &spec.demand, &removed)?.restored_fraction)
                })
                .collect::<Result<Vec<f64>>>()?;
            let (restored_mean, restored_std) = mean_std(&values);
            Ok(SurfaceCell { versatility: v, capacity: c, restored_mean, restored_std, replicates: spec.replicates })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResilienceSurface { cells: surface })
}
