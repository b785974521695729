//! Two networks with one-to-one dependency links: a node survives only while
//! its partner survives and it belongs to its own network's giant component.

use std::path::Path;

use log::warn;
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{self, io, GeneratorSpec, Graph};
use crate::percolation::{check_grid, crossing, mean_std, removal_count};
use crate::seed;

pub const PC_SWEEP_HEADER: &str = "p,mutual_survivor_mean,mutual_survivor_std,replicates";

/// Mean survivor fraction below which a system counts as collapsed.
pub const COLLAPSE_CUTOFF: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingMode {
    Identity,
    RandomPermutation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterdependentSystem {
    net_a: Graph,
    net_b: Graph,
    a_to_b: Vec<usize>,
    b_to_a: Vec<usize>,
}

impl InterdependentSystem {
    /// `a_to_b[i]` is the B node supporting (and supported by) A node `i`.
    pub fn new(net_a: Graph, net_b: Graph, a_to_b: Vec<usize>) -> Result<Self> {
        let n = net_a.node_count();
        if net_b.node_count() != n {
            return Err(Error::SizeMismatch { left: n, right: net_b.node_count() });
        }
        if a_to_b.len() != n {
            return Err(Error::SizeMismatch { left: n, right: a_to_b.len() });
        }
        let mut b_to_a = vec![usize::MAX; n];
        for (a, &b) in a_to_b.iter().enumerate() {
            if b >= n {
                return Err(Error::param("coupling", format!("B node {b} out of range")));
            }
            if b_to_a[b] != usize::MAX {
                return Err(Error::param("coupling", format!("B node {b} has two partners")));
            }
            b_to_a[b] = a;
        }
        Ok(InterdependentSystem { net_a, net_b, a_to_b, b_to_a })
    }

    pub fn node_count(&self) -> usize {
        self.a_to_b.len()
    }

    pub fn net_a(&self) -> &Graph {
        &self.net_a
    }

    pub fn net_b(&self) -> &Graph {
        &self.net_b
    }

    pub fn partner_of_a(&self, a: usize) -> usize {
        self.a_to_b[a]
    }

    pub fn partner_of_b(&self, b: usize) -> usize {
        self.b_to_a[b]
    }

    /// One `a_node b_node` line per dependency link.
    pub fn coupling_text(&self) -> String {
        self.a_to_b.iter().enumerate().map(|(a, b)| format!("{a} {b}\n")).collect()
    }

    pub fn parse_coupling(text: &str, n: usize) -> Result<Vec<usize>> {
        let mut a_to_b = vec![usize::MAX; n];
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse = |s: Option<&str>| -> Result<usize> {
                s.and_then(|t| t.parse().ok()).ok_or_else(|| Error::Parse {
                    line: i + 1,
                    msg: format!("expected `a_node b_node`, got `{line}`"),
                })
            };
            let mut it = line.split_whitespace();
            let (a, b) = (parse(it.next())?, parse(it.next())?);
            if it.next().is_some() || a >= n {
                return Err(Error::Parse { line: i + 1, msg: format!("bad coupling line `{line}`") });
            }
            if a_to_b[a] != usize::MAX {
                return Err(Error::Parse { line: i + 1, msg: format!("A node {a} coupled twice") });
            }
            a_to_b[a] = b;
        }
        if let Some(a) = a_to_b.iter().position(|&b| b == usize::MAX) {
            return Err(Error::param("coupling", format!("A node {a} has no partner")));
        }
        Ok(a_to_b)
    }

    /// Writes `net_a`, `net_b` edge lists and the coupling file.
    pub fn save(&self, a_path: &Path, b_path: &Path, coupling_path: &Path) -> Result<()> {
        std::fs::write(a_path, io::write_edge_list(&self.net_a))?;
        std::fs::write(b_path, io::write_edge_list(&self.net_b))?;
        std::fs::write(coupling_path, self.coupling_text())?;
        Ok(())
    }

    pub fn load(a_path: &Path, b_path: &Path, coupling_path: &Path) -> Result<Self> {
        let net_a = io::read_edge_list_str(&std::fs::read_to_string(a_path)?)?;
        let net_b = io::read_edge_list_str(&std::fs::read_to_string(b_path)?)?;
        let coupling = Self::parse_coupling(&std::fs::read_to_string(coupling_path)?, net_a.node_count())?;
        Self::new(net_a, net_b, coupling)
    }
}

pub fn couple(net_a: Graph, net_b: Graph, mode: CouplingMode, seed: u64) -> Result<InterdependentSystem> {
    let n = net_a.node_count();
    if net_b.node_count() != n {
        return Err(Error::SizeMismatch { left: n, right: net_b.node_count() });
    }
    let mut a_to_b: Vec<usize> = (0..n).collect();
    if mode == CouplingMode::RandomPermutation {
        a_to_b.shuffle(&mut seed::rng(seed));
    }
    InterdependentSystem::new(net_a, net_b, a_to_b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutualRound {
    pub round: usize,
    pub alive_a: usize,
    pub alive_b: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutualCascade {
    /// Mutually connected survivors relative to the network size.
    pub survivor_fraction: f64,
    pub alive_a: Vec<bool>,
    pub alive_b: Vec<bool>,
    /// Round 0 is the state right after the initial removal; each later round
    /// is one pass of giant pruning and dependency failures in both networks.
    pub rounds: Vec<MutualRound>,
}

/// Removes `floor(p n)` uniformly chosen A nodes and runs the collapse.
pub fn interdependent_cascade(sys: &InterdependentSystem, p: f64, seed: u64) -> Result<MutualCascade> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param("p", format!("{p} outside [0, 1]")));
    }
    let mut order: Vec<usize> = (0..sys.node_count()).collect();
    order.shuffle(&mut seed::rng(seed));
    Ok(cascade_from(sys, &order[..removal_count(sys.node_count(), p)]))
}

/// Collapse after removing the given A nodes. A's giant is pruned before the
/// first dependency step.
pub fn cascade_from(sys: &InterdependentSystem, removed_a: &[usize]) -> MutualCascade {
    let n = sys.node_count();
    let mut alive_a = vec![true; n];
    for &v in removed_a {
        alive_a[v] = false;
    }
    let mut alive_b = vec![true; n];
    for (a, &b) in sys.a_to_b.iter().enumerate() {
        alive_b[b] = alive_a[a];
    }
    let count = |v: &[bool]| v.iter().filter(|&&x| x).count();
    let mut rounds = vec![MutualRound { round: 0, alive_a: count(&alive_a), alive_b: count(&alive_b) }];
    loop {
        let mut changed = prune_to_giant(&sys.net_a, &mut alive_a);
        changed |= follow(&sys.a_to_b, &alive_a, &mut alive_b);
        changed |= prune_to_giant(&sys.net_b, &mut alive_b);
        changed |= follow(&sys.b_to_a, &alive_b, &mut alive_a);
        if !changed {
            break;
        }
        rounds.push(MutualRound { round: rounds.len(), alive_a: count(&alive_a), alive_b: count(&alive_b) });
    }
    MutualCascade {
        survivor_fraction: if n == 0 { 0.0 } else { count(&alive_a) as f64 / n as f64 },
        alive_a,
        alive_b,
        rounds,
    }
}

/// Single-network control: the same removal followed by one giant pruning.
pub fn isolated_survivor_fraction(g: &Graph, removed: &[usize]) -> f64 {
    let mut alive = vec![true; g.node_count()];
    for &v in removed {
        alive[v] = false;
    }
    graph::giant_component_masked(g, Some(&alive)).len() as f64 / g.node_count().max(1) as f64
}

fn prune_to_giant(g: &Graph, alive: &mut [bool]) -> bool {
    let giant = graph::giant_component_masked(g, Some(alive));
    let before = alive.iter().filter(|&&x| x).count();
    if giant.len() == before {
        return false;
    }
    alive.fill(false);
    for v in giant {
        alive[v] = true;
    }
    true
}

/// Kills every node whose partner is dead.
fn follow(to_other: &[usize], alive_src: &[bool], alive_dst: &mut [bool]) -> bool {
    let mut changed = false;
    for (v, &w) in to_other.iter().enumerate() {
        if !alive_src[v] && alive_dst[w] {
            alive_dst[w] = false;
            changed = true;
        }
    }
    changed
}

/// Coupling used by [`pc_sweep`]; `Isolated` runs network A alone as a control.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepCoupling {
    Identity,
    RandomPermutation,
    Isolated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PcRow {
    pub p: f64,
    pub mean: f64,
    pub std: f64,
    pub replicates: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcCurve {
    pub rows: Vec<PcRow>,
    /// First `p` where the mean survivor fraction drops below
    /// [`COLLAPSE_CUTOFF`], interpolated between grid points.
    pub critical: Option<f64>,
}

impl PcCurve {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{PC_SWEEP_HEADER}\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{}\n", r.p, r.mean, r.std, r.replicates));
        }
        out
    }
}

/// Mutual survivor fraction versus the removed fraction of A.
///
/// Replicate `r` draws both networks, the coupling and one removal order from
/// sub-streams of `seed ^ r`; removals are nested along `p_grid`.
pub fn pc_sweep(
    spec_a: &GeneratorSpec,
    spec_b: &GeneratorSpec,
    p_grid: &[f64],
    coupling: SweepCoupling,
    replicates: usize,
    seed: u64,
) -> Result<PcCurve> {
    check_grid("p_grid", p_grid)?;
    if replicates == 0 {
        return Err(Error::param("replicates", "need at least one replicate"));
    }
    spec_a.validate()?;
    spec_b.validate()?;
    if coupling != SweepCoupling::Isolated && spec_a.n != spec_b.n {
        return Err(Error::SizeMismatch { left: spec_a.n, right: spec_b.n });
    }
    let per_rep: Vec<Vec<f64>> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let rep = seed::replicate_seed(seed, r);
            let net_a = graph::generate(&spec_a.with_seed(seed::derive(rep, 0)))?;
            let n = net_a.node_count();
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut seed::rng(seed::derive(rep, 3)));
            let removed = |p: f64| &order[..removal_count(n, p)];
            if coupling == SweepCoupling::Isolated {
                return Ok(p_grid.iter().map(|&p| isolated_survivor_fraction(&net_a, removed(p))).collect());
            }
            let net_b = graph::generate(&spec_b.with_seed(seed::derive(rep, 1)))?;
            let mode = match coupling {
                SweepCoupling::Identity => CouplingMode::Identity,
                _ => CouplingMode::RandomPermutation,
            };
            let sys = couple(net_a, net_b, mode, seed::derive(rep, 2))?;
            Ok(p_grid.iter().map(|&p| cascade_from(&sys, removed(p)).survivor_fraction).collect())
        })
        .collect::<Result<_>>()?;
    let rows: Vec<PcRow> = p_grid
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let values: Vec<f64> = per_rep.iter().map(|c| c[i]).collect();
            let (mean, std) = mean_std(&values);
            PcRow { p, mean, std, replicates }
        })
        .collect();
    let critical = crossing(rows.iter().map(|r| (r.p, r.mean)), COLLAPSE_CUTOFF);
    if critical.is_none() || rows[0].mean < COLLAPSE_CUTOFF {
        warn!("p grid does not straddle the collapse; critical fraction is unreliable");
    }
    Ok(PcCurve { rows, critical })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dumbbell() -> Graph {
        Graph::new(6, [(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (3, 5), (4, 5)]).unwrap()
    }

    fn ring(n: usize) -> Graph {
        Graph::new(n, (0..n).map(|v| (v, (v + 1) % n))).unwrap()
    }

    #[test]
    fn coupling_modes() {
        let sys = couple(ring(5), ring(5), CouplingMode::Identity, 0).unwrap();
        assert!((0..5).all(|i| sys.partner_of_a(i) == i));
        let r1 = couple(ring(50), ring(50), CouplingMode::RandomPermutation, 7).unwrap();
        let r2 = couple(ring(50), ring(50), CouplingMode::RandomPermutation, 7).unwrap();
        assert_eq!(r1, r2);
        assert!((0..50).all(|i| r1.partner_of_b(r1.partner_of_a(i)) == i));
        assert!(couple(ring(5), ring(6), CouplingMode::Identity, 0).is_err());
    }

    #[test]
    fn no_removal_keeps_connected_pair() {
        let sys = couple(ring(30), dumbbell_like(30), CouplingMode::RandomPermutation, 3).unwrap();
        let r = interdependent_cascade(&sys, 0.0, 1).unwrap();
        assert_eq!(r.survivor_fraction, 1.0);
        assert_eq!(r.rounds.len(), 1);
    }

    fn dumbbell_like(n: usize) -> Graph {
        Graph::new(n, (0..n - 1).map(|v| (v, v + 1))).unwrap()
    }

    #[test]
    fn mirror_pair_matches_single_network() {
        let g = dumbbell();
        let sys = couple(g.clone(), g.clone(), CouplingMode::Identity, 0).unwrap();
        let r = cascade_from(&sys, &[0, 3]);
        // One productive round, then the fixed point.
        assert_eq!(r.rounds.len(), 2);
        assert_eq!(r.survivor_fraction, isolated_survivor_fraction(&g, &[0, 3]));
        assert_eq!(r.alive_a, r.alive_b);
    }

    #[test]
    fn cut_node_disconnects_both_sides() {
        // Removing A's bridge node 2 strands {0, 1}; B is a ring so only the
        // dependency links carry the damage across.
        let sys = couple(dumbbell(), ring(6), CouplingMode::Identity, 0).unwrap();
        let r = cascade_from(&sys, &[2]);
        assert!(r.rounds.len() <= 3);
        assert_eq!(r.alive_a, vec![false, false, false, true, true, true]);
        assert_eq!(r.alive_b, r.alive_a);
        assert_eq!(r.survivor_fraction, 0.5);
    }

    #[test]
    fn final_state_is_a_fixed_point() {
        let spec = GeneratorSpec::new(graph::GeneratorKind::ErdosRenyi { mean_degree: 3.0 }, 300, 5);
        let sys = couple(
            graph::generate(&spec).unwrap(),
            graph::generate(&spec.with_seed(6)).unwrap(),
            CouplingMode::RandomPermutation,
            1,
        )
        .unwrap();
        let r = interdependent_cascade(&sys, 0.3, 2).unwrap();
        let dead: Vec<usize> = (0..300).filter(|&v| !r.alive_a[v]).collect();
        let again = cascade_from(&sys, &dead);
        assert_eq!(again.alive_a, r.alive_a);
        assert_eq!(again.rounds.len(), 1);
        assert!(r.rounds.len() <= 600);
        assert!(r.rounds.windows(2).all(|w| w[1].alive_a <= w[0].alive_a));
    }

    #[test]
    fn coupling_text_roundtrip() {
        let sys = couple(ring(8), ring(8), CouplingMode::RandomPermutation, 4).unwrap();
        let parsed = InterdependentSystem::parse_coupling(&sys.coupling_text(), 8).unwrap();
        assert_eq!(InterdependentSystem::new(ring(8), ring(8), parsed).unwrap(), sys);
        assert!(InterdependentSystem::parse_coupling("0 1\n0 2\n", 2).is_err());
        assert!(InterdependentSystem::parse_coupling("0 1\n", 2).is_err());
        assert!(InterdependentSystem::new(ring(3), ring(3), vec![0, 0, 1]).is_err());
    }

    #[test]
    fn zero_grid_survives() {
        let spec = GeneratorSpec::new(graph::GeneratorKind::ErdosRenyi { mean_degree: 6.0 }, 200, 0);
        let c = pc_sweep(&spec, &spec, &[0.0], SweepCoupling::RandomPermutation, 3, 1).unwrap();
        assert!(c.rows[0].mean > 0.95);
        let csv = c.to_csv();
        assert!(csv.starts_with("p,mutual_survivor_mean,mutual_survivor_std,replicates\n0,"));
    }
}
