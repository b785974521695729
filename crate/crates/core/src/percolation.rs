//! Node-removal robustness experiments: random failures versus degree-targeted
//! attacks, giant-component and path-length curves.

use std::cmp::Reverse;
use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{self, GeneratorSpec, Graph, Residual};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RemovalStrategy {
    Random,
    /// Descending degree of the intact graph.
    TargetedStaticDegree,
    /// Descending current degree, recomputed after every removal.
    TargetedAdaptiveDegree,
}

/// Removal strategy plus the seed used for sampling and degree tie-breaking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemovalPlan {
    pub strategy: RemovalStrategy,
    #[serde(default)]
    pub seed: u64,
}

impl RemovalPlan {
    pub fn new(strategy: RemovalStrategy, seed: u64) -> Self {
        RemovalPlan { strategy, seed }
    }
}

/// Number of nodes removed at fraction `f`: `floor(f n)`.
pub fn removal_count(n: usize, f: f64) -> usize {
    // Guard against `0.1 * 1000 = 99.999...` style round-off.
    (((f * n as f64) + 1e-9).floor() as usize).min(n)
}

/// Full removal sequence: removing the first `removal_count(n, f)` entries is
/// the removal at fraction `f`, so removals at growing `f` are nested.
pub fn removal_order(g: &Graph, plan: &RemovalPlan) -> Vec<usize> {
    let n = g.node_count();
    let mut rng = seed::rng(plan.seed);
    let mut shuffled: Vec<usize> = (0..n).collect();
    shuffled.shuffle(&mut rng);
    match plan.strategy {
        RemovalStrategy::Random => shuffled,
        RemovalStrategy::TargetedStaticDegree => {
            let mut rank = vec![0; n];
            for (r, &v) in shuffled.iter().enumerate() {
                rank[v] = r;
            }
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by_key(|&v| (Reverse(g.degree(v)), rank[v]));
            order
        }
        RemovalStrategy::TargetedAdaptiveDegree => {
            let mut rank = vec![0; n];
            for (r, &v) in shuffled.iter().enumerate() {
                rank[v] = r;
            }
            let mut degree = g.degrees();
            let mut queue: BTreeSet<(Reverse<usize>, usize, usize)> =
                (0..n).map(|v| (Reverse(degree[v]), rank[v], v)).collect();
            let mut removed = vec![false; n];
            let mut order = Vec::with_capacity(n);
            while let Some((_, _, v)) = queue.pop_first() {
                removed[v] = true;
                order.push(v);
                for &w in g.neighbors(v) {
                    if !removed[w] {
                        queue.remove(&(Reverse(degree[w]), rank[w], w));
                        degree[w] -= 1;
                        queue.insert((Reverse(degree[w]), rank[w], w));
                    }
                }
            }
            order
        }
    }
}

/// Removes `floor(f n)` nodes according to `plan`; survivors keep their labels.
pub fn apply_removal(g: &Graph, plan: &RemovalPlan, f: f64) -> Result<Residual> {
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::param("f", format!("{f} outside [0, 1]")));
    }
    let order = removal_order(g, plan);
    let mut alive = vec![true; g.node_count()];
    for &v in &order[..removal_count(g.node_count(), f)] {
        alive[v] = false;
    }
    Ok(Residual {
        graph: g.retain_nodes(&alive),
        alive,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub f: f64,
    pub s_mean: f64,
    pub s_std: f64,
    /// Mean path length of the surviving giant; 0 when it has fewer than two nodes.
    pub l_mean: f64,
    pub replicates: usize,
}

/// Relative giant-component size `S(f)` against removed fraction.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PercolationCurve {
    pub rows: Vec<CurveRow>,
}

pub const CURVE_HEADER: &str = "f,S_mean,S_std,L_mean,replicates";

impl PercolationCurve {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{CURVE_HEADER}\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{},{}\n", r.f, r.s_mean, r.s_std, r.l_mean, r.replicates));
        }
        out
    }

    /// Row at grid point `f`, if present.
    pub fn at(&self, f: f64) -> Option<&CurveRow> {
        self.rows.iter().find(|r| (r.f - f).abs() < 1e-12)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    /// Pair budget for survivor path lengths; `None` skips them (reported as 0).
    pub path_pairs: Option<usize>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            path_pairs: Some(graph::DEFAULT_PAIR_BUDGET),
        }
    }
}

pub(crate) fn check_grid(name: &'static str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::param(name, "grid is empty"));
    }
    if grid.iter().any(|f| !(0.0..=1.0).contains(f)) {
        return Err(Error::param(name, "values must lie in [0, 1]"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::param(name, "grid must be strictly increasing"));
    }
    Ok(())
}

/// Mean and sample standard deviation, summed in sorted order so the result
/// does not depend on replicate order.
pub(crate) fn mean_std(values: &[f64]) -> (f64, f64) {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let mut dev: Vec<f64> = v.iter().map(|x| (x - mean) * (x - mean)).collect();
    dev.sort_by(f64::total_cmp);
    (mean, (dev.iter().sum::<f64>() / (n - 1.0)).sqrt())
}

/// Per-replicate `S` (and path length) at every grid point, with nested removals.
pub fn replicate_curve(
    g: &Graph,
    plan: &RemovalPlan,
    f_grid: &[f64],
    options: &SweepOptions,
    path_seed: u64,
) -> Vec<(f64, f64)> {
    let n = g.node_count();
    let base = graph::giant_component(g).len().max(1) as f64;
    let order = removal_order(g, plan);
    let mut alive = vec![true; n];
    let mut removed = 0;
    f_grid
        .iter()
        .enumerate()
        .map(|(i, &f)| {
            let target = removal_count(n, f);
            while removed < target {
                alive[order[removed]] = false;
                removed += 1;
            }
            let s = graph::giant_size_masked(g, Some(&alive)) as f64 / base;
            let l = match options.path_pairs {
                Some(budget) => graph::average_path_length_masked(g, Some(&alive), Some(budget), seed::derive(path_seed, i as u64))
                    .unwrap_or(0.0),
                None => 0.0,
            };
            (s, l)
        })
        .collect()
}

/// Replicated removal sweep over freshly generated graphs.
///
/// Replicate `r` uses seed `master_seed ^ r`; its graph and removal order come
/// from independent sub-streams of that seed, so random and targeted sweeps
/// with the same master seed see the same graphs.
pub fn sweep(
    spec: &GeneratorSpec,
    plan: &RemovalPlan,
    f_grid: &[f64],
    replicates: usize,
    master_seed: u64,
) -> Result<PercolationCurve> {
    sweep_with(spec, plan, f_grid, replicates, master_seed, &SweepOptions::default())
}

pub fn sweep_with(
    spec: &GeneratorSpec,
    plan: &RemovalPlan,
    f_grid: &[f64],
    replicates: usize,
    master_seed: u64,
    options: &SweepOptions,
) -> Result<PercolationCurve> {
    if replicates == 0 {
        return Err(Error::param("replicates", "need at least one replicate"));
    }
    check_grid("f_grid", f_grid)?;
    spec.validate()?;
    let per_replicate: Vec<Vec<(f64, f64)>> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let rep = seed::replicate_seed(master_seed, r);
            let g = graph::generate(&spec.with_seed(seed::derive(rep, 0)))?;
            let plan = RemovalPlan::new(plan.strategy, seed::derive(seed::derive(rep, 1), plan.seed));
            Ok(replicate_curve(&g, &plan, f_grid, options, seed::derive(rep, 2)))
        })
        .collect::<Result<_>>()?;
    Ok(aggregate(f_grid, &per_replicate))
}

pub(crate) fn aggregate(f_grid: &[f64], per_replicate: &[Vec<(f64, f64)>]) -> PercolationCurve {
    let rows = f_grid
        .iter()
        .enumerate()
        .map(|(i, &f)| {
            let s: Vec<f64> = per_replicate.iter().map(|c| c[i].0).collect();
            let l: Vec<f64> = per_replicate.iter().map(|c| c[i].1).collect();
            let (s_mean, s_std) = mean_std(&s);
            CurveRow {
                f,
                s_mean,
                s_std,
                l_mean: mean_std(&l).0,
                replicates: per_replicate.len(),
            }
        })
        .collect();
    PercolationCurve { rows }
}

/// Smallest `f` at which `S_mean` drops below `cutoff`, linearly interpolated
/// between the bracketing grid rows; `None` when the curve never gets there.
pub fn empirical_threshold(curve: &PercolationCurve, cutoff: f64) -> Result<Option<f64>> {
    if curve.rows.len() < 2 {
        return Err(Error::MalformedCurve("need at least two rows".into()));
    }
    if !(cutoff > 0.0 && cutoff < 1.0) {
        return Err(Error::param("cutoff", format!("{cutoff} outside (0, 1)")));
    }
    if curve.rows.windows(2).any(|w| w[0].f >= w[1].f) {
        return Err(Error::MalformedCurve("f must be strictly increasing".into()));
    }
    Ok(crossing(curve.rows.iter().map(|r| (r.f, r.s_mean)), cutoff))
}

pub(crate) fn crossing(points: impl Iterator<Item = (f64, f64)>, cutoff: f64) -> Option<f64> {
    let mut prev: Option<(f64, f64)> = None;
    for (f, s) in points {
        if s < cutoff {
            return Some(match prev {
                None => f,
                Some((f0, s0)) => f0 + (s0 - cutoff) / (s0 - s) * (f - f0),
            });
        }
        prev = Some((f, s));
    }
    None
}
