//! Structural metrics: components, path lengths, betweenness, degree moments.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use rand::Rng;

use super::Graph;
use crate::error::{Error, Result};
use crate::seed;

/// Exact all-pairs path length below this many node pairs, sampled above.
pub const DEFAULT_PAIR_BUDGET: usize = 200_000;

const DEAD: usize = usize::MAX;

/// Component label per node (`usize::MAX` for dead nodes) and component sizes.
///
/// Components are numbered in order of their smallest member.
pub fn component_labels(g: &Graph, alive: Option<&[bool]>) -> (Vec<usize>, Vec<usize>) {
    let n = g.node_count();
    let is_alive = |v: usize| alive.is_none_or(|a| a[v]);
    let mut label = vec![DEAD; n];
    let mut sizes = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n {
        if label[start] != DEAD || !is_alive(start) {
            continue;
        }
        let id = sizes.len();
        label[start] = id;
        queue.push_back(start);
        let mut size = 0;
        while let Some(v) = queue.pop_front() {
            size += 1;
            for &w in g.neighbors(v) {
                if label[w] == DEAD && is_alive(w) {
                    label[w] = id;
                    queue.push_back(w);
                }
            }
        }
        sizes.push(size);
    }
    (label, sizes)
}

/// Largest connected component, sorted; ties go to the component holding the
/// smallest node index.
pub fn giant_component(g: &Graph) -> Vec<usize> {
    giant_component_masked(g, None)
}

pub fn giant_component_masked(g: &Graph, alive: Option<&[bool]>) -> Vec<usize> {
    let (label, sizes) = component_labels(g, alive);
    let Some(best) = largest(&sizes) else {
        return Vec::new();
    };
    (0..g.node_count()).filter(|&v| label[v] == best).collect()
}

pub(crate) fn giant_size_masked(g: &Graph, alive: Option<&[bool]>) -> usize {
    let (_, sizes) = component_labels(g, alive);
    sizes.into_iter().max().unwrap_or(0)
}

// First index of the maximum, i.e. the earliest-numbered component wins ties.
fn largest(sizes: &[usize]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &s) in sizes.iter().enumerate() {
        if best.is_none_or(|b| s > sizes[b]) {
            best = Some(i);
        }
    }
    best
}

/// Mean shortest-path hop count over node pairs of the giant component.
///
/// Exact when the giant holds at most `sample_pairs` pairs (default
/// [`DEFAULT_PAIR_BUDGET`]); otherwise uniformly drawn sources are expanded
/// by BFS to all other giant members until the pair budget is spent.
pub fn average_path_length(g: &Graph, sample_pairs: Option<usize>, seed: u64) -> Result<f64> {
    average_path_length_masked(g, None, sample_pairs, seed)
}

pub(crate) fn average_path_length_masked(
    g: &Graph,
    alive: Option<&[bool]>,
    sample_pairs: Option<usize>,
    seed: u64,
) -> Result<f64> {
    let giant = giant_component_masked(g, alive);
    let size = giant.len();
    if size < 2 {
        return Err(Error::TrivialGiant);
    }
    let budget = sample_pairs.unwrap_or(DEFAULT_PAIR_BUDGET).max(1);
    let pairs = size * (size - 1) / 2;
    let mut in_giant = vec![false; g.node_count()];
    for &v in &giant {
        in_giant[v] = true;
    }
    let mut dist = vec![usize::MAX; g.node_count()];
    let mut queue = VecDeque::new();
    let sources: Vec<usize> = if pairs <= budget {
        giant.clone()
    } else {
        let count = budget.div_ceil(size - 1);
        let mut rng = seed::rng(seed);
        (0..count).map(|_| giant[rng.random_range(0..size)]).collect()
    };
    let mut total = 0u64;
    for &s in &sources {
        total += bfs_distance_sum(g, &in_giant, s, &mut dist, &mut queue);
    }
    Ok(total as f64 / (sources.len() * (size - 1)) as f64)
}

fn bfs_distance_sum(
    g: &Graph,
    member: &[bool],
    source: usize,
    dist: &mut [usize],
    queue: &mut VecDeque<usize>,
) -> u64 {
    let mut seen = vec![source];
    dist[source] = 0;
    queue.push_back(source);
    let mut sum = 0u64;
    while let Some(v) = queue.pop_front() {
        sum += dist[v] as u64;
        for &w in g.neighbors(v) {
            if member[w] && dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                seen.push(w);
                queue.push_back(w);
            }
        }
    }
    for v in seen {
        dist[v] = usize::MAX;
    }
    sum
}

/// Shortest-path betweenness with endpoints excluded, unordered pairs counted
/// once and equal splitting over degenerate shortest paths.
pub fn betweenness(g: &Graph) -> Vec<f64> {
    path_betweenness(g, None, None)
}

/// Betweenness restricted to live nodes, optionally under per-edge lengths
/// (aligned with [`Graph::edges`]). Lengths must be positive.
pub fn path_betweenness(g: &Graph, alive: Option<&[bool]>, lengths: Option<&[f64]>) -> Vec<f64> {
    let n = g.node_count();
    let mut bc = vec![0.0; n];
    let mut state = BrandesState::new(n);
    for s in 0..n {
        if alive.is_none_or(|a| a[s]) {
            match lengths {
                None => state.bfs(g, alive, s),
                Some(len) => state.dijkstra(g, alive, len, s),
            }
            state.accumulate(s, &mut bc);
        }
    }
    for b in &mut bc {
        *b /= 2.0;
    }
    bc
}

struct BrandesState {
    order: Vec<usize>,
    preds: Vec<Vec<usize>>,
    sigma: Vec<f64>,
    dist: Vec<f64>,
    delta: Vec<f64>,
    queue: VecDeque<usize>,
}

#[derive(PartialEq)]
struct HeapItem(f64, usize);

impl Eq for HeapItem {}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapItem {
    // Min-heap on distance, then node index.
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl BrandesState {
    fn new(n: usize) -> Self {
        BrandesState {
            order: Vec::with_capacity(n),
            preds: vec![Vec::new(); n],
            sigma: vec![0.0; n],
            dist: vec![f64::INFINITY; n],
            delta: vec![0.0; n],
            queue: VecDeque::new(),
        }
    }

    fn reset(&mut self) {
        for &v in &self.order {
            self.preds[v].clear();
            self.sigma[v] = 0.0;
            self.dist[v] = f64::INFINITY;
            self.delta[v] = 0.0;
        }
        self.order.clear();
    }

    fn bfs(&mut self, g: &Graph, alive: Option<&[bool]>, s: usize) {
        self.reset();
        self.sigma[s] = 1.0;
        self.dist[s] = 0.0;
        self.queue.push_back(s);
        while let Some(v) = self.queue.pop_front() {
            self.order.push(v);
            let next = self.dist[v] + 1.0;
            for &w in g.neighbors(v) {
                if !alive.is_none_or(|a| a[w]) {
                    continue;
                }
                if self.dist[w].is_infinite() {
                    self.dist[w] = next;
                    self.queue.push_back(w);
                }
                if self.dist[w] == next {
                    self.sigma[w] += self.sigma[v];
                    self.preds[w].push(v);
                }
            }
        }
    }

    fn dijkstra(&mut self, g: &Graph, alive: Option<&[bool]>, lengths: &[f64], s: usize) {
        self.reset();
        self.sigma[s] = 1.0;
        self.dist[s] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(HeapItem(0.0, s));
        let mut settled = vec![false; g.node_count()];
        while let Some(HeapItem(d, v)) = heap.pop() {
            if settled[v] || d > self.dist[v] {
                continue;
            }
            settled[v] = true;
            self.order.push(v);
            for (&w, &e) in g.neighbors(v).iter().zip(g.incident_edges(v)) {
                if !alive.is_none_or(|a| a[w]) || settled[w] {
                    continue;
                }
                let cand = d + lengths[e];
                let cur = self.dist[w];
                let tol = 1e-12 * cand.abs().max(1.0);
                if cand < cur - tol {
                    self.dist[w] = cand;
                    self.sigma[w] = self.sigma[v];
                    self.preds[w].clear();
                    self.preds[w].push(v);
                    heap.push(HeapItem(cand, w));
                } else if (cand - cur).abs() <= tol {
                    self.sigma[w] += self.sigma[v];
                    self.preds[w].push(v);
                }
            }
        }
    }

    fn accumulate(&mut self, s: usize, bc: &mut [f64]) {
        for i in (0..self.order.len()).rev() {
            let w = self.order[i];
            let coeff = (1.0 + self.delta[w]) / self.sigma[w];
            for j in 0..self.preds[w].len() {
                let v = self.preds[w][j];
                self.delta[v] += self.sigma[v] * coeff;
            }
            if w != s {
                bc[w] += self.delta[w];
            }
        }
    }
}

/// Moments of the realized degree sequence and the random-removal threshold
/// `f_c = 1 - 1/(kappa - 1)`, clamped to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeStats {
    pub mean_k: f64,
    pub mean_k2: f64,
    pub kappa: f64,
    pub f_c: f64,
}

pub fn degree_stats(g: &Graph) -> Result<DegreeStats> {
    if g.edge_count() == 0 {
        return Err(Error::EdgelessGraph);
    }
    let n = g.node_count() as f64;
    let (sum, sum2) = g.degrees().iter().fold((0u64, 0u64), |(s, s2), &k| {
        (s + k as u64, s2 + (k * k) as u64)
    });
    let mean_k = sum as f64 / n;
    let mean_k2 = sum2 as f64 / n;
    let kappa = mean_k2 / mean_k;
    Ok(DegreeStats {
        mean_k,
        mean_k2,
        kappa,
        f_c: threshold_from_kappa(kappa),
    })
}

pub(crate) fn threshold_from_kappa(kappa: f64) -> f64 {
    if kappa <= 1.0 {
        return 0.0;
    }
    (1.0 - 1.0 / (kappa - 1.0)).clamp(0.0, 1.0)
}
