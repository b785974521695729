//! Slow, obviously-correct reference computations shared by the integration
//! tests and the acceptance run.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use resil::buffering::{AgentPool, FunctionDemand};
use resil::truth::SourceClaimNetwork;
use resil::Graph;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// G(n, p) by independent coin flips.
pub fn coin_flip_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut r = rng(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if r.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges).unwrap()
}

/// Connected graph: random spanning tree plus `extra` random chords, with
/// conductances drawn from [0.1, 10).
pub fn connected_weighted_graph(n: usize, extra: usize, seed: u64) -> Graph {
    let mut r = rng(seed);
    let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (r.random_range(0..v), v)).collect();
    for _ in 0..extra {
        let u = r.random_range(0..n);
        let v = r.random_range(0..n);
        let e = (u.min(v), u.max(v));
        if u != v && !edges.contains(&e) {
            edges.push(e);
        }
    }
    let weighted: Vec<_> = edges.into_iter().map(|(u, v)| (u, v, r.random_range(0.1..10.0))).collect();
    Graph::weighted(n, weighted).unwrap()
}

/// Betweenness by listing every simple path between every pair and keeping
/// the shortest ones.
pub fn enumerated_betweenness(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    let mut bc = vec![0.0; n];
    for s in 0..n {
        for t in s + 1..n {
            let mut paths: Vec<Vec<usize>> = Vec::new();
            let mut stack = vec![s];
            let mut on_path = vec![false; n];
            on_path[s] = true;
            all_simple_paths(g, t, &mut stack, &mut on_path, &mut paths);
            let Some(shortest) = paths.iter().map(Vec::len).min() else { continue };
            let best: Vec<&Vec<usize>> = paths.iter().filter(|p| p.len() == shortest).collect();
            for p in &best {
                for &v in &p[1..p.len() - 1] {
                    bc[v] += 1.0 / best.len() as f64;
                }
            }
        }
    }
    bc
}

fn all_simple_paths(g: &Graph, t: usize, stack: &mut Vec<usize>, on_path: &mut [bool], out: &mut Vec<Vec<usize>>) {
    let v = *stack.last().unwrap();
    if v == t {
        out.push(stack.clone());
        return;
    }
    for &w in g.neighbors(v) {
        if !on_path[w] {
            on_path[w] = true;
            stack.push(w);
            all_simple_paths(g, t, stack, on_path, out);
            stack.pop();
            on_path[w] = false;
        }
    }
}

/// Two-point conductance of a connected graph: dense nodal analysis with `t`
/// grounded, solved by Gaussian elimination with partial pivoting.
pub fn nodal_conductance(g: &Graph, s: usize, t: usize) -> f64 {
    let n = g.node_count();
    let idx = |v: usize| if v < t { v } else { v - 1 };
    let m = n - 1;
    let mut a = vec![vec![0.0; m + 1]; m];
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let w = g.weight(e);
        for (x, y) in [(u, v), (v, u)] {
            if x != t {
                a[idx(x)][idx(x)] += w;
                if y != t {
                    a[idx(x)][idx(y)] -= w;
                }
            }
        }
    }
    a[idx(s)][m] = 1.0;
    for col in 0..m {
        let piv = (col..m).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, piv);
        for row in col + 1..m {
            let k = a[row][col] / a[col][col];
            for c in col..=m {
                a[row][c] -= k * a[col][c];
            }
        }
    }
    let mut x = vec![0.0; m];
    for row in (0..m).rev() {
        let tail: f64 = (row + 1..m).map(|c| a[row][c] * x[c]).sum();
        x[row] = (a[row][m] - tail) / a[row][row];
    }
    1.0 / x[idx(s)]
}

/// Maximum coverable demand by trying every multiset of functions each agent
/// could perform (at most its capacity, drawn from its repertoire).
pub fn brute_force_coverage(pool: &AgentPool, demand: &FunctionDemand, removed: &[usize]) -> usize {
    let options: Vec<Vec<Vec<usize>>> = pool
        .agents()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            if removed.contains(&i) {
                return vec![vec![]];
            }
            let mut out = vec![vec![]];
            multisets(&a.repertoire, a.capacity, 0, &mut vec![], &mut out);
            out
        })
        .collect();
    let mut load = vec![0usize; pool.n_functions()];
    best_over(&options, 0, &mut load, &demand.required)
}

fn multisets(rep: &[usize], left: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if left == 0 {
        return;
    }
    for i in from..rep.len() {
        cur.push(rep[i]);
        out.push(cur.clone());
        multisets(rep, left - 1, i, cur, out);
        cur.pop();
    }
}

fn best_over(options: &[Vec<Vec<usize>>], i: usize, load: &mut [usize], required: &[usize]) -> usize {
    if i == options.len() {
        return load.iter().zip(required).map(|(&l, &d)| l.min(d)).sum();
    }
    let mut best = 0;
    for choice in &options[i] {
        for &f in choice {
            load[f] += 1;
        }
        best = best.max(best_over(options, i + 1, load, required));
        for &f in choice {
            load[f] -= 1;
        }
    }
    best
}

/// Observed-data log-likelihood of the truth model, probabilities clamped
/// like the estimator's.
pub fn claim_log_likelihood(net: &SourceClaimNetwork, a: &[f64], b: &[f64], d: f64) -> f64 {
    let c = |p: f64| p.clamp(1e-6, 1.0 - 1e-6);
    let d = c(d);
    (0..net.n_claims())
        .map(|j| {
            let (mut pt, mut pf) = (d, 1.0 - d);
            for i in 0..net.n_sources() {
                let said = net.sources_of(j).contains(&i);
                pt *= if said { c(a[i]) } else { 1.0 - c(a[i]) };
                pf *= if said { c(b[i]) } else { 1.0 - c(b[i]) };
            }
            (pt + pf).ln()
        })
        .sum()
}

#[derive(Debug, Clone)]
pub struct GridOptimum {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub d: f64,
    pub log_likelihood: f64,
}

/// Maximizes the likelihood over a lattice in (a, b, d), restricted to the
/// labelling with `sum(a) >= sum(b)`: a full pass at `coarse` spacing, then
/// passes on successively finer lattices spanning one previous spacing around
/// the incumbent, the last one at `fine` spacing.
pub fn likelihood_grid_search(net: &SourceClaimNetwork, coarse: f64, fine: f64) -> GridOptimum {
    let ns = net.n_sources();
    let mut centre = vec![0.5; 2 * ns + 1];
    let mut half = 0.5;
    let mut step = coarse;
    loop {
        let axes: Vec<Vec<f64>> = centre.iter().map(|&c| lattice(c, half, step)).collect();
        let best = search_lattice(net, &axes);
        if step <= fine + 1e-12 {
            return best;
        }
        centre = best.a.iter().chain(&best.b).copied().chain([best.d]).collect();
        half = step;
        step = (step / 5.0).max(fine);
    }
}

fn lattice(centre: f64, half: f64, step: f64) -> Vec<f64> {
    let k = (half / step).round() as i64;
    (-k..=k)
        .map(|i| ((centre + i as f64 * step) * 1e6).round() / 1e6)
        .filter(|x| (0.0..=1.0).contains(x))
        .collect()
}

/// Exhaustive search of the product lattice. Per-claim likelihood factors of
/// the true and false classes are built separately, then combined with d.
fn search_lattice(net: &SourceClaimNetwork, axes: &[Vec<f64>]) -> GridOptimum {
    let ns = net.n_sources();
    let nc = net.n_claims();
    let c = |p: f64| p.clamp(1e-6, 1.0 - 1e-6);
    let said: Vec<Vec<bool>> = (0..nc).map(|j| (0..ns).map(|i| net.sources_of(j).contains(&i)).collect()).collect();
    // Every combination of per-source values on the given axes, with its
    // per-claim product and the sum of the values.
    let class_table = |axes: &[Vec<f64>]| {
        let mut rows: Vec<(Vec<f64>, Vec<f64>, f64)> = vec![(vec![], vec![1.0; nc], 0.0)];
        for (i, axis) in axes.iter().enumerate() {
            let mut next = Vec::with_capacity(rows.len() * axis.len());
            for (vals, prod, sum) in &rows {
                for &x in axis {
                    let mut v = vals.clone();
                    v.push(x);
                    let p = prod
                        .iter()
                        .enumerate()
                        .map(|(j, &q)| q * if said[j][i] { c(x) } else { 1.0 - c(x) })
                        .collect();
                    next.push((v, p, sum + x));
                }
            }
            rows = next;
        }
        rows
    };
    let trues = class_table(&axes[..ns]);
    let falses = class_table(&axes[ns..2 * ns]);
    let mut best = GridOptimum { a: vec![], b: vec![], d: 0.0, log_likelihood: f64::NEG_INFINITY };
    for (a, pt, sa) in &trues {
        for (b, pf, sb) in &falses {
            if sa < sb {
                continue;
            }
            for &d in &axes[2 * ns] {
                let dc = c(d);
                let ll: f64 = pt.iter().zip(pf).map(|(x, y)| (dc * x + (1.0 - dc) * y).ln()).sum();
                if ll > best.log_likelihood + 1e-12 {
                    best = GridOptimum { a: a.clone(), b: b.clone(), d, log_likelihood: ll };
                }
            }
        }
    }
    best
}

/// Small source-claim networks whose likelihood has a single maximizer under
/// the `sum(a) >= sum(b)` labelling, as `(sources, claims, assertions)`.
pub fn identifiable_networks() -> Vec<SourceClaimNetwork> {
    [
        (2, 2, vec![(0, 0), (1, 0)]),
        (2, 3, vec![(0, 0), (1, 0)]),
        (2, 3, vec![(0, 0), (1, 0), (0, 2), (1, 2)]),
        (3, 3, vec![(0, 0), (1, 0), (2, 0), (0, 2), (1, 2), (2, 2)]),
        (3, 3, vec![(0, 0), (1, 0), (0, 2), (1, 2)]),
        (3, 2, vec![(0, 0), (1, 0), (2, 0)]),
    ]
    .into_iter()
    .map(|(s, c, pairs)| SourceClaimNetwork::new(s, c, pairs).unwrap())
    .collect()
}
