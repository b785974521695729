//! Random graph generators with controlled degree distributions.

use log::debug;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};
use crate::seed;

/// Discrete degree distribution truncated to `[k_min, k_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "distribution", rename_all = "snake_case")]
pub enum DegreeDistribution {
    /// `p(k) ∝ k^-gamma`.
    PowerLaw { gamma: f64, k_min: usize, k_max: usize },
    /// `p(k) ∝ exp(-lambda k)` with `lambda` solved so the truncated mean equals `mean`.
    Exponential { mean: f64, k_min: usize, k_max: usize },
}

impl DegreeDistribution {
    /// Normalized probability mass over the support.
    pub fn pmf(&self) -> Result<Vec<(usize, f64)>> {
        let (k_min, k_max) = match *self {
            DegreeDistribution::PowerLaw { k_min, k_max, .. }
            | DegreeDistribution::Exponential { k_min, k_max, .. } => (k_min, k_max),
        };
        if k_min > k_max {
            return Err(Error::Unrealizable(format!("k_min {k_min} exceeds k_max {k_max}")));
        }
        let raw: Vec<(usize, f64)> = match *self {
            DegreeDistribution::PowerLaw { gamma, .. } => {
                if !(gamma > 1.0) {
                    return Err(Error::param("gamma", format!("{gamma} must exceed 1")));
                }
                if k_min == 0 {
                    return Err(Error::param("k_min", "power law needs k_min >= 1"));
                }
                (k_min..=k_max).map(|k| (k, (k as f64).powf(-gamma))).collect()
            }
            DegreeDistribution::Exponential { mean, .. } => {
                let lambda = exponential_rate(mean, k_min, k_max)?;
                (k_min..=k_max)
                    .map(|k| (k, (-lambda * (k - k_min) as f64).exp()))
                    .collect()
            }
        };
        let z: f64 = raw.iter().map(|p| p.1).sum();
        if !(z > 0.0 && z.is_finite()) {
            return Err(Error::Unrealizable("zero-probability support".into()));
        }
        Ok(raw.into_iter().map(|(k, p)| (k, p / z)).collect())
    }

    pub fn mean(&self) -> Result<f64> {
        Ok(self.pmf()?.iter().map(|&(k, p)| k as f64 * p).sum())
    }

    fn k_max(&self) -> usize {
        match *self {
            DegreeDistribution::PowerLaw { k_max, .. } | DegreeDistribution::Exponential { k_max, .. } => k_max,
        }
    }
}

fn exponential_mean(lambda: f64, k_min: usize, k_max: usize) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for k in k_min..=k_max {
        let w = (-lambda * (k - k_min) as f64).exp();
        num += k as f64 * w;
        den += w;
    }
    num / den
}

fn exponential_rate(mean: f64, k_min: usize, k_max: usize) -> Result<f64> {
    let upper = (k_min + k_max) as f64 / 2.0;
    if !(mean > k_min as f64 && mean < upper) {
        return Err(Error::param(
            "mean_degree",
            format!("{mean} must lie strictly between k_min {k_min} and {upper}"),
        ));
    }
    // The truncated mean decreases monotonically in the rate.
    let (mut lo, mut hi) = (1e-12, 60.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if exponential_mean(mid, k_min, k_max) > mean {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Sampled degrees and the node (if any) whose degree was bumped to make the sum even.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSequence {
    pub degrees: Vec<usize>,
    pub parity_adjusted: Option<usize>,
}

/// Draws `n` i.i.d. degrees from `dist`; an odd total is repaired by adding one
/// to a node drawn uniformly from those still below `k_max`.
pub fn sample_degree_sequence(dist: &DegreeDistribution, n: usize, seed: u64) -> Result<DegreeSequence> {
    if n < 2 {
        return Err(Error::param("n", "need at least 2 nodes"));
    }
    let pmf = dist.pmf()?;
    let mut cdf = Vec::with_capacity(pmf.len());
    let mut acc = 0.0;
    for &(_, p) in &pmf {
        acc += p;
        cdf.push(acc);
    }
    let mut rng = seed::rng(seed);
    let mut degrees: Vec<usize> = (0..n)
        .map(|_| {
            let u: f64 = rng.random::<f64>() * acc;
            let idx = cdf.partition_point(|&c| c <= u).min(pmf.len() - 1);
            pmf[idx].0
        })
        .collect();
    let mut parity_adjusted = None;
    if degrees.iter().sum::<usize>() % 2 == 1 {
        let room: Vec<usize> = (0..n).filter(|&v| degrees[v] < dist.k_max()).collect();
        if room.is_empty() {
            return Err(Error::Unrealizable(format!("{n} nodes of degree {} have an odd degree sum", dist.k_max())));
        }
        let v = room[rng.random_range(0..room.len())];
        degrees[v] += 1;
        parity_adjusted = Some(v);
    }
    Ok(DegreeSequence {
        degrees,
        parity_adjusted,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorKind {
    ErdosRenyi {
        mean_degree: f64,
    },
    PreferentialAttachment {
        m: usize,
    },
    ConfigPowerLaw {
        gamma: f64,
        k_min: usize,
        #[serde(default)]
        k_max: Option<usize>,
    },
    ConfigExponential {
        mean_degree: f64,
        #[serde(default = "one")]
        k_min: usize,
        #[serde(default)]
        k_max: Option<usize>,
    },
}

fn one() -> usize {
    1
}

/// What to generate. `k_max` defaults to `n - 1` for configuration-model kinds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub kind: GeneratorKind,
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind, n: usize, seed: u64) -> Self {
        GeneratorSpec { kind, n, seed }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        GeneratorSpec { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::param("n", format!("{} < 2", self.n)));
        }
        match self.kind {
            GeneratorKind::ErdosRenyi { mean_degree } => {
                if !(mean_degree > 0.0 && mean_degree <= (self.n - 1) as f64) {
                    return Err(Error::param("mean_degree", format!("{mean_degree} outside (0, n-1]")));
                }
            }
            GeneratorKind::PreferentialAttachment { m } => {
                if m == 0 || m >= self.n {
                    return Err(Error::param("m", format!("{m} outside [1, n)")));
                }
            }
            GeneratorKind::ConfigPowerLaw { .. } | GeneratorKind::ConfigExponential { .. } => {
                let dist = self.degree_distribution().expect("configuration kind");
                if dist.k_max() > self.n - 1 {
                    return Err(Error::param("k_max", format!("{} exceeds n - 1", dist.k_max())));
                }
                dist.pmf()?;
            }
        }
        Ok(())
    }

    /// Degree distribution of configuration-model kinds.
    pub fn degree_distribution(&self) -> Option<DegreeDistribution> {
        match self.kind {
            GeneratorKind::ConfigPowerLaw { gamma, k_min, k_max } => Some(DegreeDistribution::PowerLaw {
                gamma,
                k_min,
                k_max: k_max.unwrap_or(self.n - 1),
            }),
            GeneratorKind::ConfigExponential {
                mean_degree,
                k_min,
                k_max,
            } => Some(DegreeDistribution::Exponential {
                mean: mean_degree,
                k_min,
                k_max: k_max.unwrap_or(self.n - 1),
            }),
            _ => None,
        }
    }
}

/// Distortion introduced while generating.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GenerationReport {
    pub parity_adjusted: Option<usize>,
    pub self_loops_erased: usize,
    pub multi_edges_erased: usize,
}

pub fn generate(spec: &GeneratorSpec) -> Result<Graph> {
    generate_with_report(spec).map(|(g, _)| g)
}

pub fn generate_with_report(spec: &GeneratorSpec) -> Result<(Graph, GenerationReport)> {
    spec.validate()?;
    let n = spec.n;
    match spec.kind {
        GeneratorKind::ErdosRenyi { mean_degree } => {
            Ok((erdos_renyi(n, mean_degree / (n - 1) as f64, spec.seed), GenerationReport::default()))
        }
        GeneratorKind::PreferentialAttachment { m } => {
            Ok((preferential_attachment(n, m, spec.seed), GenerationReport::default()))
        }
        GeneratorKind::ConfigPowerLaw { .. } | GeneratorKind::ConfigExponential { .. } => {
            let dist = spec.degree_distribution().expect("configuration kind");
            let seq = sample_degree_sequence(&dist, n, seed::derive(spec.seed, 0))?;
            let (g, mut report) = configuration_model(&seq.degrees, seed::derive(spec.seed, 1))?;
            report.parity_adjusted = seq.parity_adjusted;
            Ok((g, report))
        }
    }
}

/// Erased configuration model: random stub matching, then self-loops and
/// repeated edges are dropped. The degree sum must be even.
pub fn configuration_model(degrees: &[usize], seed: u64) -> Result<(Graph, GenerationReport)> {
    let n = degrees.len();
    if let Some((v, &k)) = degrees.iter().enumerate().find(|(_, &k)| k >= n.max(1)) {
        return Err(Error::Unrealizable(format!("node {v} has degree {k} with only {n} nodes")));
    }
    let total: usize = degrees.iter().sum();
    if total % 2 == 1 {
        return Err(Error::Unrealizable("degree sum is odd".into()));
    }
    let mut stubs: Vec<usize> = degrees
        .iter()
        .enumerate()
        .flat_map(|(v, &k)| std::iter::repeat_n(v, k))
        .collect();
    let mut rng = seed::rng(seed);
    stubs.shuffle(&mut rng);
    let mut report = GenerationReport::default();
    let mut edges = Vec::with_capacity(total / 2);
    for pair in stubs.chunks_exact(2) {
        let (u, v) = (pair[0], pair[1]);
        if u == v {
            report.self_loops_erased += 1;
        } else {
            edges.push((u.min(v), u.max(v)));
        }
    }
    edges.sort_unstable();
    let before = edges.len();
    edges.dedup();
    report.multi_edges_erased = before - edges.len();
    if report.self_loops_erased + report.multi_edges_erased > 0 {
        debug!(
            "configuration model erased {} self-loops and {} multi-edges of {} stub pairs",
            report.self_loops_erased,
            report.multi_edges_erased,
            total / 2
        );
    }
    Ok((Graph::from_sorted(n, edges, None), report))
}

fn erdos_renyi(n: usize, p: f64, seed: u64) -> Graph {
    let mut edges = Vec::new();
    if p >= 1.0 {
        for v in 1..n {
            for w in 0..v {
                edges.push((w, v));
            }
        }
    } else if p > 0.0 {
        // Geometric skipping over the lower triangle.
        let mut rng = seed::rng(seed);
        let log_q = (1.0 - p).ln();
        let (mut v, mut w) = (1usize, -1i64);
        while v < n {
            let r: f64 = rng.random();
            w += 1 + ((1.0 - r).ln() / log_q).floor() as i64;
            while w >= v as i64 && v < n {
                w -= v as i64;
                v += 1;
            }
            if v < n {
                edges.push((w as usize, v));
            }
        }
    }
    edges.sort_unstable();
    Graph::from_sorted(n, edges, None)
}

fn preferential_attachment(n: usize, m: usize, seed: u64) -> Graph {
    let mut rng = seed::rng(seed);
    let mut edges = Vec::new();
    let mut ends: Vec<usize> = Vec::new();
    let core = (m + 1).min(n);
    for v in 1..core {
        for w in 0..v {
            edges.push((w, v));
            ends.push(w);
            ends.push(v);
        }
    }
    let mut chosen = Vec::with_capacity(m);
    for v in core..n {
        chosen.clear();
        while chosen.len() < m {
            let t = ends[rng.random_range(0..ends.len())];
            if !chosen.contains(&t) {
                chosen.push(t);
            }
        }
        for &t in &chosen {
            edges.push((t, v));
            ends.push(t);
            ends.push(v);
        }
    }
    edges.sort_unstable();
    Graph::from_sorted(n, edges, None)
}
