//! Maximum-likelihood source reliability. Each claim is true with prior
//! probability `d`; source `i` asserts a true claim with probability `a_i`
//! and a false one with probability `b_i`, independently of everything else.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::SourceClaimNetwork;
use crate::error::{Error, Result};

/// Probabilities are kept in `[PROB_FLOOR, 1 - PROB_FLOOR]`.
pub const PROB_FLOOR: f64 = 1e-6;

pub const ESTIMATES_HEADER: &str = "source_id,a_hat,b_hat,ci_low,ci_high";
pub const CLAIMS_HEADER: &str = "claim_id,posterior_true,label";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmOptions {
    /// Stop once the log-likelihood gains less than this per iteration.
    pub tol: f64,
    pub max_iter: usize,
    /// Initial `a_i` is the source's assertion rate plus this offset, `b_i`
    /// the rate minus it; the ordering `a_i > b_i` picks the labelling in
    /// which asserting a claim is evidence for it.
    pub init_offset: f64,
}

impl Default for EmOptions {
    fn default() -> Self {
        EmOptions { tol: 1e-9, max_iter: 10_000, init_offset: 0.1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub low: f64,
    pub high: f64,
    /// Information unavailable (boundary estimate or singular matrix); the
    /// interval is then all of `[0, 1]`.
    pub flagged: bool,
}

impl Interval {
    const UNINFORMATIVE: Interval = Interval { low: 0.0, high: 1.0, flagged: true };

    pub fn contains(&self, x: f64) -> bool {
        self.low <= x && x <= self.high
    }

    pub fn width(&self) -> f64 {
        self.high - self.low
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CredibilityEstimate {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub d: f64,
    /// Posterior probability that each claim is true.
    pub posterior: Vec<f64>,
    pub log_likelihood: f64,
    /// Log-likelihood at the initial point and after every iteration.
    pub log_likelihood_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Sources that assert every claim or none, or whose estimates sit on a
    /// probability clamp.
    pub degenerate: Vec<bool>,
    /// Filled by [`confidence_intervals`].
    pub a_intervals: Vec<Interval>,
    pub b_intervals: Vec<Interval>,
    pub d_interval: Option<Interval>,
    pub level: Option<f64>,
}

impl CredibilityEstimate {
    /// Point estimates with the interval on `a_hat` (blank before intervals
    /// are computed).
    pub fn estimates_csv(&self) -> String {
        let mut out = format!("{ESTIMATES_HEADER}\n");
        for i in 0..self.a.len() {
            let ci = self.a_intervals.get(i).map_or(",".to_string(), |c| format!("{},{}", c.low, c.high));
            out.push_str(&format!("{i},{},{},{ci}\n", self.a[i], self.b[i]));
        }
        out
    }
}

fn clamp(p: f64) -> f64 {
    p.clamp(PROB_FLOOR, 1.0 - PROB_FLOOR)
}

/// Posterior truth per claim and the observed-data log-likelihood.
fn e_step(net: &SourceClaimNetwork, a: &[f64], b: &[f64], d: f64) -> (Vec<f64>, f64) {
    let base_true = d.ln() + a.iter().map(|x| (1.0 - x).ln()).sum::<f64>();
    let base_false = (1.0 - d).ln() + b.iter().map(|x| (1.0 - x).ln()).sum::<f64>();
    let lift_a: Vec<f64> = a.iter().map(|x| x.ln() - (1.0 - x).ln()).collect();
    let lift_b: Vec<f64> = b.iter().map(|x| x.ln() - (1.0 - x).ln()).collect();
    let mut ll = 0.0;
    let posterior = (0..net.n_claims())
        .map(|c| {
            let srcs = net.sources_of(c);
            let l1 = base_true + srcs.iter().map(|&s| lift_a[s]).sum::<f64>();
            let l0 = base_false + srcs.iter().map(|&s| lift_b[s]).sum::<f64>();
            let m = l1.max(l0);
            let lse = m + ((l1 - m).exp() + (l0 - m).exp()).ln();
            ll += lse;
            (l1 - lse).exp()
        })
        .collect();
    (posterior, ll)
}

/// Expectation-maximization from the assertion-rate initialization.
pub fn em_estimate(net: &SourceClaimNetwork, options: &EmOptions) -> Result<CredibilityEstimate> {
    let (ns, nc) = (net.n_sources(), net.n_claims());
    if ns < 2 || nc < 2 {
        return Err(Error::param("network", format!("need at least 2 sources and 2 claims, got {ns} x {nc}")));
    }
    if !(options.tol >= 0.0) || options.max_iter == 0 {
        return Err(Error::param("options", "tol must be >= 0 and max_iter >= 1"));
    }
    let rate: Vec<f64> = (0..ns).map(|s| net.claims_of(s).len() as f64 / nc as f64).collect();
    let mut a: Vec<f64> = rate.iter().map(|r| clamp(r + options.init_offset)).collect();
    let mut b: Vec<f64> = rate.iter().map(|r| clamp(r - options.init_offset)).collect();
    let mut d = 0.5;
    let (mut posterior, mut ll) = e_step(net, &a, &b, d);
    let mut trace = vec![ll];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < options.max_iter {
        iterations += 1;
        let total_true: f64 = posterior.iter().sum();
        let total_false = nc as f64 - total_true;
        for s in 0..ns {
            let hit_true: f64 = net.claims_of(s).iter().map(|&c| posterior[c]).sum();
            let hit_false = net.claims_of(s).len() as f64 - hit_true;
            a[s] = clamp(if total_true > 0.0 { hit_true / total_true } else { 0.0 });
            b[s] = clamp(if total_false > 0.0 { hit_false / total_false } else { 0.0 });
        }
        d = clamp(total_true / nc as f64);
        let (p, new_ll) = e_step(net, &a, &b, d);
        posterior = p;
        let gain = new_ll - ll;
        ll = new_ll;
        trace.push(ll);
        if gain < options.tol {
            converged = true;
            break;
        }
    }
    let on_clamp = |x: f64| x <= PROB_FLOOR || x >= 1.0 - PROB_FLOOR;
    let degenerate = (0..ns)
        .map(|s| {
            let k = net.claims_of(s).len();
            k == 0 || k == nc || on_clamp(a[s]) || on_clamp(b[s])
        })
        .collect();
    Ok(CredibilityEstimate {
        a,
        b,
        d,
        posterior,
        log_likelihood: ll,
        log_likelihood_trace: trace,
        iterations,
        converged,
        degenerate,
        a_intervals: Vec::new(),
        b_intervals: Vec::new(),
        d_interval: None,
        level: None,
    })
}

/// Normal-approximation intervals from the observed information at the
/// estimate: expected complete-data information minus the information lost
/// to the unobserved truth labels. Parameters on a clamp are held fixed and
/// get `[0, 1]`; a singular matrix flags everything.
pub fn confidence_intervals(est: &CredibilityEstimate, net: &SourceClaimNetwork, level: f64) -> Result<CredibilityEstimate> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::param("level", format!("{level} outside (0, 1)")));
    }
    let ns = net.n_sources();
    if est.a.len() != ns || est.posterior.len() != net.n_claims() {
        return Err(Error::SizeMismatch { left: est.a.len(), right: ns });
    }
    let dim = 2 * ns + 1;
    let on_clamp = |x: f64| x <= PROB_FLOOR || x >= 1.0 - PROB_FLOOR;
    let value = |k: usize| {
        if k < ns {
            est.a[k]
        } else if k < 2 * ns {
            est.b[k - ns]
        } else {
            est.d
        }
    };
    let free: Vec<usize> = (0..dim).filter(|&k| !on_clamp(value(k))).collect();
    let mut slot = vec![usize::MAX; dim];
    for (i, &k) in free.iter().enumerate() {
        slot[k] = i;
    }

    let (a, b, d) = (&est.a, &est.b, est.d);
    let total_true: f64 = est.posterior.iter().sum();
    let total_false = net.n_claims() as f64 - total_true;
    let mut diag = vec![0.0; dim];
    for s in 0..ns {
        let hit_true: f64 = net.claims_of(s).iter().map(|&c| est.posterior[c]).sum();
        let hit_false = net.claims_of(s).len() as f64 - hit_true;
        diag[s] = hit_true / (a[s] * a[s]) + (total_true - hit_true) / ((1.0 - a[s]) * (1.0 - a[s]));
        diag[ns + s] = hit_false / (b[s] * b[s]) + (total_false - hit_false) / ((1.0 - b[s]) * (1.0 - b[s]));
    }
    diag[2 * ns] = total_true / (d * d) + total_false / ((1.0 - d) * (1.0 - d));

    let m = free.len();
    let mut info = DMatrix::<f64>::zeros(m, m);
    for (i, &k) in free.iter().enumerate() {
        info[(i, i)] = diag[k];
    }
    // Score difference between the "true" and "false" completions of a claim.
    let silent: Vec<f64> = (0..dim)
        .map(|k| {
            if k < ns {
                -1.0 / (1.0 - a[k])
            } else if k < 2 * ns {
                1.0 / (1.0 - b[k - ns])
            } else {
                1.0 / d + 1.0 / (1.0 - d)
            }
        })
        .collect();
    let mut w = DVector::<f64>::zeros(m);
    for c in 0..net.n_claims() {
        for (i, &k) in free.iter().enumerate() {
            w[i] = silent[k];
        }
        for &s in net.sources_of(c) {
            if slot[s] != usize::MAX {
                w[slot[s]] = 1.0 / a[s];
            }
            if slot[ns + s] != usize::MAX {
                w[slot[ns + s]] = -1.0 / b[s];
            }
        }
        let p = est.posterior[c];
        info.ger(-p * (1.0 - p), &w, &w, 1.0);
    }

    let z = Normal::new(0.0, 1.0).expect("standard normal").inverse_cdf(0.5 + level / 2.0);
    let mut intervals = vec![Interval::UNINFORMATIVE; dim];
    let covariance = if m > 0 { info.cholesky().map(|ch| ch.inverse()) } else { None };
    if let Some(cov) = covariance {
        for (i, &k) in free.iter().enumerate() {
            let var = cov[(i, i)];
            if var.is_finite() && var > 0.0 {
                let half = z * var.sqrt();
                let x = value(k);
                intervals[k] = Interval { low: (x - half).max(0.0), high: (x + half).min(1.0), flagged: false };
            }
        }
    }
    let mut out = est.clone();
    out.a_intervals = intervals[..ns].to_vec();
    out.b_intervals = intervals[ns..2 * ns].to_vec();
    out.d_interval = Some(intervals[2 * ns]);
    out.level = Some(level);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    /// `posterior >= threshold`.
    pub labels: Vec<bool>,
    /// Sources by decreasing `a_hat - b_hat`, ties by index.
    pub ranking: Vec<usize>,
}

impl Classification {
    pub fn claims_csv(&self, est: &CredibilityEstimate) -> String {
        let mut out = format!("{CLAIMS_HEADER}\n");
        for (c, (&p, &l)) in est.posterior.iter().zip(&self.labels).enumerate() {
            out.push_str(&format!("{c},{p},{l}\n"));
        }
        out
    }

    /// Position of each source in the ranking (0 = most reliable).
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.ranking.len()];
        for (i, &s) in self.ranking.iter().enumerate() {
            pos[s] = i;
        }
        pos
    }
}

pub fn classify_and_rerank(est: &CredibilityEstimate, threshold: f64) -> Classification {
    let labels = est.posterior.iter().map(|&p| p >= threshold).collect();
    let mut ranking: Vec<usize> = (0..est.a.len()).collect();
    ranking.sort_by(|&x, &y| (est.b[x] - est.a[x]).total_cmp(&(est.b[y] - est.a[y])).then(x.cmp(&y)));
    Classification { labels, ranking }
}
