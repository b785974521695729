use serde::{Deserialize, Serialize};

use super::SourceClaimNetwork;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankScores {
    pub sources: Vec<f64>,
    pub claims: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Mutual reinforcement: a claim scores the sum of its sources' scores, a
/// source the sum of its claims' scores, each side rescaled to a maximum of 1
/// after every round. Starts from uniform source scores.
pub fn iterative_rank(net: &SourceClaimNetwork, tol: f64, max_iter: usize) -> Result<RankScores> {
    if net.assertion_count() == 0 {
        return Err(Error::EmptyNetwork);
    }
    let mut sources = vec![1.0; net.n_sources()];
    let mut claims = vec![0.0; net.n_claims()];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        iterations += 1;
        let new_claims: Vec<f64> = (0..net.n_claims())
            .map(|c| net.sources_of(c).iter().map(|&s| sources[s]).sum())
            .collect();
        let new_claims = rescale(new_claims);
        let new_sources: Vec<f64> = (0..net.n_sources())
            .map(|s| net.claims_of(s).iter().map(|&c| new_claims[c]).sum())
            .collect();
        let new_sources = rescale(new_sources);
        let change = max_change(&claims, &new_claims).max(max_change(&sources, &new_sources));
        claims = new_claims;
        sources = new_sources;
        if change < tol {
            converged = true;
            break;
        }
    }
    Ok(RankScores { sources, claims, iterations, converged })
}

fn rescale(mut v: Vec<f64>) -> Vec<f64> {
    let max = v.iter().copied().fold(0.0, f64::max);
    if max > 0.0 {
        v.iter_mut().for_each(|x| *x /= max);
    }
    v
}

fn max_change(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
