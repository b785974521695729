use rand::Rng;
use serde::{Deserialize, Serialize};

use super::SourceClaimNetwork;
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub n_claims: usize,
    /// Per-source probability of asserting a true claim.
    pub a: Vec<f64>,
    /// Per-source probability of asserting a false claim.
    pub b: Vec<f64>,
    /// Prior probability that a claim is true.
    pub d: f64,
    #[serde(default)]
    pub seed: u64,
}

/// Samples claim truth values, then every source's assertions independently.
/// Returns the network and the hidden truth labels.
pub fn synth_generate(spec: &SynthSpec) -> Result<(SourceClaimNetwork, Vec<bool>)> {
    if spec.a.len() != spec.b.len() {
        return Err(Error::SizeMismatch { left: spec.a.len(), right: spec.b.len() });
    }
    for (name, values) in [("a", &spec.a), ("b", &spec.b)] {
        if let Some(p) = values.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::param(name, format!("{p} outside [0, 1]")));
        }
    }
    if !(0.0..=1.0).contains(&spec.d) {
        return Err(Error::param("d", format!("{} outside [0, 1]", spec.d)));
    }
    let mut truth_rng = seed::rng(seed::derive(spec.seed, 0));
    let truth: Vec<bool> = (0..spec.n_claims).map(|_| truth_rng.random_bool(spec.d)).collect();
    let mut rng = seed::rng(seed::derive(spec.seed, 1));
    let mut pairs = Vec::new();
    for (s, (&a, &b)) in spec.a.iter().zip(&spec.b).enumerate() {
        for (c, &t) in truth.iter().enumerate() {
            if rng.random_bool(if t { a } else { b }) {
                pairs.push((s, c));
            }
        }
    }
    Ok((SourceClaimNetwork::new(spec.a.len(), spec.n_claims, pairs)?, truth))
}

/// The same network with `source`'s assertions complemented: it now asserts
/// exactly the claims it used to stay silent on.
pub fn flip_source(net: &SourceClaimNetwork, source: usize) -> Result<SourceClaimNetwork> {
    if source >= net.n_sources() {
        return Err(Error::param("source", format!("{source} out of range")));
    }
    let flipped = (0..net.n_claims()).filter(|c| net.claims_of(source).binary_search(c).is_err());
    let others = net.assertions().filter(|&(s, _)| s != source);
    SourceClaimNetwork::new(
        net.n_sources(),
        net.n_claims(),
        others.chain(flipped.map(|c| (source, c))).collect::<Vec<_>>(),
    )
}
