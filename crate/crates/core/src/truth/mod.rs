//! Source and claim credibility from a bipartite "source asserts claim"
//! network: iterative ranking, maximum-likelihood source reliability with
//! confidence intervals, and a synthetic generator for the same model.

mod em;
mod rank;
mod synth;

pub use em::{
    classify_and_rerank, confidence_intervals, em_estimate, Classification, CredibilityEstimate, EmOptions,
    Interval, CLAIMS_HEADER, ESTIMATES_HEADER, PROB_FLOOR,
};
pub use rank::{iterative_rank, RankScores};
pub use synth::{flip_source, synth_generate, SynthSpec};

use crate::error::{Error, Result};

pub const ASSERTIONS_HEADER: &str = "source_id,claim_id";

/// Who asserted what: `(source, claim)` pairs meaning "source says the claim
/// is true". Absent pairs are informative non-assertions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceClaimNetwork {
    n_sources: usize,
    n_claims: usize,
    by_source: Vec<Vec<usize>>,
    by_claim: Vec<Vec<usize>>,
}

impl SourceClaimNetwork {
    pub fn new(n_sources: usize, n_claims: usize, assertions: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut by_source = vec![Vec::new(); n_sources];
        let mut by_claim = vec![Vec::new(); n_claims];
        for (s, c) in assertions {
            if s >= n_sources || c >= n_claims {
                return Err(Error::param("assertions", format!("({s}, {c}) out of range")));
            }
            by_source[s].push(c);
            by_claim[c].push(s);
        }
        for (s, list) in by_source.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::param("assertions", format!("duplicate assertion ({s}, {})", w[0])));
            }
        }
        for list in &mut by_claim {
            list.sort_unstable();
        }
        Ok(SourceClaimNetwork { n_sources, n_claims, by_source, by_claim })
    }

    pub fn n_sources(&self) -> usize {
        self.n_sources
    }

    pub fn n_claims(&self) -> usize {
        self.n_claims
    }

    pub fn assertion_count(&self) -> usize {
        self.by_source.iter().map(Vec::len).sum()
    }

    /// Claims asserted by `source`, sorted.
    pub fn claims_of(&self, source: usize) -> &[usize] {
        &self.by_source[source]
    }

    /// Sources asserting `claim`, sorted.
    pub fn sources_of(&self, claim: usize) -> &[usize] {
        &self.by_claim[claim]
    }

    pub fn assertions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.by_source.iter().enumerate().flat_map(|(s, cs)| cs.iter().map(move |&c| (s, c)))
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{ASSERTIONS_HEADER}\n");
        for (s, c) in self.assertions() {
            out.push_str(&format!("{s},{c}\n"));
        }
        out
    }

    /// Parses `source_id,claim_id` rows. Counts default to the largest id
    /// seen plus one; pass them to keep silent sources or unasserted claims.
    pub fn from_csv(text: &str, n_sources: Option<usize>, n_claims: Option<usize>) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, h)) if h.trim() == ASSERTIONS_HEADER => {}
            Some((i, h)) => {
                return Err(Error::Parse { line: i + 1, msg: format!("expected header `{ASSERTIONS_HEADER}`, got `{h}`") })
            }
            None => return Err(Error::EmptyNetwork),
        }
        let mut pairs = Vec::new();
        for (i, line) in lines {
            let bad = || Error::Parse { line: i + 1, msg: format!("expected `source_id,claim_id`, got `{line}`") };
            let (s, c) = line.trim().split_once(',').ok_or_else(bad)?;
            pairs.push((s.trim().parse().map_err(|_| bad())?, c.trim().parse().map_err(|_| bad())?));
        }
        let ns = n_sources.unwrap_or_else(|| pairs.iter().map(|p| p.0 + 1).max().unwrap_or(0));
        let nc = n_claims.unwrap_or_else(|| pairs.iter().map(|p| p.1 + 1).max().unwrap_or(0));
        Self::new(ns, nc, pairs)
    }
}
