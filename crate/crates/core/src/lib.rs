//! Network robustness and resiliency laboratory.
//!
//! Percolation under random and targeted node removal, threshold, overload and
//! weighted-link cascades, interdependent-network collapse, degeneracy-based
//! buffering, and source/claim credibility estimation, wired together by a
//! scenario-driven experiment harness.

pub mod buffering;
pub mod cascade;
pub mod error;
pub mod graph;
pub mod harness;
pub mod interdependent;
pub mod percolation;
pub mod seed;
pub mod truth;

pub use error::{Error, Result};
pub use graph::Graph;
