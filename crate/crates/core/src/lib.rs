//! Finite causal-system simulation of two-party cryptographic resources placed in
//! Minkowski space-time.
//!
//! Resources, protocols, simulators and distinguishers are all [`causal::CausalSystem`]
//! values. Distinguishing advantages are computed exactly by enumerating finite seed
//! spaces and input strategies, with Monte Carlo estimates as a cross-check.

pub mod config;
pub mod rational;
pub mod spacetime;
pub mod cuts;
pub mod causal;
pub mod analysis;
pub mod error;
pub mod resources;
pub mod protocols;
pub mod adversary;
pub mod qsmall;
pub mod cli;

pub use error::{Error, Result};
