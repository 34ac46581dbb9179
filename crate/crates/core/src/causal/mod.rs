//! Finite classical causal systems.
//!
//! A [`CausalSystem`] is a network of atomic components. Each component owns a set of
//! ports, a finite weighted seed space and a deterministic reaction function from its
//! input slots to its output slots. Networks are evaluated in a time-sorted schedule
//! of all slot points, which is a linear extension of the causal order.

mod dist;
mod eval;
mod json;
mod symbol;
mod system;
mod validate;

pub use dist::{exact_distribution, sample, Assignment, OutcomeDistribution, Transcript};
pub use eval::{Evaluator, JointSeeds, OutView, Plan, SlotRef};
pub use json::{system_from_json, system_to_json, SystemJson};
pub use symbol::{Direction, Port, StampedMessage, Symbol};
pub use system::{attach, compose_parallel, connect, AtomBuilder, CausalSystem, Reaction, INNER};
pub use validate::{validate_causality, CausalityReport, CausalityWitness};

use crate::spacetime::SpaceTimePoint;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SystemError {
    #[error("invalid port {0}")]
    InvalidPort(String),
    #[error("port name clash on {0:?}")]
    PortClash(String),
    #[error("unknown port {0:?}")]
    UnknownPort(String),
    #[error("cannot wire {from:?} to {to:?}: {reason}")]
    Wiring { from: String, to: String, reason: String },
    #[error("zero-delay cycle at {0}")]
    ZeroDelayCycle(SpaceTimePoint),
    #[error("output {out} cannot depend on input {input}: {reason}")]
    IllegalDependency { out: String, input: String, reason: String },
    #[error("seed weights: {0}")]
    BadWeights(String),
    #[error("{what} has {size} elements, above the enumeration bound {bound}")]
    EnumerationBound { what: String, size: u128, bound: u128 },
    #[error("schedule: {0}")]
    Schedule(String),
    #[error("reaction table: {0}")]
    Table(String),
    #[error("interface mismatch: {0}")]
    Interface(String),
}

pub(crate) fn check_bound(what: &str, size: u128) -> Result<(), SystemError> {
    let bound = crate::config::max_enum();
    if size > bound {
        return Err(SystemError::EnumerationBound { what: what.to_string(), size, bound });
    }
    Ok(())
}

/// Advances a mixed-radix counter; returns false after wrapping around to all zeros.
pub(crate) fn odometer_next(idx: &mut [usize], radix: impl Fn(usize) -> usize) -> bool {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < radix(k) {
            return true;
        }
        idx[k] = 0;
    }
    false
}
