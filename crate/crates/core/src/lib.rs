//! Simulation core for network constructors: population protocols whose
//! node pairs additionally carry a binary connection state.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs plus an explicit seed; file formats, batch
//! execution and the command line live in the `netcon` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod detector;
mod dsu;
pub mod engine;
pub mod error;
pub mod protocol;
pub mod rng;
pub mod scheduler;

pub use detector::{DegreeHistogram, DetectorKind};
pub use engine::{
    apply_interaction, init_configuration, run, Configuration, EdgeState, InteractionOutcome, NodeId, NodeState,
    Observer, RuleRef, RunResult, Simulation, StepEvent,
};
pub use error::{ConfigError, ParseError, ProtocolError};
pub use protocol::{
    counting::{counting_transition, CountingLeaderState, CountingRule},
    InitialAssignment, ProtocolKind, ProtocolSpec, Rule, StateId, Triple,
};
pub use scheduler::{HistoryBuffer, Scheduler, SchedulerKind, SchedulerParams};
