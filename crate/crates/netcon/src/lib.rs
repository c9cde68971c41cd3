//! Experiment harness and file formats for the network-constructor
//! simulator in [`netcon_core`].
//!
//! * [`batch`] runs single experiments and parallel batches.
//! * [`stats`] turns runs into hidden coefficients, exponent fits, counting
//!   success rates and census windows.
//! * [`results`] and [`report`] read and write `results.csv` / `report.json`.
//! * [`trace`] writes step traces and DOT snapshots.
//! * [`cli`] is the `netcon` command line.

pub mod batch;
pub mod cli;
pub mod error;
pub mod experiment;
pub mod report;
pub mod results;
pub mod stats;
pub mod trace;

pub use batch::{execute, run_batch, BatchOutput, RunOptions, RunOutput, RunSetup};
pub use error::{Error, Result};
pub use experiment::{ExperimentSpec, ProtocolSource, StepBudget};
pub use report::{build_report, write_results, Report};
pub use results::ResultRow;
pub use stats::Complexity;
