//! Sweeps, figure data, gain tables and the self-check suite for the
//! `pqsimo` command.

pub mod config;
pub mod error;
pub mod figures;
pub mod gains;
pub mod output;
pub mod sweep;
pub mod verify;

pub use config::{Method, MethodRequest, Settings, SweepRequest};
pub use error::{exit, CliError, Result};
pub use sweep::{run_sweep, RowFailure, SweepResult, SweepRow};
pub use verify::{run_verify, Mutation, VerifySummary};
