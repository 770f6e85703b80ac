//! Command-line harness: experiment presets and configuration, CSV output,
//! kernel tables and the verification suite.

pub mod config;
pub mod criteria;
pub mod error;
pub mod experiment;
pub mod kernel_table;
pub mod output;
pub mod suite;

pub use config::{ExperimentConfig, GTrue, Overrides};
pub use error::{CliError, CliResult};
pub use experiment::{run_experiment, run_forward, RunReport};
pub use kernel_table::emit_kernel_table;
pub use suite::{run_verification_suite, SuiteLevel, SuiteReport};
