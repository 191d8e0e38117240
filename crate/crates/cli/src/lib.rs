//! Batch front end: run configurations, comparison-space reports,
//! verification suites and curve files.

pub mod commands;
pub mod config;
pub mod error;
pub mod hspec;
pub mod suites;

pub use commands::{cmd_curves, cmd_space, cmd_verify, fixtures_export, fixtures_list, Options, RunManifest};
pub use config::RunConfig;
pub use error::{CliError, CliResult};
