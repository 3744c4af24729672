//! Configuration-driven runner: executes the construction and verification
//! pipelines of `cmalab-core`, collects pass/fail records and dumps sampled
//! fields as CSV.

pub mod config;
pub mod error;
pub mod export;
pub mod pipeline;
pub mod report;

pub use config::{Command, RunConfig, SeedConfig};
pub use error::CliError;
pub use export::{export_csv, CsvField};
pub use pipeline::{run, run_with_fields};
pub use report::{Record, Report};
