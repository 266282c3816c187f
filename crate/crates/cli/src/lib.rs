//! Batch front end for `bql-core`: run configuration, binary snapshots and
//! CSV diagnostics.

pub mod config;
pub mod error;
pub mod report;
pub mod run;
pub mod snapshot;

pub use config::{Family, InitialData, RunConfig, Subcommand};
pub use error::CliError;
pub use run::run;
pub use snapshot::{read_snapshot, write_snapshot, SnapshotHeader};
