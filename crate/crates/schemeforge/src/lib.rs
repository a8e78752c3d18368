//! File formats, ingestion, export and the command-line frontend for
//! `schemeforge-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod export;
pub mod formats;
pub mod ingest;
pub mod parallel;

pub use cli::run_with;
pub use error::{CliError, ParseError};
