use std::fmt;
use std::path::PathBuf;

use schemeforge_core::chartab::ChartabError;
use schemeforge_core::gf::GfError;
use schemeforge_core::loopcore::LoopError;
use schemeforge_core::permgroup::PermError;
use schemeforge_core::pipeline::PipelineError;
use schemeforge_core::scheme::SchemeError;
use schemeforge_core::zorn::ZornError;
use thiserror::Error;

/// Malformed input, located by 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError { line, column, message: message.into() }
    }

    pub fn from_json(e: &serde_json::Error) -> Self {
        ParseError::new(e.line(), e.column(), e.to_string())
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("configuration: {0}")]
    Config(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("{0}")]
    Compute(String),
    #[error("cap exceeded: {0}")]
    Cap(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Parse(_) => "parse",
            CliError::Io { .. } => "io",
            CliError::Config(_) => "config",
            CliError::Verification(_) => "verification",
            CliError::Compute(_) => "compute",
            CliError::Cap(_) => "cap",
        }
    }

    /// 1 for failed verification or computation, 2 for bad usage or input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) | CliError::Compute(_) => 1,
            _ => 2,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

fn is_cap(msg: &impl fmt::Display) -> bool {
    let s = msg.to_string();
    s.contains("cap") || s.contains("exceeds the limit")
}

macro_rules! compute_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                if is_cap(&e) { CliError::Cap(e.to_string()) } else { CliError::Compute(e.to_string()) }
            }
        }
    )*};
}

compute_error!(ChartabError, GfError, LoopError, PermError, PipelineError, SchemeError, ZornError);
