//! The `gaitpipe` batch CLI: analyze skeleton files, batch-aggregate
//! long-term gait summaries, generate synthetic scenarios, and score
//! detections against ground truth.

use std::fmt;
use std::path::{Path, PathBuf};

pub mod config;
pub mod report;
pub mod run;
pub mod summary;
pub mod svg;

/// CLI failures, split by exit code: config/usage problems exit 1,
/// input-data failures exit 2.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Input { path: PathBuf, msg: String },
}

impl CliError {
    pub fn input(path: &Path, msg: impl Into<String>) -> CliError {
        CliError::Input { path: path.to_path_buf(), msg: msg.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Input { .. } => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "{msg}"),
            CliError::Input { path, msg } => write!(f, "{}: {msg}", path.display()),
        }
    }
}

impl std::error::Error for CliError {}
