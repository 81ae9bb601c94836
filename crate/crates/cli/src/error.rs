use thiserror::Error;

use crate::config::line_of;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] secnoma::Error),
    #[error("output error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("non-finite value in column {column}")]
    NonFinite { column: String },
}

impl CliError {
    pub(crate) fn config_at(source: &str, key: &str, reason: &str) -> CliError {
        match line_of(source, key) {
            Some(line) => CliError::Config(format!("{key} (line {line}): {reason}")),
            None => CliError::Config(format!("{key}: {reason}")),
        }
    }

    /// Process exit code: 2 for configuration problems, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}
