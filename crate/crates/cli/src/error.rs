use std::io;

use khalimsky::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },

    #[error("{path}: {source}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        source: serde_json::Error,
    },

    #[error("{0}")]
    Manifest(String),

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("writing output: {0}")]
    Output(#[from] io::Error),
}

impl CliError {
    /// 2 for unreadable or malformed input, 3 for spaces that violate the
    /// neighborhood axioms or are empty, 4 for exceeded budgets.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::InvalidSpace(_) => 3,
            CliError::Core(e) => match e {
                CoreError::InvalidSpace(_)
                | CoreError::EmptyInterval { .. }
                | CoreError::EmptyBox
                | CoreError::SpaceTooLarge(_) => 3,
                CoreError::BudgetExceeded { .. } => 4,
                _ => 2,
            },
            _ => 2,
        }
    }
}
