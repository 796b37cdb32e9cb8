use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by the corpus toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A line of a line-delimited input that could not be turned into a record.
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("benchmark corpus is empty")]
    EmptyBenchmark,

    #[error("rollout {problem_id}: expected {expected} generations, found {found}")]
    RolloutSize {
        problem_id: String,
        expected: usize,
        found: usize,
    },

    #[error("correct count {count} out of range [0, {k}]")]
    CountOutOfRange { count: u32, k: u32 },

    #[error("problem {problem_id}: {reason}")]
    VerdictShape { problem_id: String, reason: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
