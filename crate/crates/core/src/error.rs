use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the selection library and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected length {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("zero-norm vector (degenerate user channel)")]
    ZeroNorm,

    #[error("basis construction failed after {attempts} redraws (residual below threshold)")]
    DegenerateBasis { attempts: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular set: zero-forcing undefined for the selected channels")]
    SingularSet,

    #[error("search space of {size} subsets exceeds the cap of {cap}")]
    SearchSpaceTooLarge { size: String, cap: u64 },

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("format: {0}")]
    Format(String),
}

impl Error {
    /// Short machine-readable tag, used by the CLI for single-line errors.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::ZeroNorm => "zero_norm",
            Error::DegenerateBasis { .. } => "degenerate_basis",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::SingularSet => "singular_set",
            Error::SearchSpaceTooLarge { .. } => "search_space_too_large",
            Error::Config(_) => "config",
            Error::Io { .. } => "io",
            Error::Format(_) => "format",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
