use std::path::PathBuf;

use crate::env::Domain;

/// Errors raised anywhere in the library.
///
/// Numerical failures (non-finite values, divergence) are surfaced as errors
/// instead of being propagated as NaN.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("simulator diverged: {0}")]
    Divergence(String),

    #[error("backward called without a matching cached forward pass")]
    StaleCache,

    #[error("empty batch: {0}")]
    EmptyBatch(&'static str),

    #[error("domain tag mismatch: expected {expected:?}, got {got:?}")]
    TagMismatch { expected: Domain, got: Domain },

    #[error("reward heatmap requires a state-only reward term over a 2-D state space")]
    HeatmapUndefined,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed file {path}: line {line}: {message}")]
    Malformed {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("missing input: {0}")]
    Missing(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    TomlDe(#[from] toml::de::Error),

    #[error(transparent)]
    TomlSer(#[from] toml::ser::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Returns an error naming `what` if any entry of `values` is NaN or infinite.
pub(crate) fn ensure_finite(values: &[f64], what: &str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what.to_owned()))
    }
}
