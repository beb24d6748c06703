use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("size error: {0}")]
    Size(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("no convergence after {iterations} iterations (best residual {best_residual:e})")]
    Convergence { iterations: usize, best_residual: f64 },

    #[error("unsupported block: {0}")]
    UnsupportedBlock(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("grid error: {0}")]
    Grid(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("incomplete sweep: missing {} grid point(s), first (N={}, h={})", .missing.len(), .missing[0].0, .missing[0].1)]
    Coverage { missing: Vec<(usize, f64)> },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed record {path}: {source}")]
    Record {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_computational(&self) -> bool {
        matches!(
            self,
            Error::Convergence { .. }
                | Error::Fit(_)
                | Error::Coverage { .. }
                | Error::Io { .. }
                | Error::Record { .. }
        )
    }
}
