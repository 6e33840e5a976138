use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("argument outside the domain of {function}: {detail}")]
    Domain { function: &'static str, detail: String },

    #[error("r = {r} lies inside the kernel cutoff a = {cutoff}")]
    Cutoff { r: f64, cutoff: f64 },

    #[error("unsupported operation for kernel '{kernel}': {reason}")]
    Unsupported { kernel: String, reason: String },

    #[error("kernel '{kernel}' must satisfy -G''(0) = 1, found {found}")]
    Normalization { kernel: String, found: f64 },

    #[error("degenerate metric at {at}: {detail}")]
    DegenerateMetric { at: f64, detail: String },

    #[error("numerical accuracy not reached: {0}")]
    Accuracy(String),

    #[error("invalid Taylor coefficients: {0}")]
    InvalidCoefficients(String),

    #[error("surface of revolution cannot be embedded: {0}")]
    EmbeddingImpossible(String),

    #[error("ill-conditioned metric (condition number {0:.3e})")]
    Conditioning(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}:{line}: {detail}")]
    Parse { path: PathBuf, line: usize, detail: String },
}

impl Error {
    pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain { function, detail: detail.into() }
    }

    pub(crate) fn invalid(detail: impl Into<String>) -> Self {
        Error::InvalidParameter(detail.into())
    }

    /// True for errors caused by bad input rather than by a numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::Unsupported { .. }
                | Error::Normalization { .. }
                | Error::Cutoff { .. }
                | Error::Domain { .. }
                | Error::Geometry(_)
                | Error::InvalidCoefficients(_)
                | Error::Parse { .. }
        )
    }
}
