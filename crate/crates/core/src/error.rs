use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient padding for window {window}: need {needed} samples on each side, have {before} before and {after} after")]
    InsufficientPadding {
        window: usize,
        needed: usize,
        before: usize,
        after: usize,
    },

    #[error("degenerate series: {0}")]
    DegenerateSeries(String),

    #[error("degenerate spectrum: no nonzero signed contributions for k={k}, M={max_lag}")]
    DegenerateSpectrum { k: usize, max_lag: usize },

    #[error("no candidate C-sets left for k={k} after exclusion")]
    NoCandidateSets { k: usize },

    #[error("degenerate interval: {0}")]
    DegenerateInterval(String),

    #[error("target of {target} local maxima not achievable; achievable counts: {achievable:?}")]
    NotAchievable { target: usize, achievable: Vec<usize> },

    #[error("invalid autocorrelation: lag-1 coefficient {0} must satisfy |r| < 1")]
    InvalidAutocorrelation(f64),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DegenerateSeries(_)
            | Error::DegenerateSpectrum { .. }
            | Error::DegenerateInterval(_)
            | Error::NoCandidateSets { .. }
            | Error::InvalidAutocorrelation(_) => 4,
            _ => 3,
        }
    }
}
