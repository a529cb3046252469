use thiserror::Error;

use crate::specfun::{DomainError, SolveError};

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid value for `{field}`: {value}")]
    InvalidParameter { field: &'static str, value: f64 },
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("root solver failed: {0}")]
    Solver(#[from] SolveError),
    #[error("cutoff threshold underflows for budget {pbar} (delta {delta}, omega {omega})")]
    CutoffUnderflow { pbar: f64, delta: f64, omega: f64 },
    #[error("trial count must be at least 1")]
    InvalidTrials,
    #[error("target outage probability must lie in (0, 1), got {0}")]
    InvalidOutageTarget(f64),
    #[error("{0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
