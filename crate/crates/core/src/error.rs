use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid topology: {0}")]
    Topology(String),

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("invalid price grid: {0}")]
    Grid(String),

    #[error("infeasible: {needed:.3} users required but at most {reachable:.3} reachable")]
    Infeasible { needed: f64, reachable: f64 },

    #[error("{context}: {source}")]
    Scenario {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),

    #[error("no datacenter reachable from node {0}")]
    Unreachable(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Walks `Scenario` wrappers down to the underlying error.
    pub fn root(&self) -> &Error {
        match self {
            Error::Scenario { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self.root(), Error::Infeasible { .. })
    }
}
