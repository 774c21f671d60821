use std::path::PathBuf;

use galb::io::FormatError;
use galb::{BaselineError, GaError, RoutingError, TopologyError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Ga(#[from] GaError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
    #[error(transparent)]
    Routing(#[from] RoutingError),
    #[error("experiment has no runs")]
    EmptyExperiment,
    #[error("{0}")]
    Usage(String),
    #[error("writing {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

impl BenchError {
    /// 2 for bad input (documents, parameters, unroutable demands),
    /// 3 when the exhaustive search budget is exceeded, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Baseline(BaselineError::BudgetExceeded { .. }) => EXIT_BUDGET,
            BenchError::Format(_)
            | BenchError::Topology(_)
            | BenchError::Ga(_)
            | BenchError::Baseline(_)
            | BenchError::Routing(_)
            | BenchError::EmptyExperiment
            | BenchError::Usage(_) => EXIT_INPUT,
            BenchError::Output { .. } | BenchError::Csv(_) => EXIT_INTERNAL,
        }
    }
}
