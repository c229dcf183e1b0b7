//! The four-method benchmark: per-app error matrix, averages, error
//! reduction curves and a JSON sidecar with everything needed to replay a
//! run.

mod method;
mod report;

use thiserror::Error;

use crate::fit::FitError;

pub use method::{parse_methods, run_method, BenchConfig, DataDrivenConfig, ExpertScores, MethodKind, MethodRun};
pub use report::{compare, dataset_checksum, BenchmarkReport, Cell};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("no expert score for app {0}")]
    MissingExpertScore(String),
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
}
