//! The weighted quality estimator and the procedures that fit it.
//!
//! Parameters are laid out as one weight per scored feature followed by the
//! bias. Every search takes the objective as a closure over that layout, so
//! the same code fits survey data and toy functions alike.

mod model;
mod search;
mod space;

use thiserror::Error;

use crate::kv::KvError;
use crate::quma::Measure;

pub use model::{
    default_polarity, error_percentage, features_from_rules, objective, objective_with, Design, ScoringModel, SCALE_MAX,
    SCALE_MIN,
};
pub use search::{
    exhaustive, hill_climb, random_baseline, state_space_search, FitResult, HillClimbConfig, DEFAULT_EXHAUSTIVE_CAP,
};
pub use space::{Coordinate, ParameterSpace, SpaceConfig};

#[derive(Debug, Error)]
pub enum FitError {
    #[error("no records to score")]
    Empty,
    #[error("record {app_id}#{seq} has no {measure} score")]
    MissingFeature { measure: Measure, app_id: String, seq: u64 },
    #[error("grid of {size} states exceeds the cap of {cap}")]
    GridTooLarge { size: u64, cap: u64 },
    #[error("{0}")]
    Config(String),
    #[error("scoring rules: {0}")]
    Rules(String),
    #[error(transparent)]
    Kv(#[from] KvError),
}

/// Writes a trace as `state_index,error` CSV.
pub fn write_trace<W: std::io::Write>(out: W, result: &FitResult) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["state_index", "error"])?;
    for (i, e) in &result.trace {
        w.write_record([i.to_string(), e.to_string()])?;
    }
    w.flush()
}
