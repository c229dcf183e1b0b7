//! User-opinion survey records: CSV input and output, anonymization,
//! micro-community windowing, histograms and a synthetic generator.

mod analytics;
mod anonymize;
mod io;
mod record;
mod synth;

use thiserror::Error;

pub use analytics::{
    communities, correlation_points, histogram, partition, running_average, segments, Community, CorrelationPoint,
    SegmentPoint,
};
pub use anonymize::anonymize;
pub use io::{load_records, read_records, write_records, Loaded, RowDiagnostic, HEADER};
pub use record::{app_number, is_likert, Gender, Measure, UserOpinionRecord};
pub use synth::{generate_synthetic, SynthConfig};

#[derive(Debug, Error)]
pub enum QumaError {
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("bad header: {0}")]
    Header(String),
    #[error("unknown measure `{0}`")]
    UnknownMeasure(String),
    #[error("unknown app `{0}`")]
    UnknownApp(String),
    #[error("a window of {window} does not fit a series of length {len}")]
    Window { len: usize, window: usize },
    #[error("record {app_id}#{seq} has no {measure} score")]
    MissingScore { measure: Measure, app_id: String, seq: u64 },
    #[error("invalid generator config: {0}")]
    Config(String),
}
