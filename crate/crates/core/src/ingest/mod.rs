//! Dataset and prediction files, validation, and descriptive statistics.

mod dataset;
mod predictions;
mod stats;

pub use dataset::{
    load_dataset, parse_dataset, parse_examples, read_text, validate_dataset, validate_example,
    Dataset, Split, Violation, ViolationKind,
};
pub use predictions::{load_predictions, parse_predictions, Prediction, PredictionSet};
pub use stats::{compute_stats, compute_stats_with, stats_csv, AvgMax, StatsReport};
