//! Typed tabular data: schema, dataset with missingness mask, CSV I/O,
//! quantiles and summary statistics, and the seeded train/eval split.

mod dataset;
mod io;
mod schema;
mod split;
mod stats;

pub use dataset::{Dataset, Mask, Value};
pub use io::{load_csv, read_csv, save_csv, write_csv};
pub use schema::{ColumnKind, FeatureSpec, Schema, TargetSpec, DEFAULT_DECIMALS};
pub use split::{split_eval, split_indices};
pub use stats::{
    mean, quantile, quantile_sorted, quantile_with, round_count, std_dev, summarize,
    FeatureSummary, QuantileMethod, SummaryStats,
};
pub(crate) use stats::{check_fraction, level_counts, mode_code};
