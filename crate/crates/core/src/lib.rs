//! Missingness-aware serialization of tabular data for language models.
//!
//! The crate covers the whole path from a numeric table to instruction-tuning
//! records:
//!
//! - [`missingness`] masks complete tables under MCAR, MAR or MNAR.
//! - [`impute`] holds the numeric baselines (mean, k-NN, chained equations).
//! - [`contextual`] renders rows as sentences, with missing cells replaced by
//!   a per-feature descriptor or a generic token, and parses them back.
//! - [`descriptors`] manages descriptor catalogs, bundled or requested from a
//!   chat-completions endpoint and cached on disk.
//! - [`finetune`] writes `{instruction, input, output}` JSON lines.
//! - [`eval`] runs the repeated split/mask/impute/score grid with a k-NN
//!   proxy classifier and renders reports.
//! - [`pipeline`] chains all of it from one TOML config.
//!
//! Each capability has a runnable example under `examples/`:
//! `inject_missingness`, `impute_baselines`, `tune_knn`, `contextualize_wine`,
//! `descriptor_catalog`, `emit_finetune`, `evaluate_grid` and `pipeline`.
//!
//! ```
//! use ctximpute::contextual::{render_record, DescriptorMode};
//! use ctximpute::missingness::inject_mnar;
//!
//! let wine = ctximpute::bundled::dataset("wine").unwrap();
//! let masked = inject_mnar(&wine, 0.3).unwrap();
//! let mode = DescriptorMode::generic("NaN").unwrap();
//! let record = render_record(&masked, 95, &mode, true).unwrap();
//! assert!(record.line().starts_with("The alcohol content in the wine is"));
//! ```

pub mod bundled;
pub mod cli;
pub mod contextual;
pub mod descriptors;
pub mod error;
pub mod eval;
pub mod finetune;
pub mod impute;
pub mod missingness;
pub mod pipeline;
pub mod seed;
pub mod table;

pub use error::{Error, Result};
