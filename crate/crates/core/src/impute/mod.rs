//! Classical imputation baselines: mean/mode substitution, k-nearest
//! neighbours over co-observed dimensions, and single-chain chained
//! equations with ridge-damped linear regressions.
//!
//! Every imputer is split into a fit step and a transform step so an
//! evaluation split can be imputed with statistics learned on the training
//! split only. [`impute`] fits and transforms on the same table.

mod chained;
mod knn;
mod mean;
mod tune;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::table::{Dataset, Mask};

pub use chained::{ChainedModel, RIDGE_LAMBDA};
pub use knn::KnnModel;
pub use mean::MeanModel;
pub use tune::{tune_k, DownstreamProxy, DEFAULT_K_GRID};

pub const DEFAULT_MAX_ITER: usize = 10;
pub const DEFAULT_TOL: f64 = 1e-4;

fn default_max_iter() -> usize {
    DEFAULT_MAX_ITER
}
fn default_tol() -> f64 {
    DEFAULT_TOL
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum ImputerKind {
    Mean,
    Knn {
        k: usize,
    },
    #[serde(alias = "chained_equations")]
    Chained {
        #[serde(default = "default_max_iter")]
        max_iter: usize,
        #[serde(default = "default_tol")]
        tol: f64,
    },
    /// Imputation produced outside this crate and read from disk.
    External {
        name: String,
    },
}

impl ImputerKind {
    pub fn chained() -> Self {
        ImputerKind::Chained {
            max_iter: DEFAULT_MAX_ITER,
            tol: DEFAULT_TOL,
        }
    }

    pub fn label(&self) -> String {
        match self {
            ImputerKind::Mean => "mean".into(),
            ImputerKind::Knn { k } => format!("knn(k={k})"),
            ImputerKind::Chained { .. } => "chained".into(),
            ImputerKind::External { name } => name.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ImputerKind::Knn { k: 0 } => {
                Err(Error::InvalidParameter("k must be at least 1".into()))
            }
            ImputerKind::Chained { max_iter: 0, .. } => {
                Err(Error::InvalidParameter("max_iter must be at least 1".into()))
            }
            ImputerKind::Chained { tol, .. } if tol.is_nan() || tol <= 0.0 => {
                Err(Error::InvalidParameter("tol must be positive".into()))
            }
            _ => Ok(()),
        }
    }
}

/// A completed table plus the mask it was completed from.
#[derive(Debug, Clone, PartialEq)]
pub struct ImputedDataset {
    pub dataset: Dataset,
    pub original_mask: Mask,
    pub imputer: ImputerKind,
    /// Chained-equation sweeps that changed at least one cell.
    pub sweeps: usize,
    /// False when an iterative imputer hit `max_iter` before `tol`.
    pub converged: bool,
}

impl ImputedDataset {
    /// Wraps a table completed elsewhere. `completed` must be fully
    /// observed and agree with `incomplete` on every observed cell.
    pub fn external(name: &str, incomplete: &Dataset, completed: &Dataset) -> Result<Self> {
        if completed.mask().any() {
            return Err(Error::Shape("external imputation still has missing cells".into()));
        }
        if completed.n() != incomplete.n() || completed.d() != incomplete.d() {
            return Err(Error::Shape("external imputation has a different shape".into()));
        }
        Ok(ImputedDataset {
            dataset: completed.clone(),
            original_mask: incomplete.mask().clone(),
            imputer: ImputerKind::External { name: name.into() },
            sweeps: 0,
            converged: true,
        })
    }
}

/// A fitted imputer that can complete tables sharing the training schema.
#[derive(Debug, Clone)]
pub enum FittedImputer {
    Mean(MeanModel),
    Knn(KnnModel),
    Chained(ChainedModel),
}

impl FittedImputer {
    pub fn transform(&self, ds: &Dataset) -> Result<ImputedDataset> {
        match self {
            FittedImputer::Mean(m) => m.transform(ds),
            FittedImputer::Knn(m) => m.transform(ds),
            FittedImputer::Chained(m) => m.transform(ds),
        }
    }
}

/// Fits on `ds` and returns its completion together with the fitted model.
pub fn fit_transform(ds: &Dataset, kind: &ImputerKind) -> Result<(ImputedDataset, FittedImputer)> {
    kind.validate()?;
    match *kind {
        ImputerKind::Mean => {
            let m = MeanModel::fit(ds)?;
            Ok((m.transform(ds)?, FittedImputer::Mean(m)))
        }
        ImputerKind::Knn { k } => {
            let m = KnnModel::fit(ds, k)?;
            Ok((m.impute_self()?, FittedImputer::Knn(m)))
        }
        ImputerKind::Chained { max_iter, tol } => {
            let (out, m) = ChainedModel::fit_transform(ds, max_iter, tol)?;
            Ok((out, FittedImputer::Chained(m)))
        }
        ImputerKind::External { ref name } => Err(Error::InvalidParameter(format!(
            "external imputation `{name}` cannot be fitted"
        ))),
    }
}

pub fn impute(ds: &Dataset, kind: &ImputerKind) -> Result<ImputedDataset> {
    fit_transform(ds, kind).map(|(out, _)| out)
}

pub fn impute_mean(ds: &Dataset) -> Result<ImputedDataset> {
    impute(ds, &ImputerKind::Mean)
}

pub fn impute_knn(ds: &Dataset, k: usize) -> Result<ImputedDataset> {
    impute(ds, &ImputerKind::Knn { k })
}

pub fn impute_chained(ds: &Dataset, max_iter: usize, tol: f64) -> Result<ImputedDataset> {
    impute(ds, &ImputerKind::Chained { max_iter, tol })
}

fn check_compatible(train_names: &[String], train_levels: &[Vec<String>], ds: &Dataset) -> Result<()> {
    let same_names = ds.d() == train_names.len()
        && ds.schema().feature_names().zip(train_names).all(|(a, b)| a == b);
    if !same_names || ds.all_levels() != train_levels {
        return Err(Error::Shape(
            "table does not share the fitted imputer's schema".into(),
        ));
    }
    Ok(())
}

fn feature_names(ds: &Dataset) -> Vec<String> {
    ds.schema().feature_names().map(str::to_string).collect()
}

fn require_observed(ds: &Dataset) -> Result<()> {
    for j in 0..ds.d() {
        if ds.mask().column_count(j) == ds.n() {
            return Err(Error::FullyMissingFeature(ds.schema().feature(j).name.clone()));
        }
    }
    Ok(())
}
