use super::{check_compatible, feature_names, require_observed, ImputedDataset, ImputerKind};
use crate::error::Result;
use crate::table::{level_counts, mean, mode_code, ColumnKind, Dataset};

/// Column means (continuous) and modes (categorical) of the training table.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanModel {
    names: Vec<String>,
    levels: Vec<Vec<String>>,
    fill: Vec<f64>,
}

impl MeanModel {
    pub fn fit(ds: &Dataset) -> Result<Self> {
        require_observed(ds)?;
        let fill = (0..ds.d()).map(|j| column_fill(ds, j)).collect();
        Ok(MeanModel {
            names: feature_names(ds),
            levels: ds.all_levels().to_vec(),
            fill,
        })
    }

    pub fn fill(&self) -> &[f64] {
        &self.fill
    }

    pub fn transform(&self, ds: &Dataset) -> Result<ImputedDataset> {
        check_compatible(&self.names, &self.levels, ds)?;
        let d = ds.d();
        let mut values = ds.raw_values().to_vec();
        for (i, j) in ds.mask().cells() {
            values[i * d + j] = self.fill[j];
        }
        Ok(ImputedDataset {
            dataset: ds.completed(values)?,
            original_mask: ds.mask().clone(),
            imputer: ImputerKind::Mean,
            sweeps: 0,
            converged: true,
        })
    }
}

/// Observed mean, or the observed mode for categorical columns (ties to the
/// first level).
pub(crate) fn column_fill(ds: &Dataset, j: usize) -> f64 {
    let obs = ds.observed_column(j);
    match ds.kind(j) {
        ColumnKind::Continuous => mean(&obs),
        ColumnKind::Categorical => mode_code(&level_counts(&obs, ds.levels(j).len())) as f64,
    }
}
