use nalgebra::{DMatrix, DVector};

use super::mean::column_fill;
use super::{check_compatible, feature_names, require_observed, ImputedDataset, ImputerKind};
use crate::error::{Error, Result};
use crate::table::{ColumnKind, Dataset};

/// Ridge damping applied to the standardized normal equations.
pub const RIDGE_LAMBDA: f64 = 1e-6;

/// Per-feature conditional model.
#[derive(Debug, Clone)]
enum FeatureModel {
    /// Categorical regressand: keep the training mode.
    Mode(f64),
    Linear(LinearModel),
}

/// Least squares on standardized regressors: y = intercept + sum coef_c * z_c.
#[derive(Debug, Clone)]
struct LinearModel {
    intercept: f64,
    center: Vec<f64>,
    scale: Vec<f64>,
    coef: Vec<f64>,
}

impl LinearModel {
    fn fit(rows: &[Vec<f64>], y: &[f64]) -> Self {
        let m = rows.len();
        let p = rows.first().map_or(0, Vec::len);
        let mut center = vec![0.0; p];
        let mut scale = vec![1.0; p];
        for c in 0..p {
            let mu = rows.iter().map(|r| r[c]).sum::<f64>() / m as f64;
            let var = rows.iter().map(|r| (r[c] - mu).powi(2)).sum::<f64>() / m as f64;
            center[c] = mu;
            // constant regressors contribute nothing
            scale[c] = if var > 0.0 { var.sqrt() } else { f64::INFINITY };
        }
        let y_mean = y.iter().sum::<f64>() / m as f64;
        let z = DMatrix::from_fn(m, p, |i, c| (rows[i][c] - center[c]) / scale[c]);
        let yc = DVector::from_iterator(m, y.iter().map(|v| v - y_mean));
        let mut gram = z.transpose() * &z;
        for c in 0..p {
            gram[(c, c)] += RIDGE_LAMBDA;
        }
        let rhs = z.transpose() * yc;
        let coef = match gram.clone().cholesky() {
            Some(ch) => ch.solve(&rhs),
            None => gram.lu().solve(&rhs).unwrap_or_else(|| DVector::zeros(p)),
        };
        LinearModel {
            intercept: y_mean,
            center,
            scale,
            coef: coef.iter().copied().collect(),
        }
    }

    fn predict(&self, x: &[f64]) -> f64 {
        self.intercept
            + x.iter()
                .zip(&self.center)
                .zip(&self.scale)
                .zip(&self.coef)
                .map(|(((v, c), s), b)| b * (v - c) / s)
                .sum::<f64>()
    }
}

/// Single-chain chained-equations imputer.
///
/// Missing cells start at the column mean (mode for categoricals). Each
/// sweep visits features in schema order, regresses the feature's observed
/// cells on the current values of every other feature (categoricals enter
/// one-hot, first level dropped), and overwrites the feature's originally
/// missing cells with the predictions. Sweeps stop once no imputed cell
/// moves by `tol` or more, or after `max_iter` sweeps.
///
/// The per-sweep models are kept so [`ChainedModel::transform`] can replay
/// the same sequence of predictions on another table without refitting.
#[derive(Debug, Clone)]
pub struct ChainedModel {
    names: Vec<String>,
    levels: Vec<Vec<String>>,
    kinds: Vec<ColumnKind>,
    fill: Vec<f64>,
    /// One entry per sweep, each holding a model per feature.
    sweeps: Vec<Vec<FeatureModel>>,
    converged: bool,
    max_iter: usize,
    tol: f64,
}

impl ChainedModel {
    pub fn fit_transform(ds: &Dataset, max_iter: usize, tol: f64) -> Result<(ImputedDataset, Self)> {
        if ds.d() < 2 {
            return Err(Error::InvalidParameter(
                "chained equations need at least two features".into(),
            ));
        }
        require_observed(ds)?;
        let d = ds.d();
        let fill: Vec<f64> = (0..d).map(|j| column_fill(ds, j)).collect();
        let mut model = ChainedModel {
            names: feature_names(ds),
            levels: ds.all_levels().to_vec(),
            kinds: (0..d).map(|j| ds.kind(j)).collect(),
            sweeps: Vec::new(),
            converged: true,
            fill,
            max_iter,
            tol,
        };
        let mut values = model.initial(ds);

        if !ds.mask().any() {
            let fitted = (0..d).map(|j| model.fit_feature(ds, &values, j)).collect();
            model.sweeps.push(fitted);
        } else {
            model.converged = false;
            for _ in 0..max_iter {
                let mut fitted = Vec::with_capacity(d);
                let mut change: f64 = 0.0;
                for j in 0..d {
                    let fm = model.fit_feature(ds, &values, j);
                    change = change.max(model.predict_feature(ds, &mut values, j, &fm));
                    fitted.push(fm);
                }
                model.sweeps.push(fitted);
                if change < tol {
                    model.converged = true;
                    break;
                }
            }
        }
        let sweeps = if ds.mask().any() { model.sweeps.len() } else { 0 };
        let converged = model.converged;
        let out = ImputedDataset {
            dataset: ds.completed(values)?,
            original_mask: ds.mask().clone(),
            imputer: ImputerKind::Chained { max_iter, tol },
            sweeps,
            converged,
        };
        Ok((out, model))
    }

    /// Completes another table by replaying the training sweeps: the same
    /// mean initialization, then every sweep's fitted models in order.
    pub fn transform(&self, ds: &Dataset) -> Result<ImputedDataset> {
        check_compatible(&self.names, &self.levels, ds)?;
        let mut values = self.initial(ds);
        let mut sweeps = 0;
        if ds.mask().any() {
            for sweep in &self.sweeps {
                sweeps += 1;
                for (j, fm) in sweep.iter().enumerate() {
                    self.predict_feature(ds, &mut values, j, fm);
                }
            }
        }
        Ok(ImputedDataset {
            dataset: ds.completed(values)?,
            original_mask: ds.mask().clone(),
            imputer: ImputerKind::Chained {
                max_iter: self.max_iter,
                tol: self.tol,
            },
            sweeps,
            converged: self.converged,
        })
    }

    fn initial(&self, ds: &Dataset) -> Vec<f64> {
        let d = ds.d();
        let mut values = ds.raw_values().to_vec();
        for (i, j) in ds.mask().cells() {
            values[i * d + j] = self.fill[j];
        }
        values
    }

    fn regressors(&self, values: &[f64], i: usize, j: usize, out: &mut Vec<f64>) {
        let d = self.kinds.len();
        out.clear();
        for k in (0..d).filter(|&k| k != j) {
            let v = values[i * d + k];
            match self.kinds[k] {
                ColumnKind::Continuous => out.push(v),
                ColumnKind::Categorical => {
                    out.extend((1..self.levels[k].len()).map(|l| f64::from(u8::from(v as usize == l))));
                }
            }
        }
    }

    fn fit_feature(&self, ds: &Dataset, values: &[f64], j: usize) -> FeatureModel {
        if self.kinds[j] == ColumnKind::Categorical {
            return FeatureModel::Mode(self.fill[j]);
        }
        let d = ds.d();
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for i in (0..ds.n()).filter(|&i| !ds.is_missing(i, j)) {
            let mut x = Vec::new();
            self.regressors(values, i, j, &mut x);
            rows.push(x);
            y.push(values[i * d + j]);
        }
        FeatureModel::Linear(LinearModel::fit(&rows, &y))
    }

    /// Overwrites the originally missing cells of column `j`; returns the
    /// largest absolute change.
    fn predict_feature(&self, ds: &Dataset, values: &mut [f64], j: usize, fm: &FeatureModel) -> f64 {
        let d = ds.d();
        let mut change: f64 = 0.0;
        let mut x = Vec::new();
        for i in (0..ds.n()).filter(|&i| ds.is_missing(i, j)) {
            let new = match fm {
                FeatureModel::Mode(code) => *code,
                FeatureModel::Linear(m) => {
                    self.regressors(values, i, j, &mut x);
                    m.predict(&x)
                }
            };
            change = change.max((new - values[i * d + j]).abs());
            values[i * d + j] = new;
        }
        change
    }
}
