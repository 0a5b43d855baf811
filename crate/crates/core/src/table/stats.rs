use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::table::dataset::Dataset;
use crate::table::schema::ColumnKind;

/// Quantile estimator. `Linear` interpolates between the closest order
/// statistics at h = (n - 1) q; the others pick a neighbouring order
/// statistic instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuantileMethod {
    #[default]
    Linear,
    Lower,
    Higher,
    Nearest,
    Midpoint,
}

/// q-quantile by linear interpolation between order statistics.
pub fn quantile(values: &[f64], q: f64) -> Result<f64> {
    quantile_with(values, q, QuantileMethod::Linear)
}

pub fn quantile_with(values: &[f64], q: f64, method: QuantileMethod) -> Result<f64> {
    check_fraction("q", q)?;
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(quantile_sorted(&sorted, q, method))
}

/// Same as [`quantile_with`] for pre-sorted, non-empty input.
pub fn quantile_sorted(sorted: &[f64], q: f64, method: QuantileMethod) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    let frac = h - lo as f64;
    match method {
        QuantileMethod::Linear => {
            if lo == hi {
                sorted[lo]
            } else {
                sorted[lo] + frac * (sorted[hi] - sorted[lo])
            }
        }
        QuantileMethod::Lower => sorted[lo],
        QuantileMethod::Higher => sorted[hi],
        // round half to even, as numpy does
        QuantileMethod::Nearest => {
            let idx = if frac == 0.5 {
                if lo.is_multiple_of(2) {
                    lo
                } else {
                    hi
                }
            } else {
                h.round() as usize
            };
            sorted[idx]
        }
        QuantileMethod::Midpoint => 0.5 * (sorted[lo] + sorted[hi]),
    }
}

pub(crate) fn check_fraction(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidFraction {
            name,
            value,
            range: "[0, 1]",
        })
    }
}

/// round-half-up of `fraction * n`. The small bias absorbs binary
/// representation error in products such as 0.3 * 5.
pub fn round_count(fraction: f64, n: usize) -> usize {
    (fraction * n as f64 + 0.5 + 1e-9).floor() as usize
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Population standard deviation.
pub fn std_dev(values: &[f64]) -> f64 {
    let m = mean(values);
    (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / values.len() as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FeatureSummary {
    Continuous {
        name: String,
        observed: usize,
        mean: f64,
        std: f64,
        min: f64,
        max: f64,
        q30: f64,
    },
    Categorical {
        name: String,
        observed: usize,
        mode: String,
        counts: Vec<(String, usize)>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub features: Vec<FeatureSummary>,
}

/// Per-feature statistics over observed cells.
pub fn summarize(ds: &Dataset) -> Result<SummaryStats> {
    let mut features = Vec::with_capacity(ds.d());
    for j in 0..ds.d() {
        let name = ds.schema().feature(j).name.clone();
        let obs = ds.observed_column(j);
        if obs.is_empty() {
            return Err(Error::FullyMissingFeature(name));
        }
        features.push(match ds.kind(j) {
            ColumnKind::Continuous => FeatureSummary::Continuous {
                observed: obs.len(),
                mean: mean(&obs),
                std: std_dev(&obs),
                min: obs.iter().copied().fold(f64::INFINITY, f64::min),
                max: obs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                q30: quantile(&obs, 0.30)?,
                name,
            },
            ColumnKind::Categorical => {
                let levels = ds.levels(j);
                let counts = level_counts(&obs, levels.len());
                FeatureSummary::Categorical {
                    observed: obs.len(),
                    mode: levels[mode_code(&counts)].clone(),
                    counts: levels.iter().cloned().zip(counts).collect(),
                    name,
                }
            }
        });
    }
    Ok(SummaryStats { features })
}

pub(crate) fn level_counts(codes: &[f64], n_levels: usize) -> Vec<usize> {
    let mut counts = vec![0; n_levels];
    for &c in codes {
        counts[c as usize] += 1;
    }
    counts
}

/// Most frequent level; ties go to the first level.
pub(crate) fn mode_code(counts: &[usize]) -> usize {
    let mut best = 0;
    for (k, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = k;
        }
    }
    best
}
