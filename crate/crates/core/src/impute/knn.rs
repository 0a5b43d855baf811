use super::{check_compatible, feature_names, require_observed, ImputedDataset, ImputerKind};
use crate::error::{Error, Result};
use crate::table::{std_dev, ColumnKind, Dataset};

/// k-nearest-neighbour imputer over partially observed rows.
///
/// Distances are Euclidean over z-scored continuous columns (0/1 mismatch for
/// categoricals), summed over the dimensions both rows observe and rescaled
/// by d / |shared|. A missing cell takes the mean (continuous) or majority
/// level (categorical) of the k nearest donors that observe its column.
/// Distance ties go to the lower donor index.
#[derive(Debug, Clone)]
pub struct KnnModel {
    k: usize,
    donors: Dataset,
    names: Vec<String>,
    scale: Vec<f64>,
}

impl KnnModel {
    pub fn fit(ds: &Dataset, k: usize) -> Result<Self> {
        require_observed(ds)?;
        let scale = (0..ds.d())
            .map(|j| match ds.kind(j) {
                ColumnKind::Continuous => Some(std_dev(&ds.observed_column(j))).filter(|&s| s > 0.0).unwrap_or(1.0),
                ColumnKind::Categorical => 1.0,
            })
            .collect();
        Ok(KnnModel {
            k,
            names: feature_names(ds),
            donors: ds.clone(),
            scale,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    fn distance(&self, a: &Dataset, i: usize, r: usize) -> f64 {
        let d = a.d();
        let mut shared = 0usize;
        let mut acc = 0.0;
        for j in 0..d {
            let (Some(x), Some(y)) = (a.get(i, j), self.donors.get(r, j)) else {
                continue;
            };
            shared += 1;
            acc += match a.kind(j) {
                ColumnKind::Continuous => ((x - y) / self.scale[j]).powi(2),
                ColumnKind::Categorical => f64::from(u8::from(x != y)),
            };
        }
        if shared == 0 {
            f64::INFINITY
        } else {
            (acc * d as f64 / shared as f64).sqrt()
        }
    }

    /// Imputes the training table itself; a row never donates to itself.
    pub fn impute_self(&self) -> Result<ImputedDataset> {
        self.complete(&self.donors, true)
    }

    pub fn transform(&self, ds: &Dataset) -> Result<ImputedDataset> {
        check_compatible(&self.names, self.donors.all_levels(), ds)?;
        self.complete(ds, false)
    }

    fn complete(&self, ds: &Dataset, same_table: bool) -> Result<ImputedDataset> {
        let d = ds.d();
        let n_donors = self.donors.n();
        let mut values = ds.raw_values().to_vec();
        let mut dist = vec![0.0; n_donors];
        for i in 0..ds.n() {
            let missing: Vec<usize> = (0..d).filter(|&j| ds.is_missing(i, j)).collect();
            if missing.is_empty() {
                continue;
            }
            for (r, slot) in dist.iter_mut().enumerate() {
                *slot = self.distance(ds, i, r);
            }
            for j in missing {
                let mut cand: Vec<usize> = (0..n_donors)
                    .filter(|&r| !(same_table && r == i) && !self.donors.is_missing(r, j))
                    .collect();
                if cand.is_empty() {
                    return Err(Error::NoDonor {
                        row: i,
                        col: ds.schema().feature(j).name.clone(),
                    });
                }
                if cand.len() < self.k {
                    return Err(Error::InsufficientDonors {
                        k: self.k,
                        available: cand.len(),
                    });
                }
                cand.sort_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(a.cmp(&b)));
                cand.truncate(self.k);
                values[i * d + j] = self.vote(&cand, j);
            }
        }
        Ok(ImputedDataset {
            dataset: ds.completed(values)?,
            original_mask: ds.mask().clone(),
            imputer: ImputerKind::Knn { k: self.k },
            sweeps: 0,
            converged: true,
        })
    }

    fn vote(&self, donors: &[usize], j: usize) -> f64 {
        let vals = donors.iter().map(|&r| self.donors.get(r, j).expect("donor observes j"));
        match self.donors.kind(j) {
            ColumnKind::Continuous => vals.sum::<f64>() / donors.len() as f64,
            ColumnKind::Categorical => {
                // (count, smallest donor index) per level
                let mut tally: Vec<(usize, usize)> = vec![(0, usize::MAX); self.donors.levels(j).len()];
                for (&r, v) in donors.iter().zip(vals) {
                    let t = &mut tally[v as usize];
                    t.0 += 1;
                    t.1 = t.1.min(r);
                }
                let best = (0..tally.len())
                    .max_by(|&a, &b| tally[a].0.cmp(&tally[b].0).then(tally[b].1.cmp(&tally[a].1)))
                    .expect("at least one level");
                best as f64
            }
        }
    }
}
