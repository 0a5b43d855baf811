//! Seeded injectors for the three missingness mechanisms and mask auditing.
//!
//! * MCAR removes round(rate * n) cells from every feature, uniformly at
//!   random.
//! * MAR selects the rows whose independent-column value is at or below
//!   that column's `subset_quantile` quantile and removes
//!   round(removal_rate * |S|) cells from each other feature inside that
//!   subset.
//! * MNAR removes every cell at or below its own column's `quantile`
//!   quantile; no randomness is involved.
//!
//! Random draws use one stream per (mechanism, feature name), so the mask
//! of one feature does not depend on which other features exist.

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;
use crate::table::{
    check_fraction, quantile_sorted, round_count, ColumnKind, Dataset, Mask, QuantileMethod,
};

pub const DEFAULT_RATE: f64 = 0.30;
pub const DEFAULT_SUBSET_QUANTILE: f64 = 0.30;
pub const DEFAULT_REMOVAL_RATE: f64 = 0.60;
pub const DEFAULT_MNAR_QUANTILE: f64 = 0.30;

fn default_rate() -> f64 {
    DEFAULT_RATE
}
fn default_subset_quantile() -> f64 {
    DEFAULT_SUBSET_QUANTILE
}
fn default_removal_rate() -> f64 {
    DEFAULT_REMOVAL_RATE
}
fn default_mnar_quantile() -> f64 {
    DEFAULT_MNAR_QUANTILE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarParams {
    /// Defaults to the first feature.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub independent_col: Option<String>,
    #[serde(default = "default_subset_quantile")]
    pub subset_quantile: f64,
    #[serde(default = "default_removal_rate")]
    pub removal_rate: f64,
}

impl Default for MarParams {
    fn default() -> Self {
        MarParams {
            independent_col: None,
            subset_quantile: DEFAULT_SUBSET_QUANTILE,
            removal_rate: DEFAULT_REMOVAL_RATE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mechanism", rename_all = "lowercase")]
pub enum Mechanism {
    Mcar {
        #[serde(default = "default_rate")]
        rate: f64,
    },
    Mar(MarParams),
    Mnar {
        #[serde(default = "default_mnar_quantile")]
        quantile: f64,
    },
}

impl Mechanism {
    pub fn mcar() -> Self {
        Mechanism::Mcar { rate: DEFAULT_RATE }
    }

    pub fn mar() -> Self {
        Mechanism::Mar(MarParams::default())
    }

    pub fn mnar() -> Self {
        Mechanism::Mnar {
            quantile: DEFAULT_MNAR_QUANTILE,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Mechanism::Mcar { .. } => "mcar",
            Mechanism::Mar(_) => "mar",
            Mechanism::Mnar { .. } => "mnar",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissingnessSpec {
    #[serde(flatten)]
    pub mechanism: Mechanism,
    pub seed: u64,
    /// Inject on top of pre-existing missing cells.
    #[serde(default)]
    pub allow_compounding: bool,
    #[serde(default)]
    pub quantile_method: QuantileMethod,
}

impl MissingnessSpec {
    pub fn new(mechanism: Mechanism, seed: u64) -> Self {
        MissingnessSpec {
            mechanism,
            seed,
            allow_compounding: false,
            quantile_method: QuantileMethod::Linear,
        }
    }
}

/// Applies the spec's mechanism.
pub fn inject(ds: &Dataset, spec: &MissingnessSpec) -> Result<Dataset> {
    if ds.mask().any() && !spec.allow_compounding {
        return Err(Error::CompoundingRefused);
    }
    let mask = match &spec.mechanism {
        Mechanism::Mcar { rate } => mcar_mask(ds, *rate, spec.seed)?,
        Mechanism::Mar(p) => mar_mask(ds, p, spec.seed, spec.quantile_method)?,
        Mechanism::Mnar { quantile } => mnar_mask(ds, *quantile, spec.quantile_method)?,
    };
    ds.with_mask(mask)
}

pub fn inject_mcar(ds: &Dataset, rate: f64, seed: u64) -> Result<Dataset> {
    inject(ds, &MissingnessSpec::new(Mechanism::Mcar { rate }, seed))
}

pub fn inject_mar(ds: &Dataset, params: &MarParams, seed: u64) -> Result<Dataset> {
    inject(ds, &MissingnessSpec::new(Mechanism::Mar(params.clone()), seed))
}

pub fn inject_mnar(ds: &Dataset, quantile: f64) -> Result<Dataset> {
    inject(ds, &MissingnessSpec::new(Mechanism::Mnar { quantile }, 0))
}

fn mcar_mask(ds: &Dataset, rate: f64, seed: u64) -> Result<Mask> {
    check_fraction("rate", rate)?;
    let n = ds.n();
    let count = round_count(rate, n);
    let mut mask = ds.mask().clone();
    for j in 0..ds.d() {
        let name = ds.schema().feature(j).name.as_bytes();
        let mut rng = seed::rng(seed, &[b"mcar", name]);
        for i in index::sample(&mut rng, n, count) {
            mask.set(i, j, true);
        }
    }
    Ok(mask)
}

fn orderable(ds: &Dataset, j: usize) -> Result<()> {
    let f = ds.schema().feature(j);
    match f.kind {
        ColumnKind::Continuous => Ok(()),
        ColumnKind::Categorical if f.ordered => Ok(()),
        ColumnKind::Categorical => Err(Error::UnorderedCategorical(f.name.clone())),
    }
}

fn sorted_observed(ds: &Dataset, j: usize) -> Vec<f64> {
    let mut v = ds.observed_column(j);
    v.sort_by(f64::total_cmp);
    v
}

/// Rows of the MAR subset: independent value at or below its quantile.
pub fn mar_subset(ds: &Dataset, params: &MarParams, method: QuantileMethod) -> Result<Vec<usize>> {
    check_fraction("subset_quantile", params.subset_quantile)?;
    let j0 = match &params.independent_col {
        Some(name) => ds.schema().feature_index(name)?,
        None => 0,
    };
    orderable(ds, j0).map_err(|_| Error::NotContinuous(ds.schema().feature(j0).name.clone()))?;
    if ds.mask().column_count(j0) > 0 {
        return Err(Error::IndependentColMissingValues(
            ds.schema().feature(j0).name.clone(),
        ));
    }
    let sorted = sorted_observed(ds, j0);
    let threshold = quantile_sorted(&sorted, params.subset_quantile, method);
    let subset: Vec<usize> = (0..ds.n())
        .filter(|&i| ds.get(i, j0).is_some_and(|v| v <= threshold))
        .collect();
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    Ok(subset)
}

fn mar_mask(ds: &Dataset, params: &MarParams, seed: u64, method: QuantileMethod) -> Result<Mask> {
    check_fraction("removal_rate", params.removal_rate)?;
    let subset = mar_subset(ds, params, method)?;
    let j0 = match &params.independent_col {
        Some(name) => ds.schema().feature_index(name)?,
        None => 0,
    };
    let count = round_count(params.removal_rate, subset.len());
    let mut mask = ds.mask().clone();
    for j in (0..ds.d()).filter(|&j| j != j0) {
        let name = ds.schema().feature(j).name.as_bytes();
        let mut rng = seed::rng(seed, &[b"mar", name]);
        for k in index::sample(&mut rng, subset.len(), count) {
            mask.set(subset[k], j, true);
        }
    }
    Ok(mask)
}

/// Per-feature MNAR thresholds (None for a column with no observed cells).
pub fn mnar_thresholds(ds: &Dataset, quantile: f64, method: QuantileMethod) -> Result<Vec<Option<f64>>> {
    check_fraction("quantile", quantile)?;
    (0..ds.d())
        .map(|j| {
            orderable(ds, j)?;
            let sorted = sorted_observed(ds, j);
            Ok((!sorted.is_empty()).then(|| quantile_sorted(&sorted, quantile, method)))
        })
        .collect()
}

fn mnar_mask(ds: &Dataset, quantile: f64, method: QuantileMethod) -> Result<Mask> {
    let thresholds = mnar_thresholds(ds, quantile, method)?;
    let mut mask = ds.mask().clone();
    for (j, t) in thresholds.into_iter().enumerate() {
        let Some(t) = t else { continue };
        for i in 0..ds.n() {
            if ds.get(i, j).is_some_and(|v| v <= t) {
                mask.set(i, j, true);
            }
        }
    }
    Ok(mask)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureCount {
    pub name: String,
    pub missing: usize,
    pub fraction: f64,
}

/// Counts of missing cells per feature and overall.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissingnessReport {
    pub dataset: String,
    pub n: usize,
    pub d: usize,
    pub features: Vec<FeatureCount>,
    pub missing_cells: usize,
    pub fraction: f64,
    /// Features with no observed cell left.
    pub fully_masked: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mechanism: Option<Mechanism>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl MissingnessReport {
    pub fn with_spec(mut self, spec: &MissingnessSpec) -> Self {
        self.mechanism = Some(spec.mechanism.clone());
        self.seed = match spec.mechanism {
            Mechanism::Mnar { .. } => None,
            _ => Some(spec.seed),
        };
        self
    }

    pub fn counts(&self) -> Vec<usize> {
        self.features.iter().map(|f| f.missing).collect()
    }
}

pub fn audit(ds: &Dataset) -> MissingnessReport {
    let n = ds.n();
    let features: Vec<FeatureCount> = (0..ds.d())
        .map(|j| {
            let missing = ds.mask().column_count(j);
            FeatureCount {
                name: ds.schema().feature(j).name.clone(),
                missing,
                fraction: missing as f64 / n as f64,
            }
        })
        .collect();
    let missing_cells: usize = features.iter().map(|f| f.missing).sum();
    MissingnessReport {
        dataset: ds.schema().dataset.clone(),
        n,
        d: ds.d(),
        fully_masked: features
            .iter()
            .filter(|f| f.missing == n)
            .map(|f| f.name.clone())
            .collect(),
        fraction: missing_cells as f64 / (n * ds.d()) as f64,
        missing_cells,
        features,
        mechanism: None,
        seed: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::quantile;

    fn range_col(n: usize) -> Vec<f64> {
        (0..n).map(|i| i as f64).collect()
    }

    fn iid(n: usize, d: usize, seed: u64) -> Dataset {
        use rand::Rng;
        let mut rng = seed::rng(seed, &[b"test"]);
        let cols: Vec<Vec<f64>> = (0..d).map(|_| (0..n).map(|_| rng.random::<f64>()).collect()).collect();
        Dataset::from_columns(&cols, vec![0; n], &["a"]).unwrap()
    }

    #[test]
    fn mcar_exact_counts() {
        let ds = iid(10, 3, 1);
        let out = inject_mcar(&ds, 0.3, 5).unwrap();
        assert_eq!(audit(&out).counts(), vec![3, 3, 3]);
        let out = inject_mcar(&ds, 0.0, 5).unwrap();
        assert!(!out.mask().any());
    }

    #[test]
    fn mcar_seed_determinism() {
        let ds = iid(150, 4, 2);
        let a = inject_mcar(&ds, 0.3, 11).unwrap();
        let b = inject_mcar(&ds, 0.3, 11).unwrap();
        let c = inject_mcar(&ds, 0.3, 12).unwrap();
        assert_eq!(a.mask(), b.mask());
        assert_ne!(a.mask(), c.mask());
        assert_eq!(audit(&c).counts(), vec![45; 4]);
        let r = audit(&a);
        assert!((r.fraction - 0.30).abs() < 1e-12);
    }

    #[test]
    fn mcar_feature_streams_are_independent_of_other_features() {
        let wide = iid(50, 3, 3);
        let narrow_cols: Vec<Vec<f64>> = (0..2).map(|j| wide.observed_column(j)).collect();
        let narrow = Dataset::from_columns(&narrow_cols, vec![0; 50], &["a"]).unwrap();
        let a = inject_mcar(&wide, 0.3, 9).unwrap();
        let b = inject_mcar(&narrow, 0.3, 9).unwrap();
        for i in 0..50 {
            for j in 0..2 {
                assert_eq!(a.is_missing(i, j), b.is_missing(i, j));
            }
        }
    }

    #[test]
    fn refuses_compounding() {
        let ds = inject_mcar(&iid(10, 2, 4), 0.3, 1).unwrap();
        assert!(matches!(inject_mcar(&ds, 0.3, 2), Err(Error::CompoundingRefused)));
        let mut spec = MissingnessSpec::new(Mechanism::mcar(), 2);
        spec.allow_compounding = true;
        let out = inject(&ds, &spec).unwrap();
        assert!(out.mask().count() >= ds.mask().count());
    }

    // Brute-force oracle: threshold from the quantile primitive, subset by
    // scanning, counts by round-half-up.
    #[test]
    fn mar_on_ramp() {
        let n = 100;
        let cols: Vec<Vec<f64>> = std::iter::once(range_col(n))
            .chain((0..4).map(|k| (0..n).map(|i| (i * 7 + k) as f64 % 13.0).collect()))
            .collect();
        let ds = Dataset::from_columns(&cols, vec![0; n], &["a"]).unwrap();
        let threshold = quantile(&range_col(n), 0.3).unwrap();
        assert!((threshold - 29.7).abs() < 1e-12);
        let expected_subset: Vec<usize> = (0..n).filter(|&i| i as f64 <= threshold).collect();
        assert_eq!(expected_subset.len(), 30);
        let out = inject_mar(&ds, &MarParams::default(), 3).unwrap();
        assert_eq!(audit(&out).counts(), vec![0, 18, 18, 18, 18]);
        for (i, j) in out.mask().cells() {
            assert!(expected_subset.contains(&i), "row {i} col {j} outside subset");
        }
    }

    #[test]
    fn mar_identity_and_vacuous_cases() {
        let ds = Dataset::from_columns(&[range_col(20), range_col(20)], vec![0; 20], &["a"]).unwrap();
        let p = MarParams {
            removal_rate: 0.0,
            ..MarParams::default()
        };
        assert!(!inject_mar(&ds, &p, 1).unwrap().mask().any());
        let single = Dataset::from_columns(&[range_col(20)], vec![0; 20], &["a"]).unwrap();
        assert!(!inject_mar(&single, &MarParams::default(), 1).unwrap().mask().any());
    }

    #[test]
    fn mar_named_independent_column() {
        let ds = Dataset::from_columns(&[range_col(10), range_col(10)], vec![0; 10], &["a"]).unwrap();
        let p = MarParams {
            independent_col: Some("x2".into()),
            ..MarParams::default()
        };
        let out = inject_mar(&ds, &p, 1).unwrap();
        assert_eq!(out.mask().column_count(1), 0);
        assert_eq!(out.mask().column_count(0), round_count(0.6, 3));
        let p = MarParams {
            independent_col: Some("nope".into()),
            ..MarParams::default()
        };
        assert!(matches!(inject_mar(&ds, &p, 1), Err(Error::UnknownFeature(_))));
    }

    #[test]
    fn mnar_threshold_cases() {
        let ds = Dataset::from_columns(&[(1..=10).map(f64::from).collect()], vec![0; 10], &["a"])
            .unwrap();
        let out = inject_mnar(&ds, 0.3).unwrap();
        let masked: Vec<usize> = (0..10).filter(|&i| out.is_missing(i, 0)).collect();
        assert_eq!(masked, vec![0, 1, 2]);

        let constant = Dataset::from_columns(&[vec![5.0; 4]], vec![0; 4], &["a"]).unwrap();
        let out = inject_mnar(&constant, 0.3).unwrap();
        assert_eq!(out.mask().count(), 4);
        assert_eq!(audit(&out).fully_masked, vec!["x1".to_string()]);

        let ties = Dataset::from_columns(&[vec![2.0, 1.0, 1.0, 3.0]], vec![0; 4], &["a"]).unwrap();
        let out = inject_mnar(&ties, 0.0).unwrap();
        let masked: Vec<usize> = (0..4).filter(|&i| out.is_missing(i, 0)).collect();
        assert_eq!(masked, vec![1, 2]);
    }

    #[test]
    fn mnar_rejects_unordered_categorical() {
        let mut s = crate::table::Schema::synthetic(1, &["a"]);
        s.features[0].kind = ColumnKind::Categorical;
        let ds = crate::table::read_csv("x1,class\nred,a\nblue,a\n".as_bytes(), std::sync::Arc::new(s))
            .unwrap();
        assert!(matches!(inject_mnar(&ds, 0.3), Err(Error::UnorderedCategorical(_))));
    }

    #[test]
    fn audit_all_false() {
        let r = audit(&iid(5, 2, 0));
        assert_eq!(r.counts(), vec![0, 0]);
        assert_eq!(r.fraction, 0.0);
    }

    #[test]
    fn spec_serde_defaults() {
        let s: MissingnessSpec = toml::from_str("mechanism = \"mar\"\nseed = 3\n").unwrap();
        assert_eq!(s.mechanism, Mechanism::mar());
        let s: MissingnessSpec = toml::from_str("mechanism = \"mcar\"\nrate = 0.1\nseed = 3\n").unwrap();
        assert_eq!(s.mechanism, Mechanism::Mcar { rate: 0.1 });
    }
}
