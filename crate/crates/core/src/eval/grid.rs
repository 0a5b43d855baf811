use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::thread;

use serde::{Deserialize, Serialize};

use super::{proxy_classify, truth_scale, RecoveryTally};
use crate::bundled;
use crate::error::{Error, Result};
use crate::impute::{fit_transform, ImputedDataset, ImputerKind};
use crate::missingness::{inject, Mechanism, MissingnessSpec};
use crate::seed;
use crate::table::{load_csv, split_indices, Dataset, QuantileMethod, Schema};

/// A bundled table by name, or a CSV with its schema (the bundled schema of
/// the same name when `schema` is omitted).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DatasetRef {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bundled: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<PathBuf>,
}

impl DatasetRef {
    pub fn bundled(name: &str) -> Self {
        DatasetRef {
            bundled: Some(name.into()),
            ..Default::default()
        }
    }

    pub fn load_schema(&self) -> Result<Schema> {
        match (&self.schema, &self.bundled) {
            (Some(p), _) => Schema::load(p),
            (None, Some(name)) => bundled::schema(name),
            (None, None) => Err(Error::Config("dataset needs `bundled` or `schema`".into())),
        }
    }

    pub fn load(&self) -> Result<Dataset> {
        match (&self.csv, &self.bundled) {
            (Some(csv), _) => load_csv(csv, Arc::new(self.load_schema()?)),
            (None, Some(name)) => bundled::dataset(name),
            (None, None) => Err(Error::Config("dataset needs `bundled` or `csv`".into())),
        }
    }

    fn resolve(&mut self, base: &Path) {
        for p in [&mut self.csv, &mut self.schema].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }
}

/// A completion produced by another tool for the table in `incomplete`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalImputation {
    pub name: String,
    pub imputed: PathBuf,
    /// The masked table the tool was given; enables recovery scores.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub incomplete: Option<PathBuf>,
}

/// An [`ExternalImputation`] read against the experiment's schema.
#[derive(Debug, Clone)]
pub struct ExternalTable {
    pub name: String,
    pub imputed: Dataset,
    pub incomplete: Option<Dataset>,
}

impl ExternalImputation {
    pub fn load(&self, schema: &Arc<Schema>) -> Result<ExternalTable> {
        let imputed = load_csv(&self.imputed, schema.clone())?;
        if imputed.mask().any() {
            return Err(Error::Shape(format!("external imputation `{}` has missing cells", self.name)));
        }
        let incomplete = self.incomplete.as_ref().map(|p| load_csv(p, schema.clone())).transpose()?;
        Ok(ExternalTable {
            name: self.name.clone(),
            imputed,
            incomplete,
        })
    }
}

fn default_imputers() -> Vec<ImputerKind> {
    vec![ImputerKind::Mean, ImputerKind::Knn { k: 5 }, ImputerKind::chained()]
}
fn default_eval_fraction() -> f64 {
    0.20
}
fn default_repetitions() -> usize {
    5
}
fn default_proxy_k() -> usize {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub dataset: DatasetRef,
    pub missingness: Mechanism,
    #[serde(default)]
    pub quantile_method: QuantileMethod,
    #[serde(default = "default_imputers")]
    pub imputers: Vec<ImputerKind>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub external: Vec<ExternalImputation>,
    #[serde(default = "default_eval_fraction")]
    pub eval_fraction: f64,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default = "default_proxy_k")]
    pub proxy_k: usize,
    pub seed: u64,
}

impl ExperimentSpec {
    pub fn new(dataset: DatasetRef, missingness: Mechanism, seed: u64) -> Self {
        ExperimentSpec {
            dataset,
            missingness,
            quantile_method: QuantileMethod::default(),
            imputers: default_imputers(),
            external: Vec::new(),
            eval_fraction: default_eval_fraction(),
            repetitions: default_repetitions(),
            proxy_k: default_proxy_k(),
            seed,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    /// Reads a spec file; relative paths resolve against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        let mut spec = Self::from_toml_str(&text)?;
        spec.resolve_paths(path.parent().unwrap_or(Path::new(".")));
        Ok(spec)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        self.dataset.resolve(base);
        for e in &mut self.external {
            for p in std::iter::once(&mut e.imputed).chain(e.incomplete.as_mut()) {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::InvalidParameter("repetitions must be at least 1".into()));
        }
        if !(self.eval_fraction > 0.0 && self.eval_fraction < 1.0) {
            return Err(Error::InvalidFraction {
                name: "eval_fraction",
                value: self.eval_fraction,
                range: "(0, 1)",
            });
        }
        if self.proxy_k == 0 {
            return Err(Error::InvalidParameter("proxy_k must be at least 1".into()));
        }
        let mut labels: Vec<String> = self.imputers.iter().map(ImputerKind::label).collect();
        labels.extend(self.external.iter().map(|e| e.name.clone()));
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidParameter(format!("imputer `{l}` listed twice")));
            }
        }
        if labels.is_empty() {
            return Err(Error::InvalidParameter("no imputers listed".into()));
        }
        self.imputers.iter().try_for_each(ImputerKind::validate)
    }
}

/// One (imputer, repetition) cell of the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub imputer: String,
    pub repetition: usize,
    pub seed: u64,
    pub train_size: usize,
    pub eval_size: usize,
    pub rmse: Option<f64>,
    pub cell_accuracy: Option<f64>,
    pub proxy_accuracy: Option<f64>,
    /// Set when this cell failed; its metrics are then empty.
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    /// Sample standard deviation; zero for a single value.
    pub std: f64,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl MeanStd {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Some(MeanStd {
            mean,
            std,
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            count: values.len(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub imputer: String,
    pub runs: usize,
    pub failed: usize,
    pub rmse: Option<MeanStd>,
    pub cell_accuracy: Option<MeanStd>,
    pub proxy_accuracy: Option<MeanStd>,
}

impl MetricSummary {
    pub fn from_rows(imputer: &str, rows: &[MetricRow]) -> Self {
        let mine: Vec<&MetricRow> = rows.iter().filter(|r| r.imputer == imputer).collect();
        let collect = |f: fn(&MetricRow) -> Option<f64>| MeanStd::of(&mine.iter().filter_map(|r| f(r)).collect::<Vec<_>>());
        MetricSummary {
            imputer: imputer.to_string(),
            runs: mine.len(),
            failed: mine.iter().filter(|r| r.error.is_some()).count(),
            rmse: collect(|r| r.rmse),
            cell_accuracy: collect(|r| r.cell_accuracy),
            proxy_accuracy: collect(|r| r.proxy_accuracy),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub dataset: String,
    pub mechanism: Mechanism,
    pub seed: u64,
    pub eval_fraction: f64,
    pub repetitions: usize,
    pub proxy_k: usize,
    /// Repetition-major, imputers in spec order.
    pub rows: Vec<MetricRow>,
    pub summaries: Vec<MetricSummary>,
}

impl MetricReport {
    pub fn imputers(&self) -> impl Iterator<Item = &str> {
        self.summaries.iter().map(|s| s.imputer.as_str())
    }
}

/// Loads the spec's dataset and external tables, then runs the grid.
pub fn run_grid(spec: &ExperimentSpec) -> Result<MetricReport> {
    spec.validate()?;
    let ds = spec.dataset.load()?;
    let externals = spec
        .external
        .iter()
        .map(|e| e.load(ds.schema_arc()))
        .collect::<Result<Vec<_>>>()?;
    run_grid_on(&ds, spec, &externals)
}

struct Split {
    train_idx: Vec<usize>,
    eval_idx: Vec<usize>,
    train: Dataset,
    eval: Dataset,
}

fn split_and_mask(ds: &Dataset, spec: &ExperimentSpec, rep_seed: u64) -> Result<Split> {
    let (train_idx, eval_idx) = split_indices(ds.n(), spec.eval_fraction, seed::derive(rep_seed, &[b"split"]))?;
    let mask = |rows: &[usize], part: &[u8]| -> Result<Dataset> {
        let mut m = MissingnessSpec::new(spec.missingness.clone(), seed::derive(rep_seed, &[part]));
        m.quantile_method = spec.quantile_method;
        inject(&ds.select_rows(rows)?, &m)
    };
    Ok(Split {
        train: mask(&train_idx, b"train-mask")?,
        eval: mask(&eval_idx, b"eval-mask")?,
        train_idx,
        eval_idx,
    })
}

/// Scores of one imputer on one split.
struct Cell {
    rmse: Option<f64>,
    cell_accuracy: Option<f64>,
    proxy: f64,
}

fn score(
    truth: Option<(&Dataset, &[f64])>,
    split_rows: (&[usize], &[usize]),
    train: &ImputedDataset,
    eval: &ImputedDataset,
    k: usize,
) -> Result<Cell> {
    let proxy = proxy_classify(train, eval, k)?;
    let (rmse, cell_accuracy) = match truth {
        Some((ds, scale)) => {
            let mut t = RecoveryTally::default();
            t.add(ds, split_rows.0, train, scale);
            t.add(ds, split_rows.1, eval, scale);
            let s = t.score();
            (s.rmse, s.cell_accuracy)
        }
        None => (None, None),
    };
    Ok(Cell {
        rmse,
        cell_accuracy,
        proxy,
    })
}

fn repetition_rows(ds: &Dataset, spec: &ExperimentSpec, externals: &[ExternalTable], r: usize) -> Vec<MetricRow> {
    let rep_seed = seed::repetition(spec.seed, r);
    let labels: Vec<String> = spec
        .imputers
        .iter()
        .map(ImputerKind::label)
        .chain(externals.iter().map(|e| e.name.clone()))
        .collect();
    let n_eval = crate::table::round_count(spec.eval_fraction, ds.n());
    let row = |imputer: &str, cell: Result<Cell>| {
        let (train_size, eval_size) = (ds.n() - n_eval, n_eval);
        match cell {
            Ok(c) => MetricRow {
                imputer: imputer.to_string(),
                repetition: r,
                seed: rep_seed,
                train_size,
                eval_size,
                rmse: c.rmse,
                cell_accuracy: c.cell_accuracy,
                proxy_accuracy: Some(c.proxy),
                error: None,
            },
            Err(e) => MetricRow {
                imputer: imputer.to_string(),
                repetition: r,
                seed: rep_seed,
                train_size,
                eval_size,
                rmse: None,
                cell_accuracy: None,
                proxy_accuracy: None,
                error: Some(e.to_string()),
            },
        }
    };
    let split = match split_and_mask(ds, spec, rep_seed) {
        Ok(s) => s,
        Err(e) => {
            let msg = e.to_string();
            return labels
                .iter()
                .map(|l| row(l, Err(Error::InvalidParameter(msg.clone()))))
                .collect();
        }
    };
    let scale = truth_scale(ds);
    let truth = (!ds.mask().any()).then_some((ds, scale.as_slice()));
    let rows_of = (split.train_idx.as_slice(), split.eval_idx.as_slice());
    let mut out = Vec::with_capacity(labels.len());
    for kind in &spec.imputers {
        let cell = fit_transform(&split.train, kind).and_then(|(train, model)| {
            let eval = model.transform(&split.eval)?;
            score(truth, rows_of, &train, &eval, spec.proxy_k)
        });
        out.push(row(&kind.label(), cell));
    }
    for ext in externals {
        let cell = (|| {
            let incomplete = ext.incomplete.as_ref().unwrap_or(&ext.imputed);
            let wrap = |rows: &[usize]| -> Result<ImputedDataset> {
                ImputedDataset::external(&ext.name, &incomplete.select_rows(rows)?, &ext.imputed.select_rows(rows)?)
            };
            let (train, eval) = (wrap(rows_of.0)?, wrap(rows_of.1)?);
            score(truth, rows_of, &train, &eval, spec.proxy_k)
        })();
        out.push(row(&ext.name, cell));
    }
    out
}

/// Runs every repetition (in parallel) and aggregates per imputer. Failed
/// cells stay in the report with their error message.
pub fn run_grid_on(ds: &Dataset, spec: &ExperimentSpec, externals: &[ExternalTable]) -> Result<MetricReport> {
    spec.validate()?;
    for e in externals {
        if e.imputed.n() != ds.n() || e.incomplete.as_ref().is_some_and(|t| t.n() != ds.n()) {
            return Err(Error::Shape(format!("external imputation `{}` has a different row count", e.name)));
        }
    }
    let per_rep: Vec<Vec<MetricRow>> = thread::scope(|s| {
        let handles: Vec<_> = (0..spec.repetitions)
            .map(|r| s.spawn(move || repetition_rows(ds, spec, externals, r)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("repetition thread")).collect()
    });
    let rows: Vec<MetricRow> = per_rep.into_iter().flatten().collect();
    let summaries = spec
        .imputers
        .iter()
        .map(ImputerKind::label)
        .chain(externals.iter().map(|e| e.name.clone()))
        .map(|l| MetricSummary::from_rows(&l, &rows))
        .collect();
    Ok(MetricReport {
        dataset: ds.schema().dataset.clone(),
        mechanism: spec.missingness.clone(),
        seed: spec.seed,
        eval_fraction: spec.eval_fraction,
        repetitions: spec.repetitions,
        proxy_k: spec.proxy_k,
        rows,
        summaries,
    })
}
