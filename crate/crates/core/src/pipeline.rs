//! End-to-end reproduction driver: for each configured mechanism, mask the
//! table, impute it with every baseline, render both descriptor corpora,
//! emit fine-tuning records, and run the evaluation grid. Everything lands
//! under one output directory together with a file manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::contextual::{render_dataset, DescriptorMode};
use crate::descriptors::{DescriptorCatalog, DescriptorService};
use crate::error::{Error, Result};
use crate::eval::{render_report, run_grid_on, DatasetRef, ExperimentSpec, ReportFormat};
use crate::finetune::emit_records;
use crate::impute::{impute, ImputerKind};
use crate::missingness::{audit, inject, Mechanism, MissingnessSpec};
use crate::seed;
use crate::table::{save_csv, Dataset};

fn default_mechanisms() -> Vec<Mechanism> {
    vec![Mechanism::mcar(), Mechanism::mar(), Mechanism::mnar()]
}
fn default_imputers() -> Vec<ImputerKind> {
    vec![ImputerKind::Mean, ImputerKind::Knn { k: 5 }, ImputerKind::chained()]
}
fn yes() -> bool {
    true
}
fn default_token() -> String {
    "NaN".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DescriptorSettings {
    /// Catalog file; the bundled catalog for the dataset when absent.
    #[serde(default)]
    pub catalog: Option<PathBuf>,
    /// Ask the configured endpoint instead of using a catalog.
    #[serde(default = "yes")]
    pub offline: bool,
    #[serde(default)]
    pub cache_dir: Option<PathBuf>,
    #[serde(default)]
    pub description: Option<String>,
    #[serde(default = "default_token")]
    pub generic_token: String,
}

impl Default for DescriptorSettings {
    fn default() -> Self {
        DescriptorSettings {
            catalog: None,
            offline: true,
            cache_dir: None,
            description: None,
            generic_token: default_token(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmitSettings {
    #[serde(default = "yes")]
    pub missingness_aware: bool,
    #[serde(default = "yes")]
    pub with_target: bool,
}

impl Default for EmitSettings {
    fn default() -> Self {
        EmitSettings {
            missingness_aware: true,
            with_target: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalSettings {
    #[serde(default = "EvalSettings::default_repetitions")]
    pub repetitions: usize,
    #[serde(default = "EvalSettings::default_eval_fraction")]
    pub eval_fraction: f64,
    #[serde(default = "EvalSettings::default_proxy_k")]
    pub proxy_k: usize,
    #[serde(default)]
    pub baseline: Option<String>,
}

impl EvalSettings {
    fn default_repetitions() -> usize {
        5
    }
    fn default_eval_fraction() -> f64 {
        0.2
    }
    fn default_proxy_k() -> usize {
        5
    }
}

impl Default for EvalSettings {
    fn default() -> Self {
        EvalSettings {
            repetitions: 5,
            eval_fraction: 0.2,
            proxy_k: 5,
            baseline: None,
        }
    }
}

/// A reproduction recipe, usually read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub output_dir: PathBuf,
    #[serde(default = "default_mechanisms")]
    pub mechanisms: Vec<Mechanism>,
    #[serde(default = "default_imputers")]
    pub imputers: Vec<ImputerKind>,
    pub dataset: DatasetRef,
    #[serde(default)]
    pub descriptors: DescriptorSettings,
    #[serde(default)]
    pub emit: EmitSettings,
    #[serde(default)]
    pub evaluation: EvalSettings,
}

impl PipelineConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    /// Reads a config file; relative paths resolve against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        let mut cfg = Self::from_toml_str(&text)?;
        cfg.resolve_paths(path.parent().unwrap_or(Path::new(".")));
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        join(&mut self.output_dir);
        for p in [
            &mut self.dataset.csv,
            &mut self.dataset.schema,
            &mut self.descriptors.catalog,
            &mut self.descriptors.cache_dir,
        ]
        .into_iter()
        .flatten()
        {
            join(p);
        }
    }

    /// Checks referenced files exist and parameters are in range.
    pub fn validate(&self) -> Result<()> {
        for p in [&self.dataset.csv, &self.dataset.schema, &self.descriptors.catalog]
            .into_iter()
            .flatten()
        {
            if !p.exists() {
                return Err(Error::Config(format!("{} does not exist", p.display())));
            }
        }
        if self.mechanisms.is_empty() {
            return Err(Error::Config("no mechanisms listed".into()));
        }
        DescriptorMode::generic(self.descriptors.generic_token.clone())?;
        self.experiment(Mechanism::mcar()).validate()
    }

    fn experiment(&self, mechanism: Mechanism) -> ExperimentSpec {
        let mut e = ExperimentSpec::new(self.dataset.clone(), mechanism, self.seed);
        e.imputers = self.imputers.clone();
        e.repetitions = self.evaluation.repetitions;
        e.eval_fraction = self.evaluation.eval_fraction;
        e.proxy_k = self.evaluation.proxy_k;
        e
    }
}

/// Files written by [`run_all`], relative to the output directory.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub dataset: String,
    pub seed: u64,
    pub files: Vec<String>,
}

/// File-name-safe form of an imputer label.
pub fn slug(label: &str) -> String {
    let mut s = String::new();
    for c in label.chars() {
        if c.is_ascii_alphanumeric() {
            s.push(c.to_ascii_lowercase());
        } else if !s.ends_with('_') {
            s.push('_');
        }
    }
    s.trim_matches('_').to_string()
}

struct Writer<'a> {
    root: &'a Path,
    files: Vec<String>,
}

impl Writer<'_> {
    fn path(&mut self, rel: &str) -> Result<PathBuf> {
        let p = self.root.join(rel);
        if let Some(dir) = p.parent() {
            fs::create_dir_all(dir).map_err(|e| Error::file(dir, e))?;
        }
        self.files.push(rel.to_string());
        Ok(p)
    }

    fn text(&mut self, rel: &str, body: &str) -> Result<()> {
        let p = self.path(rel)?;
        fs::write(&p, body).map_err(|e| Error::file(&p, e))
    }

    fn csv(&mut self, rel: &str, ds: &Dataset) -> Result<()> {
        save_csv(ds, self.path(rel)?)
    }
}

fn catalog(cfg: &PipelineConfig, ds: &Dataset) -> Result<DescriptorCatalog> {
    let schema = ds.schema();
    if let Some(p) = &cfg.descriptors.catalog {
        let cat = DescriptorCatalog::load(p)?;
        cat.validate(schema)?;
        return Ok(cat);
    }
    let svc = if cfg.descriptors.offline {
        DescriptorService::offline()
    } else {
        let cache = cfg
            .descriptors
            .cache_dir
            .clone()
            .unwrap_or_else(|| cfg.output_dir.join(".descriptor-cache"));
        DescriptorService::from_env(Some(cache))?
    };
    let description = cfg.descriptors.description.as_deref().unwrap_or(&schema.description);
    svc.descriptors(schema, description)
}

/// Runs the whole pipeline and writes `manifest.json` last.
pub fn run_all(cfg: &PipelineConfig) -> Result<Manifest> {
    cfg.validate()?;
    let ds = cfg.dataset.load()?;
    let schema = ds.schema();
    fs::create_dir_all(&cfg.output_dir).map_err(|e| Error::file(&cfg.output_dir, e))?;
    let mut w = Writer {
        root: &cfg.output_dir,
        files: Vec::new(),
    };
    let cat = catalog(cfg, &ds)?;
    w.text("catalog.toml", &cat.to_toml_string())?;
    let modes = [
        DescriptorMode::FeatureSpecific(cat),
        DescriptorMode::generic(cfg.descriptors.generic_token.clone())?,
    ];

    let mut summary = format!("# {} reproduction\n\nSeed: {}\n\n", schema.dataset, cfg.seed);
    for mech in &cfg.mechanisms {
        let name = mech.name();
        let spec = MissingnessSpec::new(mech.clone(), seed::derive(cfg.seed, &[b"run-all", name.as_bytes()]));
        let masked = inject(&ds, &spec)?;
        w.csv(&format!("{name}/masked.csv"), &masked)?;
        let report = audit(&masked).with_spec(&spec);
        w.text(&format!("{name}/mask_report.json"), &(serde_json::to_string_pretty(&report)? + "\n"))?;

        for kind in &cfg.imputers {
            let out = impute(&masked, kind)?;
            w.csv(&format!("{name}/imputed_{}.csv", slug(&kind.label())), &out.dataset)?;
        }

        for mode in &modes {
            let records = render_dataset(&masked, mode, cfg.emit.with_target)?;
            let corpus: String = records.iter().map(|r| r.line() + "\n").collect();
            w.text(&format!("{name}/contextual_{}.txt", mode.kind()), &corpus)?;
            let p = w.path(&format!("{name}/records_{}.jsonl", mode.kind()))?;
            emit_records(&records, schema, cfg.emit.missingness_aware, &p)?;
        }

        let metrics = run_grid_on(&ds, &cfg.experiment(mech.clone()), &[])?;
        let md = render_report(&metrics, ReportFormat::Markdown, cfg.evaluation.baseline.as_deref())?;
        w.text(&format!("{name}/report.md"), &md)?;
        w.text(
            &format!("{name}/report.json"),
            &render_report(&metrics, ReportFormat::Json, None)?,
        )?;
        summary.push_str(&md.replacen("# ", "## ", 1));
        summary.push('\n');
    }
    w.text("report.md", &summary)?;

    let mut manifest = Manifest {
        dataset: schema.dataset.clone(),
        seed: cfg.seed,
        files: w.files.clone(),
    };
    manifest.files.push("manifest.json".into());
    w.text("manifest.json", &(serde_json::to_string_pretty(&manifest)? + "\n"))?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slugs() {
        assert_eq!(slug("knn(k=5)"), "knn_k_5");
        assert_eq!(slug("mean"), "mean");
    }

    #[test]
    fn config_defaults_and_paths() {
        let mut cfg = PipelineConfig::from_toml_str("seed = 3\noutput_dir = \"out\"\n[dataset]\ncsv = \"x.csv\"\nbundled = \"iris\"\n").unwrap();
        assert_eq!(cfg.mechanisms.len(), 3);
        assert!(cfg.descriptors.offline);
        cfg.resolve_paths(Path::new("/base"));
        assert_eq!(cfg.output_dir, PathBuf::from("/base/out"));
        assert_eq!(cfg.dataset.csv, Some(PathBuf::from("/base/x.csv")));
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        assert!(PipelineConfig::from_toml_str("seed = 3\noutput_dir = \"o\"\nbogus = 1\n[dataset]\nbundled = \"iris\"\n").is_err());
    }
}
