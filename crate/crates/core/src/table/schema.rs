use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::contextual::SentenceTemplate;
use crate::error::{Error, Result};

/// Default number of decimal places used when rendering continuous values.
pub const DEFAULT_DECIMALS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Continuous,
    Categorical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: String,
    pub kind: ColumnKind,
    /// Unit phrase spliced into templates through `{unit}`.
    #[serde(default, alias = "unit_phrase")]
    pub unit: String,
    #[serde(alias = "template_id")]
    pub template: String,
    /// Render precision for continuous values.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decimals: Option<usize>,
    /// Declared category levels. When empty, levels are collected in order
    /// of first appearance at ingestion.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub levels: Vec<String>,
    /// Whether `levels` carries a meaningful order (enables quantile-based
    /// mechanisms on this column).
    #[serde(default)]
    pub ordered: bool,
}

impl FeatureSpec {
    pub fn continuous(name: impl Into<String>, template: impl Into<String>) -> Self {
        FeatureSpec {
            name: name.into(),
            kind: ColumnKind::Continuous,
            unit: String::new(),
            template: template.into(),
            decimals: None,
            levels: Vec::new(),
            ordered: false,
        }
    }

    pub fn decimals(&self) -> usize {
        self.decimals.unwrap_or(DEFAULT_DECIMALS)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSpec {
    pub name: String,
    pub labels: Vec<String>,
    /// Alternative CSV tokens, position-aligned with `labels` (e.g. raw
    /// numeric class codes).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub codes: Vec<String>,
    #[serde(alias = "template_id")]
    pub template: String,
}

/// Column layout, value kinds, and sentence templates for one dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schema {
    pub dataset: String,
    #[serde(default)]
    pub description: String,
    /// CSV token that marks a pre-existing missing cell.
    #[serde(default)]
    pub missing_token: String,
    pub target: TargetSpec,
    pub features: Vec<FeatureSpec>,
    /// Template patterns keyed by id; supplements the built-in registry.
    #[serde(default)]
    pub templates: BTreeMap<String, String>,
}

impl Schema {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let schema: Schema = toml::from_str(text)?;
        schema.validate()?;
        Ok(schema)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        Self::from_toml_str(&text)
    }

    /// Schema with continuous features `x1..xd` and the given class labels,
    /// rendered through the built-in `plain` templates.
    pub fn synthetic(d: usize, labels: &[&str]) -> Self {
        Schema {
            dataset: "synthetic".into(),
            description: "Synthetic continuous data.".into(),
            missing_token: String::new(),
            target: TargetSpec {
                name: "class".into(),
                labels: labels.iter().map(|s| s.to_string()).collect(),
                codes: Vec::new(),
                template: "plain".into(),
            },
            features: (1..=d)
                .map(|j| FeatureSpec::continuous(format!("x{j}"), "plain"))
                .collect(),
            templates: BTreeMap::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.features.is_empty() {
            return Err(Error::InvalidSchema("no features declared".into()));
        }
        let mut seen = HashSet::new();
        for f in &self.features {
            if f.name.is_empty() {
                return Err(Error::InvalidSchema("empty feature name".into()));
            }
            if !seen.insert(f.name.as_str()) {
                return Err(Error::InvalidSchema(format!("duplicate feature `{}`", f.name)));
            }
            let uniq: HashSet<_> = f.levels.iter().collect();
            if uniq.len() != f.levels.len() {
                return Err(Error::InvalidSchema(format!("duplicate levels in `{}`", f.name)));
            }
            if f.ordered && f.levels.is_empty() {
                return Err(Error::InvalidSchema(format!(
                    "`{}` is ordered but declares no levels",
                    f.name
                )));
            }
        }
        if seen.contains(self.target.name.as_str()) {
            return Err(Error::InvalidSchema(format!(
                "target `{}` is also a feature",
                self.target.name
            )));
        }
        if self.target.labels.is_empty() {
            return Err(Error::InvalidSchema("target declares no labels".into()));
        }
        let uniq: HashSet<_> = self.target.labels.iter().collect();
        if uniq.len() != self.target.labels.len() {
            return Err(Error::InvalidSchema("duplicate target labels".into()));
        }
        if !self.target.codes.is_empty() && self.target.codes.len() != self.target.labels.len() {
            return Err(Error::InvalidSchema("target codes must align with labels".into()));
        }
        for j in 0..self.features.len() {
            self.feature_template(j)?;
        }
        self.target_template()?;
        Ok(())
    }

    pub fn d(&self) -> usize {
        self.features.len()
    }

    pub fn feature(&self, j: usize) -> &FeatureSpec {
        &self.features[j]
    }

    pub fn feature_index(&self, name: &str) -> Result<usize> {
        self.features
            .iter()
            .position(|f| f.name == name)
            .ok_or_else(|| Error::UnknownFeature(name.to_string()))
    }

    pub fn feature_names(&self) -> impl Iterator<Item = &str> {
        self.features.iter().map(|f| f.name.as_str())
    }

    fn pattern(&self, id: &str) -> Result<&str> {
        if let Some(p) = self.templates.get(id) {
            return Ok(p);
        }
        SentenceTemplate::builtin(id).ok_or_else(|| Error::UnknownTemplate(id.to_string()))
    }

    /// Concrete sentence template for feature `j`.
    pub fn feature_template(&self, j: usize) -> Result<SentenceTemplate> {
        let f = &self.features[j];
        let pattern = self.pattern(&f.template)?;
        SentenceTemplate::expand(&f.template, pattern, &f.name, &f.unit, f.decimals())
    }

    pub fn target_template(&self) -> Result<SentenceTemplate> {
        let t = &self.target;
        let pattern = self.pattern(&t.template)?;
        SentenceTemplate::expand(&t.template, pattern, &t.name, "", 0)
    }

    /// Resolves a CSV token to a label index, accepting labels or codes.
    pub fn label_index(&self, token: &str) -> Option<usize> {
        self.target
            .labels
            .iter()
            .position(|l| l == token)
            .or_else(|| self.target.codes.iter().position(|c| c == token))
    }
}
