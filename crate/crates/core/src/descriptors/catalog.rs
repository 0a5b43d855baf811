use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::table::Schema;

/// Where a catalog came from.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase")]
pub enum Provenance {
    #[default]
    Bundled,
    Remote {
        model: String,
        /// Seconds since the Unix epoch.
        timestamp: u64,
    },
}

/// Feature name to standalone missing-value sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescriptorCatalog {
    #[serde(alias = "dataset_name")]
    pub dataset: String,
    pub entries: BTreeMap<String, String>,
    #[serde(default)]
    pub provenance: Provenance,
}

impl DescriptorCatalog {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("catalog serializes")
    }

    pub fn get(&self, feature: &str) -> Option<&str> {
        self.entries.get(feature).map(String::as_str)
    }

    /// Every key names a schema feature and every entry is one non-empty line.
    pub fn validate(&self, schema: &Schema) -> Result<()> {
        for (name, text) in &self.entries {
            schema.feature_index(name)?;
            if text.trim().is_empty() || text.contains('\n') {
                return Err(Error::InvalidParameter(format!(
                    "descriptor for `{name}` must be a single non-empty line"
                )));
            }
        }
        Ok(())
    }

    /// Schema features without an entry, in schema order.
    pub fn missing_features(&self, schema: &Schema) -> Vec<String> {
        schema
            .feature_names()
            .filter(|f| !self.entries.contains_key(*f))
            .map(str::to_string)
            .collect()
    }

    /// The sentence that replaces a missing feature's sentence.
    pub fn sentence(&self, feature: &str) -> Result<String> {
        self.get(feature)
            .map(descriptor_sentence)
            .ok_or_else(|| Error::CatalogGap(feature.to_string()))
    }
}

/// Trims an entry and closes it with a period unless it already ends in
/// terminal punctuation.
pub fn descriptor_sentence(entry: &str) -> String {
    let t = entry.trim();
    if t.ends_with(['.', '!', '?']) {
        t.to_string()
    } else {
        format!("{t}.")
    }
}

macro_rules! bundled {
    ($($name:literal),*) => {
        /// Names with a shipped schema and descriptor catalog.
        pub const BUNDLED: &[&str] = &[$($name),*];

        fn bundled_text(name: &str) -> Option<&'static str> {
            match name {
                $($name => Some(include_str!(concat!("../../data/catalogs/", $name, ".toml"))),)*
                _ => None,
            }
        }
    };
}

bundled!("iris", "wine", "seeds", "breast_cancer", "glass", "ionosphere");

/// Normalizes user spellings such as `Breast-Cancer`.
pub(crate) fn canonical_name(name: &str) -> String {
    name.trim().to_lowercase().replace(['-', ' '], "_")
}

/// The shipped catalog for one of [`BUNDLED`].
pub fn load_bundled(dataset: &str) -> Result<DescriptorCatalog> {
    let text = bundled_text(&canonical_name(dataset))
        .ok_or_else(|| Error::UnknownDataset(dataset.to_string()))?;
    DescriptorCatalog::from_toml_str(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_entries() {
        let wine = load_bundled("wine").unwrap();
        assert_eq!(wine.entries.len(), 13);
        assert_eq!(
            wine.get("Proline"),
            Some("Proline content not available for this wine sample")
        );
        assert_eq!(
            wine.sentence("Proline").unwrap(),
            "Proline content not available for this wine sample."
        );
        let iris = load_bundled("iris").unwrap();
        assert_eq!(iris.entries.len(), 4);
        assert_eq!(iris.get("Sepal Length"), Some("Sepal Length: Unavailable"));
        assert_eq!(iris.provenance, Provenance::Bundled);
        assert!(matches!(load_bundled("unknown-ds"), Err(Error::UnknownDataset(_))));
        assert!(load_bundled("Breast-Cancer").is_ok());
    }

    #[test]
    fn every_bundled_catalog_covers_its_schema() {
        for name in BUNDLED {
            let cat = load_bundled(name).unwrap();
            let schema = crate::bundled::schema(name).unwrap();
            cat.validate(&schema).unwrap();
            assert!(cat.missing_features(&schema).is_empty(), "{name}");
        }
    }

    #[test]
    fn toml_round_trip() {
        let mut cat = load_bundled("seeds").unwrap();
        cat.provenance = Provenance::Remote {
            model: "m".into(),
            timestamp: 7,
        };
        let back = DescriptorCatalog::from_toml_str(&cat.to_toml_string()).unwrap();
        assert_eq!(back, cat);
    }
}
