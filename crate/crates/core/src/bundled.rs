//! Schemas and descriptor catalogs shipped with the crate, plus the three
//! tables whose data is redistributed (Iris, Wine, Breast Cancer).
//!
//! Seeds, Glass and Ionosphere ship without data; `data/README.md` explains
//! how to fetch them into a CSV that the bundled schema reads.

use std::sync::Arc;

use crate::descriptors::canonical_name;
use crate::error::{Error, Result};
use crate::table::{read_csv, Dataset, Schema};

pub use crate::descriptors::BUNDLED;

/// Datasets whose rows are bundled.
pub const WITH_DATA: &[&str] = &["iris", "wine", "breast_cancer"];

fn schema_text(name: &str) -> Option<&'static str> {
    Some(match name {
        "iris" => include_str!("../data/schemas/iris.toml"),
        "wine" => include_str!("../data/schemas/wine.toml"),
        "seeds" => include_str!("../data/schemas/seeds.toml"),
        "breast_cancer" => include_str!("../data/schemas/breast_cancer.toml"),
        "glass" => include_str!("../data/schemas/glass.toml"),
        "ionosphere" => include_str!("../data/schemas/ionosphere.toml"),
        _ => return None,
    })
}

fn csv_text(name: &str) -> Option<&'static str> {
    Some(match name {
        "iris" => include_str!("../data/iris.csv"),
        "wine" => include_str!("../data/wine.csv"),
        "breast_cancer" => include_str!("../data/breast_cancer.csv"),
        _ => return None,
    })
}

pub fn schema(name: &str) -> Result<Schema> {
    let text = schema_text(&canonical_name(name)).ok_or_else(|| Error::UnknownDataset(name.into()))?;
    Schema::from_toml_str(text)
}

/// The bundled table for `name`, fully observed.
pub fn dataset(name: &str) -> Result<Dataset> {
    let key = canonical_name(name);
    let text = csv_text(&key).ok_or_else(|| Error::UnknownDataset(name.into()))?;
    read_csv(text.as_bytes(), Arc::new(schema(&key)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        for (name, n, d) in [("iris", 150, 4), ("wine", 178, 13), ("breast_cancer", 569, 30)] {
            let ds = dataset(name).unwrap();
            assert_eq!((ds.n(), ds.d()), (n, d), "{name}");
            assert!(!ds.mask().any());
        }
        for name in BUNDLED {
            schema(name).unwrap();
        }
        assert!(matches!(dataset("glass"), Err(Error::UnknownDataset(_))));
    }

    #[test]
    fn wine_example_row() {
        let ds = dataset("wine").unwrap();
        assert_eq!(ds.get(95, 0), Some(12.47));
        assert_eq!(ds.get(95, 1), Some(1.52));
        assert_eq!(ds.label(95), "class 1");
    }
}
