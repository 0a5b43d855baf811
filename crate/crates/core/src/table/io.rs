//! CSV ingestion and write-back.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::table::dataset::{Dataset, Mask};
use crate::table::schema::{ColumnKind, Schema};

/// Reads a headed CSV. Columns are matched to the schema by name; the
/// schema's `missing_token` (empty by default) marks missing cells.
pub fn read_csv<R: Read>(reader: R, schema: Arc<Schema>) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::None)
        .from_reader(reader);
    let header = rdr.headers()?.clone();

    let position = |name: &str| header.iter().position(|h| h == name);
    let mut columns = Vec::with_capacity(schema.d());
    for f in &schema.features {
        columns.push(position(&f.name).ok_or_else(|| Error::MissingColumn(f.name.clone()))?);
    }
    let target_col =
        position(&schema.target.name).ok_or_else(|| Error::MissingColumn(schema.target.name.clone()))?;
    for h in header.iter() {
        if h != schema.target.name && !schema.features.iter().any(|f| f.name == h) {
            return Err(Error::UnexpectedColumn(h.to_string()));
        }
    }

    let d = schema.d();
    let mut levels: Vec<Vec<String>> = schema.features.iter().map(|f| f.levels.clone()).collect();
    let mut values = Vec::new();
    let mut missing = Vec::new();
    let mut target = Vec::new();
    let sentinel = schema.missing_token.as_str();

    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        for (j, &c) in columns.iter().enumerate() {
            let token = record.get(c).unwrap_or("");
            if token == sentinel {
                values.push(f64::NAN);
                missing.push(true);
                continue;
            }
            let f = schema.feature(j);
            let v = match f.kind {
                ColumnKind::Continuous => token
                    .trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::TypeMismatch {
                        row: i,
                        col: f.name.clone(),
                        token: token.to_string(),
                    })?,
                ColumnKind::Categorical => match levels[j].iter().position(|l| l == token) {
                    Some(k) => k as f64,
                    None if f.levels.is_empty() => {
                        levels[j].push(token.to_string());
                        (levels[j].len() - 1) as f64
                    }
                    None => {
                        return Err(Error::TypeMismatch {
                            row: i,
                            col: f.name.clone(),
                            token: token.to_string(),
                        })
                    }
                },
            };
            values.push(v);
            missing.push(false);
        }
        let label = record.get(target_col).unwrap_or("");
        let t = schema.label_index(label).ok_or_else(|| Error::UnknownLabel {
            row: i,
            label: label.to_string(),
        })?;
        target.push(t);
    }
    if target.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n = target.len();
    let rows: Vec<Vec<bool>> = missing.chunks(d).map(<[bool]>::to_vec).collect();
    let mask = if n > 0 { Mask::from_rows(&rows)? } else { Mask::new(0, d) };
    Dataset::new(schema, values, mask, target, levels)
}

pub fn load_csv(path: impl AsRef<Path>, schema: Arc<Schema>) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::file(path, e))?;
    read_csv(std::io::BufReader::new(file), schema)
}

/// Writes the dataset in schema column order; missing cells become the
/// schema's missing token and numbers use the shortest round-trip form.
pub fn write_csv<W: Write>(ds: &Dataset, writer: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(writer);
    let schema = ds.schema();
    let mut header: Vec<&str> = schema.feature_names().collect();
    header.push(&schema.target.name);
    w.write_record(&header)?;
    let mut row: Vec<String> = Vec::with_capacity(ds.d() + 1);
    for i in 0..ds.n() {
        row.clear();
        for j in 0..ds.d() {
            row.push(match ds.value(i, j) {
                None => schema.missing_token.clone(),
                Some(crate::table::Value::Number(v)) => format!("{v}"),
                Some(crate::table::Value::Category(s)) => s.to_string(),
            });
        }
        row.push(ds.label(i).to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_csv(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::file(path, e))?;
    write_csv(ds, std::io::BufWriter::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schema() -> Arc<Schema> {
        Arc::new(Schema::synthetic(2, &["a", "b"]))
    }

    #[test]
    fn reads_missing_cells() {
        let csv = "x1,x2,class\n1.5,,a\n,2,b\n";
        let ds = read_csv(csv.as_bytes(), schema()).unwrap();
        assert_eq!((ds.n(), ds.d()), (2, 2));
        assert!(ds.is_missing(0, 1) && ds.is_missing(1, 0));
        assert_eq!(ds.get(0, 0), Some(1.5));
        assert_eq!(ds.targets(), &[0, 1]);
    }

    #[test]
    fn one_row_no_sentinels() {
        let ds = read_csv("x1,x2,class\n1,2,a\n".as_bytes(), schema()).unwrap();
        assert!(!ds.mask().any());
        assert_eq!(ds.n(), 1);
    }

    #[test]
    fn ingestion_errors() {
        let e = read_csv("x1,x2\n1,2\n".as_bytes(), schema());
        assert!(matches!(e, Err(Error::MissingColumn(c)) if c == "class"));
        let e = read_csv("x1,x2,class\n1,zz,a\n".as_bytes(), schema());
        assert!(matches!(e, Err(Error::TypeMismatch { row: 0, .. })));
        let e = read_csv("x1,x2,class\n1,2,q\n".as_bytes(), schema());
        assert!(matches!(e, Err(Error::UnknownLabel { row: 0, .. })));
        let e = read_csv("x1,x2,class\n".as_bytes(), schema());
        assert!(matches!(e, Err(Error::EmptyDataset)));
        let e = read_csv("x1,x2,class\n1,inf,a\n".as_bytes(), schema());
        assert!(matches!(e, Err(Error::TypeMismatch { .. })));
        let e = read_csv("x1,x2,extra,class\n1,2,3,a\n".as_bytes(), schema());
        assert!(matches!(e, Err(Error::UnexpectedColumn(_))));
    }

    #[test]
    fn custom_sentinel() {
        let mut s = Schema::synthetic(2, &["a"]);
        s.missing_token = "NA".into();
        let ds = read_csv("x1,x2,class\nNA,2,a\n".as_bytes(), Arc::new(s)).unwrap();
        assert!(ds.is_missing(0, 0));
        let mut out = Vec::new();
        write_csv(&ds, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "x1,x2,class\nNA,2,a\n");
    }

    #[test]
    fn write_back_is_byte_stable() {
        let csv = "x1,x2,class\n1.5,,a\n,2,b\n0.006399,1065,a\n";
        let ds = read_csv(csv.as_bytes(), schema()).unwrap();
        let mut out = Vec::new();
        write_csv(&ds, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), csv);
    }

    #[test]
    fn categorical_levels_in_order_of_appearance() {
        let mut s = Schema::synthetic(1, &["a"]);
        s.features[0].kind = ColumnKind::Categorical;
        let ds = read_csv("x1,class\nred,a\nblue,a\nred,a\n".as_bytes(), Arc::new(s)).unwrap();
        assert_eq!(ds.levels(0), &["red".to_string(), "blue".to_string()]);
        assert_eq!(ds.get(2, 0), Some(0.0));
    }
}
