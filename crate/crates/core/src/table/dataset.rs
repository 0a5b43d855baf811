use std::sync::Arc;

use crate::error::{Error, Result};
use crate::table::schema::{ColumnKind, Schema};

/// Missingness mask, row-major; `true` marks a missing cell.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mask {
    n: usize,
    d: usize,
    bits: Vec<bool>,
}

impl Mask {
    pub fn new(n: usize, d: usize) -> Self {
        Mask {
            n,
            d,
            bits: vec![false; n * d],
        }
    }

    pub fn from_rows(rows: &[Vec<bool>]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::Shape("ragged mask rows".into()));
        }
        Ok(Mask {
            n,
            d,
            bits: rows.concat(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.d + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, missing: bool) {
        self.bits[i * self.d + j] = missing;
    }

    pub fn row(&self, i: usize) -> &[bool] {
        &self.bits[i * self.d..(i + 1) * self.d]
    }

    /// |X_M|.
    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn column_count(&self, j: usize) -> usize {
        (0..self.n).filter(|&i| self.get(i, j)).count()
    }

    pub fn any(&self) -> bool {
        self.bits.iter().any(|&b| b)
    }

    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(k, _)| (k / self.d, k % self.d))
    }

    fn select_rows(&self, rows: &[usize]) -> Mask {
        let mut bits = Vec::with_capacity(rows.len() * self.d);
        for &i in rows {
            bits.extend_from_slice(self.row(i));
        }
        Mask {
            n: rows.len(),
            d: self.d,
            bits,
        }
    }
}

/// A readable cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value<'a> {
    Number(f64),
    Category(&'a str),
}

/// An n x d table of typed cells, a fully observed target column, and the
/// missingness mask.
///
/// Categorical cells are stored as level codes. Masked cells hold NaN and
/// are unreadable through [`Dataset::get`] and [`Dataset::value`].
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: Arc<Schema>,
    n: usize,
    values: Vec<f64>,
    mask: Mask,
    target: Vec<usize>,
    levels: Vec<Vec<String>>,
}

impl Dataset {
    /// Builds a dataset from row-major values. Cells flagged in `mask` are
    /// overwritten with NaN.
    pub fn new(
        schema: Arc<Schema>,
        mut values: Vec<f64>,
        mask: Mask,
        target: Vec<usize>,
        levels: Vec<Vec<String>>,
    ) -> Result<Self> {
        let d = schema.d();
        let n = target.len();
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        if values.len() != n * d || mask.n() != n || mask.d() != d || levels.len() != d {
            return Err(Error::Shape(format!(
                "expected {n}x{d} values, mask, and {d} level lists"
            )));
        }
        let labels = schema.target.labels.len();
        if let Some(pos) = target.iter().position(|&t| t >= labels) {
            return Err(Error::UnknownLabel {
                row: pos,
                label: target[pos].to_string(),
            });
        }
        for i in 0..n {
            for j in 0..d {
                let k = i * d + j;
                if mask.get(i, j) {
                    values[k] = f64::NAN;
                    continue;
                }
                let v = values[k];
                let ok = match schema.feature(j).kind {
                    ColumnKind::Continuous => v.is_finite(),
                    ColumnKind::Categorical => {
                        v >= 0.0 && v.fract() == 0.0 && (v as usize) < levels[j].len()
                    }
                };
                if !ok {
                    return Err(Error::TypeMismatch {
                        row: i,
                        col: schema.feature(j).name.clone(),
                        token: v.to_string(),
                    });
                }
            }
        }
        Ok(Dataset {
            schema,
            n,
            values,
            mask,
            target,
            levels,
        })
    }

    /// Fully observed dataset from continuous columns over a synthetic schema.
    pub fn from_columns(columns: &[Vec<f64>], target: Vec<usize>, labels: &[&str]) -> Result<Self> {
        let d = columns.len();
        let n = target.len();
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::Shape("columns differ in length from target".into()));
        }
        let mut values = Vec::with_capacity(n * d);
        for i in 0..n {
            values.extend(columns.iter().map(|c| c[i]));
        }
        let schema = Arc::new(Schema::synthetic(d, labels));
        Dataset::new(schema, values, Mask::new(n, d), target, vec![Vec::new(); d])
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn schema_arc(&self) -> &Arc<Schema> {
        &self.schema
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.schema.d()
    }

    pub fn mask(&self) -> &Mask {
        &self.mask
    }

    pub fn kind(&self, j: usize) -> ColumnKind {
        self.schema.feature(j).kind
    }

    pub fn is_missing(&self, i: usize, j: usize) -> bool {
        self.mask.get(i, j)
    }

    /// Observed numeric content of a cell (level code for categoricals).
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        (!self.mask.get(i, j)).then(|| self.values[i * self.d() + j])
    }

    pub fn value(&self, i: usize, j: usize) -> Option<Value<'_>> {
        let v = self.get(i, j)?;
        Some(match self.kind(j) {
            ColumnKind::Continuous => Value::Number(v),
            ColumnKind::Categorical => Value::Category(&self.levels[j][v as usize]),
        })
    }

    pub fn target(&self, i: usize) -> usize {
        self.target[i]
    }

    pub fn targets(&self) -> &[usize] {
        &self.target
    }

    pub fn label(&self, i: usize) -> &str {
        &self.schema.target.labels[self.target[i]]
    }

    pub fn levels(&self, j: usize) -> &[String] {
        &self.levels[j]
    }

    pub fn all_levels(&self) -> &[Vec<String>] {
        &self.levels
    }

    /// Observed values of column `j`, in row order.
    pub fn observed_column(&self, j: usize) -> Vec<f64> {
        (0..self.n).filter_map(|i| self.get(i, j)).collect()
    }

    /// Rows in the given order (indices may repeat).
    pub fn select_rows(&self, rows: &[usize]) -> Result<Dataset> {
        if rows.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let d = self.d();
        let mut values = Vec::with_capacity(rows.len() * d);
        for &i in rows {
            if i >= self.n {
                return Err(Error::RowOutOfRange { row: i, n: self.n });
            }
            values.extend_from_slice(&self.values[i * d..(i + 1) * d]);
        }
        Ok(Dataset {
            schema: Arc::clone(&self.schema),
            n: rows.len(),
            values,
            mask: self.mask.select_rows(rows),
            target: rows.iter().map(|&i| self.target[i]).collect(),
            levels: self.levels.clone(),
        })
    }

    /// Hides additional cells. `mask` must cover every cell that is already
    /// missing, since hidden values cannot be restored.
    pub fn with_mask(&self, mask: Mask) -> Result<Dataset> {
        if mask.n() != self.n || mask.d() != self.d() {
            return Err(Error::Shape("mask dimensions differ from dataset".into()));
        }
        if self.mask.cells().any(|(i, j)| !mask.get(i, j)) {
            return Err(Error::Shape("mask would reveal hidden cells".into()));
        }
        let mut values = self.values.clone();
        for (i, j) in mask.cells() {
            values[i * self.d() + j] = f64::NAN;
        }
        Ok(Dataset {
            mask,
            values,
            ..self.clone()
        })
    }

    /// Dataset with identical schema and targets but fresh row-major values
    /// and no missing cells.
    pub(crate) fn completed(&self, values: Vec<f64>) -> Result<Dataset> {
        Dataset::new(
            Arc::clone(&self.schema),
            values,
            Mask::new(self.n, self.d()),
            self.target.clone(),
            self.levels.clone(),
        )
    }

    /// Row-major copy where missing cells hold NaN.
    pub(crate) fn raw_values(&self) -> &[f64] {
        &self.values
    }
}
