//! Record-to-prose rendering. Each row becomes one sentence per feature in
//! schema order, optionally followed by a target sentence. Missing cells
//! are written either as a feature-specific descriptor sentence (replacing
//! the whole feature sentence) or as a generic token dropped into the value
//! slot. [`parse_back`] and [`parse_line`] invert the rendering.

mod template;

use crate::descriptors::DescriptorCatalog;
use crate::error::{Error, Result};
use crate::table::{ColumnKind, Dataset, Schema, Value};

pub use template::SentenceTemplate;

/// Generic tokens compared against feature-specific descriptors.
pub const GENERIC_TOKENS: [&str; 3] = ["NaN", "Missing value", "Value not recorded"];

#[derive(Debug, Clone, PartialEq)]
pub enum DescriptorMode {
    FeatureSpecific(DescriptorCatalog),
    Generic(String),
}

impl DescriptorMode {
    pub fn generic(token: impl Into<String>) -> Result<Self> {
        let token = token.into();
        if token.trim().is_empty() {
            return Err(Error::InvalidParameter("generic token must be non-empty".into()));
        }
        Ok(DescriptorMode::Generic(token))
    }

    /// Short name used in file names: `specific` or `generic`.
    pub fn kind(&self) -> &'static str {
        match self {
            DescriptorMode::FeatureSpecific(_) => "specific",
            DescriptorMode::Generic(_) => "generic",
        }
    }
}

/// One rendered row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextualRecord {
    /// Feature sentences in schema order, then the target sentence if any.
    pub sentences: Vec<String>,
    pub row_index: usize,
    pub missing_flags: Vec<bool>,
    pub has_target: bool,
}

impl ContextualRecord {
    /// The record as one line of text.
    pub fn line(&self) -> String {
        self.sentences.join(" ")
    }

    /// Feature sentences only.
    pub fn feature_text(&self) -> String {
        self.feature_sentences().join(" ")
    }

    pub fn feature_sentences(&self) -> &[String] {
        &self.sentences[..self.missing_flags.len()]
    }

    pub fn target_sentence(&self) -> Option<&str> {
        self.has_target.then(|| self.sentences.last().expect("target rendered").as_str())
    }
}

/// Per-feature renderers resolved once per schema.
struct Renderer<'a> {
    templates: Vec<SentenceTemplate>,
    target: SentenceTemplate,
    mode: &'a DescriptorMode,
}

impl<'a> Renderer<'a> {
    fn new(schema: &Schema, mode: &'a DescriptorMode) -> Result<Self> {
        if let DescriptorMode::Generic(t) = mode {
            if t.trim().is_empty() {
                return Err(Error::InvalidParameter("generic token must be non-empty".into()));
            }
        }
        Ok(Renderer {
            templates: (0..schema.d()).map(|j| schema.feature_template(j)).collect::<Result<_>>()?,
            target: schema.target_template()?,
            mode,
        })
    }

    fn missing_sentence(&self, schema: &Schema, j: usize) -> Result<String> {
        match self.mode {
            DescriptorMode::FeatureSpecific(cat) => cat.sentence(&schema.feature(j).name),
            DescriptorMode::Generic(token) => Ok(self.templates[j].render(token)),
        }
    }

    fn record(&self, ds: &Dataset, row: usize, with_target: bool) -> Result<ContextualRecord> {
        if row >= ds.n() {
            return Err(Error::RowOutOfRange { row, n: ds.n() });
        }
        let schema = ds.schema();
        let mut sentences = Vec::with_capacity(ds.d() + 1);
        for (j, t) in self.templates.iter().enumerate() {
            sentences.push(match ds.value(row, j) {
                None => self.missing_sentence(schema, j)?,
                Some(Value::Number(x)) => t.render(&t.format_number(x)),
                Some(Value::Category(c)) => t.render(c),
            });
        }
        if with_target {
            sentences.push(self.target.render(ds.label(row)));
        }
        Ok(ContextualRecord {
            sentences,
            row_index: row,
            missing_flags: ds.mask().row(row).to_vec(),
            has_target: with_target,
        })
    }
}

fn check_coverage(ds: &Dataset, mode: &DescriptorMode, rows: impl Iterator<Item = usize> + Clone) -> Result<()> {
    if let DescriptorMode::FeatureSpecific(cat) = mode {
        for j in 0..ds.d() {
            let name = &ds.schema().feature(j).name;
            if cat.get(name).is_none() && rows.clone().any(|i| ds.is_missing(i, j)) {
                return Err(Error::CatalogGap(name.clone()));
            }
        }
    }
    Ok(())
}

pub fn render_record(ds: &Dataset, row: usize, mode: &DescriptorMode, with_target: bool) -> Result<ContextualRecord> {
    if row >= ds.n() {
        return Err(Error::RowOutOfRange { row, n: ds.n() });
    }
    check_coverage(ds, mode, 0..ds.n())?;
    Renderer::new(ds.schema(), mode)?.record(ds, row, with_target)
}

/// Renders every row in order.
pub fn render_dataset(ds: &Dataset, mode: &DescriptorMode, with_target: bool) -> Result<Vec<ContextualRecord>> {
    check_coverage(ds, mode, 0..ds.n())?;
    let r = Renderer::new(ds.schema(), mode)?;
    (0..ds.n()).map(|i| r.record(ds, i, with_target)).collect()
}

/// A value recovered from prose.
#[derive(Debug, Clone, PartialEq)]
pub enum ParsedValue {
    Number(f64),
    Category(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedRecord {
    /// `None` marks a missing cell.
    pub values: Vec<Option<ParsedValue>>,
    pub target: Option<String>,
}

impl ParsedRecord {
    pub fn missing_flags(&self) -> Vec<bool> {
        self.values.iter().map(Option::is_none).collect()
    }
}

struct Parser<'a> {
    schema: &'a Schema,
    renderer: Renderer<'a>,
    descriptors: Vec<Option<String>>,
}

impl<'a> Parser<'a> {
    fn new(schema: &'a Schema, mode: &'a DescriptorMode) -> Result<Self> {
        let descriptors = match mode {
            DescriptorMode::FeatureSpecific(cat) => schema
                .feature_names()
                .map(|f| cat.sentence(f).ok())
                .collect(),
            DescriptorMode::Generic(_) => vec![None; schema.d()],
        };
        Ok(Parser {
            schema,
            renderer: Renderer::new(schema, mode)?,
            descriptors,
        })
    }

    fn feature(&self, j: usize, sentence: &str) -> Result<Option<ParsedValue>> {
        let bad = || Error::UnparseableSentence {
            index: j,
            sentence: sentence.to_string(),
        };
        if self.descriptors[j].as_deref() == Some(sentence) {
            return Ok(None);
        }
        let token = self.renderer.templates[j].extract(sentence).ok_or_else(bad)?;
        if let DescriptorMode::Generic(g) = self.renderer.mode {
            if token == g {
                return Ok(None);
            }
        }
        Ok(Some(match self.schema.feature(j).kind {
            ColumnKind::Continuous => ParsedValue::Number(token.parse().map_err(|_| bad())?),
            ColumnKind::Categorical => ParsedValue::Category(token.to_string()),
        }))
    }

    fn target(&self, index: usize, sentence: &str) -> Result<String> {
        self.renderer
            .target
            .extract(sentence)
            .filter(|l| self.schema.target.labels.iter().any(|x| x == l))
            .map(str::to_string)
            .ok_or_else(|| Error::UnparseableSentence {
                index,
                sentence: sentence.to_string(),
            })
    }

    /// Candidate sentence beginnings at position `j` (`d` is the target).
    fn starts(&self, j: usize) -> Vec<&str> {
        if j == self.schema.d() {
            return vec![self.renderer.target.prefix()];
        }
        let mut v = vec![self.renderer.templates[j].prefix()];
        if let Some(d) = &self.descriptors[j] {
            v.push(d);
        }
        v
    }

    /// Splits a rendered line into sentences. At each position the sentence
    /// is either the exact descriptor or the template prefix followed by the
    /// shortest token whose suffix is followed by the end of the line or by a
    /// space and a valid start of the next sentence.
    fn split(&self, line: &str) -> Result<Vec<String>> {
        let d = self.schema.d();
        let mut rest = line.trim_end_matches(['\n', '\r']);
        let mut out = Vec::with_capacity(d + 1);
        let next_ok = |after: &str, j: usize| -> bool {
            after.is_empty() && j + 1 >= d
                || after
                    .strip_prefix(' ')
                    .is_some_and(|a| j < d && self.starts(j + 1).iter().any(|s| a.starts_with(s)))
        };
        for j in 0..=d {
            if rest.is_empty() && j == d {
                break;
            }
            let bad = || Error::UnparseableSentence {
                index: j,
                sentence: rest.to_string(),
            };
            let mut taken = None;
            if let Some(desc) = self.descriptors.get(j).and_then(Option::as_deref) {
                if let Some(after) = rest.strip_prefix(desc) {
                    if next_ok(after, j) {
                        taken = Some(desc.len());
                    }
                }
            }
            if taken.is_none() {
                let t = if j == d { &self.renderer.target } else { &self.renderer.templates[j] };
                let body = rest.strip_prefix(t.prefix()).ok_or_else(bad)?;
                let base = t.prefix().len();
                taken = body
                    .match_indices(t.suffix())
                    .map(|(at, _)| at + t.suffix().len())
                    .filter(|&end| end > t.suffix().len() && (end <= body.len()))
                    .find(|&end| next_ok(&body[end..], j))
                    .map(|end| base + end);
            }
            let len = taken.ok_or_else(bad)?;
            out.push(rest[..len].to_string());
            rest = rest[len..].strip_prefix(' ').unwrap_or(&rest[len..]);
        }
        if !rest.is_empty() {
            return Err(Error::UnparseableSentence {
                index: out.len(),
                sentence: rest.to_string(),
            });
        }
        Ok(out)
    }
}

/// Inverse of [`render_record`] for records rendered under the same schema
/// and mode.
pub fn parse_back(record: &ContextualRecord, schema: &Schema, mode: &DescriptorMode) -> Result<ParsedRecord> {
    parse_sentences(&record.sentences, schema, mode)
}

fn parse_sentences(sentences: &[String], schema: &Schema, mode: &DescriptorMode) -> Result<ParsedRecord> {
    let d = schema.d();
    if sentences.len() != d && sentences.len() != d + 1 {
        return Err(Error::Shape(format!(
            "expected {d} or {} sentences, got {}",
            d + 1,
            sentences.len()
        )));
    }
    let p = Parser::new(schema, mode)?;
    let values = (0..d).map(|j| p.feature(j, &sentences[j])).collect::<Result<_>>()?;
    let target = sentences.get(d).map(|s| p.target(d, s)).transpose()?;
    Ok(ParsedRecord { values, target })
}

/// Splits a rendered line back into a record.
pub fn parse_line(line: &str, row_index: usize, schema: &Schema, mode: &DescriptorMode) -> Result<ContextualRecord> {
    let sentences = Parser::new(schema, mode)?.split(line)?;
    let parsed = parse_sentences(&sentences, schema, mode)?;
    Ok(ContextualRecord {
        has_target: parsed.target.is_some(),
        missing_flags: parsed.missing_flags(),
        sentences,
        row_index,
    })
}

/// Number of sentences in `records` that stand for a missing cell.
pub fn descriptor_count(records: &[ContextualRecord], schema: &Schema, mode: &DescriptorMode) -> Result<usize> {
    let p = Parser::new(schema, mode)?;
    let mut count = 0;
    for r in records {
        for (j, s) in r.feature_sentences().iter().enumerate() {
            count += usize::from(p.feature(j, s)?.is_none());
        }
    }
    Ok(count)
}
