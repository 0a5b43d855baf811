//! Instruction-tuning records: `{instruction, input, output}` objects, one
//! JSON object per line.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::contextual::ContextualRecord;
use crate::error::{Error, Result};
use crate::table::Schema;

pub const TASK_SENTENCE: &str = "Predict the class based on the given measurements.";
pub const DESCRIPTOR_GUIDANCE: &str =
    "Use the context provided by the missing value descriptors to inform the prediction.";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FineTuneRecord {
    pub instruction: String,
    pub input: String,
    /// Target sentence, or empty for inference emission.
    pub output: String,
}

/// Task instruction naming the label set; the descriptor guidance sentence
/// is appended when the corpus is missingness-aware.
pub fn build_instruction(schema: &Schema, missingness_aware: bool) -> String {
    let mut s = format!(
        "{TASK_SENTENCE} Answer with one of: {}.",
        schema.target.labels.join(", ")
    );
    if missingness_aware {
        s.push(' ');
        s.push_str(DESCRIPTOR_GUIDANCE);
    }
    s
}

impl FineTuneRecord {
    pub fn from_contextual(record: &ContextualRecord, instruction: &str) -> Self {
        FineTuneRecord {
            instruction: instruction.to_string(),
            input: record.feature_text(),
            output: record.target_sentence().unwrap_or_default().to_string(),
        }
    }
}

/// Rendered target sentences for every label.
pub fn target_sentences(schema: &Schema) -> Result<Vec<String>> {
    let t = schema.target_template()?;
    Ok(schema.target.labels.iter().map(|l| t.render(l)).collect())
}

/// Splits a contextual line into feature prose and its trailing target
/// sentence, if it ends with one.
pub fn split_target<'a>(line: &'a str, targets: &[String]) -> (&'a str, Option<&'a str>) {
    for t in targets {
        if line == t {
            return ("", Some(line));
        }
        if let Some(head) = line.strip_suffix(t.as_str()).and_then(|h| h.strip_suffix(' ')) {
            return (head, Some(&line[head.len() + 1..]));
        }
    }
    (line, None)
}

/// True when `input` contains the target prose of any label.
pub fn leaks_label(input: &str, targets: &[String]) -> bool {
    targets.iter().any(|t| input.contains(t.as_str()))
}

fn check_uniform<I: IntoIterator<Item = bool>>(flags: I) -> Result<()> {
    let mut it = flags.into_iter();
    if let Some(first) = it.next() {
        if it.any(|f| f != first) {
            return Err(Error::MixedTargetPresence);
        }
    }
    Ok(())
}

/// Builds the records for a run; targets must be all present or all absent.
pub fn build_records(records: &[ContextualRecord], schema: &Schema, missingness_aware: bool) -> Result<Vec<FineTuneRecord>> {
    check_uniform(records.iter().map(|r| r.has_target))?;
    let instruction = build_instruction(schema, missingness_aware);
    let mut sorted: Vec<&ContextualRecord> = records.iter().collect();
    sorted.sort_by_key(|r| r.row_index);
    Ok(sorted
        .into_iter()
        .map(|r| FineTuneRecord::from_contextual(r, &instruction))
        .collect())
}

/// Builds records from raw contextual lines, splitting off the target
/// sentence; `keep_target = false` emits empty outputs.
pub fn records_from_lines<S: AsRef<str>>(
    lines: &[S],
    schema: &Schema,
    missingness_aware: bool,
    keep_target: bool,
) -> Result<Vec<FineTuneRecord>> {
    let targets = target_sentences(schema)?;
    let split: Vec<(&str, Option<&str>)> = lines.iter().map(|l| split_target(l.as_ref(), &targets)).collect();
    if keep_target {
        check_uniform(split.iter().map(|(_, t)| t.is_some()))?;
    }
    let instruction = build_instruction(schema, missingness_aware);
    Ok(split
        .into_iter()
        .map(|(input, target)| FineTuneRecord {
            instruction: instruction.clone(),
            input: input.to_string(),
            output: if keep_target { target.unwrap_or_default().to_string() } else { String::new() },
        })
        .collect())
}

pub fn write_records<W: Write>(records: &[FineTuneRecord], mut out: W) -> Result<usize> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(records.len())
}

/// Writes `records` as JSON lines in row order; returns the line count.
pub fn emit_records(records: &[ContextualRecord], schema: &Schema, missingness_aware: bool, out: &Path) -> Result<usize> {
    let built = build_records(records, schema, missingness_aware)?;
    let file = File::create(out).map_err(|e| Error::file(out, e))?;
    write_records(&built, BufWriter::new(file))
}

pub fn read_records(path: &Path) -> Result<Vec<FineTuneRecord>> {
    let file = File::open(path).map_err(|e| Error::file(path, e))?;
    let mut out = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::file(path, e))?;
        if !line.is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::contextual::{render_dataset, DescriptorMode};
    use crate::descriptors::load_bundled;
    use crate::missingness::inject_mcar;

    #[test]
    fn instruction_sentences() {
        let s = bundled::schema("wine").unwrap();
        let aware = build_instruction(&s, true);
        assert!(aware.contains(TASK_SENTENCE) && aware.contains(DESCRIPTOR_GUIDANCE));
        assert!(aware.contains("class 0, class 1, class 2"));
        let plain = build_instruction(&s, false);
        assert!(plain.contains(TASK_SENTENCE) && !plain.contains(DESCRIPTOR_GUIDANCE));
        assert_eq!(aware, build_instruction(&s, true));
    }

    #[test]
    fn emit_and_reparse_iris() {
        let ds = inject_mcar(&bundled::dataset("iris").unwrap(), 0.3, 1).unwrap();
        let recs = render_dataset(&ds, &DescriptorMode::FeatureSpecific(load_bundled("iris").unwrap()), true).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.jsonl");
        assert_eq!(emit_records(&recs, ds.schema(), true, &path).unwrap(), 150);
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 150);
        for line in text.lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
            assert_eq!(keys, ["input", "instruction", "output"]);
        }
        let back = read_records(&path).unwrap();
        assert_eq!(back, build_records(&recs, ds.schema(), true).unwrap());
        assert_eq!(back[0].output, format!("The species of the iris flower is {}.", ds.label(0)));
        let targets = target_sentences(ds.schema()).unwrap();
        assert!(back.iter().all(|r| !leaks_label(&r.input, &targets)));
    }

    #[test]
    fn empty_and_mixed() {
        let s = bundled::schema("iris").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.jsonl");
        assert_eq!(emit_records(&[], &s, true, &path).unwrap(), 0);
        assert_eq!(std::fs::read(&path).unwrap().len(), 0);

        let ds = bundled::dataset("iris").unwrap();
        let mode = DescriptorMode::generic("NaN").unwrap();
        let mut recs = render_dataset(&ds, &mode, true).unwrap();
        recs.extend(render_dataset(&ds, &mode, false).unwrap());
        assert!(matches!(emit_records(&recs, &s, true, &path), Err(Error::MixedTargetPresence)));
    }

    #[test]
    fn lines_split_target() {
        let ds = bundled::dataset("wine").unwrap();
        let recs = render_dataset(&ds, &DescriptorMode::generic("NaN").unwrap(), true).unwrap();
        let lines: Vec<String> = recs.iter().map(|r| r.line()).collect();
        let from_lines = records_from_lines(&lines, ds.schema(), false, true).unwrap();
        assert_eq!(from_lines, build_records(&recs, ds.schema(), false).unwrap());
        let no_target = records_from_lines(&lines, ds.schema(), false, false).unwrap();
        assert!(no_target.iter().all(|r| r.output.is_empty()));
        assert_eq!(no_target[3].input, from_lines[3].input);
    }
}
