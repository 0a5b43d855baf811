use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::table::{ColumnKind, Schema};

use super::catalog::{DescriptorCatalog, Provenance};

/// The request sentence every prompt carries word for word.
pub const DESCRIPTOR_REQUEST: &str =
    "For any missing attribute values, suggest contextually relevant descriptors to fill in the missing data.";

const FORMAT_DIRECTIVE: &str = "Reply with exactly one line per feature and nothing else. \
Each line must have the form `name: descriptor`, where name is the feature name exactly as listed \
and descriptor is one short standalone sentence telling the reader that this value is missing for this sample.";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptSpec {
    pub dataset: String,
    pub description: String,
    /// (name, kind, unit) in schema order.
    pub features: Vec<(String, ColumnKind, String)>,
    pub instruction: String,
}

impl PromptSpec {
    /// The user message sent to the endpoint.
    pub fn text(&self) -> String {
        let mut s = format!("Dataset: {}\nDescription: {}\n\nFeatures:\n", self.dataset, self.description);
        for (i, (name, kind, unit)) in self.features.iter().enumerate() {
            let kind = match kind {
                ColumnKind::Continuous => "continuous",
                ColumnKind::Categorical => "categorical",
            };
            if unit.is_empty() {
                s.push_str(&format!("{}. {name} ({kind})\n", i + 1));
            } else {
                s.push_str(&format!("{}. {name} ({kind}, {unit})\n", i + 1));
            }
        }
        s.push('\n');
        s.push_str(&self.instruction);
        s
    }

    fn feature_names(&self) -> impl Iterator<Item = &str> {
        self.features.iter().map(|f| f.0.as_str())
    }
}

pub fn build_prompt(schema: &Schema, description: &str) -> Result<PromptSpec> {
    let description = description.trim();
    if description.is_empty() {
        return Err(Error::EmptyDescription);
    }
    Ok(PromptSpec {
        dataset: schema.dataset.clone(),
        description: description.to_string(),
        features: schema
            .features
            .iter()
            .map(|f| (f.name.clone(), f.kind, f.unit.clone()))
            .collect(),
        instruction: format!("{DESCRIPTOR_REQUEST}\n{FORMAT_DIRECTIVE}"),
    })
}

fn strip_marker(line: &str) -> &str {
    let line = line.trim().trim_matches('`').trim();
    if let Some(rest) = line.strip_prefix(['-', '*', '•']) {
        return rest.trim_start();
    }
    let digits = line.bytes().take_while(u8::is_ascii_digit).count();
    if digits > 0 {
        if let Some(rest) = line[digits..].strip_prefix(['.', ')']) {
            return rest.trim_start();
        }
    }
    line
}

/// Parses a `name: descriptor` reply. Blank lines and list markers are
/// tolerated; feature names match case-insensitively. Any other line is
/// malformed, and features left without a line are reported together.
pub fn parse_response(prompt: &PromptSpec, response: &str, provenance: Provenance) -> Result<DescriptorCatalog> {
    let by_lower: BTreeMap<String, &str> = prompt
        .feature_names()
        .map(|n| (n.to_lowercase(), n))
        .collect();
    let mut entries = BTreeMap::new();
    for raw in response.lines() {
        let line = strip_marker(raw);
        if line.is_empty() {
            continue;
        }
        let malformed = || Error::MalformedResponse(raw.trim().to_string());
        let (name, text) = line.split_once(':').ok_or_else(malformed)?;
        let name = name.trim().trim_matches('*').trim();
        let text = text.trim();
        let feature = by_lower.get(&name.to_lowercase()).ok_or_else(malformed)?;
        if text.is_empty() || entries.insert(feature.to_string(), text.to_string()).is_some() {
            return Err(malformed());
        }
    }
    let gaps: Vec<String> = prompt
        .feature_names()
        .filter(|n| !entries.contains_key(*n))
        .map(str::to_string)
        .collect();
    if !gaps.is_empty() {
        return Err(Error::CoverageGap(gaps));
    }
    Ok(DescriptorCatalog {
        dataset: prompt.dataset.clone(),
        entries,
        provenance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;

    pub(crate) const WINE_REPLY: &str = include_str!("../../tests/fixtures/wine_reply.txt");

    fn wine_prompt() -> PromptSpec {
        let s = bundled::schema("wine").unwrap();
        build_prompt(&s, &s.description).unwrap()
    }

    #[test]
    fn prompt_lists_every_feature() {
        let p = wine_prompt();
        let text = p.text();
        assert!(text.contains(DESCRIPTOR_REQUEST));
        assert!(text.contains("`name: descriptor`"));
        for (i, f) in bundled::schema("wine").unwrap().feature_names().enumerate() {
            assert!(text.contains(&format!("{}. {f} (continuous)", i + 1)), "{f}");
        }
        assert_eq!(text, wine_prompt().text());
        let s = bundled::schema("wine").unwrap();
        assert!(matches!(build_prompt(&s, "  "), Err(Error::EmptyDescription)));
    }

    #[test]
    fn parses_full_wine_reply() {
        let cat = parse_response(&wine_prompt(), WINE_REPLY, Provenance::Bundled).unwrap();
        assert_eq!(cat.entries.len(), 13);
        assert_eq!(cat.get("Malic acid"), Some("Malic acid quantity missing for this wine sample."));
        assert_eq!(cat, {
            let mut b = super::super::load_bundled("wine").unwrap();
            b.provenance = Provenance::Bundled;
            b
        });
    }

    #[test]
    fn missing_line_is_a_coverage_gap() {
        let reply: String = WINE_REPLY
            .lines()
            .filter(|l| !l.starts_with("Hue"))
            .map(|l| format!("{l}\n"))
            .collect();
        assert_eq!(reply.lines().count(), 12);
        match parse_response(&wine_prompt(), &reply, Provenance::Bundled) {
            Err(Error::CoverageGap(g)) => assert_eq!(g, vec!["Hue".to_string()]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tolerates_markers_and_case() {
        let p = build_prompt(&bundled::schema("iris").unwrap(), "flowers").unwrap();
        let reply = "\n1. sepal length: Sepal Length: Unavailable\n- Sepal Width: gone\n* PETAL LENGTH: gone\n\n4) Petal Width: gone\n";
        let cat = parse_response(&p, reply, Provenance::Bundled).unwrap();
        assert_eq!(cat.get("Sepal Length"), Some("Sepal Length: Unavailable"));
        assert_eq!(cat.get("Petal Length"), Some("gone"));
    }

    #[test]
    fn malformed_lines() {
        let p = build_prompt(&bundled::schema("iris").unwrap(), "flowers").unwrap();
        for bad in ["no colon here", "Stem Length: gone", "Sepal Length:   ", "Sepal Length: a\nsepal length: b"] {
            assert!(
                matches!(parse_response(&p, bad, Provenance::Bundled), Err(Error::MalformedResponse(_))),
                "{bad}"
            );
        }
    }
}
