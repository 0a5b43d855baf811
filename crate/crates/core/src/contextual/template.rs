use crate::error::{Error, Result};

const VALUE: &str = "{value}";

/// A feature sentence with one value slot and fixed prose around it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceTemplate {
    pub id: String,
    prefix: String,
    suffix: String,
    /// Decimal places for continuous values.
    pub decimals: usize,
}

impl SentenceTemplate {
    /// Built-in patterns available to every schema.
    pub fn builtin(id: &str) -> Option<&'static str> {
        match id {
            "plain" => Some("The {feature} is {value}."),
            "plain_unit" => Some("The {feature} is {value} {unit}."),
            "lower" => Some("The {feature_lower} is {value}."),
            _ => None,
        }
    }

    /// Expands `{feature}`, `{feature_lower}` and `{unit}` in `pattern` and
    /// splits it around the single `{value}` slot.
    pub fn expand(
        id: &str,
        pattern: &str,
        feature: &str,
        unit: &str,
        decimals: usize,
    ) -> Result<Self> {
        let mut p = pattern.to_string();
        if unit.is_empty() {
            p = p.replace(" {unit}", "");
        }
        let p = p
            .replace("{unit}", unit)
            .replace("{feature_lower}", &feature.to_lowercase())
            .replace("{feature}", feature);
        if p.matches(VALUE).count() != 1 {
            return Err(Error::InvalidSchema(format!(
                "template `{id}` must contain exactly one {VALUE} slot"
            )));
        }
        let (prefix, suffix) = p.split_once(VALUE).expect("slot counted above");
        Ok(SentenceTemplate {
            id: id.to_string(),
            prefix: prefix.to_string(),
            suffix: suffix.to_string(),
            decimals,
        })
    }

    pub fn render(&self, token: &str) -> String {
        format!("{}{}{}", self.prefix, token, self.suffix)
    }

    pub fn format_number(&self, x: f64) -> String {
        format!("{:.*}", self.decimals, x)
    }

    /// Extracts the value token from a sentence rendered by this template.
    pub fn extract<'s>(&self, sentence: &'s str) -> Option<&'s str> {
        let token = sentence
            .strip_prefix(self.prefix.as_str())?
            .strip_suffix(self.suffix.as_str())?;
        (!token.is_empty()).then_some(token)
    }

    pub fn prefix(&self) -> &str {
        &self.prefix
    }

    pub fn suffix(&self) -> &str {
        &self.suffix
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expands_unit_and_feature() {
        let t = SentenceTemplate::expand(
            "t",
            "The {feature_lower} of the iris flower is {value} {unit}.",
            "Sepal Length",
            "cm",
            2,
        )
        .unwrap();
        assert_eq!(t.render("5.10"), "The sepal length of the iris flower is 5.10 cm.");
        assert_eq!(t.extract("The sepal length of the iris flower is 5.10 cm."), Some("5.10"));
    }

    #[test]
    fn empty_unit_drops_its_space() {
        let t = SentenceTemplate::expand("t", "The {feature} is {value} {unit}.", "x", "", 2)
            .unwrap();
        assert_eq!(t.render("1"), "The x is 1.");
    }

    #[test]
    fn requires_exactly_one_slot() {
        assert!(SentenceTemplate::expand("t", "no slot", "x", "", 2).is_err());
        assert!(SentenceTemplate::expand("t", "{value} {value}", "x", "", 2).is_err());
    }

    #[test]
    fn extract_rejects_foreign_sentences() {
        let t = SentenceTemplate::expand("t", "The hue of the wine is {value}.", "Hue", "", 2)
            .unwrap();
        assert_eq!(t.extract("The hue of the wine 1.04."), None);
        assert_eq!(t.extract("The hue of the wine is ."), None);
    }
}
