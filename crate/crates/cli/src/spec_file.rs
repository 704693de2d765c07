//! Game specification files: a flat `KEY = VALUE` text format and an
//! equivalent JSON shape. `R`, `S`, `T`, `P` are required payoffs, `p_a` is
//! the optional altruist mass (default 0), and any other key is kept as
//! free-text metadata.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::Context;
use perversity_core::{GameInstance, PayoffMatrix};

#[derive(Debug, thiserror::Error)]
pub enum SpecFileError {
    #[error("line {line}: expected `KEY = VALUE`, got `{text}`")]
    Malformed { line: usize, text: String },

    #[error("line {line}: invalid number for field {field}: `{value}`")]
    InvalidNumber {
        line: usize,
        field: String,
        value: String,
    },

    #[error("line {line}: duplicate field {field}")]
    DuplicateField { line: usize, field: String },

    #[error("missing required field {0}")]
    MissingField(&'static str),

    #[error("invalid JSON game file: {0}")]
    Json(String),

    #[error("JSON field {0}: expected a finite number")]
    JsonNumber(String),
}

/// A parsed game specification.
#[derive(Debug, Clone, PartialEq)]
pub struct GameSpecFile {
    pub reward: f64,
    pub sucker: f64,
    pub temptation: f64,
    pub punishment: f64,
    pub altruist_mass: f64,
    pub metadata: BTreeMap<String, String>,
}

impl GameSpecFile {
    /// Parses either format, keyed on whether the content looks like a JSON
    /// object.
    pub fn parse(text: &str) -> Result<Self, SpecFileError> {
        if text.trim_start().starts_with('{') {
            Self::parse_json(text)
        } else {
            Self::parse_key_value(text)
        }
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read game file {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("cannot parse game file {}", path.display()))
    }

    pub fn matrix(&self) -> perversity_core::Result<PayoffMatrix> {
        PayoffMatrix::new(self.reward, self.sucker, self.temptation, self.punishment)
    }

    pub fn to_instance(&self) -> perversity_core::Result<GameInstance> {
        GameInstance::new(self.matrix()?, self.altruist_mass)
    }

    fn parse_key_value(text: &str) -> Result<Self, SpecFileError> {
        let mut fields: BTreeMap<&'static str, f64> = BTreeMap::new();
        let mut metadata = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(SpecFileError::Malformed {
                    line,
                    text: content.to_string(),
                });
            };
            let key = key.trim();
            let value = value.trim();
            let field: Option<&'static str> = match key {
                "R" => Some("R"),
                "S" => Some("S"),
                "T" => Some("T"),
                "P" => Some("P"),
                "p_a" => Some("p_a"),
                _ => None,
            };
            match field {
                Some(field) => {
                    let number: f64 = value.parse().map_err(|_| SpecFileError::InvalidNumber {
                        line,
                        field: field.to_string(),
                        value: value.to_string(),
                    })?;
                    if fields.insert(field, number).is_some() {
                        return Err(SpecFileError::DuplicateField {
                            line,
                            field: field.to_string(),
                        });
                    }
                }
                None => {
                    metadata.insert(key.to_string(), value.to_string());
                }
            }
        }
        let required = |name: &'static str| {
            fields
                .get(name)
                .copied()
                .ok_or(SpecFileError::MissingField(name))
        };
        Ok(Self {
            reward: required("R")?,
            sucker: required("S")?,
            temptation: required("T")?,
            punishment: required("P")?,
            altruist_mass: fields.get("p_a").copied().unwrap_or(0.0),
            metadata,
        })
    }

    fn parse_json(text: &str) -> Result<Self, SpecFileError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| SpecFileError::Json(e.to_string()))?;
        let object = value
            .as_object()
            .ok_or_else(|| SpecFileError::Json("top level must be an object".to_string()))?;
        let number = |name: &str| -> Result<Option<f64>, SpecFileError> {
            match object.get(name) {
                None => Ok(None),
                Some(v) => v
                    .as_f64()
                    .filter(|x| x.is_finite())
                    .map(Some)
                    .ok_or_else(|| SpecFileError::JsonNumber(name.to_string())),
            }
        };
        let required = |name: &'static str| -> Result<f64, SpecFileError> {
            number(name)?.ok_or(SpecFileError::MissingField(name))
        };
        let mut metadata = BTreeMap::new();
        for (key, v) in object {
            if matches!(key.as_str(), "R" | "S" | "T" | "P" | "p_a") {
                continue;
            }
            let rendered = match v {
                serde_json::Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            metadata.insert(key.clone(), rendered);
        }
        Ok(Self {
            reward: required("R")?,
            sucker: required("S")?,
            temptation: required("T")?,
            punishment: required("P")?,
            altruist_mass: number("p_a")?.unwrap_or(0.0),
            metadata,
        })
    }
}
