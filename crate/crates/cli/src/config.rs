//! Job configuration: `key = value` lines, `#` comments, and repeatable
//! `[filter]` / `[shape]` blocks whose keys belong to the most recent header.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub value: String,
    pub line: usize,
}

/// A flat set of keys with the line each was defined on.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Section {
    /// Line of the block header; 0 for the top level.
    pub line: usize,
    entries: BTreeMap<String, Entry>,
}

impl Section {
    pub fn raw(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = (&str, &Entry)> {
        self.entries.iter().map(|(k, e)| (k.as_str(), e))
    }

    pub fn str(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    pub fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(e) => e.value.parse().map(Some).map_err(|_| CliError::Config {
                line: e.line,
                msg: format!("{key}: cannot parse {:?}", e.value),
            }),
        }
    }

    pub fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.parse(key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        self.parse(key)?.ok_or_else(|| CliError::Config {
            line: self.line,
            msg: format!("missing required key {key}"),
        })
    }

    /// Finite real.
    pub fn real(&self, key: &str, default: f64) -> Result<f64> {
        let v = self.get(key, default)?;
        self.finite(key, v)
    }

    pub fn require_real(&self, key: &str) -> Result<f64> {
        let v = self.require(key)?;
        self.finite(key, v)
    }

    fn finite(&self, key: &str, v: f64) -> Result<f64> {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(self.error(key, "must be finite"))
        }
    }

    pub fn bool(&self, key: &str, default: bool) -> Result<bool> {
        match self.str(key) {
            None => Ok(default),
            Some("true" | "yes" | "1") => Ok(true),
            Some("false" | "no" | "0") => Ok(false),
            Some(other) => Err(self.error(key, &format!("expected true or false, got {other:?}"))),
        }
    }

    /// Error pointing at the line of `key` (or of the section when absent).
    pub fn error(&self, key: &str, msg: &str) -> CliError {
        CliError::Config {
            line: self.entries.get(key).map_or(self.line, |e| e.line),
            msg: format!("{key}: {msg}"),
        }
    }

    /// Rejects keys outside `allowed`.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for (k, e) in &self.entries {
            if !allowed.contains(&k.as_str()) {
                return Err(CliError::Config {
                    line: e.line,
                    msg: format!("unknown key {k}"),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct JobConfig {
    pub top: Section,
    pub filters: Vec<Section>,
    pub shapes: Vec<Section>,
}

/// Longest accepted config file, in bytes.
pub const MAX_CONFIG_LEN: usize = 1 << 20;

impl JobConfig {
    pub fn parse(text: &str) -> Result<Self> {
        if text.len() > MAX_CONFIG_LEN {
            return Err(CliError::Config {
                line: 0,
                msg: "config file is too large".into(),
            });
        }
        let mut cfg = JobConfig::default();
        enum Target {
            Top,
            Filter,
            Shape,
        }
        let mut target = Target::Top;
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(name) = content.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or_else(|| CliError::Config {
                    line,
                    msg: "unterminated block header".into(),
                })?;
                let section = Section {
                    line,
                    entries: BTreeMap::new(),
                };
                target = match name.trim() {
                    "filter" => {
                        cfg.filters.push(section);
                        Target::Filter
                    }
                    "shape" => {
                        cfg.shapes.push(section);
                        Target::Shape
                    }
                    other => {
                        return Err(CliError::Config {
                            line,
                            msg: format!("unknown block [{other}]"),
                        })
                    }
                };
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| CliError::Config {
                line,
                msg: format!("expected key = value, got {content:?}"),
            })?;
            let key = key.trim();
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(CliError::Config {
                    line,
                    msg: format!("invalid key {key:?}"),
                });
            }
            let section = match target {
                Target::Top => &mut cfg.top,
                Target::Filter => cfg.filters.last_mut().expect("header pushed"),
                Target::Shape => cfg.shapes.last_mut().expect("header pushed"),
            };
            let entry = Entry {
                value: value.trim().to_string(),
                line,
            };
            if let Some(prev) = section.entries.insert(key.to_string(), entry) {
                return Err(CliError::Config {
                    line,
                    msg: format!("duplicate key {key} (first set on line {})", prev.line),
                });
            }
        }
        Ok(cfg)
    }
}
