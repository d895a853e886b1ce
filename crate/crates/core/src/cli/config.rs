//! Flat `key = value` configuration files, one setting per line.
//!
//! Keys mirror the long command-line flags (`format`, `sidecar`, `output`,
//! `metric`, `chars-per-page`, `genders`, `savings`, `profiles`,
//! `fixtures`). `#` starts a comment. Command-line flags win over file
//! values.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};

const KEYS: &[&str] = &[
    "format",
    "sidecar",
    "output",
    "metric",
    "chars-per-page",
    "genders",
    "savings",
    "profiles",
    "fixtures",
];

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (index, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::InvalidConfig(format!(
                    "config line {}: expected `key = value`",
                    index + 1
                )));
            };
            let key = key.trim().replace('_', "-");
            if !KEYS.contains(&key.as_str()) {
                return Err(Error::InvalidConfig(format!(
                    "config line {}: unknown key `{key}`",
                    index + 1
                )));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::InvalidConfig(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn flag(&self, key: &str) -> Result<bool> {
        match self.get(key) {
            None => Ok(false),
            Some(v) => match v.to_ascii_lowercase().as_str() {
                "true" | "yes" | "1" | "on" => Ok(true),
                "false" | "no" | "0" | "off" => Ok(false),
                other => Err(Error::InvalidConfig(format!(
                    "`{key}` expects a boolean, got `{other}`"
                ))),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_comments() {
        let config = ConfigFile::parse(
            "# defaults\nformat = bibtex\nchars_per_page = 2500  # narrow\n\nsavings = yes\n",
        )
        .unwrap();
        assert_eq!(config.get("format"), Some("bibtex"));
        assert_eq!(config.get("chars-per-page"), Some("2500"));
        assert!(config.flag("savings").unwrap());
        assert!(!config.flag("profiles").unwrap());
    }

    #[test]
    fn rejects_unknown_keys_and_garbage() {
        assert!(ConfigFile::parse("colour = blue").is_err());
        assert!(ConfigFile::parse("format").is_err());
        assert!(ConfigFile::parse("savings = maybe")
            .unwrap()
            .flag("savings")
            .is_err());
    }
}
