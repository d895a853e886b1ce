//! Canonical text used for every name and institution equality test.
//!
//! Canonical form is NFC, Unicode full case folded, trimmed, with internal whitespace
//! runs collapsed to a single ASCII space. Diacritics survive: `ü` and `u`
//! stay distinct.

use std::fmt;

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CanonicalName(String);

impl CanonicalName {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for CanonicalName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for CanonicalName {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

pub fn normalize_text(raw: &str) -> Result<CanonicalName> {
    let folded = caseless::default_case_fold_str(&raw.nfc().collect::<String>());
    let mut collapsed = String::with_capacity(folded.len());
    for word in folded.split_whitespace() {
        if !collapsed.is_empty() {
            collapsed.push(' ');
        }
        collapsed.push_str(word);
    }
    if collapsed.is_empty() {
        return Err(Error::InvalidName(format!(
            "{raw:?} is empty after trimming"
        )));
    }
    Ok(CanonicalName(collapsed.nfc().collect()))
}
