//! Bibliographic data model, ingestion, and name normalization.
//!
//! A [`Corpus`] is built once through [`Corpus::new`] (or one of the
//! parsers) and is immutable afterwards, so it can be shared freely between
//! threads.

pub mod bibtex;
pub mod jsonl;
pub mod latex;
pub mod normalize;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Diagnostic, Error, Location, Result};
pub use normalize::{normalize_text, CanonicalName};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    Female,
    Male,
    Diverse,
    Unknown,
}

impl Gender {
    /// Census categories used when none are configured.
    pub const DEFAULT_CATEGORIES: [Gender; 3] = [Gender::Female, Gender::Male, Gender::Diverse];

    pub fn as_str(self) -> &'static str {
        match self {
            Gender::Female => "female",
            Gender::Male => "male",
            Gender::Diverse => "diverse",
            Gender::Unknown => "unknown",
        }
    }
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Gender {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "female" => Ok(Gender::Female),
            "male" => Ok(Gender::Male),
            "diverse" => Ok(Gender::Diverse),
            "unknown" => Ok(Gender::Unknown),
            other => Err(Error::InvalidConfig(format!(
                "unrecognized gender `{other}`"
            ))),
        }
    }
}

/// Day and month of a doctoral contract start. The year is not modelled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CareerStart {
    pub day: u8,
    pub month: u8,
}

impl CareerStart {
    pub fn new(day: u8, month: u8) -> Result<Self> {
        let start = CareerStart { day, month };
        start.check(Location::None)?;
        Ok(start)
    }

    fn check(&self, location: Location) -> Result<()> {
        if !(1..=31).contains(&self.day) {
            return Err(Error::validation(
                location,
                "career_start.day",
                format!("day {} outside 1..=31", self.day),
            ));
        }
        if !(1..=12).contains(&self.month) {
            return Err(Error::validation(
                location,
                "career_start.month",
                format!("month {} outside 1..=12", self.month),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InstitutionId(pub String);

impl InstitutionId {
    pub fn new(id: impl Into<String>) -> Self {
        InstitutionId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for InstitutionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Institution {
    pub id: InstitutionId,
    /// Name exactly as printed, including punctuation and acronyms.
    pub display_name: String,
}

impl Institution {
    pub fn new(id: impl Into<String>, display_name: impl Into<String>) -> Self {
        Institution {
            id: InstitutionId::new(id),
            display_name: display_name.into(),
        }
    }
}

/// Canonical (forename, surname) pair; the identity used for name sharing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NameKey {
    pub forename: CanonicalName,
    pub surname: CanonicalName,
}

impl fmt::Display for NameKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.forename, self.surname)
    }
}

/// One author occurrence on one record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuthorMention {
    pub forename: String,
    pub surname: String,
    pub gender: Gender,
    pub institution: InstitutionId,
    pub career_start: Option<CareerStart>,
}

impl AuthorMention {
    pub fn new(
        forename: impl Into<String>,
        surname: impl Into<String>,
        gender: Gender,
        institution: impl Into<String>,
    ) -> Self {
        AuthorMention {
            forename: forename.into(),
            surname: surname.into(),
            gender,
            institution: InstitutionId::new(institution),
            career_start: None,
        }
    }

    pub fn with_career_start(mut self, start: CareerStart) -> Self {
        self.career_start = Some(start);
        self
    }

    pub fn name_key(&self) -> Result<NameKey> {
        Ok(NameKey {
            forename: normalize_text(&self.forename)?,
            surname: normalize_text(&self.surname)?,
        })
    }

    /// Full name as it would be printed in a bibliography.
    pub fn rendered_name(&self) -> String {
        format!("{} {}", self.forename.trim(), self.surname.trim())
    }

    /// Checks the mention-local invariants (names and career start).
    pub fn validate(&self, location: Location) -> Result<()> {
        for (field, value) in [("forename", &self.forename), ("surname", &self.surname)] {
            if !value.chars().any(char::is_alphabetic) {
                return Err(Error::validation(
                    location,
                    field,
                    format!("{value:?} contains no alphabetic character"),
                ));
            }
        }
        if let Some(start) = &self.career_start {
            start.check(location)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaperRecord {
    pub id: String,
    pub title: String,
    pub year: i32,
    pub authors: Vec<AuthorMention>,
    pub venue: Option<String>,
    pub citations_per_year: BTreeMap<i32, u64>,
}

impl PaperRecord {
    pub fn new(id: impl Into<String>, title: impl Into<String>, year: i32) -> Self {
        PaperRecord {
            id: id.into(),
            title: title.into(),
            year,
            authors: Vec::new(),
            venue: None,
            citations_per_year: BTreeMap::new(),
        }
    }

    pub fn with_author(mut self, author: AuthorMention) -> Self {
        self.authors.push(author);
        self
    }

    /// Record-local invariants; institution resolution is checked by the corpus.
    pub fn validate(&self, location: Location) -> Result<()> {
        if self.authors.is_empty() {
            return Err(Error::validation(
                location,
                "authors",
                "author list is empty",
            ));
        }
        for (index, author) in self.authors.iter().enumerate() {
            author.validate(location.clone()).map_err(|e| match e {
                Error::Validation {
                    location,
                    field,
                    message,
                } => Error::Validation {
                    location,
                    field: format!("authors[{index}].{field}"),
                    message,
                },
                other => other,
            })?;
        }
        Ok(())
    }
}

/// A validated collection of records plus the institution table they
/// reference.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    records: Vec<PaperRecord>,
    institutions: BTreeMap<InstitutionId, Institution>,
}

impl Corpus {
    pub fn new(records: Vec<PaperRecord>, institutions: Vec<Institution>) -> Result<Self> {
        let mut table = BTreeMap::new();
        for institution in institutions {
            if institution.display_name.trim().is_empty() {
                return Err(Error::validation(
                    Location::None,
                    "institution",
                    format!("institution `{}` has an empty display name", institution.id),
                ));
            }
            let id = institution.id.clone();
            if table.insert(id.clone(), institution).is_some() {
                return Err(Error::validation(
                    Location::None,
                    "institution",
                    format!("duplicate institution id `{id}`"),
                ));
            }
        }

        let mut seen = HashSet::new();
        for record in &records {
            let location = Location::Record(record.id.clone());
            if !seen.insert(record.id.as_str()) {
                return Err(Error::validation(location, "id", "duplicate record id"));
            }
            record.validate(location.clone())?;
            for (index, author) in record.authors.iter().enumerate() {
                if !table.contains_key(&author.institution) {
                    return Err(Error::validation(
                        location,
                        format!("authors[{index}].institution"),
                        format!("unknown institution `{}`", author.institution),
                    ));
                }
            }
        }

        Ok(Corpus {
            records,
            institutions: table,
        })
    }

    pub fn records(&self) -> &[PaperRecord] {
        &self.records
    }

    pub fn record(&self, id: &str) -> Option<&PaperRecord> {
        self.records.iter().find(|r| r.id == id)
    }

    pub fn institutions(&self) -> impl Iterator<Item = &Institution> {
        self.institutions.values()
    }

    pub fn institution(&self, id: &InstitutionId) -> Option<&Institution> {
        self.institutions.get(id)
    }

    pub fn institution_count(&self) -> usize {
        self.institutions.len()
    }

    pub fn mention_count(&self) -> usize {
        self.records.iter().map(|r| r.authors.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Display names of a record's author institutions, aligned with its
    /// author list.
    pub fn institution_names<'a>(&'a self, record: &'a PaperRecord) -> Result<Vec<&'a str>> {
        record
            .authors
            .iter()
            .enumerate()
            .map(|(index, author)| {
                self.institution(&author.institution)
                    .map(|i| i.display_name.as_str())
                    .ok_or_else(|| {
                        Error::validation(
                            Location::Record(record.id.clone()),
                            format!("authors[{index}].institution"),
                            format!("unknown institution `{}`", author.institution),
                        )
                    })
            })
            .collect()
    }
}

/// A parsed corpus together with any non-fatal diagnostics.
#[derive(Debug, Clone)]
pub struct ParseOutcome {
    pub corpus: Corpus,
    pub warnings: Vec<Diagnostic>,
}
