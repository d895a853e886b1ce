//! JSON-lines corpus format.
//!
//! One record object per line. An optional first line of the form
//! `{"institutions": {"<id>": "<display name>"}}` declares the institution
//! table; without it, each author's `institution` string is registered as
//! its own display name.

use std::collections::{BTreeMap, HashSet};
use std::io::{BufRead, BufReader, Read};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::{
    AuthorMention, CareerStart, Corpus, Gender, Institution, InstitutionId, PaperRecord,
    ParseOutcome,
};
use crate::error::{Diagnostic, Error, Location, Result};

const RECORD_FIELDS: &[&str] = &[
    "id",
    "title",
    "year",
    "venue",
    "authors",
    "citations_per_year",
];
const AUTHOR_FIELDS: &[&str] = &[
    "forename",
    "surname",
    "gender",
    "institution",
    "career_start",
];
const CAREER_FIELDS: &[&str] = &["day", "month"];

#[derive(Deserialize)]
struct RawRecord {
    id: String,
    title: String,
    year: i64,
    #[serde(default)]
    venue: Option<String>,
    authors: Vec<RawAuthor>,
    #[serde(default)]
    citations_per_year: Option<BTreeMap<String, i64>>,
}

#[derive(Deserialize)]
struct RawAuthor {
    forename: String,
    surname: String,
    gender: String,
    institution: String,
    #[serde(default)]
    career_start: Option<RawCareer>,
}

#[derive(Deserialize)]
struct RawCareer {
    day: i64,
    month: i64,
}

fn warn_unknown(
    object: &Map<String, Value>,
    known: &[&str],
    path: &str,
    line: usize,
    warnings: &mut Vec<Diagnostic>,
) {
    for key in object.keys().filter(|k| !known.contains(&k.as_str())) {
        warnings.push(Diagnostic::new(
            Location::Line(line),
            format!("unknown field `{path}{key}` ignored"),
        ));
    }
}

fn scan_unknown_fields(record: &Map<String, Value>, line: usize, warnings: &mut Vec<Diagnostic>) {
    warn_unknown(record, RECORD_FIELDS, "", line, warnings);
    let Some(Value::Array(authors)) = record.get("authors") else {
        return;
    };
    for (i, author) in authors.iter().enumerate() {
        let Value::Object(author) = author else {
            continue;
        };
        let path = format!("authors[{i}].");
        warn_unknown(author, AUTHOR_FIELDS, &path, line, warnings);
        if let Some(Value::Object(career)) = author.get("career_start") {
            let path = format!("{path}career_start.");
            warn_unknown(career, CAREER_FIELDS, &path, line, warnings);
        }
    }
}

fn career_start(raw: &RawCareer, line: usize, index: usize) -> Result<CareerStart> {
    let field = |name: &str| format!("authors[{index}].career_start.{name}");
    let day = u8::try_from(raw.day)
        .ok()
        .filter(|d| (1..=31).contains(d))
        .ok_or_else(|| {
            Error::validation(
                Location::Line(line),
                field("day"),
                format!("day {} outside 1..=31", raw.day),
            )
        })?;
    let month = u8::try_from(raw.month)
        .ok()
        .filter(|m| (1..=12).contains(m))
        .ok_or_else(|| {
            Error::validation(
                Location::Line(line),
                field("month"),
                format!("month {} outside 1..=12", raw.month),
            )
        })?;
    Ok(CareerStart { day, month })
}

fn convert(raw: RawRecord, line: usize) -> Result<PaperRecord> {
    let location = Location::Line(line);
    let year = i32::try_from(raw.year)
        .map_err(|_| Error::validation(location.clone(), "year", "year out of range"))?;

    let mut authors = Vec::with_capacity(raw.authors.len());
    for (index, author) in raw.authors.into_iter().enumerate() {
        let gender: Gender = author.gender.parse().map_err(|_| {
            Error::validation(
                location.clone(),
                format!("authors[{index}].gender"),
                format!("unrecognized gender `{}`", author.gender),
            )
        })?;
        let career_start = author
            .career_start
            .as_ref()
            .map(|c| career_start(c, line, index))
            .transpose()?;
        authors.push(AuthorMention {
            forename: author.forename,
            surname: author.surname,
            gender,
            institution: InstitutionId(author.institution),
            career_start,
        });
    }

    let mut citations_per_year = BTreeMap::new();
    for (key, count) in raw.citations_per_year.unwrap_or_default() {
        let year: i32 = key.trim().parse().map_err(|_| {
            Error::validation(
                location.clone(),
                "citations_per_year",
                format!("`{key}` is not a year"),
            )
        })?;
        let count = u64::try_from(count).map_err(|_| {
            Error::validation(
                location.clone(),
                "citations_per_year",
                format!("negative citation count {count} for {year}"),
            )
        })?;
        citations_per_year.insert(year, count);
    }

    let record = PaperRecord {
        id: raw.id,
        title: raw.title,
        year,
        authors,
        venue: raw.venue,
        citations_per_year,
    };
    record.validate(location)?;
    Ok(record)
}

pub fn parse_jsonl<R: Read>(stream: R) -> Result<ParseOutcome> {
    let reader = BufReader::new(stream);
    let mut warnings = Vec::new();
    let mut header: Option<BTreeMap<InstitutionId, Institution>> = None;
    let mut registered: BTreeMap<InstitutionId, Institution> = BTreeMap::new();
    let mut records = Vec::new();
    let mut ids = HashSet::new();
    let mut seen_content = false;

    for (index, line) in reader.lines().enumerate() {
        let line_no = index + 1;
        let line = line.map_err(|e| Error::parse(Location::Line(line_no), e.to_string()))?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(trimmed)
            .map_err(|e| Error::parse(Location::Line(line_no), e.to_string()))?;
        let Value::Object(object) = value else {
            return Err(Error::parse(
                Location::Line(line_no),
                "expected a JSON object",
            ));
        };

        if let Some(table) = object.get("institutions") {
            if seen_content {
                return Err(Error::parse(
                    Location::Line(line_no),
                    "institutions header must be the first line",
                ));
            }
            warn_unknown(&object, &["institutions"], "", line_no, &mut warnings);
            let table: BTreeMap<String, String> = serde_json::from_value(table.clone())
                .map_err(|e| Error::parse(Location::Line(line_no), e.to_string()))?;
            let mut institutions = BTreeMap::new();
            for (id, display_name) in table {
                if display_name.trim().is_empty() {
                    return Err(Error::validation(
                        Location::Line(line_no),
                        format!("institutions.{id}"),
                        "empty display name",
                    ));
                }
                let institution = Institution::new(id, display_name);
                institutions.insert(institution.id.clone(), institution);
            }
            header = Some(institutions);
            seen_content = true;
            continue;
        }
        seen_content = true;

        scan_unknown_fields(&object, line_no, &mut warnings);
        let raw: RawRecord = serde_json::from_value(Value::Object(object))
            .map_err(|e| Error::parse(Location::Line(line_no), e.to_string()))?;
        let record = convert(raw, line_no)?;
        if !ids.insert(record.id.clone()) {
            return Err(Error::validation(
                Location::Line(line_no),
                "id",
                format!("duplicate record id `{}`", record.id),
            ));
        }

        for (i, author) in record.authors.iter().enumerate() {
            match &header {
                Some(table) => {
                    if !table.contains_key(&author.institution) {
                        return Err(Error::validation(
                            Location::Line(line_no),
                            format!("authors[{i}].institution"),
                            format!(
                                "`{}` is not declared in the institutions header",
                                author.institution
                            ),
                        ));
                    }
                }
                None => {
                    if author.institution.as_str().trim().is_empty() {
                        return Err(Error::validation(
                            Location::Line(line_no),
                            format!("authors[{i}].institution"),
                            "empty institution",
                        ));
                    }
                    registered
                        .entry(author.institution.clone())
                        .or_insert_with(|| Institution {
                            id: author.institution.clone(),
                            display_name: author.institution.0.clone(),
                        });
                }
            }
        }
        records.push(record);
    }

    let institutions = header.unwrap_or(registered).into_values().collect();
    let corpus = Corpus::new(records, institutions)?;
    Ok(ParseOutcome { corpus, warnings })
}

pub fn parse_jsonl_str(text: &str) -> Result<ParseOutcome> {
    parse_jsonl(text.as_bytes())
}

#[derive(Serialize)]
struct HeaderOut<'a> {
    institutions: BTreeMap<&'a str, &'a str>,
}

#[derive(Serialize)]
struct RecordOut<'a> {
    id: &'a str,
    title: &'a str,
    year: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    venue: Option<&'a str>,
    authors: Vec<AuthorOut<'a>>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    citations_per_year: BTreeMap<String, u64>,
}

#[derive(Serialize)]
struct AuthorOut<'a> {
    forename: &'a str,
    surname: &'a str,
    gender: Gender,
    institution: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    career_start: Option<CareerStart>,
}

/// Canonical JSON-lines rendering: institutions header (when the table is
/// non-empty) followed by one line per record in corpus order.
pub fn to_jsonl(corpus: &Corpus) -> String {
    let mut out = String::new();
    if corpus.institution_count() > 0 {
        let header = HeaderOut {
            institutions: corpus
                .institutions()
                .map(|i| (i.id.as_str(), i.display_name.as_str()))
                .collect(),
        };
        out.push_str(&serde_json::to_string(&header).expect("header serializes"));
        out.push('\n');
    }
    for record in corpus.records() {
        let line = RecordOut {
            id: &record.id,
            title: &record.title,
            year: record.year,
            venue: record.venue.as_deref(),
            authors: record
                .authors
                .iter()
                .map(|a| AuthorOut {
                    forename: &a.forename,
                    surname: &a.surname,
                    gender: a.gender,
                    institution: a.institution.as_str(),
                    career_start: a.career_start,
                })
                .collect(),
            citations_per_year: record
                .citations_per_year
                .iter()
                .map(|(year, count)| (year.to_string(), *count))
                .collect(),
        };
        out.push_str(&serde_json::to_string(&line).expect("record serializes"));
        out.push('\n');
    }
    out
}
