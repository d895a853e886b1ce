//! A BibTeX subset reader.
//!
//! Supported: `@type{key, field = {value}, field = "value", field = 123}`
//! entries with nested braces, `@comment` blocks, and the fields `author`,
//! `title`, `year`, `institution` (falling back to `school`), and
//! `journal`/`booktitle` as venue. `@string` and `@preamble` blocks are
//! skipped with a warning; macros and `#` concatenation are not supported.
//!
//! Gender and career start are not expressible in BibTeX and come from a
//! [`Sidecar`] keyed by `forename|surname|institution`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::Read;

use serde::Deserialize;

use super::latex::decode_at;
use super::{
    normalize_text, AuthorMention, CareerStart, Corpus, Gender, Institution, InstitutionId,
    PaperRecord, ParseOutcome,
};
use crate::error::{Diagnostic, Error, Location, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
pub struct SidecarEntry {
    #[serde(default)]
    pub gender: Option<Gender>,
    #[serde(default)]
    pub career_start: Option<CareerStart>,
}

/// Author metadata that BibTeX cannot carry.
#[derive(Debug, Clone, Default)]
pub struct Sidecar {
    entries: HashMap<String, SidecarEntry>,
}

impl Sidecar {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Canonical lookup key: the three parts normalized and joined by `|`.
    pub fn key(forename: &str, surname: &str, institution: &str) -> Result<String> {
        Ok(format!(
            "{}|{}|{}",
            normalize_text(forename)?,
            normalize_text(surname)?,
            normalize_text(institution)?
        ))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: BTreeMap<String, SidecarEntry> = serde_json::from_str(text)
            .map_err(|e| Error::parse(Location::Line(e.line()), format!("sidecar: {e}")))?;
        let mut entries = HashMap::new();
        for (key, entry) in raw {
            let parts: Vec<&str> = key.split('|').collect();
            let [forename, surname, institution] = parts[..] else {
                return Err(Error::validation(
                    Location::None,
                    format!("sidecar.{key}"),
                    "key must have the form forename|surname|institution",
                ));
            };
            if let Some(start) = entry.career_start {
                CareerStart::new(start.day, start.month).map_err(|_| {
                    Error::validation(
                        Location::None,
                        format!("sidecar.{key}.career_start"),
                        format!("invalid date {}/{}", start.day, start.month),
                    )
                })?;
            }
            entries.insert(Self::key(forename, surname, institution)?, entry);
        }
        Ok(Sidecar { entries })
    }

    pub fn insert(&mut self, key: String, entry: SidecarEntry) {
        self.entries.insert(key, entry);
    }

    pub fn get(&self, key: &str) -> Option<&SidecarEntry> {
        self.entries.get(key)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// A raw field value and the byte offset where it starts in the input.
#[derive(Debug, Clone)]
struct Field<'a> {
    value: &'a str,
    offset: usize,
}

#[derive(Debug)]
struct RawEntry<'a> {
    key: String,
    offset: usize,
    fields: HashMap<String, Field<'a>>,
}

struct Scanner<'a> {
    text: &'a str,
    pos: usize,
    warnings: Vec<Diagnostic>,
}

impl<'a> Scanner<'a> {
    fn peek(&self) -> Option<u8> {
        self.text.as_bytes().get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn take_while(&mut self, pred: impl Fn(u8) -> bool) -> &'a str {
        let start = self.pos;
        while self.peek().is_some_and(&pred) {
            self.pos += 1;
        }
        &self.text[start..self.pos]
    }

    fn error(&self, key: Option<&str>, message: impl Into<String>) -> Error {
        let location = match key {
            Some(key) => Location::EntryOffset(key.to_string(), self.pos),
            None => Location::Offset(self.pos),
        };
        Error::parse(location, message)
    }

    /// Position of the `}` closing the `{` at `open`, honouring `\{`/`\}`.
    fn closing_brace(&self, open: usize, key: Option<&str>) -> Result<usize> {
        let bytes = self.text.as_bytes();
        let mut depth = 0usize;
        let mut i = open;
        while i < bytes.len() {
            match bytes[i] {
                b'\\' => i += 1,
                b'{' => depth += 1,
                b'}' => {
                    depth -= 1;
                    if depth == 0 {
                        return Ok(i);
                    }
                }
                _ => {}
            }
            i += 1;
        }
        let location = match key {
            Some(key) => Location::EntryOffset(key.to_string(), open),
            None => Location::Offset(open),
        };
        Err(Error::parse(
            location,
            "unbalanced braces: `{` is never closed",
        ))
    }

    fn next_entry(&mut self) -> Result<Option<RawEntry<'a>>> {
        loop {
            match self.text[self.pos..].find('@') {
                None => return Ok(None),
                Some(skip) => self.pos += skip + 1,
            }
            let at = self.pos - 1;
            let kind = self.take_while(|b| b.is_ascii_alphanumeric() || b == b'_');
            if kind.is_empty() {
                continue;
            }
            let kind = kind.to_ascii_lowercase();
            self.skip_ws();
            if self.peek() != Some(b'{') {
                return Err(self.error(None, format!("expected `{{` after `@{kind}`")));
            }
            if matches!(kind.as_str(), "comment" | "string" | "preamble") {
                let close = self.closing_brace(self.pos, None)?;
                if kind != "comment" {
                    self.warnings.push(Diagnostic::new(
                        Location::Offset(at),
                        format!("`@{kind}` is not supported and was skipped"),
                    ));
                }
                self.pos = close + 1;
                continue;
            }
            return self.entry_body(at).map(Some);
        }
    }

    fn entry_body(&mut self, at: usize) -> Result<RawEntry<'a>> {
        let open = self.pos;
        self.pos += 1;
        self.skip_ws();
        let key = self
            .take_while(|b| b != b',' && b != b'}' && !b.is_ascii_whitespace())
            .to_string();
        if key.is_empty() {
            return Err(self.error(None, "entry without a citation key"));
        }
        // Verify the whole entry balances before reading fields so the error
        // names the key.
        self.closing_brace(open, Some(&key))?;

        let mut fields = HashMap::new();
        self.skip_ws();
        loop {
            match self.peek() {
                Some(b'}') => {
                    self.pos += 1;
                    break;
                }
                Some(b',') => {
                    self.pos += 1;
                    self.skip_ws();
                    if self.peek() == Some(b'}') {
                        continue;
                    }
                }
                _ => return Err(self.error(Some(&key), "expected `,` or `}`")),
            }
            let name = self
                .take_while(|b| b.is_ascii_alphanumeric() || matches!(b, b'_' | b'-' | b':' | b'.'))
                .to_ascii_lowercase();
            if name.is_empty() {
                return Err(self.error(Some(&key), "expected a field name"));
            }
            self.skip_ws();
            if self.peek() != Some(b'=') {
                return Err(self.error(Some(&key), format!("expected `=` after `{name}`")));
            }
            self.pos += 1;
            self.skip_ws();
            let field = self.value(&key)?;
            if fields.insert(name.clone(), field).is_some() {
                self.warnings.push(Diagnostic::new(
                    Location::Entry(key.clone()),
                    format!("field `{name}` repeated; last value kept"),
                ));
            }
            self.skip_ws();
        }
        Ok(RawEntry {
            key,
            offset: at,
            fields,
        })
    }

    fn value(&mut self, key: &str) -> Result<Field<'a>> {
        match self.peek() {
            Some(b'{') => {
                let close = self.closing_brace(self.pos, Some(key))?;
                let field = Field {
                    value: &self.text[self.pos + 1..close],
                    offset: self.pos + 1,
                };
                self.pos = close + 1;
                Ok(field)
            }
            Some(b'"') => {
                let start = self.pos + 1;
                let bytes = self.text.as_bytes();
                let mut depth = 0usize;
                let mut i = start;
                while i < bytes.len() {
                    match bytes[i] {
                        b'\\' => i += 1,
                        b'{' => depth += 1,
                        b'}' => depth = depth.saturating_sub(1),
                        b'"' if depth == 0 => {
                            self.pos = i + 1;
                            return Ok(Field {
                                value: &self.text[start..i],
                                offset: start,
                            });
                        }
                        _ => {}
                    }
                    i += 1;
                }
                Err(self.error(Some(key), "unterminated quoted value"))
            }
            Some(b) if b.is_ascii_alphanumeric() => {
                let offset = self.pos;
                let value = self.take_while(|b| b.is_ascii_alphanumeric() || b == b'_');
                if !value.bytes().all(|b| b.is_ascii_digit()) {
                    self.warnings.push(Diagnostic::new(
                        Location::EntryOffset(key.to_string(), offset),
                        format!("bare value `{value}` taken literally (macros are not supported)"),
                    ));
                }
                Ok(Field { value, offset })
            }
            _ => Err(self.error(Some(key), "expected `{`, `\"`, or a bare value")),
        }
    }
}

/// Splits `text` at top-level (brace depth 0) separators found by `sep`,
/// which returns the separator length at a given byte position if one starts
/// there. Returns `(offset, piece)` pairs.
fn split_top_level(text: &str, sep: impl Fn(&str, usize) -> Option<usize>) -> Vec<(usize, &str)> {
    let bytes = text.as_bytes();
    let mut pieces = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' => {
                i += 2;
                continue;
            }
            b'{' => depth += 1,
            b'}' => depth = depth.saturating_sub(1),
            _ if depth == 0 => {
                if let Some(len) = sep(text, i) {
                    pieces.push((start, &text[start..i]));
                    i += len;
                    start = i;
                    continue;
                }
            }
            _ => {}
        }
        i += 1;
    }
    pieces.push((start, &text[start..]));
    pieces
}

/// Length of an ` and ` separator (any surrounding whitespace) starting at `i`.
fn and_separator(text: &str, i: usize) -> Option<usize> {
    let bytes = text.as_bytes();
    if !bytes[i].is_ascii_whitespace() {
        return None;
    }
    let mut j = i;
    while j < bytes.len() && bytes[j].is_ascii_whitespace() {
        j += 1;
    }
    if !text.get(j..j + 3)?.eq_ignore_ascii_case("and") {
        return None;
    }
    let after = j + 3;
    let mut k = after;
    while k < bytes.len() && bytes[k].is_ascii_whitespace() {
        k += 1;
    }
    (k > after).then_some(k - i)
}

fn trim_piece((offset, piece): (usize, &str)) -> (usize, &str) {
    let leading = piece.len() - piece.trim_start().len();
    (offset + leading, piece.trim())
}

/// Splits one author name into raw `(forename, surname)` pieces with offsets
/// relative to the name. `Last, First` puts the surname first; otherwise the
/// final whitespace-separated token is the surname.
fn split_name(name: &str) -> ((usize, &str), (usize, &str)) {
    let commas = split_top_level(name, |t, i| (t.as_bytes()[i] == b',').then_some(1));
    if commas.len() >= 2 {
        let surname = trim_piece(commas[0]);
        let forename = trim_piece(*commas.last().unwrap());
        return (forename, surname);
    }
    let tokens: Vec<(usize, &str)> = split_top_level(name, |t, i| {
        t.as_bytes()[i].is_ascii_whitespace().then_some(1)
    })
    .into_iter()
    .filter(|(_, t)| !t.is_empty())
    .collect();
    match tokens.split_last() {
        None => ((0, ""), (0, "")),
        Some((last, [])) => ((last.0, ""), *last),
        Some((last, rest)) => {
            let start = rest[0].0;
            let end = rest[rest.len() - 1].0 + rest[rest.len() - 1].1.len();
            ((start, &name[start..end]), *last)
        }
    }
}

fn collapse_ws(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

struct Builder<'s> {
    sidecar: &'s Sidecar,
    warnings: Vec<Diagnostic>,
    institutions: BTreeMap<InstitutionId, Institution>,
}

impl Builder<'_> {
    fn decode(&mut self, key: &str, value: &str, offset: usize) -> Result<String> {
        let decoded = decode_at(value, offset).map_err(|e| match e {
            Error::Parse {
                location: Location::Offset(at),
                message,
            } => Error::parse(Location::EntryOffset(key.to_string(), at), message),
            other => other,
        })?;
        for warning in decoded.warnings {
            let location = match warning.location {
                Location::Offset(at) => Location::EntryOffset(key.to_string(), at),
                other => other,
            };
            self.warnings
                .push(Diagnostic::new(location, warning.message));
        }
        Ok(collapse_ws(&decoded.text))
    }

    fn record(&mut self, entry: &RawEntry<'_>) -> Result<PaperRecord> {
        let key = entry.key.as_str();
        let location = || Location::Entry(key.to_string());

        let author = entry.fields.get("author").ok_or_else(|| {
            Error::parse(
                Location::EntryOffset(key.to_string(), entry.offset),
                format!("entry `{key}` has no `author` field"),
            )
        })?;

        let year_field = entry
            .fields
            .get("year")
            .ok_or_else(|| Error::validation(location(), "year", "missing `year` field"))?;
        let year_text = self.decode(key, year_field.value, year_field.offset)?;
        let year: i32 = year_text.trim().parse().map_err(|_| {
            Error::validation(location(), "year", format!("`{year_text}` is not a year"))
        })?;

        let title = match entry.fields.get("title") {
            Some(f) => self.decode(key, f.value, f.offset)?,
            None => String::new(),
        };
        let venue = match entry
            .fields
            .get("journal")
            .or(entry.fields.get("booktitle"))
        {
            Some(f) => Some(self.decode(key, f.value, f.offset)?),
            None => None,
        };

        let institution_field = entry
            .fields
            .get("institution")
            .or(entry.fields.get("school"))
            .ok_or_else(|| {
                Error::validation(
                    location(),
                    "institution",
                    "missing `institution` or `school` field",
                )
            })?;
        let display_name = self.decode(key, institution_field.value, institution_field.offset)?;
        if display_name.is_empty() {
            return Err(Error::validation(
                location(),
                "institution",
                "empty institution",
            ));
        }
        let institution_id = InstitutionId(display_name.clone());
        self.institutions
            .entry(institution_id.clone())
            .or_insert_with(|| Institution {
                id: institution_id.clone(),
                display_name,
            });

        let mut authors = Vec::new();
        for piece in split_top_level(author.value, and_separator) {
            let (offset, name) = trim_piece(piece);
            let offset = author.offset + offset;
            if name.is_empty() {
                return Err(Error::validation(location(), "author", "empty author name"));
            }
            if name == "others" {
                self.warnings.push(Diagnostic::new(
                    location(),
                    "`and others` dropped from author list",
                ));
                continue;
            }
            let ((f_off, forename), (s_off, surname)) = split_name(name);
            let forename = self.decode(key, forename, offset + f_off)?;
            let surname = self.decode(key, surname, offset + s_off)?;
            let index = authors.len();
            let mut mention = AuthorMention {
                forename,
                surname,
                gender: Gender::Unknown,
                institution: institution_id.clone(),
                career_start: None,
            };
            mention.validate(location()).map_err(|e| match e {
                Error::Validation {
                    location,
                    field,
                    message,
                } => Error::Validation {
                    location,
                    field: format!("author[{index}].{field}"),
                    message,
                },
                other => other,
            })?;
            let sidecar_key =
                Sidecar::key(&mention.forename, &mention.surname, institution_id.as_str())?;
            if let Some(meta) = self.sidecar.get(&sidecar_key) {
                mention.gender = meta.gender.unwrap_or(Gender::Unknown);
                mention.career_start = meta.career_start;
            }
            authors.push(mention);
        }
        if authors.is_empty() {
            return Err(Error::validation(location(), "author", "no authors"));
        }

        Ok(PaperRecord {
            id: key.to_string(),
            title,
            year,
            authors,
            venue,
            citations_per_year: BTreeMap::new(),
        })
    }
}

pub fn parse_bibtex_subset<R: Read>(mut stream: R, sidecar: &Sidecar) -> Result<ParseOutcome> {
    let mut bytes = Vec::new();
    stream.read_to_end(&mut bytes)?;
    let text = String::from_utf8(bytes).map_err(|e| {
        Error::parse(
            Location::Offset(e.utf8_error().valid_up_to()),
            "input is not valid UTF-8",
        )
    })?;
    parse_bibtex_str(&text, sidecar)
}

pub fn parse_bibtex_str(text: &str, sidecar: &Sidecar) -> Result<ParseOutcome> {
    let mut scanner = Scanner {
        text,
        pos: 0,
        warnings: Vec::new(),
    };
    let mut builder = Builder {
        sidecar,
        warnings: Vec::new(),
        institutions: BTreeMap::new(),
    };
    let mut records = Vec::new();
    let mut keys = HashSet::new();
    while let Some(entry) = scanner.next_entry()? {
        if !keys.insert(entry.key.clone()) {
            return Err(Error::validation(
                Location::Entry(entry.key.clone()),
                "key",
                "duplicate entry key",
            ));
        }
        records.push(builder.record(&entry)?);
    }
    let mut warnings = scanner.warnings;
    warnings.extend(builder.warnings);
    let corpus = Corpus::new(records, builder.institutions.into_values().collect())?;
    Ok(ParseOutcome { corpus, warnings })
}
