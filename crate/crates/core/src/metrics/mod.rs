//! The four author-set metrics: NSA, GEIL, SSIM and ACDC.
//!
//! All functions are pure. Double sums over "pairs" run over unordered
//! distinct pairs.

mod extended;
mod report;

use std::collections::HashMap;
use std::hash::Hash;

use unicode_normalization::UnicodeNormalization;

use crate::bibdata::{normalize_text, AuthorMention, CanonicalName, Gender};
use crate::error::{Error, Location, Result};

pub use extended::ExtendedReal;
pub use report::{compute_report, MetricKind, MetricReport};

/// Number of name-sharing authors: mentions whose canonical
/// (forename, surname) occurs at least once more in the set. Never 1.
pub fn nsa(authors: &[AuthorMention]) -> Result<usize> {
    if authors.is_empty() {
        return Err(Error::EmptyAuthorSet);
    }
    let keys = authors
        .iter()
        .map(AuthorMention::name_key)
        .collect::<Result<Vec<_>>>()?;
    Ok(group_sizes(&keys)
        .into_iter()
        .filter(|&size| size >= 2)
        .sum())
}

fn group_sizes<T: Eq + Hash>(items: &[T]) -> Vec<usize> {
    let mut counts: HashMap<&T, usize> = HashMap::new();
    for item in items {
        *counts.entry(item).or_default() += 1;
    }
    counts.into_values().collect()
}

/// Unordered pairs of `items` that are not equal.
fn differing_pairs<T: Eq + Hash>(items: &[T]) -> usize {
    let n = items.len();
    let same: usize = group_sizes(items)
        .into_iter()
        .map(|g| g * (g - 1) / 2)
        .sum();
    n * n.saturating_sub(1) / 2 - same
}

/// Per-category author counts, each shifted up by one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenderCensus {
    counts: Vec<(Gender, u64)>,
}

impl GenderCensus {
    pub fn new(authors: &[AuthorMention], categories: &[Gender]) -> Result<Self> {
        if categories.len() < 2 {
            return Err(Error::DegenerateCensus(categories.len()));
        }
        for (i, category) in categories.iter().enumerate() {
            if *category == Gender::Unknown {
                return Err(Error::InvalidConfig(
                    "`unknown` cannot be a census category".to_string(),
                ));
            }
            if categories[..i].contains(category) {
                return Err(Error::InvalidConfig(format!(
                    "census category `{category}` listed twice"
                )));
            }
        }
        let mut counts: Vec<(Gender, u64)> = categories.iter().map(|&g| (g, 1)).collect();
        for author in authors {
            match counts.iter_mut().find(|(g, _)| *g == author.gender) {
                Some((_, count)) => *count += 1,
                None => return Err(Error::UnknownGender(author.gender.to_string())),
            }
        }
        Ok(GenderCensus { counts })
    }

    pub fn counts(&self) -> &[(Gender, u64)] {
        &self.counts
    }

    pub fn get(&self, gender: Gender) -> Option<u64> {
        self.counts
            .iter()
            .find(|(g, _)| *g == gender)
            .map(|(_, c)| *c)
    }

    /// Imbalance level of this census; 0 when every count is equal.
    pub fn imbalance(&self) -> f64 {
        // Σ_{i<j} |c_i - c_j| over ascending counts is Σ_k c_k (2k - (m - 1)).
        let mut sorted: Vec<i64> = self.counts.iter().map(|&(_, c)| c as i64).collect();
        sorted.sort_unstable();
        let m = sorted.len() as i64;
        let pair_sum: i64 = sorted
            .iter()
            .enumerate()
            .map(|(k, &c)| c * (2 * k as i64 - (m - 1)))
            .sum();
        pair_sum as f64 / (2.0 * (m - 1) as f64)
    }
}

/// Gender imbalance level over the given census categories.
pub fn geil(authors: &[AuthorMention], categories: &[Gender]) -> Result<f64> {
    Ok(GenderCensus::new(authors, categories)?.imbalance())
}

/// Number of Unicode alphabetic code points, after composing to NFC so a
/// letter with a diacritic counts once.
pub fn count_letters(name: &str) -> usize {
    name.nfc().filter(|c| c.is_alphabetic()).count()
}

/// 0 when the canonical strings are identical, 1 otherwise.
pub fn differs(x1: &CanonicalName, x2: &CanonicalName) -> u8 {
    u8::from(x1 != x2)
}

/// Name/institution similarity. `institutions[i]` is the display name of
/// the institution of `authors[i]`.
pub fn ssim(authors: &[AuthorMention], institutions: &[&str]) -> Result<f64> {
    if authors.is_empty() {
        return Err(Error::EmptyAuthorSet);
    }
    if authors.len() != institutions.len() {
        return Err(Error::InvalidInput(format!(
            "{} authors but {} institutions",
            authors.len(),
            institutions.len()
        )));
    }
    let mut max_letters = 0;
    let mut canonical_institutions = Vec::with_capacity(institutions.len());
    for (index, name) in institutions.iter().enumerate() {
        let canonical = normalize_text(name).map_err(|_| {
            Error::validation(
                Location::None,
                format!("institutions[{index}]"),
                "empty institution name",
            )
        })?;
        canonical_institutions.push(canonical);
        max_letters = max_letters.max(count_letters(name));
    }
    if max_letters == 0 {
        return Err(Error::validation(
            Location::None,
            "institutions",
            "no institution name contains a letter",
        ));
    }

    let keys = authors
        .iter()
        .map(AuthorMention::name_key)
        .collect::<Result<Vec<_>>>()?;
    let forenames: Vec<_> = keys.iter().map(|k| &k.forename).collect();
    let surnames: Vec<_> = keys.iter().map(|k| &k.surname).collect();

    let scale = match authors.len() {
        1 => 0.0,
        n => 1.0 / (n - 1) as f64,
    };
    let name_term = -scale * (differing_pairs(&forenames) + differing_pairs(&surnames)) as f64;
    let institution_term = -scale * differing_pairs(&canonical_institutions) as f64;

    Ok((name_term.exp() + institution_term.exp()) * max_letters as f64)
}

/// ACDC value plus a note for every term whose denominator vanished.
#[derive(Debug, Clone, PartialEq)]
pub struct Acdc {
    pub value: ExtendedReal,
    pub notes: Vec<String>,
}

/// One ACDC term, `Σ_i Σ_j (x_i - x̄)(x_j - x̄) / Σ_i (x_i - x̄)`, evaluated in
/// exact integer arithmetic scaled by `n`. A zero denominator yields `+∞`
/// whatever the numerator.
fn acdc_term(values: &[i64], label: &str, notes: &mut Vec<String>) -> ExtendedReal {
    let n = values.len() as i64;
    let total: i64 = values.iter().sum();
    // n·(x_i - x̄)
    let deviations: Vec<i64> = values.iter().map(|&x| n * x - total).collect();
    let numerator: i128 = deviations
        .iter()
        .flat_map(|&a| deviations.iter().map(move |&b| a as i128 * b as i128))
        .sum();
    let denominator: i64 = deviations.iter().sum();
    if denominator == 0 {
        notes.push(format!(
            "acdc: {label} term denominator Σ({label}_i − mean) is zero (numerator {}); term is +inf",
            numerator as f64 / (n * n) as f64
        ));
        ExtendedReal::PositiveInfinity
    } else {
        // (numerator / n²) / (denominator / n)
        ExtendedReal::from_f64(numerator as f64 / (n as f64 * denominator as f64))
    }
}

/// Career correlation over start day and month.
pub fn acdc(authors: &[AuthorMention]) -> Result<Acdc> {
    if authors.is_empty() {
        return Err(Error::EmptyAuthorSet);
    }
    let mut days = Vec::with_capacity(authors.len());
    let mut months = Vec::with_capacity(authors.len());
    for (index, author) in authors.iter().enumerate() {
        let start = author
            .career_start
            .ok_or(Error::MissingCareerData { index })?;
        days.push(i64::from(start.day));
        months.push(i64::from(start.month));
    }
    let mut notes = Vec::new();
    let day = acdc_term(&days, "day", &mut notes);
    let month = acdc_term(&months, "month", &mut notes);
    Ok(Acdc {
        value: day + month,
        notes,
    })
}
