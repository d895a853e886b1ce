//! The quantitative comparison table: one row per work, four metric
//! columns, best value per column in bold.
//!
//! A row either computes its cells from a small fixture record or carries
//! published constants. Constant cells are marked with `†` and listed
//! under the table with their provenance note.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Deserialize;
use serde_json::Value;

use crate::bibdata::jsonl::parse_jsonl_str;
use crate::bibdata::Gender;
use crate::error::{Error, Result};
use crate::metrics::{compute_report, ExtendedReal, MetricKind};

/// Fixtures for the bundled comparison table.
pub const BENCHMARK_FIXTURES: &str = include_str!("../../fixtures/benchmark.json");

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub value: ExtendedReal,
    pub computed: bool,
    /// Provenance of a constant cell.
    pub note: Option<String>,
}

impl Cell {
    pub fn computed(value: ExtendedReal) -> Self {
        Cell {
            value,
            computed: true,
            note: None,
        }
    }

    pub fn constant(value: ExtendedReal, note: impl Into<String>) -> Self {
        Cell {
            value,
            computed: false,
            note: Some(note.into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRow {
    pub label: String,
    /// Assumptions behind the computed cells, if any.
    pub note: Option<String>,
    pub nsa: Cell,
    pub geil: Cell,
    pub ssim: Cell,
    pub acdc: Cell,
}

impl BenchmarkRow {
    pub fn cell(&self, kind: MetricKind) -> &Cell {
        match kind {
            MetricKind::Nsa => &self.nsa,
            MetricKind::Geil => &self.geil,
            MetricKind::Ssim => &self.ssim,
            MetricKind::Acdc => &self.acdc,
        }
    }
}

#[derive(Deserialize)]
struct FixtureFile {
    rows: Vec<FixtureRow>,
}

#[derive(Deserialize)]
struct FixtureRow {
    label: String,
    #[serde(default)]
    note: Option<String>,
    #[serde(default)]
    record: Option<Value>,
    #[serde(default)]
    institutions: Option<BTreeMap<String, String>>,
    #[serde(default)]
    constants: BTreeMap<String, FixtureConstant>,
}

#[derive(Deserialize)]
struct FixtureConstant {
    value: ExtendedReal,
    note: String,
}

impl FixtureRow {
    fn into_row(self, categories: &[Gender]) -> Result<BenchmarkRow> {
        let mut constants = BTreeMap::new();
        for (name, constant) in self.constants {
            let kind: MetricKind = name.parse().map_err(|_| {
                Error::InvalidInput(format!("row `{}`: unknown metric `{name}`", self.label))
            })?;
            constants.insert(kind, Cell::constant(constant.value, constant.note));
        }

        let report = match self.record {
            Some(record) => {
                let mut text = String::new();
                if let Some(institutions) = &self.institutions {
                    let header = serde_json::json!({ "institutions": institutions });
                    text.push_str(&header.to_string());
                    text.push('\n');
                }
                text.push_str(&record.to_string());
                let corpus = parse_jsonl_str(&text)?.corpus;
                let record = corpus.records().first().ok_or_else(|| {
                    Error::InvalidInput(format!("row `{}`: empty record", self.label))
                })?;
                Some(compute_report(record, &corpus, categories)?)
            }
            None => None,
        };

        let mut cell = |kind: MetricKind| -> Result<Cell> {
            if let Some(constant) = constants.remove(&kind) {
                return Ok(constant);
            }
            match &report {
                Some(report) => Ok(Cell::computed(report.get(kind))),
                None => Err(Error::InvalidInput(format!(
                    "row `{}`: `{kind}` has neither a record nor a constant",
                    self.label
                ))),
            }
        };
        Ok(BenchmarkRow {
            nsa: cell(MetricKind::Nsa)?,
            geil: cell(MetricKind::Geil)?,
            ssim: cell(MetricKind::Ssim)?,
            acdc: cell(MetricKind::Acdc)?,
            label: self.label,
            note: self.note,
        })
    }
}

pub fn load_fixtures(text: &str, categories: &[Gender]) -> Result<Vec<BenchmarkRow>> {
    let file: FixtureFile = serde_json::from_str(text).map_err(|e| {
        Error::parse(
            crate::error::Location::Line(e.line()),
            format!("fixtures: {e}"),
        )
    })?;
    file.rows
        .into_iter()
        .map(|row| row.into_row(categories))
        .collect()
}

pub fn bundled_rows() -> Result<Vec<BenchmarkRow>> {
    load_fixtures(BENCHMARK_FIXTURES, &Gender::DEFAULT_CATEGORIES)
}

fn header(kind: MetricKind) -> String {
    let arrow = if kind.higher_is_better() {
        "↑"
    } else {
        "↓"
    };
    format!("{} {arrow}", kind.as_str().to_ascii_uppercase())
}

/// Row indices holding the best defined value of a column; ties all win.
pub fn best_rows(rows: &[BenchmarkRow], kind: MetricKind) -> Vec<usize> {
    let mut best: Option<ExtendedReal> = None;
    for row in rows {
        let value = row.cell(kind).value;
        if value.is_undefined() {
            continue;
        }
        let better = match &best {
            None => true,
            Some(current) => {
                let ord = value.compare(current).expect("both defined");
                if kind.higher_is_better() {
                    ord.is_gt()
                } else {
                    ord.is_lt()
                }
            }
        };
        if better {
            best = Some(value);
        }
    }
    let Some(best) = best else {
        return Vec::new();
    };
    rows.iter()
        .enumerate()
        .filter(|(_, row)| {
            row.cell(kind)
                .value
                .compare(&best)
                .is_some_and(|o| o.is_eq())
        })
        .map(|(i, _)| i)
        .collect()
}

pub fn render_benchmark(rows: &[BenchmarkRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::InvalidInput(
            "benchmark table needs at least one row".into(),
        ));
    }
    let winners: Vec<Vec<usize>> = MetricKind::ALL
        .iter()
        .map(|&k| best_rows(rows, k))
        .collect();

    let mut out = String::from("|  |");
    for kind in MetricKind::ALL {
        write!(out, " {} |", header(kind)).unwrap();
    }
    out.push_str("\n|---|");
    out.push_str(&"---:|".repeat(MetricKind::ALL.len()));
    out.push('\n');

    let mut footnotes = Vec::new();
    let mut assumptions = Vec::new();
    for (index, row) in rows.iter().enumerate() {
        if let Some(note) = &row.note {
            assumptions.push(format!("{}: {note}", row.label));
        }
        write!(out, "| {} |", row.label).unwrap();
        for (column, kind) in MetricKind::ALL.iter().enumerate() {
            let cell = row.cell(*kind);
            let mut text = cell.value.format_fixed(2);
            if winners[column].contains(&index) {
                text = format!("**{text}**");
            }
            if !cell.computed {
                text.push('†');
                footnotes.push(format!(
                    "{} / {}: {}",
                    row.label,
                    kind.as_str().to_ascii_uppercase(),
                    cell.note.as_deref().unwrap_or("fixture constant")
                ));
            }
            write!(out, " {text} |").unwrap();
        }
        out.push('\n');
    }

    if !footnotes.is_empty() {
        out.push_str("\n† fixture constant, not computed:\n\n");
        for note in footnotes {
            writeln!(out, "- {note}").unwrap();
        }
    }
    if !assumptions.is_empty() {
        out.push_str("\nAssumptions:\n\n");
        for note in assumptions {
            writeln!(out, "- {note}").unwrap();
        }
    }
    Ok(out)
}
