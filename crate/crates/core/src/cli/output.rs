//! Machine- and human-readable renderings of metric and cluster reports.

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::metrics::{ExtendedReal, MetricKind, MetricReport};
use crate::unify::{AuaCluster, MergedProfile};

fn nsa_json(report: &MetricReport) -> Value {
    match report.nsa {
        Some(v) => Value::from(v),
        None => Value::from("undefined"),
    }
}

fn value_json(value: ExtendedReal) -> Value {
    serde_json::to_value(value).expect("extended reals serialize")
}

fn cell_text(report: &MetricReport, kind: MetricKind) -> String {
    match kind {
        MetricKind::Nsa => match report.nsa {
            Some(v) => v.to_string(),
            None => "undefined".to_string(),
        },
        _ => match report.get(kind) {
            ExtendedReal::Finite(_) => value_json(report.get(kind)).to_string(),
            other => other.to_string(),
        },
    }
}

pub fn metrics_json(reports: &[MetricReport], kinds: &[MetricKind]) -> String {
    let rows: Vec<Value> = reports
        .iter()
        .map(|report| {
            // Key order: record, metrics in canonical order, notes.
            let mut row = Map::new();
            row.insert("record".into(), Value::from(report.record_id.clone()));
            for kind in MetricKind::ALL.iter().filter(|k| kinds.contains(k)) {
                let value = match kind {
                    MetricKind::Nsa => nsa_json(report),
                    _ => value_json(report.get(*kind)),
                };
                row.insert(kind.as_str().into(), value);
            }
            let notes = report
                .notes
                .iter()
                .filter(|note| {
                    kinds
                        .iter()
                        .any(|k| note.starts_with(&format!("{}:", k.as_str())))
                })
                .cloned()
                .collect::<Vec<_>>();
            row.insert("notes".into(), Value::from(notes));
            Value::Object(row)
        })
        .collect();
    let mut text = serde_json::to_string_pretty(&rows).expect("json values serialize");
    text.push('\n');
    text
}

pub fn metrics_csv(reports: &[MetricReport], kinds: &[MetricKind]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let columns: Vec<MetricKind> = MetricKind::ALL
        .into_iter()
        .filter(|k| kinds.contains(k))
        .collect();
    let mut header = vec!["record"];
    header.extend(columns.iter().map(|k| k.as_str()));
    let csv_err = |e: csv::Error| Error::InvalidInput(format!("csv: {e}"));
    writer.write_record(&header).map_err(csv_err)?;
    for report in reports {
        let mut row = vec![report.record_id.clone()];
        row.extend(columns.iter().map(|&k| cell_text(report, k)));
        writer.write_record(&row).map_err(csv_err)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn metrics_markdown(reports: &[MetricReport], kinds: &[MetricKind]) -> String {
    let columns: Vec<MetricKind> = MetricKind::ALL
        .into_iter()
        .filter(|k| kinds.contains(k))
        .collect();
    let mut out = String::from("| record |");
    for kind in &columns {
        let arrow = if kind.higher_is_better() {
            "↑"
        } else {
            "↓"
        };
        out.push_str(&format!(
            " {} {arrow} |",
            kind.as_str().to_ascii_uppercase()
        ));
    }
    out.push_str("\n|---|");
    out.push_str(&"---:|".repeat(columns.len()));
    out.push('\n');
    for report in reports {
        out.push_str(&format!("| {} |", report.record_id));
        for &kind in &columns {
            out.push_str(&format!(" {} |", report.get(kind).format_fixed(2)));
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
pub struct ClusterOut<'a> {
    #[serde(flatten)]
    pub cluster: &'a AuaCluster,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub merged_profile: Option<MergedProfile>,
}

#[derive(Serialize)]
pub struct SavingsOut<'a> {
    pub record: &'a str,
    pub page_savings: ExtendedReal,
}

#[derive(Serialize)]
pub struct DetectOut<'a> {
    pub clusters: Vec<ClusterOut<'a>>,
    pub page_savings: Vec<SavingsOut<'a>>,
}

pub fn to_pretty_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ours() -> MetricReport {
        MetricReport {
            record_id: "ours".into(),
            nsa: Some(2),
            geil: ExtendedReal::Finite(1.0),
            ssim: ExtendedReal::Finite(96.0),
            acdc: ExtendedReal::PositiveInfinity,
            notes: vec!["acdc: day term".into(), "geil: something".into()],
        }
    }

    #[test]
    fn csv_layout() {
        let text = metrics_csv(&[ours()], &MetricKind::ALL).unwrap();
        assert_eq!(text, "record,nsa,geil,ssim,acdc\nours,2,1.0,96.0,inf\n");
        let text = metrics_csv(&[ours()], &[MetricKind::Nsa]).unwrap();
        assert_eq!(text, "record,nsa\nours,2\n");
    }

    #[test]
    fn json_filter_drops_other_metrics_and_their_notes() {
        let text = metrics_json(&[ours()], &[MetricKind::Nsa]);
        let value: Value = serde_json::from_str(&text).unwrap();
        let row = value[0].as_object().unwrap();
        assert_eq!(row.keys().collect::<Vec<_>>(), ["record", "nsa", "notes"]);
        assert_eq!(row["notes"], Value::Array(vec![]));
    }

    #[test]
    fn json_full_round_trip() {
        let text = metrics_json(&[ours()], &MetricKind::ALL);
        let back: Vec<MetricReport> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, vec![ours()]);
    }

    #[test]
    fn markdown_uses_two_decimals() {
        let text = metrics_markdown(&[ours()], &MetricKind::ALL);
        assert!(text.contains("| ours | 2.00 | 1.00 | 96.00 | ∞ |"));
    }
}
