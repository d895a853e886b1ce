use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{acdc, geil, nsa, ssim, ExtendedReal};
use crate::bibdata::{Corpus, Gender, PaperRecord};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MetricKind {
    Nsa,
    Geil,
    Ssim,
    Acdc,
}

impl MetricKind {
    pub const ALL: [MetricKind; 4] = [
        MetricKind::Nsa,
        MetricKind::Geil,
        MetricKind::Ssim,
        MetricKind::Acdc,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MetricKind::Nsa => "nsa",
            MetricKind::Geil => "geil",
            MetricKind::Ssim => "ssim",
            MetricKind::Acdc => "acdc",
        }
    }

    /// Whether larger values are better.
    pub fn higher_is_better(self) -> bool {
        !matches!(self, MetricKind::Geil)
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "nsa" => Ok(MetricKind::Nsa),
            "geil" => Ok(MetricKind::Geil),
            "ssim" => Ok(MetricKind::Ssim),
            "acdc" => Ok(MetricKind::Acdc),
            other => Err(Error::InvalidConfig(format!("unknown metric `{other}`"))),
        }
    }
}

/// The four metric values of one record. A metric whose preconditions do
/// not hold is `undefined` (or `None` for NSA) with an explanatory note.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    #[serde(rename = "record")]
    pub record_id: String,
    #[serde(with = "nsa_value")]
    pub nsa: Option<u64>,
    pub geil: ExtendedReal,
    pub ssim: ExtendedReal,
    pub acdc: ExtendedReal,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl MetricReport {
    pub fn get(&self, kind: MetricKind) -> ExtendedReal {
        match kind {
            MetricKind::Nsa => self
                .nsa
                .map_or(ExtendedReal::Undefined, |v| ExtendedReal::Finite(v as f64)),
            MetricKind::Geil => self.geil,
            MetricKind::Ssim => self.ssim,
            MetricKind::Acdc => self.acdc,
        }
    }
}

/// NSA is written as a JSON integer, or `"undefined"`.
mod nsa_value {
    use serde::de::{self, Deserializer};
    use serde::{Deserialize, Serializer};

    pub fn serialize<S: Serializer>(value: &Option<u64>, s: S) -> Result<S::Ok, S::Error> {
        match value {
            Some(v) => s.serialize_u64(*v),
            None => s.serialize_str("undefined"),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Count(u64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<u64>, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Count(v) => Ok(Some(v)),
            Raw::Text(t) if t == "undefined" => Ok(None),
            Raw::Text(t) => Err(de::Error::custom(format!("invalid nsa value `{t}`"))),
        }
    }
}

/// Computes all four metrics for `record`. Only an unresolvable institution
/// reference is an error; every other failure leaves the metric undefined.
pub fn compute_report(
    record: &PaperRecord,
    corpus: &Corpus,
    categories: &[Gender],
) -> Result<MetricReport> {
    let institutions = corpus.institution_names(record)?;
    let authors = &record.authors;
    let mut notes = Vec::new();

    let nsa = match nsa(authors) {
        Ok(v) => Some(v as u64),
        Err(e) => {
            notes.push(format!("nsa: {e}"));
            None
        }
    };
    let geil = match geil(authors, categories) {
        Ok(v) => ExtendedReal::Finite(v),
        Err(e) => {
            notes.push(format!("geil: {e}"));
            ExtendedReal::Undefined
        }
    };
    let ssim = match ssim(authors, &institutions) {
        Ok(v) => ExtendedReal::Finite(v),
        Err(e) => {
            notes.push(format!("ssim: {e}"));
            ExtendedReal::Undefined
        }
    };
    let acdc = match acdc(authors) {
        Ok(result) => {
            notes.extend(result.notes);
            result.value
        }
        Err(e) => {
            notes.push(format!("acdc: {e}"));
            ExtendedReal::Undefined
        }
    };

    Ok(MetricReport {
        record_id: record.id.clone(),
        nsa,
        geil,
        ssim,
        acdc,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bibdata::{AuthorMention, CareerStart, Institution};

    const FAU: &str = "Friedrich-Alexander-Universität Erlangen-Nürnberg (FAU)";

    fn ours() -> Corpus {
        let wirth = AuthorMention::new("Vanessa", "Wirth", Gender::Female, "fau")
            .with_career_start(CareerStart::new(1, 4).unwrap());
        let record = PaperRecord::new("ours", "Author-Unification", 2024)
            .with_author(wirth.clone())
            .with_author(wirth);
        Corpus::new(vec![record], vec![Institution::new("fau", FAU)]).unwrap()
    }

    #[test]
    fn ours_row() {
        let corpus = ours();
        let report =
            compute_report(&corpus.records()[0], &corpus, &Gender::DEFAULT_CATEGORIES).unwrap();
        assert_eq!(report.nsa, Some(2));
        assert_eq!(report.geil, ExtendedReal::Finite(1.0));
        assert_eq!(report.ssim, ExtendedReal::Finite(96.0));
        assert_eq!(report.acdc, ExtendedReal::PositiveInfinity);
        assert!(report
            .notes
            .iter()
            .any(|n| n.contains("day term denominator")));
    }

    #[test]
    fn degenerate_single_author() {
        let author = AuthorMention::new("Vanessa", "Wirth", Gender::Unknown, "euv");
        let record = PaperRecord::new("solo", "Alone", 2020).with_author(author);
        let corpus = Corpus::new(
            vec![record],
            vec![Institution::new("euv", "European University Viadrina")],
        )
        .unwrap();
        let report =
            compute_report(&corpus.records()[0], &corpus, &Gender::DEFAULT_CATEGORIES).unwrap();
        assert_eq!(report.nsa, Some(0));
        assert_eq!(report.geil, ExtendedReal::Undefined);
        assert_eq!(report.ssim, ExtendedReal::Finite(52.0));
        assert_eq!(report.acdc, ExtendedReal::Undefined);
        assert!(report.notes.iter().any(|n| n.starts_with("geil:")));
        assert!(report.notes.iter().any(|n| n.starts_with("acdc:")));
    }

    #[test]
    fn foreign_record_is_a_validation_error() {
        let author = AuthorMention::new("A", "B", Gender::Male, "elsewhere");
        let stray = PaperRecord::new("stray", "", 2020).with_author(author);
        assert!(matches!(
            compute_report(&stray, &ours(), &Gender::DEFAULT_CATEGORIES),
            Err(Error::Validation { .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let corpus = ours();
        let report =
            compute_report(&corpus.records()[0], &corpus, &Gender::DEFAULT_CATEGORIES).unwrap();
        let text = serde_json::to_string(&report).unwrap();
        assert!(text.starts_with(r#"{"record":"ours","nsa":2,"geil":1.0,"ssim":96.0,"acdc":"inf""#));
        let back: MetricReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);

        let undefined = MetricReport {
            record_id: "x".into(),
            nsa: None,
            geil: ExtendedReal::Undefined,
            ssim: ExtendedReal::Finite(13.678794),
            acdc: ExtendedReal::Undefined,
            notes: vec![],
        };
        let back: MetricReport =
            serde_json::from_str(&serde_json::to_string(&undefined).unwrap()).unwrap();
        assert_eq!(back, undefined);
    }

    #[test]
    fn metric_names() {
        for kind in MetricKind::ALL {
            assert_eq!(kind.as_str().parse::<MetricKind>().unwrap(), kind);
        }
        assert!("psnr".parse::<MetricKind>().is_err());
        assert!(!MetricKind::Geil.higher_is_better());
        assert!(MetricKind::Acdc.higher_is_better());
    }
}
