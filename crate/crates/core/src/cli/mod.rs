//! The `aua` command line: `parse`, `metrics`, `detect` and `table`.
//!
//! Documents go to stdout, diagnostics to stderr. Exit status is 0 on
//! success, 1 for parse errors, 2 for validation errors and 3 for anything
//! else.

pub mod benchmark;
pub mod config;
mod output;

use std::ffi::OsString;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bibdata::bibtex::{parse_bibtex_subset, Sidecar};
use crate::bibdata::jsonl::parse_jsonl;
use crate::bibdata::{Corpus, Gender};
use crate::error::{Error, Result};
use crate::metrics::{compute_report, ExtendedReal, MetricKind, MetricReport};
use crate::unify::{detect_clusters, merge_profiles, page_savings, DEFAULT_CHARS_PER_PAGE};
use benchmark::{bundled_rows, load_fixtures, render_benchmark};
use config::ConfigFile;
use output::{ClusterOut, DetectOut, SavingsOut};

/// Environment variable naming the configuration file.
pub const CONFIG_ENV: &str = "AUA_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Jsonl,
    Bibtex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Markdown,
}

#[derive(Debug, Parser)]
#[command(
    name = "aua",
    version,
    about = "Author-unification metrics and detection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct InputArgs {
    /// JSON-lines corpus or BibTeX file.
    path: PathBuf,
    /// Input format; inferred from the extension (`.bib` → bibtex) when absent.
    #[arg(long, value_enum)]
    format: Option<InputFormat>,
    /// JSON author metadata for BibTeX input.
    #[arg(long)]
    sidecar: Option<PathBuf>,
    /// Census categories for GEIL, comma separated.
    #[arg(long, value_delimiter = ',')]
    genders: Option<Vec<String>>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate an input file and print its size.
    Parse(InputArgs),
    /// Compute per-record metrics.
    Metrics {
        #[command(flatten)]
        input: InputArgs,
        /// Metrics to report, comma separated.
        #[arg(long, value_delimiter = ',')]
        metric: Option<Vec<String>>,
        /// Output format (default json)
        #[arg(long, value_enum)]
        output: Option<OutputFormat>,
    },
    /// Detect name-sharing author clusters.
    Detect {
        #[command(flatten)]
        input: InputArgs,
        /// Also report per-record bibliography page savings.
        #[arg(long)]
        savings: bool,
        /// Characters per bibliography page (default 3000)
        #[arg(long)]
        chars_per_page: Option<usize>,
        /// Attach the merged publication profile to each cluster.
        #[arg(long)]
        profiles: bool,
    },
    /// Render the comparison table.
    Table {
        /// Fixture file; the bundled table is used when absent.
        #[arg(long)]
        fixtures: Option<PathBuf>,
    },
}

/// Settings resolved from flags, the config file and defaults, in that
/// order of precedence.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input_path: PathBuf,
    pub input_format: InputFormat,
    pub sidecar_path: Option<PathBuf>,
    pub output_format: OutputFormat,
    pub chars_per_page: usize,
    pub gender_categories: Vec<Gender>,
}

impl RunConfig {
    pub fn new(input_path: impl Into<PathBuf>) -> Self {
        let input_path = input_path.into();
        RunConfig {
            input_format: infer_format(&input_path),
            input_path,
            sidecar_path: None,
            output_format: OutputFormat::Json,
            chars_per_page: DEFAULT_CHARS_PER_PAGE,
            gender_categories: Gender::DEFAULT_CATEGORIES.to_vec(),
        }
    }
}

fn infer_format(path: &Path) -> InputFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("bib") => InputFormat::Bibtex,
        _ => InputFormat::Jsonl,
    }
}

fn parse_value_enum<T: ValueEnum>(key: &str, value: &str) -> Result<T> {
    T::from_str(value, true)
        .map_err(|_| Error::InvalidConfig(format!("invalid `{key}` value `{value}`")))
}

fn parse_list<T: std::str::FromStr<Err = Error>>(items: &[String]) -> Result<Vec<T>> {
    let parsed = items
        .iter()
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect::<Result<Vec<T>>>()?;
    if parsed.is_empty() {
        return Err(Error::InvalidConfig("empty list".to_string()));
    }
    Ok(parsed)
}

fn split_list(value: &str) -> Vec<String> {
    value.split(',').map(str::to_string).collect()
}

fn resolve(
    input: &InputArgs,
    output: Option<OutputFormat>,
    chars_per_page: Option<usize>,
    file: &ConfigFile,
) -> Result<RunConfig> {
    let mut config = RunConfig::new(&input.path);
    if let Some(format) = input.format {
        config.input_format = format;
    } else if let Some(v) = file.get("format") {
        config.input_format = parse_value_enum("format", v)?;
    }
    config.sidecar_path = input
        .sidecar
        .clone()
        .or_else(|| file.get("sidecar").map(PathBuf::from));
    if let Some(format) = output {
        config.output_format = format;
    } else if let Some(v) = file.get("output") {
        config.output_format = parse_value_enum("output", v)?;
    }
    config.chars_per_page = match chars_per_page {
        Some(n) => n,
        None => match file.get("chars-per-page") {
            Some(v) => v.parse().map_err(|_| {
                Error::InvalidConfig(format!("`chars-per-page` must be a number, got `{v}`"))
            })?,
            None => DEFAULT_CHARS_PER_PAGE,
        },
    };
    if config.chars_per_page == 0 {
        return Err(Error::InvalidConfig(
            "chars-per-page must be positive".into(),
        ));
    }
    let genders = match (&input.genders, file.get("genders")) {
        (Some(list), _) => Some(list.clone()),
        (None, Some(v)) => Some(split_list(v)),
        (None, None) => None,
    };
    if let Some(list) = genders {
        config.gender_categories = parse_list(&list)?;
    }
    Ok(config)
}

fn report_warnings(err: &mut dyn Write, warnings: &[crate::Diagnostic]) -> Result<()> {
    for warning in warnings {
        writeln!(err, "warning: {warning}")?;
    }
    Ok(())
}

pub fn load_corpus(config: &RunConfig, err: &mut dyn Write) -> Result<Corpus> {
    let file = File::open(&config.input_path).map_err(|e| {
        std::io::Error::new(e.kind(), format!("{}: {e}", config.input_path.display()))
    })?;
    let outcome = match config.input_format {
        InputFormat::Jsonl => parse_jsonl(file)?,
        InputFormat::Bibtex => {
            let sidecar = match &config.sidecar_path {
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(|e| {
                        std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))
                    })?;
                    Sidecar::from_json(&text)?
                }
                None => {
                    writeln!(
                        err,
                        "warning: no sidecar given; gender and career metrics will be undefined"
                    )?;
                    Sidecar::empty()
                }
            };
            parse_bibtex_subset(file, &sidecar)?
        }
    };
    report_warnings(err, &outcome.warnings)?;
    Ok(outcome.corpus)
}

fn plural(n: usize, one: &str, many: &str) -> String {
    format!("{n} {}", if n == 1 { one } else { many })
}

pub fn cmd_parse(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let corpus = load_corpus(config, err)?;
    writeln!(
        out,
        "{}, {}, {}",
        plural(corpus.records().len(), "record", "records"),
        plural(corpus.mention_count(), "author", "authors"),
        plural(corpus.institution_count(), "institution", "institutions"),
    )?;
    Ok(())
}

/// Reports for every record, ordered by record id.
pub fn corpus_reports(corpus: &Corpus, categories: &[Gender]) -> Result<Vec<MetricReport>> {
    let mut reports = corpus
        .records()
        .iter()
        .map(|record| compute_report(record, corpus, categories))
        .collect::<Result<Vec<_>>>()?;
    reports.sort_by(|a, b| a.record_id.cmp(&b.record_id));
    Ok(reports)
}

pub fn render_metrics(
    reports: &[MetricReport],
    kinds: &[MetricKind],
    format: OutputFormat,
) -> Result<String> {
    match format {
        OutputFormat::Json => Ok(output::metrics_json(reports, kinds)),
        OutputFormat::Csv => output::metrics_csv(reports, kinds),
        OutputFormat::Markdown => Ok(output::metrics_markdown(reports, kinds)),
    }
}

pub fn cmd_metrics(
    config: &RunConfig,
    kinds: &[MetricKind],
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<()> {
    let corpus = load_corpus(config, err)?;
    let reports = corpus_reports(&corpus, &config.gender_categories)?;
    out.write_all(render_metrics(&reports, kinds, config.output_format)?.as_bytes())?;
    Ok(())
}

pub fn cmd_detect(
    config: &RunConfig,
    savings: bool,
    profiles: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<()> {
    if config.output_format != OutputFormat::Json {
        return Err(Error::InvalidConfig("detect only writes json".into()));
    }
    let corpus = load_corpus(config, err)?;
    let clusters = detect_clusters(&corpus);
    let cluster_docs = clusters
        .iter()
        .map(|cluster| {
            let merged_profile = if profiles {
                Some(merge_profiles(cluster, &corpus)?)
            } else {
                None
            };
            Ok(ClusterOut {
                cluster,
                merged_profile,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let text = if savings {
        let mut records: Vec<_> = corpus.records().iter().collect();
        records.sort_by(|a, b| a.id.cmp(&b.id));
        let page_savings = records
            .into_iter()
            .map(|record| {
                Ok(SavingsOut {
                    record: &record.id,
                    page_savings: ExtendedReal::Finite(page_savings(
                        record,
                        config.chars_per_page,
                    )?),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        output::to_pretty_json(&DetectOut {
            clusters: cluster_docs,
            page_savings,
        })
    } else {
        output::to_pretty_json(&cluster_docs)
    };
    out.write_all(text.as_bytes())?;
    Ok(())
}

pub fn cmd_table(fixtures: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    let rows = match fixtures {
        Some(path) => load_fixtures(&std::fs::read_to_string(path)?, &Gender::DEFAULT_CATEGORIES)?,
        None => bundled_rows()?,
    };
    out.write_all(render_benchmark(&rows)?.as_bytes())?;
    Ok(())
}

fn dispatch(
    command: Command,
    file: &ConfigFile,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<()> {
    match command {
        Command::Parse(input) => {
            let config = resolve(&input, None, None, file)?;
            cmd_parse(&config, out, err)
        }
        Command::Metrics {
            input,
            metric,
            output,
        } => {
            let config = resolve(&input, output, None, file)?;
            let kinds: Vec<MetricKind> = match (metric, file.get("metric")) {
                (Some(list), _) => parse_list(&list)?,
                (None, Some(v)) => parse_list(&split_list(v))?,
                (None, None) => MetricKind::ALL.to_vec(),
            };
            cmd_metrics(&config, &kinds, out, err)
        }
        Command::Detect {
            input,
            savings,
            chars_per_page,
            profiles,
        } => {
            let config = resolve(&input, None, chars_per_page, file)?;
            let savings = savings || file.flag("savings")?;
            let profiles = profiles || file.flag("profiles")?;
            cmd_detect(&config, savings, profiles, out, err)
        }
        Command::Table { fixtures } => {
            let fixtures = fixtures.or_else(|| file.get("fixtures").map(PathBuf::from));
            cmd_table(fixtures.as_deref(), out)
        }
    }
}

/// Runs the command line and returns the process exit status.
pub fn run<I, T>(
    args: I,
    config_path: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };

    let result = config_path
        .map(ConfigFile::load)
        .transpose()
        .map(Option::unwrap_or_default)
        .and_then(|file| dispatch(cli.command, &file, out, err));
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
