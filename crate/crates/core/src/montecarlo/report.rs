//! Rendering of study reports.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::montecarlo::design::EstimatorKind;
use crate::montecarlo::study::{CellSummary, StudyReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    Markdown,
}

impl ReportFormat {
    pub const ALL: [ReportFormat; 3] = [ReportFormat::Csv, ReportFormat::Json, ReportFormat::Markdown];

    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
            ReportFormat::Markdown => "md",
        }
    }
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "markdown" | "md" | "markdown-table" => Ok(ReportFormat::Markdown),
            other => Err(Error::Config(format!(
                "unknown report format `{other}`; expected csv, json or markdown"
            ))),
        }
    }
}

const CSV_HEADER: &str =
    "n,estimator,mean_bias,mean_absolute_error,std_dev,used_replications,failed_replications";

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn emit_report(report: &StudyReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Csv => {
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for c in &report.cells {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    c.n,
                    c.estimator.key(),
                    opt(c.mean_bias),
                    opt(c.mean_absolute_error),
                    opt(c.std_dev),
                    c.used_replications,
                    c.failed_replications
                ));
            }
            Ok(out)
        }
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report)?;
            s.push('\n');
            Ok(s)
        }
        ReportFormat::Markdown => Ok(markdown(report)),
    }
}

fn markdown(report: &StudyReport) -> String {
    let d = &report.design;
    let kinds: Vec<EstimatorKind> = EstimatorKind::ALL
        .into_iter()
        .filter(|k| d.estimators.contains(k))
        .collect();
    let mut out = format!(
        "Mean bias of the slope estimate ({} link, {} replications, seed {})\n\n",
        d.link, d.replications, d.master_seed
    );
    out.push_str("| n |");
    for k in &kinds {
        out.push_str(&format!(" {} |", k.label()));
    }
    out.push_str("\n|---|");
    for _ in &kinds {
        out.push_str("---|");
    }
    out.push('\n');
    for &n in &d.sample_sizes {
        out.push_str(&format!("| {n} |"));
        for &k in &kinds {
            let cell = report.cell(n, k);
            let text = match cell {
                Some(c) => {
                    let mut t = c
                        .mean_bias
                        .map(|b| format!("{b:.4}"))
                        .unwrap_or_else(|| "n/a".into());
                    if c.failed_replications > 0 {
                        t.push_str(&format!(" ({} failed)", c.failed_replications));
                    }
                    t
                }
                None => "n/a".into(),
            };
            out.push_str(&format!(" {text} |"));
        }
        out.push('\n');
    }
    out
}

/// Parses the CSV rendering back into cell summaries.
pub fn parse_report_csv(text: &str) -> Result<Vec<CellSummary>> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::Config("not a study report CSV".into()));
    }
    let bad = |ln: usize, m: &str| Error::Config(format!("report line {}: {m}", ln + 2));
    let num = |s: &str| -> std::result::Result<Option<f64>, ()> {
        if s.is_empty() {
            Ok(None)
        } else {
            s.parse().map(Some).map_err(|_| ())
        }
    };
    lines
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(ln, l)| {
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 7 {
                return Err(bad(ln, "expected 7 fields"));
            }
            Ok(CellSummary {
                n: f[0].parse().map_err(|_| bad(ln, "n"))?,
                estimator: f[1].parse()?,
                mean_bias: num(f[2]).map_err(|_| bad(ln, "mean_bias"))?,
                mean_absolute_error: num(f[3]).map_err(|_| bad(ln, "mean_absolute_error"))?,
                std_dev: num(f[4]).map_err(|_| bad(ln, "std_dev"))?,
                used_replications: f[5].parse().map_err(|_| bad(ln, "used_replications"))?,
                failed_replications: f[6].parse().map_err(|_| bad(ln, "failed_replications"))?,
            })
        })
        .collect()
}
