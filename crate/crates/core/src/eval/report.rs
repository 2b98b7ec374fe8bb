use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{EvalError, ThresholdReport};
use crate::dataset::Level;
use crate::report_fmt::{fixed, fixed_opt};

pub const REPORT_HEADER: &str = "mode,threshold,matched_pairs,unmatched_pairs,accuracy_pct,avg_similarity,std_similarity,precision,recall,f1,gt_accuracy_pct,time_s";

/// Published per-row figures for the three modes at 0.92 / 0.82 / 0.72, in
/// report CSV form. The Easy 0.92 accuracy is stored as 96.69 (3481/3600),
/// the value behind the published Easy confidence interval.
pub const REFERENCE_RESULTS_CSV: &str = include_str!("../../fixtures/reference_results.csv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            _ => Err(format!("unknown report format {s:?}")),
        }
    }
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        }
    }
}

/// CSV floats use fixed decimals (accuracy 2, similarity and rates 4, time
/// 2); absent metrics are empty fields. JSON keeps full precision.
pub fn emit_report(reports: &[ThresholdReport], format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Json => {
            let mut out = serde_json::to_vec_pretty(reports).expect("reports serialize");
            out.push(b'\n');
            out
        }
        ReportFormat::Csv => {
            let mut s = String::from(REPORT_HEADER);
            s.push('\n');
            for r in reports {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{},{},{},{}",
                    r.mode,
                    r.threshold,
                    r.matched_pairs,
                    r.unmatched_pairs,
                    fixed(r.paper_accuracy_pct, 2),
                    fixed(r.avg_similarity, 4),
                    fixed(r.std_similarity, 4),
                    fixed_opt(r.precision, 4),
                    fixed_opt(r.recall, 4),
                    fixed_opt(r.f1, 4),
                    fixed_opt(r.gt_accuracy_pct, 2),
                    fixed(r.wall_time_s, 2),
                );
            }
            s.into_bytes()
        }
    }
}

pub fn parse_report(bytes: &[u8], format: ReportFormat) -> Result<Vec<ThresholdReport>, EvalError> {
    match format {
        ReportFormat::Json => serde_json::from_slice(bytes).map_err(|e| EvalError::Parse(e.to_string())),
        ReportFormat::Csv => parse_csv(bytes),
    }
}

fn parse_csv(bytes: &[u8]) -> Result<Vec<ThresholdReport>, EvalError> {
    let perr = |m: String| EvalError::Parse(m);
    let mut rdr = csv::Reader::from_reader(bytes);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| perr(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.join(",") != REPORT_HEADER {
        return Err(perr(format!("unexpected header {:?}", header.join(","))));
    }
    let mut out = Vec::new();
    for (line, row) in rdr.records().enumerate() {
        let row = row.map_err(|e| perr(e.to_string()))?;
        let at = |i: usize| row.get(i).unwrap_or("").trim();
        let ctx = |col: &str| perr(format!("row {}: bad {col}", line + 2));
        let num = |i: usize, col: &str| at(i).parse::<f64>().map_err(|_| ctx(col));
        let opt = |i: usize, col: &str| -> Result<Option<f64>, EvalError> {
            if at(i).is_empty() {
                Ok(None)
            } else {
                at(i).parse::<f64>().map(Some).map_err(|_| ctx(col))
            }
        };
        let mode: Level = at(0).parse().map_err(perr)?;
        out.push(ThresholdReport {
            mode,
            threshold: num(1, "threshold")?,
            matched_pairs: at(2).parse().map_err(|_| ctx("matched_pairs"))?,
            unmatched_pairs: at(3).parse().map_err(|_| ctx("unmatched_pairs"))?,
            paper_accuracy_pct: num(4, "accuracy_pct")?,
            avg_similarity: num(5, "avg_similarity")?,
            std_similarity: num(6, "std_similarity")?,
            precision: opt(7, "precision")?,
            recall: opt(8, "recall")?,
            f1: opt(9, "f1")?,
            gt_accuracy_pct: opt(10, "gt_accuracy_pct")?,
            wall_time_s: num(11, "time_s")?,
        });
    }
    Ok(out)
}

pub fn reference_results() -> Vec<ThresholdReport> {
    parse_csv(REFERENCE_RESULTS_CSV.as_bytes()).expect("bundled fixture parses")
}

/// Long-format `series,x,y` rows: accuracy, f1, time, matched and unmatched
/// counts, each against threshold, one series per (metric, mode).
/// Absent metrics produce no row.
pub fn emit_plot_data(reports: &[ThresholdReport]) -> Result<Vec<u8>, EvalError> {
    if reports.is_empty() {
        return Err(EvalError::EmptyReports);
    }
    let mut s = String::from("series,x,y\n");
    type Metric = (&'static str, fn(&ThresholdReport) -> Option<String>);
    let metrics: [Metric; 5] = [
        ("accuracy", |r| Some(fixed(r.paper_accuracy_pct, 2))),
        ("f1", |r| r.f1.map(|v| fixed(v, 4))),
        ("time", |r| Some(fixed(r.wall_time_s, 2))),
        ("matched", |r| Some(r.matched_pairs.to_string())),
        ("unmatched", |r| Some(r.unmatched_pairs.to_string())),
    ];
    for (name, value) in metrics {
        for r in reports {
            if let Some(y) = value(r) {
                let _ = writeln!(s, "{name}:{},{},{y}", r.mode, r.threshold);
            }
        }
    }
    Ok(s.into_bytes())
}
