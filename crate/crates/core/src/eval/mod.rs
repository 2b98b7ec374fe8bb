//! Threshold sweeps over real-vs-altered embedding sets and the per-row
//! metrics reported for each (mode, threshold) pair.

mod report;

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::Level;
use crate::features::EmbeddingVector;
use crate::matcher::{self, GroundTruth, MatchDecision, MatchError};
use crate::stats::{self, StatsError, StatsSummary};

pub use report::{
    emit_plot_data, emit_report, parse_report, reference_results, ReportFormat, REPORT_HEADER, REFERENCE_RESULTS_CSV,
};

pub const DEFAULT_THRESHOLDS: [f64; 3] = [0.92, 0.82, 0.72];

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("no pairs to evaluate")]
    EmptyEvaluation,
    #[error("decision for ({0}) carries no ground-truth label")]
    MissingGroundTruth(String),
    #[error("no {0} embeddings supplied")]
    MissingEmbeddings(Level),
    #[error("mode {0} is not an altered category")]
    BadMode(Level),
    #[error("empty report list")]
    EmptyReports,
    #[error("malformed report: {0}")]
    Parse(String),
    #[error(transparent)]
    Match(#[from] MatchError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub mode: Level,
    pub threshold: f64,
    pub matched_pairs: u64,
    pub unmatched_pairs: u64,
    /// `100 * unmatched / total`.
    pub paper_accuracy_pct: f64,
    pub gt_accuracy_pct: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
    pub avg_similarity: f64,
    pub std_similarity: f64,
    pub wall_time_s: f64,
}

impl ThresholdReport {
    pub fn total_pairs(&self) -> u64 {
        self.matched_pairs + self.unmatched_pairs
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub thresholds: Vec<f64>,
    pub modes: Vec<Level>,
    pub extractor_id: Option<String>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            thresholds: DEFAULT_THRESHOLDS.to_vec(),
            modes: Level::ALTERED.to_vec(),
            extractor_id: None,
        }
    }
}

impl SweepConfig {
    /// Validate, deduplicate, order thresholds descending and modes
    /// Easy, Medium, Hard.
    pub fn normalized(&self) -> Result<Self, EvalError> {
        let mut thresholds = self.thresholds.clone();
        for &t in &thresholds {
            matcher::check_threshold(t)?;
        }
        thresholds.sort_by(|a, b| b.total_cmp(a));
        thresholds.dedup();
        if thresholds.is_empty() {
            return Err(EvalError::EmptyEvaluation);
        }
        let mut modes = self.modes.clone();
        if let Some(&m) = modes.iter().find(|m| !m.is_altered()) {
            return Err(EvalError::BadMode(m));
        }
        modes.sort();
        modes.dedup();
        if modes.is_empty() {
            return Err(EvalError::EmptyEvaluation);
        }
        Ok(Self {
            thresholds,
            modes,
            extractor_id: self.extractor_id.clone(),
        })
    }
}

pub fn paper_accuracy(matched: u64, unmatched: u64) -> Result<f64, EvalError> {
    let total = matched + unmatched;
    if total == 0 {
        return Err(EvalError::EmptyEvaluation);
    }
    Ok(100.0 * unmatched as f64 / total as f64)
}

pub fn f1_score(precision: f64, recall: f64) -> Option<f64> {
    let s = precision + recall;
    (s > 0.0).then(|| 2.0 * precision * recall / s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GtMetrics {
    /// Fraction in `[0, 1]`.
    pub accuracy: f64,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
}

/// Confusion-matrix metrics against genuine/impostor labels.
pub fn gt_metrics(decisions: &[MatchDecision]) -> Result<GtMetrics, EvalError> {
    if decisions.is_empty() {
        return Err(EvalError::EmptyEvaluation);
    }
    let (mut tp, mut fp, mut tn, mut fn_) = (0u64, 0u64, 0u64, 0u64);
    for d in decisions {
        let genuine = d.genuine.ok_or_else(|| {
            EvalError::MissingGroundTruth(format!("{}, {}", d.score.real_ref, d.score.altered_ref))
        })?;
        match (d.matched, genuine) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, false) => tn += 1,
            (false, true) => fn_ += 1,
        }
    }
    let ratio = |num: u64, den: u64| (den > 0).then(|| num as f64 / den as f64);
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let f1 = match (precision, recall) {
        (Some(p), Some(r)) => f1_score(p, r),
        _ => None,
    };
    Ok(GtMetrics {
        accuracy: (tp + tn) as f64 / decisions.len() as f64,
        precision,
        recall,
        f1,
    })
}

/// Mean and sample standard deviation of similarity values.
pub fn similarity_stats(values: &[f64]) -> Result<(f64, f64), EvalError> {
    Ok((stats::mean(values)?, stats::sample_std(values)?))
}

pub type EmbeddingSet = BTreeMap<Level, Vec<EmbeddingVector>>;

/// One report per (mode, threshold), modes Easy to Hard, thresholds
/// descending. Ground-truth columns are filled when `ground_truth` labels
/// every pair.
pub fn sweep(
    config: &SweepConfig,
    embeddings: &EmbeddingSet,
    ground_truth: Option<&GroundTruth>,
) -> Result<Vec<ThresholdReport>, EvalError> {
    let config = config.normalized()?;
    let reals = embeddings
        .get(&Level::Real)
        .filter(|v| !v.is_empty())
        .ok_or(EvalError::MissingEmbeddings(Level::Real))?;
    let mut reports = Vec::new();
    for &mode in &config.modes {
        let altered = embeddings
            .get(&mode)
            .filter(|v| !v.is_empty())
            .ok_or(EvalError::MissingEmbeddings(mode))?;
        if let Some(id) = &config.extractor_id {
            if let Some(v) = reals.iter().chain(altered).find(|v| v.extractor_id() != id) {
                return Err(MatchError::MixedExtractors(id.clone(), v.extractor_id().to_string()).into());
            }
        }
        for &threshold in &config.thresholds {
            let start = Instant::now();
            let decisions = matcher::match_all(reals, altered, threshold, ground_truth)?;
            let wall_time_s = start.elapsed().as_secs_f64();
            reports.push(summarize(mode, threshold, &decisions, wall_time_s)?);
        }
    }
    Ok(reports)
}

fn summarize(mode: Level, threshold: f64, decisions: &[MatchDecision], wall_time_s: f64) -> Result<ThresholdReport, EvalError> {
    let matched = decisions.iter().filter(|d| d.matched).count() as u64;
    let unmatched = decisions.len() as u64 - matched;
    let scores: Vec<f64> = decisions.iter().map(|d| d.score.value).collect();
    let (avg, std) = similarity_stats(&scores)?;
    let gt = if decisions.iter().all(|d| d.genuine.is_some()) {
        Some(gt_metrics(decisions)?)
    } else {
        None
    };
    Ok(ThresholdReport {
        mode,
        threshold,
        matched_pairs: matched,
        unmatched_pairs: unmatched,
        paper_accuracy_pct: paper_accuracy(matched, unmatched)?,
        gt_accuracy_pct: gt.map(|g| 100.0 * g.accuracy),
        precision: gt.and_then(|g| g.precision),
        recall: gt.and_then(|g| g.recall),
        f1: gt.and_then(|g| g.f1),
        avg_similarity: avg,
        std_similarity: std,
        wall_time_s,
    })
}

/// Correlations of threshold against accuracy and against wall time over all
/// rows, plus a 95% interval over accuracy for each mode. Entries that lack
/// enough data (fewer than three rows, constant series, a mode with a single
/// threshold) are left out.
pub fn stats_from_reports(reports: &[ThresholdReport]) -> StatsSummary {
    let thresholds: Vec<f64> = reports.iter().map(|r| r.threshold).collect();
    let accuracy: Vec<f64> = reports.iter().map(|r| r.paper_accuracy_pct).collect();
    let time: Vec<f64> = reports.iter().map(|r| r.wall_time_s).collect();
    let correlations = [("accuracy", &accuracy), ("time", &time)]
        .into_iter()
        .filter_map(|(name, ys)| stats::pearson_named("threshold", name, &thresholds, ys).ok())
        .collect();
    let mut intervals = Vec::new();
    for mode in Level::ALTERED {
        let values: Vec<f64> = reports
            .iter()
            .filter(|r| r.mode == mode)
            .map(|r| r.paper_accuracy_pct)
            .collect();
        if let Ok(mut ci) = stats::ci95(&values) {
            ci.mode = Some(mode);
            intervals.push(ci);
        }
    }
    StatsSummary {
        correlations,
        intervals,
    }
}
