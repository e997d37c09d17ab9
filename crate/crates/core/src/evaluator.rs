//! Classifier evaluation over labeled datasets and comparison tables.
//!
//! Non-conforming outputs count as wrong: they are neither true positives
//! nor true negatives, so they lower accuracy but never precision.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::detector::{Detector, DetectorConfig, Technique};
use crate::domain::parse_domain;
use crate::generator::Dataset;
use crate::index::ReferenceIndex;

/// A classifier answer for one domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    True,
    False,
    /// Anything that is not a verdict, with the raw output or the reason.
    NonConforming(String),
}

impl Verdict {
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Verdict::True => Some(true),
            Verdict::False => Some(false),
            Verdict::NonConforming(_) => None,
        }
    }
}

impl From<bool> for Verdict {
    fn from(b: bool) -> Self {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }
}

pub trait Classifier: Sync {
    fn classify(&self, domain: &str) -> Verdict;

    /// Classifies many domains; results align with the input. The default
    /// runs rows in parallel.
    fn classify_batch(&self, domains: &[&str]) -> Vec<Verdict> {
        domains.par_iter().map(|d| guarded(self, d)).collect()
    }
}

impl<F> Classifier for F
where
    F: Fn(&str) -> Verdict + Sync,
{
    fn classify(&self, domain: &str) -> Verdict {
        self(domain)
    }
}

/// A panicking classifier yields a non-conforming row, not an aborted run.
fn guarded<C: Classifier + ?Sized>(classifier: &C, domain: &str) -> Verdict {
    catch_unwind(AssertUnwindSafe(|| classifier.classify(domain))).unwrap_or_else(|payload| {
        let msg = payload
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| payload.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "classifier panicked".into());
        Verdict::NonConforming(msg)
    })
}

/// The deterministic detector as a classifier.
#[derive(Debug, Clone)]
pub struct HeuristicEngine {
    index: ReferenceIndex,
    config: DetectorConfig,
}

impl HeuristicEngine {
    pub fn new(index: ReferenceIndex, config: DetectorConfig) -> Self {
        Self { index, config }
    }

    pub fn detector(&self) -> Detector<'_> {
        Detector::new(&self.index, &self.config)
    }
}

impl Classifier for HeuristicEngine {
    fn classify(&self, domain: &str) -> Verdict {
        match parse_domain(domain, self.index.suffix_rules()) {
            Ok(d) => self.detector().analyze(&d).verdict.into(),
            Err(e) => Verdict::NonConforming(format!("unparseable domain: {e}")),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct TechniqueRecall {
    pub positives: usize,
    pub detected: usize,
}

impl TechniqueRecall {
    pub fn recall(&self) -> Option<f64> {
        ratio(self.detected, self.positives)
    }
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvalMetrics {
    pub confusion: Confusion,
    /// Non-conforming rows split by their true label.
    pub non_conforming_positive: usize,
    pub non_conforming_negative: usize,
    pub per_technique: BTreeMap<Technique, TechniqueRecall>,
    /// Wall time of the classification calls only.
    pub elapsed: Duration,
}

impl EvalMetrics {
    pub fn total(&self) -> usize {
        let c = self.confusion;
        c.tp + c.fp + c.tn + c.fn_ + self.non_conforming()
    }

    pub fn non_conforming(&self) -> usize {
        self.non_conforming_positive + self.non_conforming_negative
    }

    pub fn accuracy(&self) -> f64 {
        ratio(self.confusion.tp + self.confusion.tn, self.total()).unwrap_or(0.0)
    }

    pub fn precision(&self) -> Option<f64> {
        ratio(self.confusion.tp, self.confusion.tp + self.confusion.fp)
    }

    pub fn recall(&self) -> Option<f64> {
        ratio(self.confusion.tp, self.confusion.tp + self.confusion.fn_)
    }

    /// Share of label-false rows answered false; non-conforming ones count
    /// against it.
    pub fn specificity(&self) -> Option<f64> {
        ratio(self.confusion.tn, self.confusion.tn + self.confusion.fp + self.non_conforming_negative)
    }

    pub fn f1(&self) -> Option<f64> {
        let (p, r) = (self.precision()?, self.recall()?);
        (p + r > 0.0).then(|| 2.0 * p * r / (p + r))
    }

    /// Adds one row's outcome.
    pub fn record(&mut self, label: bool, technique: Option<Technique>, verdict: &Verdict) {
        let predicted = verdict.as_bool();
        match (label, predicted) {
            (true, Some(true)) => self.confusion.tp += 1,
            (true, Some(false)) => self.confusion.fn_ += 1,
            (false, Some(true)) => self.confusion.fp += 1,
            (false, Some(false)) => self.confusion.tn += 1,
            (true, None) => self.non_conforming_positive += 1,
            (false, None) => self.non_conforming_negative += 1,
        }
        if let (true, Some(t)) = (label, technique) {
            let entry = self.per_technique.entry(t).or_default();
            entry.positives += 1;
            if predicted == Some(true) {
                entry.detected += 1;
            }
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("dataset is empty")]
    EmptyDataset,
}

/// Runs `classifier` over every row.
pub fn evaluate<C: Classifier + ?Sized>(classifier: &C, dataset: &Dataset) -> Result<EvalMetrics, EvalError> {
    if dataset.is_empty() {
        return Err(EvalError::EmptyDataset);
    }
    let domains: Vec<&str> = dataset.examples.iter().map(|e| e.domain.as_str()).collect();
    let start = Instant::now();
    let verdicts = classifier.classify_batch(&domains);
    let elapsed = start.elapsed();
    let mut metrics = EvalMetrics { elapsed, ..EvalMetrics::default() };
    for (row, verdict) in dataset.examples.iter().zip(&verdicts) {
        metrics.record(row.label, row.technique, verdict);
    }
    Ok(metrics)
}

/// Serialized evaluation result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub name: String,
    pub accuracy: f64,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
    pub confusion: Confusion,
    pub non_conforming: usize,
    pub elapsed_seconds: f64,
}

impl EvalReport {
    pub fn new(name: impl Into<String>, m: &EvalMetrics) -> Self {
        Self {
            name: name.into(),
            accuracy: m.accuracy(),
            precision: m.precision(),
            recall: m.recall(),
            f1: m.f1(),
            confusion: m.confusion,
            non_conforming: m.non_conforming(),
            elapsed_seconds: m.elapsed.as_secs_f64(),
        }
    }
}

/// `94%`, `97.5%`; whole percentages drop the decimal.
pub fn format_percent(fraction: f64) -> String {
    let pct = (fraction * 1000.0).round() / 10.0;
    if pct.fract() == 0.0 {
        format!("{pct:.0}%")
    } else {
        format!("{pct:.1}%")
    }
}

pub fn format_optional_percent(fraction: Option<f64>) -> String {
    fraction.map_or_else(|| "n/a".into(), format_percent)
}

pub fn format_seconds(seconds: f64) -> String {
    if seconds.fract() == 0.0 {
        format!("{seconds:.0}")
    } else {
        format!("{seconds:.2}")
    }
}

fn render(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "| {} |", header.join(" | "));
    let _ = writeln!(out, "|{}", header.iter().map(|_| "---|").collect::<String>());
    for row in rows {
        let _ = writeln!(out, "| {} |", row.join(" | "));
    }
    out
}

/// `Model Name | Accuracy | Time (seconds)`, one row per report, in order.
pub fn compare(runs: &[EvalReport]) -> String {
    let rows: Vec<Vec<String>> = runs
        .iter()
        .map(|r| vec![r.name.clone(), format_percent(r.accuracy), format_seconds(r.elapsed_seconds)])
        .collect();
    render(&["Model Name", "Accuracy", "Time (seconds)"], &rows)
}

/// One model evaluated prompt-only and after tuning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedRow {
    pub name: String,
    pub not_fine_tuned: f64,
    pub fine_tuned: f64,
    pub time_seconds: f64,
}

impl PairedRow {
    /// Named after and timed by the tuned run.
    pub fn from_reports(base: &EvalReport, tuned: &EvalReport) -> Self {
        Self {
            name: tuned.name.clone(),
            not_fine_tuned: base.accuracy,
            fine_tuned: tuned.accuracy,
            time_seconds: tuned.elapsed_seconds,
        }
    }
}

/// `Model Name | Not Fine Tuned | Fine Tuned | Time (seconds)`.
pub fn compare_paired(rows: &[PairedRow]) -> String {
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.name.clone(),
                format_percent(r.not_fine_tuned),
                format_percent(r.fine_tuned),
                format_seconds(r.time_seconds),
            ]
        })
        .collect();
    render(&["Model Name", "Not Fine Tuned", "Fine Tuned", "Time (seconds)"], &rows)
}
