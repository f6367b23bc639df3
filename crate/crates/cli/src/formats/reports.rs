//! Evaluation report files.
//!
//! Classification tables repeat the overall accuracy on every row,
//! mirroring the usual per-class-plus-ACC presentation. The detection
//! table is a single row with the real class as the positive.

use crate::error::Result;
use heartgan_core::metrics::{ClassificationReport, SimilarityReport};
use std::fmt::Write as _;
use std::path::Path;

pub const CLASSIFICATION_HEADER: &str =
    "class,support,sensitivity,specificity,precision,f1,degenerate,accuracy";
pub const DETECTION_HEADER: &str = "accuracy,sensitivity,specificity,precision,f1,auc";

pub fn write_classification(path: &Path, report: &ClassificationReport) -> Result<()> {
    let mut text = String::from(CLASSIFICATION_HEADER);
    text.push('\n');
    for c in &report.classes {
        let _ = writeln!(
            text,
            "{},{},{},{},{},{},{},{}",
            c.class,
            c.support,
            c.sensitivity,
            c.specificity,
            c.precision,
            c.f1,
            c.degenerate,
            report.accuracy
        );
    }
    crate::util::write_file(path, text.as_bytes())
}

/// Single-row summary of the real-vs-synthetic task, scored from the
/// real class's side.
pub fn write_detection(path: &Path, report: &ClassificationReport) -> Result<()> {
    let real = &report.classes[1];
    let auc = report.auc.unwrap_or(f64::NAN);
    let mut text = String::from(DETECTION_HEADER);
    text.push('\n');
    let _ = writeln!(
        text,
        "{},{},{},{},{},{}",
        report.accuracy, real.sensitivity, real.specificity, real.precision, real.f1, auc
    );
    crate::util::write_file(path, text.as_bytes())
}

pub fn write_similarity(path: &Path, report: &SimilarityReport) -> Result<()> {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    crate::util::write_file(path, text.as_bytes())
}
