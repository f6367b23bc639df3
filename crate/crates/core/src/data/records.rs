//! Raw ECG records and beat extraction.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::data::beat::{normalize_window, Beat, BEAT_LEN, R_PEAK_OFFSET};
use crate::data::labels::LabelMap;
use crate::error::{Error, Result};

/// One beat annotation: sample index of the R peak plus its symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Annotation {
    pub sample_index: usize,
    pub symbol: char,
}

/// A single-lead record: the signal and its beat annotations.
#[derive(Debug, Clone)]
pub struct RecordSource {
    pub record_id: String,
    pub signal: Vec<f64>,
    pub annotations: Vec<Annotation>,
}

impl RecordSource {
    /// Validates that the signal is finite and the annotations are
    /// strictly increasing and in bounds.
    pub fn new(record_id: String, signal: Vec<f64>, annotations: Vec<Annotation>) -> Result<Self> {
        if signal.is_empty() {
            return Err(Error::invalid("record construction", format!("record {record_id}: empty signal")));
        }
        for (i, &v) in signal.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::non_finite(
                    "record construction",
                    format!("record {record_id}: sample {i} is {v}"),
                ));
            }
        }
        let mut prev: Option<usize> = None;
        for a in &annotations {
            if a.sample_index >= signal.len() {
                return Err(Error::invalid(
                    "record construction",
                    format!(
                        "record {record_id}: annotation at {} beyond signal length {}",
                        a.sample_index,
                        signal.len()
                    ),
                ));
            }
            if let Some(p) = prev {
                if a.sample_index <= p {
                    return Err(Error::invalid(
                        "record construction",
                        format!(
                            "record {record_id}: annotation indices must be strictly increasing ({} after {p})",
                            a.sample_index
                        ),
                    ));
                }
            }
            prev = Some(a.sample_index);
        }
        Ok(RecordSource { record_id, signal, annotations })
    }
}

/// What extraction produced and why beats were skipped.
#[derive(Debug, Clone, Default)]
pub struct Extraction {
    pub beats: Vec<Beat>,
    /// Annotations whose window would cross a record boundary.
    pub dropped_boundary: usize,
    /// Windows rejected as constant (no min-max scale).
    pub dropped_degenerate: usize,
    /// Annotations whose symbol is outside the label map.
    pub skipped_unmapped: usize,
}

impl Extraction {
    pub fn merge(&mut self, other: Extraction) {
        self.beats.extend(other.beats);
        self.dropped_boundary += other.dropped_boundary;
        self.dropped_degenerate += other.dropped_degenerate;
        self.skipped_unmapped += other.skipped_unmapped;
    }
}

/// Cuts one window per mapped annotation: samples
/// `[r - 139, r + 140]` inclusive (280 total, peak at offset 139),
/// min-max normalized per window. Windows that cross a record boundary
/// or are constant are counted and skipped rather than padded.
pub fn extract_beats(record: &RecordSource, labels: &LabelMap) -> Extraction {
    let mut out = Extraction::default();
    let len = record.signal.len();
    for a in &record.annotations {
        let Some(class) = labels.map(a.symbol) else {
            out.skipped_unmapped += 1;
            continue;
        };
        if a.sample_index < R_PEAK_OFFSET || a.sample_index - R_PEAK_OFFSET + BEAT_LEN > len {
            out.dropped_boundary += 1;
            continue;
        }
        let start = a.sample_index - R_PEAK_OFFSET;
        let window = &record.signal[start..start + BEAT_LEN];
        match normalize_window(window) {
            Ok(samples) => {
                let beat = Beat::new(
                    samples,
                    class,
                    record.record_id.clone(),
                    a.sample_index,
                    false,
                )
                .expect("normalized windows satisfy beat invariants");
                out.beats.push(beat);
            }
            Err(_) => out.dropped_degenerate += 1,
        }
    }
    out
}
