//! The unit of data: one fixed-length, normalized heartbeat window.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Samples per beat window.
pub const BEAT_LEN: usize = 280;

/// Offset of the annotated R peak inside the window: the window runs
/// from `r - 139` to `r + 140` inclusive.
pub const R_PEAK_OFFSET: usize = 139;

/// One of the four arrhythmia categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum BeatClass {
    Normal,
    Supraventricular,
    Ventricular,
    Fusion,
}

impl BeatClass {
    pub const ALL: [BeatClass; 4] = [
        BeatClass::Normal,
        BeatClass::Supraventricular,
        BeatClass::Ventricular,
        BeatClass::Fusion,
    ];

    /// Stable index used for one-hot encoding and report ordering.
    pub fn index(self) -> usize {
        match self {
            BeatClass::Normal => 0,
            BeatClass::Supraventricular => 1,
            BeatClass::Ventricular => 2,
            BeatClass::Fusion => 3,
        }
    }

    pub fn from_index(i: usize) -> Option<BeatClass> {
        BeatClass::ALL.get(i).copied()
    }

    /// Single-letter category code.
    pub fn letter(self) -> char {
        match self {
            BeatClass::Normal => 'N',
            BeatClass::Supraventricular => 'S',
            BeatClass::Ventricular => 'V',
            BeatClass::Fusion => 'F',
        }
    }

    pub fn from_letter(c: char) -> Option<BeatClass> {
        match c {
            'N' => Some(BeatClass::Normal),
            'S' => Some(BeatClass::Supraventricular),
            'V' => Some(BeatClass::Ventricular),
            'F' => Some(BeatClass::Fusion),
            _ => None,
        }
    }
}

impl core::fmt::Display for BeatClass {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// A normalized beat window plus its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Beat {
    /// Exactly [`BEAT_LEN`] samples in `[0, 1]`.
    pub samples: Vec<f64>,
    pub label: BeatClass,
    /// Source record id; synthetic beats inherit their base beat's id.
    pub record_id: String,
    /// Sample index of the R peak in the source record.
    pub r_peak_index: usize,
    /// True for SMOTE or generator output, false for extracted beats.
    pub synthetic: bool,
}

impl Beat {
    pub fn new(
        samples: Vec<f64>,
        label: BeatClass,
        record_id: String,
        r_peak_index: usize,
        synthetic: bool,
    ) -> Result<Self> {
        if samples.len() != BEAT_LEN {
            return Err(Error::shape(
                "beat construction",
                format!("expected {BEAT_LEN} samples, got {}", samples.len()),
            ));
        }
        for (i, &v) in samples.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::non_finite("beat construction", format!("sample {i} is {v}")));
            }
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(
                    "beat construction",
                    format!("sample {i} = {v} outside [0, 1]"),
                ));
            }
        }
        Ok(Beat { samples, label, record_id, r_peak_index, synthetic })
    }
}

/// Min-max normalization of a raw window into `[0, 1]`. A constant
/// window has no scale and is rejected.
pub fn normalize_window(window: &[f64]) -> Result<Vec<f64>> {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in window {
        if !v.is_finite() {
            return Err(Error::non_finite("window normalization", format!("sample value {v}")));
        }
        if v < min {
            min = v;
        }
        if v > max {
            max = v;
        }
    }
    if window.is_empty() || min == max {
        return Err(Error::degenerate(
            "window normalization",
            format!("constant window (min == max == {min})"),
        ));
    }
    let scale = 1.0 / (max - min);
    Ok(window.iter().map(|&v| (v - min) * scale).collect())
}
