//! Train/test splitting: patient-stratified shuffling or the fixed
//! inter-patient record partition.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::data::beat::Beat;
use crate::error::{Error, Result};
use crate::seeds::seeded_stream;

/// Training-side records of the standard inter-patient partition.
pub const DS1: [&str; 22] = [
    "101", "106", "108", "109", "112", "114", "115", "116", "118", "119", "122",
    "124", "201", "203", "205", "207", "208", "209", "215", "220", "223", "230",
];

/// Held-out records of the standard inter-patient partition.
pub const DS2: [&str; 22] = [
    "100", "103", "105", "111", "113", "117", "121", "123", "200", "202", "210",
    "212", "213", "214", "219", "221", "222", "228", "231", "232", "233", "234",
];

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SplitMode {
    /// Pooled beats, seeded shuffle, leading fraction to train.
    Intra { train_fraction: f64 },
    /// Record-level partition by the DS1/DS2 lists.
    Inter,
}

/// Fraction used when none is specified.
pub const DEFAULT_TRAIN_FRACTION: f64 = 0.8;

/// Splits beats into (train, test).
///
/// Intra mode shuffles all beats with a ChaCha20 generator seeded by
/// `seed` (stream 0) and takes `floor(n * train_fraction)` for train.
/// Inter mode routes each beat by its record id; a record in neither
/// list is an error rather than silent leakage.
pub fn build_split(beats: Vec<Beat>, mode: SplitMode, seed: u64) -> Result<(Vec<Beat>, Vec<Beat>)> {
    match mode {
        SplitMode::Intra { train_fraction } => {
            if !(train_fraction > 0.0 && train_fraction < 1.0) {
                return Err(Error::invalid(
                    "intra split",
                    format!("train fraction must lie in (0, 1), got {train_fraction}"),
                ));
            }
            let mut order: Vec<usize> = (0..beats.len()).collect();
            let mut rng = seeded_stream(seed, 0);
            order.shuffle(&mut rng);
            let n_train = (beats.len() as f64 * train_fraction) as usize;
            let mut slots: Vec<Option<Beat>> = beats.into_iter().map(Some).collect();
            let mut train = Vec::with_capacity(n_train);
            let mut test = Vec::with_capacity(slots.len() - n_train);
            for (pos, &idx) in order.iter().enumerate() {
                let beat = slots[idx].take().expect("each index visited once");
                if pos < n_train {
                    train.push(beat);
                } else {
                    test.push(beat);
                }
            }
            Ok((train, test))
        }
        SplitMode::Inter => {
            let mut train = Vec::new();
            let mut test = Vec::new();
            for beat in beats {
                if DS1.contains(&beat.record_id.as_str()) {
                    train.push(beat);
                } else if DS2.contains(&beat.record_id.as_str()) {
                    test.push(beat);
                } else {
                    return Err(Error::UnknownRecord { record_id: beat.record_id.to_string() });
                }
            }
            Ok((train, test))
        }
    }
}

/// Per-class beat counts in index order N, S, V, F.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassCounts {
    pub counts: [usize; 4],
}

impl ClassCounts {
    pub fn of(beats: &[Beat]) -> Self {
        let mut counts = [0usize; 4];
        for b in beats {
            counts[b.label.index()] += 1;
        }
        ClassCounts { counts }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn max(&self) -> usize {
        *self.counts.iter().max().expect("fixed-size array")
    }
}
