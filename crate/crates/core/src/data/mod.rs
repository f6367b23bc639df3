//! Beat extraction, labeling, splitting, and class balancing.

mod beat;
mod labels;
mod records;
mod smote;
mod split;
mod synth;

pub use beat::{normalize_window, Beat, BeatClass, BEAT_LEN, R_PEAK_OFFSET};
pub use labels::{one_hot_batch, LabelMap};
pub use records::{extract_beats, Annotation, Extraction, RecordSource};
pub use smote::{smote_balance, smote_with_parents, SmoteParent, SMOTE_K};
pub use split::{build_split, ClassCounts, SplitMode, DEFAULT_TRAIN_FRACTION, DS1, DS2};
pub use synth::toy_beats;
