//! Mapping from annotation symbols to the four beat categories, and
//! one-hot encoding.

use alloc::vec::Vec;

use crate::data::beat::BeatClass;
use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// Symbol-to-category table.
///
/// The default grouping follows the AAMI convention over MIT-BIH
/// annotation symbols:
///
/// * Normal: `N L R e j`
/// * Supraventricular: `A a J S`
/// * Ventricular: `V E`
/// * Fusion: `F`
///
/// Symbols outside the table (paced beats, unclassifiable beats,
/// non-beat annotations) map to `None` and are skipped upstream.
#[derive(Debug, Clone)]
pub struct LabelMap {
    entries: Vec<(char, BeatClass)>,
}

impl Default for LabelMap {
    fn default() -> Self {
        use BeatClass::*;
        LabelMap {
            entries: alloc::vec![
                ('N', Normal),
                ('L', Normal),
                ('R', Normal),
                ('e', Normal),
                ('j', Normal),
                ('A', Supraventricular),
                ('a', Supraventricular),
                ('J', Supraventricular),
                ('S', Supraventricular),
                ('V', Ventricular),
                ('E', Ventricular),
                ('F', Fusion),
            ],
        }
    }
}

impl LabelMap {
    pub fn map(&self, symbol: char) -> Option<BeatClass> {
        self.entries.iter().find(|(s, _)| *s == symbol).map(|(_, c)| *c)
    }

    pub fn symbols_for(&self, class: BeatClass) -> Vec<char> {
        self.entries.iter().filter(|(_, c)| *c == class).map(|(s, _)| *s).collect()
    }
}

/// One-hot rows for a label batch: `[batch, 4]`.
pub fn one_hot_batch(labels: &[BeatClass]) -> Result<Tensor> {
    if labels.is_empty() {
        return Err(Error::invalid("one-hot encoding", "empty label batch"));
    }
    let mut t = Tensor::zeros(&[labels.len(), BeatClass::ALL.len()]);
    for (b, &label) in labels.iter().enumerate() {
        t.row2_mut(b)[label.index()] = 1.0;
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grouping() {
        let m = LabelMap::default();
        for s in ['N', 'L', 'R', 'e', 'j'] {
            assert_eq!(m.map(s), Some(BeatClass::Normal), "{s}");
        }
        for s in ['A', 'a', 'J', 'S'] {
            assert_eq!(m.map(s), Some(BeatClass::Supraventricular), "{s}");
        }
        for s in ['V', 'E'] {
            assert_eq!(m.map(s), Some(BeatClass::Ventricular), "{s}");
        }
        assert_eq!(m.map('F'), Some(BeatClass::Fusion));
        // excluded symbols
        for s in ['/', 'Q', 'f', '+', '~', '|', 'x'] {
            assert_eq!(m.map(s), None, "{s}");
        }
    }

    #[test]
    fn one_hot_rows() {
        let t = one_hot_batch(&[BeatClass::Ventricular, BeatClass::Normal]).unwrap();
        assert_eq!(t.shape(), &[2, 4]);
        assert_eq!(t.row2(0), &[0.0, 0.0, 1.0, 0.0]);
        assert_eq!(t.row2(1), &[1.0, 0.0, 0.0, 0.0]);
    }
}
