//! Confusion-matrix classification metrics and rank-based AUC.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Square confusion matrix; rows are true labels, columns predictions.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConfusionMatrix {
    n_classes: usize,
    counts: Vec<usize>,
}

impl ConfusionMatrix {
    pub fn new(n_classes: usize) -> Result<Self> {
        if n_classes < 2 {
            return Err(Error::invalid(
                "confusion matrix",
                format!("need at least 2 classes, got {n_classes}"),
            ));
        }
        Ok(ConfusionMatrix { n_classes, counts: vec![0; n_classes * n_classes] })
    }

    /// Build from `(true_label, prediction)` pairs.
    pub fn from_pairs(n_classes: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::invalid("confusion matrix", "empty prediction list"));
        }
        let mut m = Self::new(n_classes)?;
        for &(label, pred) in pairs {
            m.add(label, pred)?;
        }
        Ok(m)
    }

    pub fn add(&mut self, label: usize, pred: usize) -> Result<()> {
        if label >= self.n_classes || pred >= self.n_classes {
            return Err(Error::invalid(
                "confusion matrix",
                format!("pair ({label}, {pred}) outside {} classes", self.n_classes),
            ));
        }
        self.counts[label * self.n_classes + pred] += 1;
        Ok(())
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn count(&self, label: usize, pred: usize) -> usize {
        self.counts[label * self.n_classes + pred]
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn trace(&self) -> usize {
        (0..self.n_classes).map(|i| self.count(i, i)).sum()
    }

    /// Number of samples whose true label is `c`.
    pub fn support(&self, c: usize) -> usize {
        (0..self.n_classes).map(|p| self.count(c, p)).sum()
    }

    pub fn predicted(&self, c: usize) -> usize {
        (0..self.n_classes).map(|l| self.count(l, c)).sum()
    }
}

/// One-vs-rest metrics for a single class. Ratios with a zero denominator
/// are reported as 0 with `degenerate` set.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassMetrics {
    pub class: String,
    pub support: usize,
    pub sensitivity: f64,
    pub specificity: f64,
    pub precision: f64,
    pub f1: f64,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassificationReport {
    pub accuracy: f64,
    pub classes: Vec<ClassMetrics>,
    pub confusion: ConfusionMatrix,
    /// Present only for binary tasks scored with a continuous output.
    pub auc: Option<f64>,
}

fn ratio(num: usize, den: usize, degenerate: &mut bool) -> f64 {
    if den == 0 {
        *degenerate = true;
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl ClassificationReport {
    pub fn from_confusion(
        confusion: ConfusionMatrix,
        class_names: &[&str],
        auc: Option<f64>,
    ) -> Result<Self> {
        if class_names.len() != confusion.n_classes() {
            return Err(Error::invalid(
                "classification report",
                format!(
                    "{} class names for {} classes",
                    class_names.len(),
                    confusion.n_classes()
                ),
            ));
        }
        let total = confusion.total();
        if total == 0 {
            return Err(Error::invalid("classification report", "empty confusion matrix"));
        }
        let mut classes = Vec::with_capacity(class_names.len());
        for (c, name) in class_names.iter().enumerate() {
            let tp = confusion.count(c, c);
            let support = confusion.support(c);
            let fn_ = support - tp;
            let fp = confusion.predicted(c) - tp;
            let tn = total - tp - fn_ - fp;
            let mut degenerate = false;
            let sensitivity = ratio(tp, tp + fn_, &mut degenerate);
            let specificity = ratio(tn, tn + fp, &mut degenerate);
            let precision = ratio(tp, tp + fp, &mut degenerate);
            let f1 = if precision + sensitivity == 0.0 {
                degenerate = true;
                0.0
            } else {
                2.0 * precision * sensitivity / (precision + sensitivity)
            };
            classes.push(ClassMetrics {
                class: String::from(*name),
                support,
                sensitivity,
                specificity,
                precision,
                f1,
                degenerate,
            });
        }
        Ok(ClassificationReport {
            accuracy: confusion.trace() as f64 / total as f64,
            classes,
            confusion,
            auc,
        })
    }
}

/// Mann-Whitney AUC with midrank tie handling: the probability that a
/// random positive outscores a random negative, ties counting half.
pub fn auc(scores: &[f64], positive: &[bool]) -> Result<f64> {
    if scores.len() != positive.len() || scores.is_empty() {
        return Err(Error::shape(
            "auc",
            format!("need equal nonzero lengths, got {} and {}", scores.len(), positive.len()),
        ));
    }
    if scores.iter().any(|v| !v.is_finite()) {
        return Err(Error::non_finite("auc", "scores contain a non-finite value"));
    }
    let n_pos = positive.iter().filter(|&&p| p).count();
    let n_neg = scores.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::degenerate("auc", "both classes must be present"));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).expect("finite scores"));

    // Rank sum of positives, averaging ranks across tied score groups.
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        // 1-based ranks i+1 ..= j share the midrank.
        let midrank = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            if positive[idx] {
                rank_sum += midrank;
            }
        }
        i = j;
    }
    let n_pos_f = n_pos as f64;
    Ok((rank_sum - n_pos_f * (n_pos_f + 1.0) / 2.0) / (n_pos_f * n_neg as f64))
}
