//! Evaluation protocols: generator similarity and discriminator
//! classification/detection, behind small traits so protocol logic can be
//! exercised with analytic stubs.

use alloc::format;
use alloc::vec::Vec;

use crate::data::{one_hot_batch, Beat, BeatClass};
use crate::error::{Error, Result};
use crate::metrics::classification::{auc, ClassificationReport, ConfusionMatrix};
use crate::metrics::similarity::{
    ClassSimilarity, SimilarityAccumulator, SimilarityReport, SsimConfig,
};
use crate::model::{make_noise, DiscriminatorModel, DiscriminatorOut, GeneratorModel};
use crate::seeds::seeded_stream;
use crate::tensor::Tensor;

/// Evaluation batch size. Inference is row-independent, so chunking does
/// not change results; it only bounds activation memory.
pub const EVAL_CHUNK: usize = 64;

/// Realness scores strictly above this are predicted "real".
pub const DETECTION_THRESHOLD: f64 = 0.5;

pub const DETECTION_CLASS_NAMES: [&str; 2] = ["synthetic", "real"];

/// Anything that maps `(x, y, z)` batches to synthesized beats.
pub trait Synthesizer {
    fn beat_len(&self) -> usize;
    fn synthesize_batch(&mut self, x: &Tensor, y: &Tensor, z: &Tensor) -> Result<Tensor>;
}

impl Synthesizer for GeneratorModel {
    fn beat_len(&self) -> usize {
        self.arch().input_len
    }

    fn synthesize_batch(&mut self, x: &Tensor, y: &Tensor, z: &Tensor) -> Result<Tensor> {
        self.synthesize(x, y, z)
    }
}

/// Anything that scores conditioned beats with class probabilities and a
/// realness estimate.
pub trait BeatScorer {
    fn score_batch(&mut self, x: &Tensor, y: &Tensor) -> Result<DiscriminatorOut>;
}

impl BeatScorer for DiscriminatorModel {
    fn score_batch(&mut self, x: &Tensor, y: &Tensor) -> Result<DiscriminatorOut> {
        self.score(x, y)
    }
}

fn signals_and_labels(beats: &[Beat], len: usize) -> Result<(Vec<f64>, Vec<BeatClass>)> {
    if beats.is_empty() {
        return Err(Error::invalid("evaluation", "empty beat set"));
    }
    let mut flat = Vec::with_capacity(beats.len() * len);
    let mut labels = Vec::with_capacity(beats.len());
    for b in beats {
        if b.samples.len() != len {
            return Err(Error::shape(
                "evaluation",
                format!("beat of length {} in a length-{len} evaluation", b.samples.len()),
            ));
        }
        flat.extend_from_slice(&b.samples);
        labels.push(b.label);
    }
    Ok((flat, labels))
}

fn chunk_tensor(flat: &[f64], len: usize, start: usize, count: usize) -> Tensor {
    Tensor::from_vec(&[count, len], flat[start * len..(start + count) * len].to_vec())
        .expect("chunk extents are consistent by construction")
}

/// Synthesize one beat per input beat, conditioned on its true label, with
/// fresh seeded noise. Returns the flat `[n * len]` synthetic signals.
fn synthesize_all(
    synth: &mut dyn Synthesizer,
    flat: &[f64],
    labels: &[BeatClass],
    noise_sigma: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    let len = synth.beat_len();
    let n = labels.len();
    let mut rng = seeded_stream(seed, 0);
    let mut out = Vec::with_capacity(flat.len());
    let mut start = 0;
    while start < n {
        let count = EVAL_CHUNK.min(n - start);
        let x = chunk_tensor(flat, len, start, count);
        let y = one_hot_batch(&labels[start..start + count])?;
        let z = make_noise(&mut rng, count, len, noise_sigma)?;
        let g = synth.synthesize_batch(&x, &y, &z)?;
        if g.shape() != [count, len] {
            return Err(Error::shape(
                "evaluation",
                format!("synthesizer returned {:?} for a [{count}, {len}] batch", g.shape()),
            ));
        }
        out.extend_from_slice(g.data());
        start += count;
    }
    Ok(out)
}

/// Synthesize one beat per input beat under its true label with fresh
/// seeded noise, carrying provenance over with the synthetic flag set.
/// Draws the same noise stream as the evaluation protocols, so a shared
/// seed yields exactly the adversarial set they score.
pub fn synthesize_set(
    synth: &mut dyn Synthesizer,
    beats: &[Beat],
    noise_sigma: f64,
    seed: u64,
) -> Result<Vec<Beat>> {
    let len = synth.beat_len();
    let (flat, labels) = signals_and_labels(beats, len)?;
    let raw = synthesize_all(synth, &flat, &labels, noise_sigma, seed)?;
    let mut out = Vec::with_capacity(beats.len());
    for (i, b) in beats.iter().enumerate() {
        out.push(Beat::new(
            raw[i * len..(i + 1) * len].to_vec(),
            b.label,
            b.record_id.clone(),
            b.r_peak_index,
            true,
        )?);
    }
    Ok(out)
}

/// Similarity of generator output against the source beats: synthesize
/// each test beat with its true label and fresh seeded noise, then average
/// the four metrics overall and per class.
pub fn evaluate_generator(
    synth: &mut dyn Synthesizer,
    beats: &[Beat],
    noise_sigma: f64,
    seed: u64,
    ssim_cfg: &SsimConfig,
) -> Result<SimilarityReport> {
    let len = synth.beat_len();
    let (flat, labels) = signals_and_labels(beats, len)?;
    let synthetic = synthesize_all(synth, &flat, &labels, noise_sigma, seed)?;

    let mut overall = SimilarityAccumulator::default();
    let mut per_class: [SimilarityAccumulator; 4] = Default::default();
    for (i, &label) in labels.iter().enumerate() {
        let real = &flat[i * len..(i + 1) * len];
        let gen = &synthetic[i * len..(i + 1) * len];
        overall.add_pair(gen, real, ssim_cfg)?;
        per_class[label.index()].add_pair(gen, real, ssim_cfg)?;
    }
    let mut blocks = Vec::new();
    for class in BeatClass::ALL {
        let acc = &per_class[class.index()];
        if acc.n_pairs() > 0 {
            blocks.push(ClassSimilarity {
                class: format!("{class}"),
                stats: acc.finish()?,
            });
        }
    }
    Ok(SimilarityReport { overall: overall.finish()?, per_class: blocks })
}

/// Predict a class for every signal by self-consistency: feed each
/// candidate label k as the conditioning input and read the probability
/// the class head assigns to k itself; predict the argmax over k. Any
/// conditioning echo the head learned contributes symmetrically to every
/// candidate and cancels in the comparison.
fn classify_self_consistency(
    scorer: &mut dyn BeatScorer,
    flat: &[f64],
    n: usize,
    len: usize,
) -> Result<Vec<usize>> {
    let mut best_p = alloc::vec![f64::NEG_INFINITY; n];
    let mut pred = alloc::vec![0usize; n];
    let mut start = 0;
    while start < n {
        let count = EVAL_CHUNK.min(n - start);
        let x = chunk_tensor(flat, len, start, count);
        for k in 0..4 {
            let mut y = Tensor::zeros(&[count, 4]);
            for row in 0..count {
                y.data_mut()[row * 4 + k] = 1.0;
            }
            let out = scorer.score_batch(&x, &y)?;
            for row in 0..count {
                let p = out.class_probs.data()[row * 4 + k];
                if p > best_p[start + row] {
                    best_p[start + row] = p;
                    pred[start + row] = k;
                }
            }
        }
        start += count;
    }
    Ok(pred)
}

/// Realness scores under true-label conditioning.
fn realness_scores(
    scorer: &mut dyn BeatScorer,
    flat: &[f64],
    labels: &[BeatClass],
    len: usize,
) -> Result<Vec<f64>> {
    let n = labels.len();
    let mut scores = Vec::with_capacity(n);
    let mut start = 0;
    while start < n {
        let count = EVAL_CHUNK.min(n - start);
        let x = chunk_tensor(flat, len, start, count);
        let y = one_hot_batch(&labels[start..start + count])?;
        let out = scorer.score_batch(&x, &y)?;
        scores.extend_from_slice(out.realness.data());
        start += count;
    }
    Ok(scores)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DiscriminatorEvaluation {
    /// 4-class report on the real test beats.
    pub class_real: ClassificationReport,
    /// 4-class report on the synthesized counterparts.
    pub class_adversarial: ClassificationReport,
    /// Real-vs-synthetic detection on the 50/50 union, positive = real.
    pub detection: ClassificationReport,
}

/// Full discriminator evaluation: 4-class classification on the real set
/// and on an adversarial set synthesized from those same beats, plus
/// detection on the exact 50/50 union of the two.
pub fn evaluate_discriminator(
    scorer: &mut dyn BeatScorer,
    synth: &mut dyn Synthesizer,
    beats: &[Beat],
    noise_sigma: f64,
    seed: u64,
) -> Result<DiscriminatorEvaluation> {
    let len = synth.beat_len();
    let (real_flat, labels) = signals_and_labels(beats, len)?;
    let fake_flat = synthesize_all(synth, &real_flat, &labels, noise_sigma, seed)?;
    let n = labels.len();

    let class_names = ["N", "S", "V", "F"];
    let mut real_pairs = Vec::with_capacity(n);
    for (i, p) in classify_self_consistency(scorer, &real_flat, n, len)?.into_iter().enumerate() {
        real_pairs.push((labels[i].index(), p));
    }
    let class_real = ClassificationReport::from_confusion(
        ConfusionMatrix::from_pairs(4, &real_pairs)?,
        &class_names,
        None,
    )?;

    let mut adv_pairs = Vec::with_capacity(n);
    for (i, p) in classify_self_consistency(scorer, &fake_flat, n, len)?.into_iter().enumerate() {
        adv_pairs.push((labels[i].index(), p));
    }
    let class_adversarial = ClassificationReport::from_confusion(
        ConfusionMatrix::from_pairs(4, &adv_pairs)?,
        &class_names,
        None,
    )?;

    // Detection set: all n reals then their n synthetic counterparts.
    let mut scores = realness_scores(scorer, &real_flat, &labels, len)?;
    scores.extend(realness_scores(scorer, &fake_flat, &labels, len)?);
    let mut is_real = alloc::vec![true; n];
    is_real.extend(core::iter::repeat(false).take(n));
    let detection_auc = auc(&scores, &is_real)?;
    let mut det = ConfusionMatrix::new(2)?;
    for (s, &real) in scores.iter().zip(&is_real) {
        let pred = usize::from(*s > DETECTION_THRESHOLD);
        det.add(usize::from(real), pred)?;
    }
    let detection =
        ClassificationReport::from_confusion(det, &DETECTION_CLASS_NAMES, Some(detection_auc))?;

    Ok(DiscriminatorEvaluation { class_real, class_adversarial, detection })
}
