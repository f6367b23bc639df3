//! Epoch loop over a beat dataset.
//!
//! Epochs are 1-based. Each epoch draws its shuffle order and its noise from
//! dedicated seed streams keyed by the epoch number, so a run resumed at an
//! epoch boundary consumes exactly the same randomness as an uninterrupted
//! one.

use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::adam::Adam;
use crate::data::{one_hot_batch, Beat, BeatClass};
use crate::error::{Error, Result};
use crate::model::{make_noise, DiscriminatorModel, GeneratorModel};
use crate::seeds::{noise_stream, seeded_stream, shuffle_stream};
use crate::tensor::Tensor;
use crate::train::config::TrainingConfig;
use crate::train::step::{train_step, StepLosses};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StepRecord {
    pub epoch: usize,
    /// Global step counter, continuous across resumes.
    pub step: u64,
    pub losses: StepLosses,
}

/// Callbacks fired by [`train`]. Default implementations do nothing, so
/// observers override only what they need.
pub trait TrainObserver {
    fn on_step(&mut self, _record: &StepRecord) -> Result<()> {
        Ok(())
    }

    /// A per-class sample pair: the fixed reference beat and the current
    /// generator output for it.
    fn on_snapshot(
        &mut self,
        _epoch: usize,
        _class: BeatClass,
        _real: &[f64],
        _generated: &[f64],
    ) -> Result<()> {
        Ok(())
    }

    fn on_epoch_end(
        &mut self,
        _epoch: usize,
        _g: &mut GeneratorModel,
        _d: &mut DiscriminatorModel,
    ) -> Result<()> {
        Ok(())
    }
}

/// Observer that ignores everything.
pub struct NullObserver;

impl TrainObserver for NullObserver {}

/// Build `[batch, len]` signal and `[batch, classes]` one-hot tensors for
/// the beats selected by `idxs`.
pub fn batch_tensors(beats: &[Beat], idxs: &[usize]) -> Result<(Tensor, Tensor)> {
    if idxs.is_empty() {
        return Err(Error::invalid("batch assembly", "empty index list"));
    }
    let len = beats[idxs[0]].samples.len();
    let mut x = Tensor::zeros(&[idxs.len(), len]);
    let mut labels = Vec::with_capacity(idxs.len());
    for (row, &i) in idxs.iter().enumerate() {
        x.data_mut()[row * len..(row + 1) * len].copy_from_slice(&beats[i].samples);
        labels.push(beats[i].label);
    }
    Ok((x, one_hot_batch(&labels)?))
}

/// Run epochs `start_epoch + 1 ..= cfg.epochs`. `start_epoch` is 0 for a
/// fresh run, or the number of already-completed epochs when resuming.
/// Partial trailing batches are dropped. Returns the global step counter
/// after the final epoch.
pub fn train(
    g: &mut GeneratorModel,
    d: &mut DiscriminatorModel,
    opt_g: &mut Adam,
    opt_d: &mut Adam,
    beats: &[Beat],
    cfg: &TrainingConfig,
    start_epoch: usize,
    observer: &mut dyn TrainObserver,
) -> Result<u64> {
    cfg.validate()?;
    let input_len = g.arch().input_len;
    let steps_per_epoch = beats.len() / cfg.batch_size;
    if steps_per_epoch == 0 {
        return Err(Error::invalid(
            "train",
            alloc::format!(
                "{} beats cannot fill one batch of {}",
                beats.len(),
                cfg.batch_size
            ),
        ));
    }

    // Fixed per-class reference beats for snapshots: first occurrence of
    // each class in dataset order.
    let mut reference: [Option<usize>; 4] = [None; 4];
    for (i, b) in beats.iter().enumerate() {
        let slot = &mut reference[b.label.index()];
        if slot.is_none() {
            *slot = Some(i);
        }
    }

    let mut step = start_epoch as u64 * steps_per_epoch as u64;
    let mut order: Vec<usize> = (0..beats.len()).collect();
    for epoch in start_epoch + 1..=cfg.epochs {
        let mut shuffle_rng = seeded_stream(cfg.seed, shuffle_stream(epoch));
        let mut noise_rng = seeded_stream(cfg.seed, noise_stream(epoch));
        order.shuffle(&mut shuffle_rng);

        for chunk in order.chunks_exact(cfg.batch_size) {
            let (x, y) = batch_tensors(beats, chunk)?;
            let z = make_noise(&mut noise_rng, cfg.batch_size, input_len, cfg.noise_sigma)?;
            let losses = train_step(g, d, opt_g, opt_d, &x, &y, &z, cfg)?;
            step += 1;
            observer.on_step(&StepRecord { epoch, step, losses })?;
        }

        if cfg.snapshot_every != 0 && epoch % cfg.snapshot_every == 0 {
            for class in BeatClass::ALL {
                let Some(i) = reference[class.index()] else { continue };
                let (x, y) = batch_tensors(beats, &[i])?;
                let z = make_noise(&mut noise_rng, 1, input_len, cfg.noise_sigma)?;
                let generated = g.synthesize(&x, &y, &z)?;
                observer.on_snapshot(epoch, class, &beats[i].samples, generated.data())?;
            }
        }
        observer.on_epoch_end(epoch, g, d)?;
    }
    Ok(step)
}
