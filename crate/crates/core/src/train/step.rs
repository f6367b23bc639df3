//! One adversarial optimization step: discriminator phase, then generator
//! phase, sharing a single noise draw.
//!
//! Freezing contract: during the discriminator phase the generator runs with
//! frozen batch statistics and never receives an optimizer step; during the
//! generator phase the discriminator likewise runs frozen. Each network's
//! running statistics therefore advance exactly once per step, in its own
//! phase.

use alloc::format;

use crate::adam::Adam;
use crate::error::{Error, Result};
use crate::model::{DiscriminatorModel, GeneratorModel};
use crate::nn::Mode;
use crate::params::ParamSet;
use crate::tensor::Tensor;
use crate::train::config::TrainingConfig;
use crate::train::losses;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DPhaseLosses {
    pub adv: f64,
    /// Cross-entropy summed over the real and synthetic halves.
    pub class: f64,
    pub total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GPhaseLosses {
    pub adv: f64,
    pub rec: f64,
    pub class: f64,
    pub total: f64,
}

/// All loss terms of one step, unweighted except the totals.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StepLosses {
    pub d_adv: f64,
    pub d_class: f64,
    pub d_total: f64,
    pub g_adv: f64,
    pub g_rec: f64,
    pub g_class: f64,
    pub g_total: f64,
}

fn ensure_finite(term: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::non_finite(term, format!("loss term evaluated to {value}")))
    }
}

fn check_batch(x: &Tensor, context: &'static str) -> Result<()> {
    if x.rank() != 2 || x.dim(0) < 2 {
        return Err(Error::invalid(
            context,
            format!("need a [batch >= 2, len] signal tensor, got {:?}", x.shape()),
        ));
    }
    Ok(())
}

/// Update the discriminator on one batch of real beats `x` with labels `y`
/// and synthetic beats generated from `(x, y, z)`.
pub fn discriminator_phase(
    g: &mut GeneratorModel,
    d: &mut DiscriminatorModel,
    opt_d: &mut Adam,
    x: &Tensor,
    y: &Tensor,
    z: &Tensor,
    cfg: &TrainingConfig,
) -> Result<DPhaseLosses> {
    check_batch(x, "discriminator phase")?;
    let (fake, _) = g.forward_train(x, y, z, Mode::Frozen)?;

    let (out_real, cache_real) = d.forward_train(x, y, Mode::Train)?;
    let (out_fake, cache_fake) = d.forward_train(&fake, y, Mode::Train)?;

    let (adv, grad_real, grad_fake) = losses::adversarial_d(&out_real.realness, &out_fake.realness)?;
    let (ce_real, grad_probs_real) = losses::class_cross_entropy(&out_real.class_probs, y)?;
    let (ce_fake, grad_probs_fake) = losses::class_cross_entropy(&out_fake.class_probs, y)?;
    let adv = ensure_finite("discriminator adversarial loss", adv)?;
    let class = ensure_finite("discriminator class loss", ce_real + ce_fake)?;
    let total = ensure_finite("discriminator total loss", adv + cfg.lambda_class * class)?;

    d.zero_grads();
    d.backward(&cache_real, &scaled(&grad_probs_real, cfg.lambda_class), &grad_real)?;
    d.backward(&cache_fake, &scaled(&grad_probs_fake, cfg.lambda_class), &grad_fake)?;
    opt_d.step(d)?;

    Ok(DPhaseLosses { adv, class, total })
}

/// Update the generator on one batch, chaining gradients through a frozen
/// discriminator.
pub fn generator_phase(
    g: &mut GeneratorModel,
    d: &mut DiscriminatorModel,
    opt_g: &mut Adam,
    x: &Tensor,
    y: &Tensor,
    z: &Tensor,
    cfg: &TrainingConfig,
) -> Result<GPhaseLosses> {
    check_batch(x, "generator phase")?;
    let (fake, cache_g) = g.forward_train(x, y, z, Mode::Train)?;
    let (out, cache_d) = d.forward_train(&fake, y, Mode::Frozen)?;

    let (adv, grad_realness) = losses::adversarial_g(&out.realness)?;
    let (rec, grad_rec) = losses::reconstruction_mse(&fake, x)?;
    let (class, grad_probs) = losses::class_cross_entropy(&out.class_probs, y)?;
    let adv = ensure_finite("generator adversarial loss", adv)?;
    let rec = ensure_finite("generator reconstruction loss", rec)?;
    let class = ensure_finite("generator class loss", class)?;
    let total = ensure_finite(
        "generator total loss",
        adv + cfg.lambda_rec * rec + cfg.lambda_class * class,
    )?;

    // The discriminator accumulates parameter gradients here as a side
    // effect of the chain rule; they are discarded by the zero_grads at the
    // start of the next discriminator phase.
    let mut grad_fake = d.backward(&cache_d, &scaled(&grad_probs, cfg.lambda_class), &grad_realness)?;
    for (gf, gr) in grad_fake.data_mut().iter_mut().zip(grad_rec.data()) {
        *gf += cfg.lambda_rec * gr;
    }

    g.zero_grads();
    g.backward(&cache_g, &grad_fake)?;
    opt_g.step(g)?;

    Ok(GPhaseLosses { adv, rec, class, total })
}

/// One full training step on a batch: discriminator phase then generator
/// phase, both using the same noise tensor `z`.
pub fn train_step(
    g: &mut GeneratorModel,
    d: &mut DiscriminatorModel,
    opt_g: &mut Adam,
    opt_d: &mut Adam,
    x: &Tensor,
    y: &Tensor,
    z: &Tensor,
    cfg: &TrainingConfig,
) -> Result<StepLosses> {
    let dp = discriminator_phase(g, d, opt_d, x, y, z, cfg)?;
    let gp = generator_phase(g, d, opt_g, x, y, z, cfg)?;
    Ok(StepLosses {
        d_adv: dp.adv,
        d_class: dp.class,
        d_total: dp.total,
        g_adv: gp.adv,
        g_rec: gp.rec,
        g_class: gp.class,
        g_total: gp.total,
    })
}

fn scaled(t: &Tensor, s: f64) -> Tensor {
    let mut out = t.clone();
    for v in out.data_mut() {
        *v *= s;
    }
    out
}
