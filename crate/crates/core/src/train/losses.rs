//! Loss terms and their gradients.
//!
//! Every function returns the scalar loss together with the gradient with
//! respect to its first argument(s), already divided by the batch size, so
//! callers can feed the gradients straight into the model backward passes.

use alloc::format;

use crate::error::{Error, Result};
use crate::fmath;
use crate::tensor::Tensor;

/// Probabilities below this are clamped before taking the log.
pub const PROB_FLOOR: f64 = 1e-12;

fn batch_of(t: &Tensor, context: &'static str) -> Result<usize> {
    if t.rank() != 2 {
        return Err(Error::shape(context, format!("expected rank-2 tensor, got {:?}", t.shape())));
    }
    Ok(t.dim(0))
}

/// Least-squares discriminator loss: mean over the batch of
/// `(d_real - 1)^2 + d_fake^2`, with gradients for both score vectors.
pub fn adversarial_d(d_real: &Tensor, d_fake: &Tensor) -> Result<(f64, Tensor, Tensor)> {
    let b = batch_of(d_real, "adversarial_d")?;
    if d_real.shape() != d_fake.shape() || d_real.dim(1) != 1 {
        return Err(Error::shape(
            "adversarial_d",
            format!("scores must both be [batch, 1], got {:?} and {:?}", d_real.shape(), d_fake.shape()),
        ));
    }
    let inv_b = 1.0 / b as f64;
    let mut loss = 0.0;
    let mut grad_real = Tensor::zeros(&[b, 1]);
    let mut grad_fake = Tensor::zeros(&[b, 1]);
    for i in 0..b {
        let r = d_real.data()[i];
        let f = d_fake.data()[i];
        loss += ((r - 1.0) * (r - 1.0) + f * f) * inv_b;
        grad_real.data_mut()[i] = 2.0 * (r - 1.0) * inv_b;
        grad_fake.data_mut()[i] = 2.0 * f * inv_b;
    }
    Ok((loss, grad_real, grad_fake))
}

/// Least-squares generator loss: mean over the batch of `(d_fake - 1)^2`.
pub fn adversarial_g(d_fake: &Tensor) -> Result<(f64, Tensor)> {
    let b = batch_of(d_fake, "adversarial_g")?;
    if d_fake.dim(1) != 1 {
        return Err(Error::shape(
            "adversarial_g",
            format!("scores must be [batch, 1], got {:?}", d_fake.shape()),
        ));
    }
    let inv_b = 1.0 / b as f64;
    let mut loss = 0.0;
    let mut grad = Tensor::zeros(&[b, 1]);
    for i in 0..b {
        let f = d_fake.data()[i];
        loss += (f - 1.0) * (f - 1.0) * inv_b;
        grad.data_mut()[i] = 2.0 * (f - 1.0) * inv_b;
    }
    Ok((loss, grad))
}

/// Categorical cross-entropy against one-hot targets, mean over the batch.
///
/// Probabilities are clamped at [`PROB_FLOOR`]; a clamped coordinate
/// contributes zero gradient.
pub fn class_cross_entropy(probs: &Tensor, one_hot: &Tensor) -> Result<(f64, Tensor)> {
    let b = batch_of(probs, "class_cross_entropy")?;
    if probs.shape() != one_hot.shape() {
        return Err(Error::shape(
            "class_cross_entropy",
            format!("probs {:?} vs targets {:?}", probs.shape(), one_hot.shape()),
        ));
    }
    let inv_b = 1.0 / b as f64;
    let mut loss = 0.0;
    let mut grad = Tensor::zeros(probs.shape());
    for (i, (&p, &t)) in probs.data().iter().zip(one_hot.data()).enumerate() {
        if t == 0.0 {
            continue;
        }
        if p >= PROB_FLOOR {
            loss -= t * fmath::ln(p) * inv_b;
            grad.data_mut()[i] = -t / p * inv_b;
        } else {
            loss -= t * fmath::ln(PROB_FLOOR) * inv_b;
        }
    }
    Ok((loss, grad))
}

/// Mean squared error over every sample of every beat in the batch.
pub fn reconstruction_mse(output: &Tensor, target: &Tensor) -> Result<(f64, Tensor)> {
    if output.shape() != target.shape() || output.rank() != 2 {
        return Err(Error::shape(
            "reconstruction_mse",
            format!("expected matching [batch, len], got {:?} and {:?}", output.shape(), target.shape()),
        ));
    }
    let inv_n = 1.0 / output.len() as f64;
    let mut loss = 0.0;
    let mut grad = Tensor::zeros(output.shape());
    for i in 0..output.len() {
        let d = output.data()[i] - target.data()[i];
        loss += d * d * inv_n;
        grad.data_mut()[i] = 2.0 * d * inv_n;
    }
    Ok((loss, grad))
}
