//! Batch normalization over the channel axis of `[batch, length,
//! channels]` activations.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fmath;
use crate::params::ParamSet;
use crate::tensor::Tensor;

/// How a forward pass treats batch statistics.
///
/// * `Train`: normalize with the current mini-batch's statistics and
///   fold them into the running estimates.
/// * `Frozen`: normalize with mini-batch statistics but leave the
///   running estimates untouched. Used when a network participates in
///   the other network's update step: its parameters and buffers must
///   come out bit-identical.
/// * `Infer`: normalize with the stored running estimates; no batch
///   statistics are computed, so there is nothing to backpropagate
///   through.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Frozen,
    Infer,
}

/// Values the backward pass needs from the forward pass.
#[derive(Debug, Clone)]
pub struct BnCache {
    /// Normalized activations, same element count as the input.
    pub xhat: Vec<f64>,
    /// Per-channel `1 / sqrt(var + eps)`.
    pub inv_std: Vec<f64>,
}

/// Per-channel affine batch normalization.
///
/// Statistics are taken over `batch * length` positions per channel
/// with the biased variance estimator. Running statistics are updated
/// as `running = momentum * running + (1 - momentum) * batch_stat`.
#[derive(Debug, Clone)]
pub struct BatchNorm1d {
    pub gamma: Tensor,
    pub beta: Tensor,
    pub running_mean: Tensor,
    pub running_var: Tensor,
    pub eps: f64,
    pub momentum: f64,
}

pub const BN_EPS: f64 = 1e-5;
pub const BN_MOMENTUM: f64 = 0.9;

impl BatchNorm1d {
    pub fn new(channels: usize) -> Result<Self> {
        if channels == 0 {
            return Err(Error::invalid("batchnorm construction", "channels must be >= 1"));
        }
        Ok(BatchNorm1d {
            gamma: Tensor::filled(&[channels], 1.0),
            beta: Tensor::zeros(&[channels]),
            running_mean: Tensor::zeros(&[channels]),
            running_var: Tensor::filled(&[channels], 1.0),
            eps: BN_EPS,
            momentum: BN_MOMENTUM,
        })
    }

    pub fn channels(&self) -> usize {
        self.gamma.len()
    }

    fn check_input(&self, input: &Tensor, context: &'static str) -> Result<()> {
        if input.rank() != 3 {
            return Err(Error::shape(
                context,
                format!("expected rank-3 [batch, length, channels], got {:?}", input.shape()),
            ));
        }
        if input.dim(2) != self.channels() {
            return Err(Error::shape(
                context,
                format!("input has {} channels, layer expects {}", input.dim(2), self.channels()),
            ));
        }
        Ok(())
    }

    /// Forward pass. `Train`/`Frozen` return a cache for backprop;
    /// `Infer` returns `None`.
    pub fn forward(&mut self, input: &Tensor, mode: Mode) -> Result<(Tensor, Option<BnCache>)> {
        self.check_input(input, "batchnorm forward")?;
        let (batch, len, ch) = (input.dim(0), input.dim(1), input.dim(2));
        let n = batch * len;
        match mode {
            Mode::Infer => {
                let mut out = Tensor::zeros(&[batch, len, ch]);
                let x = input.data();
                let o = out.data_mut();
                let mut scale = vec![0.0; ch];
                let mut shift = vec![0.0; ch];
                for c in 0..ch {
                    let inv = 1.0 / fmath::sqrt(self.running_var.data()[c] + self.eps);
                    scale[c] = self.gamma.data()[c] * inv;
                    shift[c] = self.beta.data()[c] - scale[c] * self.running_mean.data()[c];
                }
                for (o_row, x_row) in o.chunks_exact_mut(ch).zip(x.chunks_exact(ch)) {
                    for c in 0..ch {
                        o_row[c] = scale[c] * x_row[c] + shift[c];
                    }
                }
                Ok((out, None))
            }
            Mode::Train | Mode::Frozen => {
                if n < 2 {
                    return Err(Error::degenerate(
                        "batchnorm forward",
                        format!("batch statistics need >= 2 positions per channel, got {n}"),
                    ));
                }
                let x = input.data();
                let mut mean = vec![0.0; ch];
                for row in x.chunks_exact(ch) {
                    for (m, &v) in mean.iter_mut().zip(row) {
                        *m += v;
                    }
                }
                for m in mean.iter_mut() {
                    *m /= n as f64;
                }
                let mut var = vec![0.0; ch];
                for row in x.chunks_exact(ch) {
                    for c in 0..ch {
                        let d = row[c] - mean[c];
                        var[c] += d * d;
                    }
                }
                for v in var.iter_mut() {
                    *v /= n as f64;
                }

                let mut inv_std = vec![0.0; ch];
                for c in 0..ch {
                    inv_std[c] = 1.0 / fmath::sqrt(var[c] + self.eps);
                }

                let mut xhat = vec![0.0; x.len()];
                for (h_row, x_row) in xhat.chunks_exact_mut(ch).zip(x.chunks_exact(ch)) {
                    for c in 0..ch {
                        h_row[c] = (x_row[c] - mean[c]) * inv_std[c];
                    }
                }

                let mut out = Tensor::zeros(&[batch, len, ch]);
                {
                    let o = out.data_mut();
                    let g = self.gamma.data();
                    let be = self.beta.data();
                    for (o_row, h_row) in o.chunks_exact_mut(ch).zip(xhat.chunks_exact(ch)) {
                        for c in 0..ch {
                            o_row[c] = g[c] * h_row[c] + be[c];
                        }
                    }
                }

                if mode == Mode::Train {
                    let rm = self.running_mean.data_mut();
                    let rv = self.running_var.data_mut();
                    for c in 0..ch {
                        rm[c] = self.momentum * rm[c] + (1.0 - self.momentum) * mean[c];
                        rv[c] = self.momentum * rv[c] + (1.0 - self.momentum) * var[c];
                    }
                }

                Ok((out, Some(BnCache { xhat, inv_std })))
            }
        }
    }

    /// Backward through the batch-statistics normalization. Accumulates
    /// gamma/beta gradients and returns the input gradient.
    ///
    /// With `N` positions per channel and `g = gamma * inv_std`:
    /// `dx = g * (dy - mean(dy) - xhat * mean(dy * xhat))`.
    pub fn backward(&mut self, cache: &BnCache, grad_out: &Tensor) -> Result<Tensor> {
        self.check_input(grad_out, "batchnorm backward")?;
        let (batch, len, ch) = (grad_out.dim(0), grad_out.dim(1), grad_out.dim(2));
        let n = batch * len;
        if cache.xhat.len() != n * ch || cache.inv_std.len() != ch {
            return Err(Error::shape(
                "batchnorm backward",
                format!(
                    "cache holds {} activations / {} channels, grad_out implies {} / {ch}",
                    cache.xhat.len(),
                    cache.inv_std.len(),
                    n * ch
                ),
            ));
        }

        let gy = grad_out.data();
        let mut sum_dy = vec![0.0; ch];
        let mut sum_dy_xhat = vec![0.0; ch];
        for (gy_row, h_row) in gy.chunks_exact(ch).zip(cache.xhat.chunks_exact(ch)) {
            for c in 0..ch {
                sum_dy[c] += gy_row[c];
                sum_dy_xhat[c] += gy_row[c] * h_row[c];
            }
        }

        {
            let gg = self.gamma.grad_mut();
            for (ge, &s) in gg.iter_mut().zip(&sum_dy_xhat) {
                *ge += s;
            }
        }
        {
            let gb = self.beta.grad_mut();
            for (ge, &s) in gb.iter_mut().zip(&sum_dy) {
                *ge += s;
            }
        }

        let nf = n as f64;
        let mut coef = vec![0.0; ch];
        for c in 0..ch {
            coef[c] = self.gamma.data()[c] * cache.inv_std[c];
        }
        let mut grad_in = Tensor::zeros(&[batch, len, ch]);
        {
            let gx = grad_in.data_mut();
            for ((gx_row, gy_row), h_row) in gx
                .chunks_exact_mut(ch)
                .zip(gy.chunks_exact(ch))
                .zip(cache.xhat.chunks_exact(ch))
            {
                for c in 0..ch {
                    gx_row[c] =
                        coef[c] * (gy_row[c] - sum_dy[c] / nf - h_row[c] * sum_dy_xhat[c] / nf);
                }
            }
        }
        Ok(grad_in)
    }
}

impl ParamSet for BatchNorm1d {
    fn for_each_param(&self, f: &mut dyn FnMut(&str, &Tensor)) {
        f("gamma", &self.gamma);
        f("beta", &self.beta);
    }

    fn for_each_param_mut(&mut self, f: &mut dyn FnMut(&str, &mut Tensor)) {
        f("gamma", &mut self.gamma);
        f("beta", &mut self.beta);
    }

    fn for_each_state(&self, f: &mut dyn FnMut(&str, &Tensor)) {
        f("gamma", &self.gamma);
        f("beta", &self.beta);
        f("running_mean", &self.running_mean);
        f("running_var", &self.running_var);
    }

    fn for_each_state_mut(&mut self, f: &mut dyn FnMut(&str, &mut Tensor)) {
        f("gamma", &mut self.gamma);
        f("beta", &mut self.beta);
        f("running_mean", &mut self.running_mean);
        f("running_var", &mut self.running_var);
    }
}
