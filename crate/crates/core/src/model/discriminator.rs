//! The dual-headed discriminator: class probabilities + realness score.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::arch::DiscriminatorArch;
use crate::model::blocks::{BlockCache, ConvBlock};
use crate::model::inputs::{assemble_discriminator_input, extract_signal_channel};
use crate::nn::{
    gaussian_init, leaky_relu, leaky_relu_backward, sigmoid, sigmoid_backward,
    softmax_backward_rows, softmax_rows, Dense, Mode, INIT_STD,
};
use crate::params::{prefixed, prefixed_mut, ParamSet};
use crate::seeds::{seeded_stream, STREAM_DISCRIMINATOR_INIT};
use crate::tensor::Tensor;

/// Discriminator outputs for a batch.
pub struct DiscriminatorOut {
    /// `[batch, classes]`, rows sum to 1.
    pub class_probs: Tensor,
    /// `[batch, 1]`, each entry in (0, 1); 1 means "real".
    pub realness: Tensor,
}

pub struct DiscriminatorCache {
    /// `acts[i]` is the input to conv block `i`; the final entry is the
    /// last block's output (input to the flatten).
    acts: Vec<Tensor>,
    blocks: Vec<BlockCache>,
    /// `dense_in[i]` is the input to trunk layer `i`; the final entry is
    /// the trunk output feeding both heads.
    dense_in: Vec<Tensor>,
    dense_pre: Vec<Tensor>,
    probs: Tensor,
    real_sig: Tensor,
}

pub struct DiscriminatorModel {
    arch: DiscriminatorArch,
    conv: Vec<ConvBlock>,
    trunk: Vec<Dense>,
    head_class: Dense,
    head_real: Dense,
}

impl DiscriminatorModel {
    pub fn new(arch: DiscriminatorArch) -> Result<Self> {
        arch.validate()?;
        let slope = arch.leaky_slope;
        let mut conv = Vec::new();
        let mut in_ch = arch.in_channels();
        for (i, &out_ch) in arch.conv_channels.iter().enumerate() {
            conv.push(ConvBlock::new(
                arch.kernel,
                in_ch,
                out_ch,
                arch.conv_stride(i),
                arch.conv_padding(i),
                slope,
            )?);
            in_ch = out_ch;
        }
        let mut trunk = Vec::new();
        let mut nin = arch.dense_input();
        for &w in &arch.dense_widths {
            trunk.push(Dense::new(nin, w)?);
            nin = w;
        }
        let head_class = Dense::new(nin, arch.num_classes)?;
        let head_real = Dense::new(nin, 1)?;
        Ok(DiscriminatorModel { arch, conv, trunk, head_class, head_real })
    }

    pub fn seeded(arch: DiscriminatorArch, seed: u64) -> Result<Self> {
        let mut model = Self::new(arch)?;
        let mut rng = seeded_stream(seed, STREAM_DISCRIMINATOR_INIT);
        model.init_params(&mut rng);
        Ok(model)
    }

    pub fn init_params<R: Rng>(&mut self, rng: &mut R) {
        for b in self.conv.iter_mut() {
            gaussian_init(rng, &mut b.conv.weight, INIT_STD);
        }
        for d in self.trunk.iter_mut() {
            gaussian_init(rng, &mut d.weight, INIT_STD);
        }
        gaussian_init(rng, &mut self.head_class.weight, INIT_STD);
        gaussian_init(rng, &mut self.head_real.weight, INIT_STD);
    }

    pub fn arch(&self) -> &DiscriminatorArch {
        &self.arch
    }

    fn run(
        &mut self,
        x: &Tensor,
        y: &Tensor,
        mode: Mode,
    ) -> Result<(DiscriminatorOut, Option<DiscriminatorCache>)> {
        let input =
            assemble_discriminator_input(x, y, self.arch.input_len, self.arch.num_classes)?;
        let want_cache = mode != Mode::Infer;
        let batch = input.dim(0);
        let mut acts = Vec::new();
        let mut blocks = Vec::new();
        let mut h = input;
        for block in self.conv.iter_mut() {
            let (next, cache) = block.forward(&h, mode)?;
            if want_cache {
                acts.push(h);
                blocks.push(cache.expect("stats modes always produce a cache"));
            }
            h = next;
        }
        let flat = h.reshaped(&[batch, self.arch.dense_input()])?;
        if want_cache {
            acts.push(h);
        }

        let slope = self.arch.leaky_slope;
        let mut dense_in = Vec::new();
        let mut dense_pre = Vec::new();
        let mut d = flat;
        for layer in self.trunk.iter() {
            let pre = layer.forward(&d)?;
            let next = leaky_relu(&pre, slope);
            if want_cache {
                dense_in.push(d);
                dense_pre.push(pre);
            }
            d = next;
        }
        let logits = self.head_class.forward(&d)?;
        let probs = softmax_rows(&logits)?;
        let real_pre = self.head_real.forward(&d)?;
        let real_sig = sigmoid(&real_pre);
        if want_cache {
            dense_in.push(d);
        }

        let out = DiscriminatorOut { class_probs: probs.clone(), realness: real_sig.clone() };
        if want_cache {
            Ok((
                out,
                Some(DiscriminatorCache { acts, blocks, dense_in, dense_pre, probs, real_sig }),
            ))
        } else {
            Ok((out, None))
        }
    }

    pub fn forward_train(
        &mut self,
        x: &Tensor,
        y: &Tensor,
        mode: Mode,
    ) -> Result<(DiscriminatorOut, DiscriminatorCache)> {
        if mode == Mode::Infer {
            return Err(Error::invalid(
                "discriminator forward",
                "inference mode has no backward path; use score",
            ));
        }
        let (out, cache) = self.run(x, y, mode)?;
        Ok((out, cache.expect("stats modes always produce a cache")))
    }

    /// Inference with running batch-norm statistics.
    pub fn score(&mut self, x: &Tensor, y: &Tensor) -> Result<DiscriminatorOut> {
        let (out, _) = self.run(x, y, Mode::Infer)?;
        Ok(out)
    }

    /// Backward from gradients on both heads. `d_probs` is the gradient
    /// at the softmax *output* `[batch, classes]`, `d_realness` at the
    /// sigmoid output `[batch, 1]`. Returns the gradient with respect to
    /// the beat signal `[batch, len]` so generator updates can chain
    /// through the discriminator.
    pub fn backward(
        &mut self,
        cache: &DiscriminatorCache,
        d_probs: &Tensor,
        d_realness: &Tensor,
    ) -> Result<Tensor> {
        let batch = cache.probs.dim(0);
        if d_probs.shape() != [batch, self.arch.num_classes] {
            return Err(Error::shape(
                "discriminator backward",
                format!(
                    "class grad shape {:?} does not match [{batch}, {}]",
                    d_probs.shape(),
                    self.arch.num_classes
                ),
            ));
        }
        if d_realness.shape() != [batch, 1] {
            return Err(Error::shape(
                "discriminator backward",
                format!("realness grad shape {:?} does not match [{batch}, 1]", d_realness.shape()),
            ));
        }

        let trunk_out = &cache.dense_in[self.trunk.len()];
        let d_logits = softmax_backward_rows(&cache.probs, d_probs)?;
        let mut d_trunk = self.head_class.backward(trunk_out, &d_logits)?;
        let d_real_pre = sigmoid_backward(&cache.real_sig, d_realness)?;
        let d_from_real = self.head_real.backward(trunk_out, &d_real_pre)?;
        for (a, &b) in d_trunk.data_mut().iter_mut().zip(d_from_real.data()) {
            *a += b;
        }

        let slope = self.arch.leaky_slope;
        for (i, layer) in self.trunk.iter_mut().enumerate().rev() {
            let d_pre = leaky_relu_backward(&cache.dense_pre[i], &d_trunk, slope)?;
            d_trunk = layer.backward(&cache.dense_in[i], &d_pre)?;
        }

        let last_len = *self.arch.length_trace().last().expect("trace non-empty");
        let last_ch = *self.arch.conv_channels.last().expect("conv stack non-empty");
        let mut d = d_trunk.reshaped(&[batch, last_len, last_ch])?;
        for (i, block) in self.conv.iter_mut().enumerate().rev() {
            d = block.backward(&cache.acts[i], &cache.blocks[i], &d)?;
        }
        extract_signal_channel(&d)
    }
}

impl ParamSet for DiscriminatorModel {
    fn for_each_param(&self, f: &mut dyn FnMut(&str, &Tensor)) {
        for (i, b) in self.conv.iter().enumerate() {
            b.for_each_param(&mut prefixed(&format!("conv{i}"), f));
        }
        for (i, d) in self.trunk.iter().enumerate() {
            d.for_each_param(&mut prefixed(&format!("dense{i}"), f));
        }
        self.head_class.for_each_param(&mut prefixed("head_class", f));
        self.head_real.for_each_param(&mut prefixed("head_real", f));
    }

    fn for_each_param_mut(&mut self, f: &mut dyn FnMut(&str, &mut Tensor)) {
        for (i, b) in self.conv.iter_mut().enumerate() {
            b.for_each_param_mut(&mut prefixed_mut(&format!("conv{i}"), f));
        }
        for (i, d) in self.trunk.iter_mut().enumerate() {
            d.for_each_param_mut(&mut prefixed_mut(&format!("dense{i}"), f));
        }
        self.head_class.for_each_param_mut(&mut prefixed_mut("head_class", f));
        self.head_real.for_each_param_mut(&mut prefixed_mut("head_real", f));
    }

    fn for_each_state(&self, f: &mut dyn FnMut(&str, &Tensor)) {
        for (i, b) in self.conv.iter().enumerate() {
            b.for_each_state(&mut prefixed(&format!("conv{i}"), f));
        }
        for (i, d) in self.trunk.iter().enumerate() {
            d.for_each_state(&mut prefixed(&format!("dense{i}"), f));
        }
        self.head_class.for_each_state(&mut prefixed("head_class", f));
        self.head_real.for_each_state(&mut prefixed("head_real", f));
    }

    fn for_each_state_mut(&mut self, f: &mut dyn FnMut(&str, &mut Tensor)) {
        for (i, b) in self.conv.iter_mut().enumerate() {
            b.for_each_state_mut(&mut prefixed_mut(&format!("conv{i}"), f));
        }
        for (i, d) in self.trunk.iter_mut().enumerate() {
            d.for_each_state_mut(&mut prefixed_mut(&format!("dense{i}"), f));
        }
        self.head_class.for_each_state_mut(&mut prefixed_mut("head_class", f));
        self.head_real.for_each_state_mut(&mut prefixed_mut("head_real", f));
    }
}
