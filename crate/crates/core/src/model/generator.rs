//! The class-conditioned beat generator.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::arch::GeneratorArch;
use crate::model::blocks::{BlockCache, ConvBlock, DeconvBlock};
use crate::model::inputs::assemble_generator_input;
use crate::nn::{gaussian_init, sigmoid, sigmoid_backward, Conv1d, Mode, INIT_STD};
use crate::params::{prefixed, prefixed_mut, ParamSet};
use crate::seeds::{seeded_stream, STREAM_GENERATOR_INIT};
use crate::tensor::Tensor;

/// Everything the backward pass replays.
///
/// `acts[i]` is the input to block `i` (`acts[0]` is the assembled
/// network input); the final entry is the input to the output conv.
pub struct GeneratorCache {
    acts: Vec<Tensor>,
    blocks: Vec<BlockCache>,
    /// Sigmoid output as `[batch, len, 1]` (the sigmoid derivative is
    /// expressed through the output).
    out_sig: Tensor,
}

/// Encoder-decoder generator mapping (beat, noise, label) to a beat.
pub struct GeneratorModel {
    arch: GeneratorArch,
    enc: Vec<ConvBlock>,
    dec: Vec<DeconvBlock>,
    out: Conv1d,
}

impl GeneratorModel {
    /// Builds the network with zeroed weights.
    pub fn new(arch: GeneratorArch) -> Result<Self> {
        arch.validate()?;
        let k = arch.kernel;
        let pad = arch.conv_padding();
        let slope = arch.leaky_slope;
        let mut enc = Vec::new();
        let mut in_ch = arch.in_channels();
        for (i, &out_ch) in arch.encoder_channels.iter().enumerate() {
            enc.push(ConvBlock::new(k, in_ch, out_ch, arch.encoder_stride(i), pad, slope)?);
            in_ch = out_ch;
        }
        let mut dec = Vec::new();
        for &out_ch in &arch.decoder_channels {
            // stride-2 transposed conv with output padding 1 exactly
            // doubles the length when padding = (kernel-1)/2
            dec.push(DeconvBlock::new(k, in_ch, out_ch, 2, pad, 1, slope)?);
            in_ch = out_ch;
        }
        let out = Conv1d::new(k, in_ch, 1, 1, pad)?;
        Ok(GeneratorModel { arch, enc, dec, out })
    }

    /// Builds and initializes weights from the master seed's generator
    /// init stream.
    pub fn seeded(arch: GeneratorArch, seed: u64) -> Result<Self> {
        let mut model = Self::new(arch)?;
        let mut rng = seeded_stream(seed, STREAM_GENERATOR_INIT);
        model.init_params(&mut rng);
        Ok(model)
    }

    /// Gaussian(0, 0.02) weights in declaration order; biases stay zero,
    /// batch-norm affine parameters stay at identity.
    pub fn init_params<R: Rng>(&mut self, rng: &mut R) {
        for b in self.enc.iter_mut() {
            gaussian_init(rng, &mut b.conv.weight, INIT_STD);
        }
        for b in self.dec.iter_mut() {
            gaussian_init(rng, &mut b.deconv.weight, INIT_STD);
        }
        gaussian_init(rng, &mut self.out.weight, INIT_STD);
    }

    pub fn arch(&self) -> &GeneratorArch {
        &self.arch
    }

    fn run(
        &mut self,
        x: &Tensor,
        y: &Tensor,
        z: &Tensor,
        mode: Mode,
    ) -> Result<(Tensor, Option<GeneratorCache>)> {
        let input =
            assemble_generator_input(x, y, z, self.arch.input_len, self.arch.num_classes)?;
        let want_cache = mode != Mode::Infer;
        let mut acts = Vec::new();
        let mut blocks = Vec::new();
        let mut h = input;
        for block in self.enc.iter_mut() {
            let (next, cache) = block.forward(&h, mode)?;
            if want_cache {
                acts.push(h);
                blocks.push(cache.expect("stats modes always produce a cache"));
            }
            h = next;
        }
        for block in self.dec.iter_mut() {
            let (next, cache) = block.forward(&h, mode)?;
            if want_cache {
                acts.push(h);
                blocks.push(cache.expect("stats modes always produce a cache"));
            }
            h = next;
        }
        let pre = self.out.forward(&h)?;
        let out_sig = sigmoid(&pre);
        let batch = out_sig.dim(0);
        let flat = out_sig.reshaped(&[batch, self.arch.input_len])?;
        if want_cache {
            acts.push(h);
            Ok((flat, Some(GeneratorCache { acts, blocks, out_sig })))
        } else {
            Ok((flat, None))
        }
    }

    /// Training-path forward. `mode` selects whether batch-norm running
    /// statistics update (`Train`) or stay fixed (`Frozen`); both
    /// normalize with mini-batch statistics and return a cache.
    pub fn forward_train(
        &mut self,
        x: &Tensor,
        y: &Tensor,
        z: &Tensor,
        mode: Mode,
    ) -> Result<(Tensor, GeneratorCache)> {
        if mode == Mode::Infer {
            return Err(Error::invalid(
                "generator forward",
                "inference mode has no backward path; use synthesize",
            ));
        }
        let (out, cache) = self.run(x, y, z, mode)?;
        Ok((out, cache.expect("stats modes always produce a cache")))
    }

    /// Inference with running batch-norm statistics. Works for any
    /// batch size including 1.
    pub fn synthesize(&mut self, x: &Tensor, y: &Tensor, z: &Tensor) -> Result<Tensor> {
        let (out, _) = self.run(x, y, z, Mode::Infer)?;
        Ok(out)
    }

    /// Accumulates parameter gradients for `d loss / d output` and
    /// returns the gradient with respect to the assembled input.
    pub fn backward(&mut self, cache: &GeneratorCache, grad_out: &Tensor) -> Result<Tensor> {
        let batch = cache.out_sig.dim(0);
        if grad_out.shape() != [batch, self.arch.input_len] {
            return Err(Error::shape(
                "generator backward",
                format!(
                    "grad shape {:?} does not match output [{batch}, {}]",
                    grad_out.shape(),
                    self.arch.input_len
                ),
            ));
        }
        let g3 = grad_out.reshaped(&[batch, self.arch.input_len, 1])?;
        let d_pre = sigmoid_backward(&cache.out_sig, &g3)?;
        let n_blocks = self.enc.len() + self.dec.len();
        let mut d = self.out.backward(&cache.acts[n_blocks], &d_pre)?;
        for (i, block) in self.dec.iter_mut().enumerate().rev() {
            let idx = self.enc.len() + i;
            d = block.backward(&cache.acts[idx], &cache.blocks[idx], &d)?;
        }
        for (i, block) in self.enc.iter_mut().enumerate().rev() {
            d = block.backward(&cache.acts[i], &cache.blocks[i], &d)?;
        }
        Ok(d)
    }
}

impl ParamSet for GeneratorModel {
    fn for_each_param(&self, f: &mut dyn FnMut(&str, &Tensor)) {
        for (i, b) in self.enc.iter().enumerate() {
            b.for_each_param(&mut prefixed(&format!("enc{i}"), f));
        }
        for (i, b) in self.dec.iter().enumerate() {
            b.for_each_param(&mut prefixed(&format!("dec{i}"), f));
        }
        self.out.for_each_param(&mut prefixed("out", f));
    }

    fn for_each_param_mut(&mut self, f: &mut dyn FnMut(&str, &mut Tensor)) {
        for (i, b) in self.enc.iter_mut().enumerate() {
            b.for_each_param_mut(&mut prefixed_mut(&format!("enc{i}"), f));
        }
        for (i, b) in self.dec.iter_mut().enumerate() {
            b.for_each_param_mut(&mut prefixed_mut(&format!("dec{i}"), f));
        }
        self.out.for_each_param_mut(&mut prefixed_mut("out", f));
    }

    fn for_each_state(&self, f: &mut dyn FnMut(&str, &Tensor)) {
        for (i, b) in self.enc.iter().enumerate() {
            b.for_each_state(&mut prefixed(&format!("enc{i}"), f));
        }
        for (i, b) in self.dec.iter().enumerate() {
            b.for_each_state(&mut prefixed(&format!("dec{i}"), f));
        }
        self.out.for_each_state(&mut prefixed("out", f));
    }

    fn for_each_state_mut(&mut self, f: &mut dyn FnMut(&str, &mut Tensor)) {
        for (i, b) in self.enc.iter_mut().enumerate() {
            b.for_each_state_mut(&mut prefixed_mut(&format!("enc{i}"), f));
        }
        for (i, b) in self.dec.iter_mut().enumerate() {
            b.for_each_state_mut(&mut prefixed_mut(&format!("dec{i}"), f));
        }
        self.out.for_each_state_mut(&mut prefixed_mut("out", f));
    }
}
