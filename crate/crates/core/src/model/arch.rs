//! Architecture descriptions for the generator and discriminator.
//!
//! Both networks are fixed-topology stacks parameterized only by their
//! channel widths, so an architecture is a list of widths plus a few
//! scalars. Strides follow one rule everywhere: within a conv stack,
//! every second layer (odd 0-based index) downsamples by 2; decoder
//! layers all upsample by 2.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

pub const DEFAULT_BEAT_LEN: usize = 280;
pub const NUM_CLASSES: usize = 4;
pub const DEFAULT_KERNEL: usize = 3;
pub const DEFAULT_LEAKY_SLOPE: f64 = 0.2;

/// Encoder-decoder generator.
///
/// Input is `[batch, input_len, 2 + num_classes]`: the reference beat,
/// the smoothed noise vector, and the one-hot class label broadcast
/// along the length axis. The encoder halves the length after every
/// pair of convolutions; the decoder's transposed convolutions (stride
/// 2, output padding 1) restore it. A final width-preserving conv maps
/// to one channel through a sigmoid.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GeneratorArch {
    pub input_len: usize,
    pub num_classes: usize,
    pub encoder_channels: Vec<usize>,
    pub decoder_channels: Vec<usize>,
    pub kernel: usize,
    pub leaky_slope: f64,
}

impl GeneratorArch {
    /// Full-width reference architecture.
    pub fn full() -> Self {
        GeneratorArch {
            input_len: DEFAULT_BEAT_LEN,
            num_classes: NUM_CLASSES,
            encoder_channels: vec![32, 32, 64, 64, 128, 128],
            decoder_channels: vec![128, 64, 32],
            kernel: DEFAULT_KERNEL,
            leaky_slope: DEFAULT_LEAKY_SLOPE,
        }
    }

    /// Same topology at half width; used by fast end-to-end tests.
    pub fn halved() -> Self {
        GeneratorArch {
            encoder_channels: vec![16, 16, 32, 32, 64, 64],
            decoder_channels: vec![64, 32, 16],
            ..Self::full()
        }
    }

    /// Channels of the assembled input: beat + noise + one-hot label.
    pub fn in_channels(&self) -> usize {
        2 + self.num_classes
    }

    pub fn conv_padding(&self) -> usize {
        (self.kernel - 1) / 2
    }

    pub fn downsamples(&self) -> usize {
        self.encoder_channels.len() / 2
    }

    /// Encoder stride at layer `i` (0-based).
    pub fn encoder_stride(&self, i: usize) -> usize {
        if i % 2 == 1 {
            2
        } else {
            1
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_classes < 2 {
            return Err(Error::invalid("generator arch", "need at least 2 classes"));
        }
        if self.kernel == 0 || self.kernel % 2 == 0 {
            return Err(Error::invalid(
                "generator arch",
                format!("kernel must be odd and positive, got {}", self.kernel),
            ));
        }
        if !(self.leaky_slope > 0.0 && self.leaky_slope < 1.0) {
            return Err(Error::invalid(
                "generator arch",
                format!("leaky slope must lie in (0, 1), got {}", self.leaky_slope),
            ));
        }
        if self.encoder_channels.is_empty() || self.encoder_channels.len() % 2 != 0 {
            return Err(Error::invalid(
                "generator arch",
                format!("encoder needs an even, nonzero layer count, got {}", self.encoder_channels.len()),
            ));
        }
        if self.decoder_channels.len() != self.downsamples() {
            return Err(Error::invalid(
                "generator arch",
                format!(
                    "decoder must undo the {} downsamples, got {} layers",
                    self.downsamples(),
                    self.decoder_channels.len()
                ),
            ));
        }
        if self.encoder_channels.iter().chain(&self.decoder_channels).any(|&c| c == 0) {
            return Err(Error::invalid("generator arch", "zero-width layer"));
        }
        let div = 1usize << self.downsamples();
        if self.input_len == 0 || self.input_len % div != 0 {
            return Err(Error::invalid(
                "generator arch",
                format!("input_len {} must be a positive multiple of {div}", self.input_len),
            ));
        }
        Ok(())
    }

    /// Sequence lengths through the network: input, each encoder layer's
    /// output, each decoder layer's output, final conv output.
    pub fn length_trace(&self) -> Vec<usize> {
        let mut trace = vec![self.input_len];
        let mut len = self.input_len;
        for i in 0..self.encoder_channels.len() {
            len /= self.encoder_stride(i);
            trace.push(len);
        }
        for _ in 0..self.decoder_channels.len() {
            len *= 2;
            trace.push(len);
        }
        trace.push(len);
        trace
    }
}

/// Conv stack discriminator with a shared dense trunk and two heads:
/// a softmax over arrhythmia classes and a sigmoid real-vs-synthetic
/// score.
///
/// Input is `[batch, input_len, 1 + num_classes]`: the beat plus the
/// broadcast one-hot label. All convolutions keep `(kernel-1)/2`
/// padding except the final downsampling layer, which uses none so an
/// odd length contracts to `(len - kernel)/2 + 1` (35 -> 17 in the
/// full architecture) before flattening into the dense trunk.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DiscriminatorArch {
    pub input_len: usize,
    pub num_classes: usize,
    pub conv_channels: Vec<usize>,
    pub dense_widths: Vec<usize>,
    pub kernel: usize,
    pub leaky_slope: f64,
}

impl DiscriminatorArch {
    pub fn full() -> Self {
        DiscriminatorArch {
            input_len: DEFAULT_BEAT_LEN,
            num_classes: NUM_CLASSES,
            conv_channels: vec![16, 16, 32, 32, 128, 128, 256, 256],
            dense_widths: vec![64, 32],
            kernel: DEFAULT_KERNEL,
            leaky_slope: DEFAULT_LEAKY_SLOPE,
        }
    }

    pub fn halved() -> Self {
        DiscriminatorArch {
            conv_channels: vec![8, 8, 16, 16, 64, 64, 128, 128],
            dense_widths: vec![32, 16],
            ..Self::full()
        }
    }

    pub fn in_channels(&self) -> usize {
        1 + self.num_classes
    }

    pub fn conv_stride(&self, i: usize) -> usize {
        if i % 2 == 1 {
            2
        } else {
            1
        }
    }

    /// Padding rule: `(kernel-1)/2` everywhere except the last conv.
    pub fn conv_padding(&self, i: usize) -> usize {
        if i + 1 == self.conv_channels.len() {
            0
        } else {
            (self.kernel - 1) / 2
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_classes < 2 {
            return Err(Error::invalid("discriminator arch", "need at least 2 classes"));
        }
        if self.kernel == 0 || self.kernel % 2 == 0 {
            return Err(Error::invalid(
                "discriminator arch",
                format!("kernel must be odd and positive, got {}", self.kernel),
            ));
        }
        if !(self.leaky_slope > 0.0 && self.leaky_slope < 1.0) {
            return Err(Error::invalid(
                "discriminator arch",
                format!("leaky slope must lie in (0, 1), got {}", self.leaky_slope),
            ));
        }
        if self.conv_channels.len() < 2 || self.conv_channels.len() % 2 != 0 {
            return Err(Error::invalid(
                "discriminator arch",
                format!("conv stack needs an even count >= 2, got {}", self.conv_channels.len()),
            ));
        }
        if self.conv_channels.iter().chain(&self.dense_widths).any(|&c| c == 0) {
            return Err(Error::invalid("discriminator arch", "zero-width layer"));
        }
        if self.dense_widths.is_empty() {
            return Err(Error::invalid("discriminator arch", "dense trunk must have >= 1 layer"));
        }
        // The whole trace must stay positive.
        let trace = self.length_trace();
        if trace.iter().any(|&l| l == 0) {
            return Err(Error::invalid(
                "discriminator arch",
                format!("input_len {} collapses to zero length in the conv stack", self.input_len),
            ));
        }
        Ok(())
    }

    /// Sequence lengths: input, then each conv layer's output.
    pub fn length_trace(&self) -> Vec<usize> {
        let mut trace = vec![self.input_len];
        let mut len = self.input_len;
        for i in 0..self.conv_channels.len() {
            let stride = self.conv_stride(i);
            let pad = self.conv_padding(i);
            let padded = len + 2 * pad;
            len = if padded >= self.kernel { (padded - self.kernel) / stride + 1 } else { 0 };
            trace.push(len);
        }
        trace
    }

    /// Flattened width entering the dense trunk.
    pub fn dense_input(&self) -> usize {
        let trace = self.length_trace();
        trace[trace.len() - 1] * self.conv_channels[self.conv_channels.len() - 1]
    }
}
