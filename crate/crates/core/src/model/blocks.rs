//! Conv/deconv building blocks: convolution, batch norm, leaky ReLU.

use crate::error::Result;
use crate::nn::{
    leaky_relu, leaky_relu_backward, BatchNorm1d, BnCache, Conv1d, ConvTranspose1d, Mode,
};
use crate::params::ParamSet;
use crate::tensor::Tensor;

/// Activations a block backward pass needs: the batch-norm cache and
/// the pre-activation (batch-norm output). The block's *input* is kept
/// by the owning model, which stores the activation chain once instead
/// of per block.
#[derive(Debug)]
pub struct BlockCache {
    pub bn: BnCache,
    pub pre_act: Tensor,
}

#[derive(Debug, Clone)]
pub struct ConvBlock {
    pub conv: Conv1d,
    pub bn: BatchNorm1d,
    pub slope: f64,
}

impl ConvBlock {
    pub fn new(
        kernel: usize,
        in_ch: usize,
        out_ch: usize,
        stride: usize,
        padding: usize,
        slope: f64,
    ) -> Result<Self> {
        Ok(ConvBlock {
            conv: Conv1d::new(kernel, in_ch, out_ch, stride, padding)?,
            bn: BatchNorm1d::new(out_ch)?,
            slope,
        })
    }

    pub fn forward(&mut self, input: &Tensor, mode: Mode) -> Result<(Tensor, Option<BlockCache>)> {
        let h = self.conv.forward(input)?;
        let (pre_act, bn_cache) = self.bn.forward(&h, mode)?;
        let out = leaky_relu(&pre_act, self.slope);
        Ok((out, bn_cache.map(|bn| BlockCache { bn, pre_act })))
    }

    pub fn backward(
        &mut self,
        input: &Tensor,
        cache: &BlockCache,
        grad_out: &Tensor,
    ) -> Result<Tensor> {
        let d_pre = leaky_relu_backward(&cache.pre_act, grad_out, self.slope)?;
        let d_conv = self.bn.backward(&cache.bn, &d_pre)?;
        self.conv.backward(input, &d_conv)
    }
}

impl ParamSet for ConvBlock {
    fn for_each_param(&self, f: &mut dyn FnMut(&str, &Tensor)) {
        f("conv.weight", &self.conv.weight);
        f("conv.bias", &self.conv.bias);
        f("bn.gamma", &self.bn.gamma);
        f("bn.beta", &self.bn.beta);
    }

    fn for_each_param_mut(&mut self, f: &mut dyn FnMut(&str, &mut Tensor)) {
        f("conv.weight", &mut self.conv.weight);
        f("conv.bias", &mut self.conv.bias);
        f("bn.gamma", &mut self.bn.gamma);
        f("bn.beta", &mut self.bn.beta);
    }

    fn for_each_state(&self, f: &mut dyn FnMut(&str, &Tensor)) {
        self.for_each_param(f);
        f("bn.running_mean", &self.bn.running_mean);
        f("bn.running_var", &self.bn.running_var);
    }

    fn for_each_state_mut(&mut self, f: &mut dyn FnMut(&str, &mut Tensor)) {
        f("conv.weight", &mut self.conv.weight);
        f("conv.bias", &mut self.conv.bias);
        f("bn.gamma", &mut self.bn.gamma);
        f("bn.beta", &mut self.bn.beta);
        f("bn.running_mean", &mut self.bn.running_mean);
        f("bn.running_var", &mut self.bn.running_var);
    }
}

#[derive(Debug, Clone)]
pub struct DeconvBlock {
    pub deconv: ConvTranspose1d,
    pub bn: BatchNorm1d,
    pub slope: f64,
}

impl DeconvBlock {
    pub fn new(
        kernel: usize,
        in_ch: usize,
        out_ch: usize,
        stride: usize,
        padding: usize,
        output_padding: usize,
        slope: f64,
    ) -> Result<Self> {
        Ok(DeconvBlock {
            deconv: ConvTranspose1d::new(kernel, in_ch, out_ch, stride, padding, output_padding)?,
            bn: BatchNorm1d::new(out_ch)?,
            slope,
        })
    }

    pub fn forward(&mut self, input: &Tensor, mode: Mode) -> Result<(Tensor, Option<BlockCache>)> {
        let h = self.deconv.forward(input)?;
        let (pre_act, bn_cache) = self.bn.forward(&h, mode)?;
        let out = leaky_relu(&pre_act, self.slope);
        Ok((out, bn_cache.map(|bn| BlockCache { bn, pre_act })))
    }

    pub fn backward(
        &mut self,
        input: &Tensor,
        cache: &BlockCache,
        grad_out: &Tensor,
    ) -> Result<Tensor> {
        let d_pre = leaky_relu_backward(&cache.pre_act, grad_out, self.slope)?;
        let d_deconv = self.bn.backward(&cache.bn, &d_pre)?;
        self.deconv.backward(input, &d_deconv)
    }
}

impl ParamSet for DeconvBlock {
    fn for_each_param(&self, f: &mut dyn FnMut(&str, &Tensor)) {
        f("deconv.weight", &self.deconv.weight);
        f("deconv.bias", &self.deconv.bias);
        f("bn.gamma", &self.bn.gamma);
        f("bn.beta", &self.bn.beta);
    }

    fn for_each_param_mut(&mut self, f: &mut dyn FnMut(&str, &mut Tensor)) {
        f("deconv.weight", &mut self.deconv.weight);
        f("deconv.bias", &mut self.deconv.bias);
        f("bn.gamma", &mut self.bn.gamma);
        f("bn.beta", &mut self.bn.beta);
    }

    fn for_each_state(&self, f: &mut dyn FnMut(&str, &Tensor)) {
        self.for_each_param(f);
        f("bn.running_mean", &self.bn.running_mean);
        f("bn.running_var", &self.bn.running_var);
    }

    fn for_each_state_mut(&mut self, f: &mut dyn FnMut(&str, &mut Tensor)) {
        f("deconv.weight", &mut self.deconv.weight);
        f("deconv.bias", &mut self.deconv.bias);
        f("bn.gamma", &mut self.bn.gamma);
        f("bn.beta", &mut self.bn.beta);
        f("bn.running_mean", &mut self.bn.running_mean);
        f("bn.running_var", &mut self.bn.running_var);
    }
}
