//! Strided 1D transposed convolution (the adjoint of [`super::Conv1d`]).

use alloc::format;

use crate::error::{Error, Result};
use crate::params::ParamSet;
use crate::tensor::Tensor;

/// 1D transposed convolution over `[batch, length, in_channels]`.
///
/// Weight layout is `[kernel, out_channels, in_channels]`: for each tap
/// and output channel the in-channel row is contiguous, which makes the
/// forward accumulation a dot product over contiguous memory. With this
/// layout a transposed convolution sharing its weight buffer with a
/// `Conv1d` of swapped channel roles computes that convolution's exact
/// input-gradient map.
///
/// Output length is `(len - 1) * stride - 2 * padding + kernel +
/// output_padding`.
#[derive(Debug, Clone)]
pub struct ConvTranspose1d {
    pub weight: Tensor,
    pub bias: Tensor,
    pub stride: usize,
    pub padding: usize,
    pub output_padding: usize,
}

impl ConvTranspose1d {
    pub fn new(
        kernel: usize,
        in_channels: usize,
        out_channels: usize,
        stride: usize,
        padding: usize,
        output_padding: usize,
    ) -> Result<Self> {
        if kernel == 0 || in_channels == 0 || out_channels == 0 {
            return Err(Error::invalid(
                "conv_transpose1d construction",
                format!("kernel/in/out must be nonzero, got {kernel}/{in_channels}/{out_channels}"),
            ));
        }
        if stride == 0 {
            return Err(Error::invalid("conv_transpose1d construction", "stride must be >= 1"));
        }
        if output_padding >= stride && output_padding >= kernel {
            return Err(Error::invalid(
                "conv_transpose1d construction",
                format!("output_padding {output_padding} must be < stride {stride} or < kernel {kernel}"),
            ));
        }
        Ok(ConvTranspose1d {
            weight: Tensor::zeros(&[kernel, out_channels, in_channels]),
            bias: Tensor::zeros(&[out_channels]),
            stride,
            padding,
            output_padding,
        })
    }

    pub fn kernel(&self) -> usize {
        self.weight.dim(0)
    }

    pub fn in_channels(&self) -> usize {
        self.weight.dim(2)
    }

    pub fn out_channels(&self) -> usize {
        self.weight.dim(1)
    }

    pub fn out_len(&self, in_len: usize) -> Result<usize> {
        let total = (in_len - 1) * self.stride + self.kernel() + self.output_padding;
        if total < 2 * self.padding + 1 {
            return Err(Error::shape(
                "conv_transpose1d forward",
                format!("padding {} swallows the whole {total}-sample output", self.padding),
            ));
        }
        Ok(total - 2 * self.padding)
    }

    fn check_input(&self, input: &Tensor, context: &'static str) -> Result<()> {
        if input.rank() != 3 {
            return Err(Error::shape(
                context,
                format!("expected rank-3 [batch, length, channels], got {:?}", input.shape()),
            ));
        }
        if input.dim(2) != self.in_channels() {
            return Err(Error::shape(
                context,
                format!("input has {} channels, layer expects {}", input.dim(2), self.in_channels()),
            ));
        }
        Ok(())
    }

    /// `out[b, i*s + t - p, oc] += sum_ic in[b, i, ic] * w[t, oc, ic]`,
    /// positions falling outside `[0, out_len)` are discarded; bias is
    /// added to every retained position.
    pub fn forward(&self, input: &Tensor) -> Result<Tensor> {
        self.check_input(input, "conv_transpose1d forward")?;
        let (batch, in_len) = (input.dim(0), input.dim(1));
        let (k, ic, oc) = (self.kernel(), self.in_channels(), self.out_channels());
        let out_len = self.out_len(in_len)?;
        let mut out = Tensor::zeros(&[batch, out_len, oc]);

        let w = self.weight.data();
        let x = input.data();
        {
            let o = out.data_mut();
            for b in 0..batch {
                for i in 0..in_len {
                    let in_row = &x[(b * in_len + i) * ic..(b * in_len + i + 1) * ic];
                    for t in 0..k {
                        let pos = i * self.stride + t;
                        if pos < self.padding {
                            continue;
                        }
                        let j = pos - self.padding;
                        if j >= out_len {
                            continue;
                        }
                        let out_row = &mut o[(b * out_len + j) * oc..(b * out_len + j + 1) * oc];
                        let w_tap = &w[t * oc * ic..(t + 1) * oc * ic];
                        for (ov, w_row) in out_row.iter_mut().zip(w_tap.chunks_exact(ic)) {
                            let mut acc = 0.0;
                            for (&xv, &wv) in in_row.iter().zip(w_row) {
                                acc += xv * wv;
                            }
                            *ov += acc;
                        }
                    }
                }
            }
            let bias = self.bias.data();
            for row in o.chunks_exact_mut(oc) {
                for (ov, &bv) in row.iter_mut().zip(bias) {
                    *ov += bv;
                }
            }
        }
        Ok(out)
    }

    /// Accumulates weight/bias gradients and returns the input gradient.
    pub fn backward(&mut self, input: &Tensor, grad_out: &Tensor) -> Result<Tensor> {
        self.check_input(input, "conv_transpose1d backward")?;
        let (batch, in_len) = (input.dim(0), input.dim(1));
        let (k, ic, oc) = (self.kernel(), self.in_channels(), self.out_channels());
        let out_len = self.out_len(in_len)?;
        if grad_out.shape() != [batch, out_len, oc] {
            return Err(Error::shape(
                "conv_transpose1d backward",
                format!(
                    "grad_out shape {:?} does not match output [{batch}, {out_len}, {oc}]",
                    grad_out.shape()
                ),
            ));
        }

        let mut grad_in = Tensor::zeros(&[batch, in_len, ic]);
        let x = input.data();
        let gy = grad_out.data();
        let w = self.weight.data();
        {
            let gx = grad_in.data_mut();
            for b in 0..batch {
                for i in 0..in_len {
                    let gx_row = &mut gx[(b * in_len + i) * ic..(b * in_len + i + 1) * ic];
                    for t in 0..k {
                        let pos = i * self.stride + t;
                        if pos < self.padding {
                            continue;
                        }
                        let j = pos - self.padding;
                        if j >= out_len {
                            continue;
                        }
                        let gy_row = &gy[(b * out_len + j) * oc..(b * out_len + j + 1) * oc];
                        let w_tap = &w[t * oc * ic..(t + 1) * oc * ic];
                        for (&gv, w_row) in gy_row.iter().zip(w_tap.chunks_exact(ic)) {
                            for (ge, &wv) in gx_row.iter_mut().zip(w_row) {
                                *ge += gv * wv;
                            }
                        }
                    }
                }
            }
        }
        {
            let gw = self.weight.grad_mut();
            for b in 0..batch {
                for i in 0..in_len {
                    let in_row = &x[(b * in_len + i) * ic..(b * in_len + i + 1) * ic];
                    for t in 0..k {
                        let pos = i * self.stride + t;
                        if pos < self.padding {
                            continue;
                        }
                        let j = pos - self.padding;
                        if j >= out_len {
                            continue;
                        }
                        let gy_row = &gy[(b * out_len + j) * oc..(b * out_len + j + 1) * oc];
                        let gw_tap = &mut gw[t * oc * ic..(t + 1) * oc * ic];
                        for (&gv, gw_row) in gy_row.iter().zip(gw_tap.chunks_exact_mut(ic)) {
                            for (ge, &xv) in gw_row.iter_mut().zip(in_row) {
                                *ge += gv * xv;
                            }
                        }
                    }
                }
            }
        }
        {
            let gb = self.bias.grad_mut();
            for row in gy.chunks_exact(oc) {
                for (be, &gv) in gb.iter_mut().zip(row) {
                    *be += gv;
                }
            }
        }
        Ok(grad_in)
    }
}

impl ParamSet for ConvTranspose1d {
    fn for_each_param(&self, f: &mut dyn FnMut(&str, &Tensor)) {
        f("weight", &self.weight);
        f("bias", &self.bias);
    }

    fn for_each_param_mut(&mut self, f: &mut dyn FnMut(&str, &mut Tensor)) {
        f("weight", &mut self.weight);
        f("bias", &mut self.bias);
    }
}
