//! Strided 1D convolution (cross-correlation, no kernel flip).

use alloc::format;

use crate::error::{Error, Result};
use crate::params::ParamSet;
use crate::tensor::Tensor;

/// 1D convolution over `[batch, length, in_channels]` inputs.
///
/// Weight layout is `[kernel, in_channels, out_channels]` so the
/// innermost accumulation in both forward and backward walks a
/// contiguous `out_channels` row. Output length is
/// `(len + 2*padding - kernel) / stride + 1` (floor division).
#[derive(Debug, Clone)]
pub struct Conv1d {
    pub weight: Tensor,
    pub bias: Tensor,
    pub stride: usize,
    pub padding: usize,
}

impl Conv1d {
    pub fn new(
        kernel: usize,
        in_channels: usize,
        out_channels: usize,
        stride: usize,
        padding: usize,
    ) -> Result<Self> {
        if kernel == 0 || in_channels == 0 || out_channels == 0 {
            return Err(Error::invalid(
                "conv1d construction",
                format!("kernel/in/out must be nonzero, got {kernel}/{in_channels}/{out_channels}"),
            ));
        }
        if stride == 0 {
            return Err(Error::invalid("conv1d construction", "stride must be >= 1"));
        }
        Ok(Conv1d {
            weight: Tensor::zeros(&[kernel, in_channels, out_channels]),
            bias: Tensor::zeros(&[out_channels]),
            stride,
            padding,
        })
    }

    pub fn kernel(&self) -> usize {
        self.weight.dim(0)
    }

    pub fn in_channels(&self) -> usize {
        self.weight.dim(1)
    }

    pub fn out_channels(&self) -> usize {
        self.weight.dim(2)
    }

    /// Output length for an input of length `in_len`.
    pub fn out_len(&self, in_len: usize) -> Result<usize> {
        let k = self.kernel();
        let padded = in_len + 2 * self.padding;
        if padded < k {
            return Err(Error::shape(
                "conv1d forward",
                format!("padded length {padded} shorter than kernel {k}"),
            ));
        }
        Ok((padded - k) / self.stride + 1)
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

    /// `out[b, j, oc] = bias[oc] + sum_{t, ic} in[b, j*s + t - p, ic] * w[t, ic, oc]`
    /// with out-of-range taps reading zero.
    pub fn forward(&self, input: &Tensor) -> Result<Tensor> {
        self.check_input(input, "conv1d forward")?;
        let (batch, in_len) = (input.dim(0), input.dim(1));
        let (k, ic, oc) = (self.kernel(), self.in_channels(), self.out_channels());
        let out_len = self.out_len(in_len)?;
        let mut out = Tensor::zeros(&[batch, out_len, oc]);

        let w = self.weight.data();
        let bias = self.bias.data();
        let x = input.data();
        let o = out.data_mut();
        for b in 0..batch {
            for j in 0..out_len {
                let out_row = &mut o[(b * out_len + j) * oc..(b * out_len + j + 1) * oc];
                out_row.copy_from_slice(bias);
                for t in 0..k {
                    let pos = j * self.stride + t;
                    if pos < self.padding {
                        continue;
                    }
                    let li = pos - self.padding;
                    if li >= in_len {
                        continue;
                    }
                    let in_row = &x[(b * in_len + li) * ic..(b * in_len + li + 1) * ic];
                    let w_tap = &w[t * ic * oc..(t + 1) * ic * oc];
                    for (c, &xv) in in_row.iter().enumerate() {
                        let w_row = &w_tap[c * oc..(c + 1) * oc];
                        for (ov, &wv) in out_row.iter_mut().zip(w_row) {
                            *ov += xv * wv;
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Accumulates weight/bias gradients from `grad_out` and returns the
    /// gradient with respect to `input`. `input` must be the tensor the
    /// matching forward call saw.
    pub fn backward(&mut self, input: &Tensor, grad_out: &Tensor) -> Result<Tensor> {
        self.check_input(input, "conv1d backward")?;
        let (batch, in_len) = (input.dim(0), input.dim(1));
        let (k, ic, oc) = (self.kernel(), self.in_channels(), self.out_channels());
        let out_len = self.out_len(in_len)?;
        if grad_out.shape() != [batch, out_len, oc] {
            return Err(Error::shape(
                "conv1d backward",
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
                for j in 0..out_len {
                    let gy_row = &gy[(b * out_len + j) * oc..(b * out_len + j + 1) * oc];
                    for t in 0..k {
                        let pos = j * self.stride + t;
                        if pos < self.padding {
                            continue;
                        }
                        let li = pos - self.padding;
                        if li >= in_len {
                            continue;
                        }
                        let gx_row = &mut gx[(b * in_len + li) * ic..(b * in_len + li + 1) * ic];
                        let w_tap = &w[t * ic * oc..(t + 1) * ic * oc];
                        for (c, gxe) in gx_row.iter_mut().enumerate() {
                            let w_row = &w_tap[c * oc..(c + 1) * oc];
                            let mut acc = 0.0;
                            for (&gv, &wv) in gy_row.iter().zip(w_row) {
                                acc += gv * wv;
                            }
                            *gxe += acc;
                        }
                    }
                }
            }
        }
        {
            let gw = self.weight.grad_mut();
            for b in 0..batch {
                for j in 0..out_len {
                    let gy_row = &gy[(b * out_len + j) * oc..(b * out_len + j + 1) * oc];
                    for t in 0..k {
                        let pos = j * self.stride + t;
                        if pos < self.padding {
                            continue;
                        }
                        let li = pos - self.padding;
                        if li >= in_len {
                            continue;
                        }
                        let in_row = &x[(b * in_len + li) * ic..(b * in_len + li + 1) * ic];
                        let gw_tap = &mut gw[t * ic * oc..(t + 1) * ic * oc];
                        for (c, &xv) in in_row.iter().enumerate() {
                            let gw_row = &mut gw_tap[c * oc..(c + 1) * oc];
                            for (ge, &gv) in gw_row.iter_mut().zip(gy_row) {
                                *ge += xv * gv;
                            }
                        }
                    }
                }
            }
        }
        {
            let gb = self.bias.grad_mut();
            for b in 0..batch {
                for j in 0..out_len {
                    let gy_row = &gy[(b * out_len + j) * oc..(b * out_len + j + 1) * oc];
                    for (be, &gv) in gb.iter_mut().zip(gy_row) {
                        *be += gv;
                    }
                }
            }
        }
        Ok(grad_in)
    }
}

impl ParamSet for Conv1d {
    fn for_each_param(&self, f: &mut dyn FnMut(&str, &Tensor)) {
        f("weight", &self.weight);
        f("bias", &self.bias);
    }

    fn for_each_param_mut(&mut self, f: &mut dyn FnMut(&str, &mut Tensor)) {
        f("weight", &mut self.weight);
        f("bias", &mut self.bias);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;

    /// Direct triple-loop reference with explicit zero padding, written
    /// independently of the production loop structure.
    fn conv_reference(
        x: &[f64],
        (b, l, ic): (usize, usize, usize),
        w: &[f64],
        bias: &[f64],
        (k, oc): (usize, usize),
        stride: usize,
        padding: usize,
    ) -> Vec<f64> {
        let out_len = (l + 2 * padding - k) / stride + 1;
        let mut out = vec![0.0; b * out_len * oc];
        for bi in 0..b {
            for j in 0..out_len {
                for o in 0..oc {
                    let mut acc = bias[o];
                    for t in 0..k {
                        for c in 0..ic {
                            let pos = (j * stride + t) as isize - padding as isize;
                            if pos < 0 || pos >= l as isize {
                                continue;
                            }
                            let xv = x[(bi * l + pos as usize) * ic + c];
                            let wv = w[(t * ic + c) * oc + o];
                            acc += xv * wv;
                        }
                    }
                    out[(bi * out_len + j) * oc + o] = acc;
                }
            }
        }
        out
    }

    fn fill_pattern(t: &mut Tensor) {
        // Deterministic, sign-varied values; not a simple ramp so that
        // index mix-ups cannot cancel.
        for (i, v) in t.data_mut().iter_mut().enumerate() {
            let x = (i as f64) * 0.37 + 1.0;
            *v = libm::sin(x) * 0.8 + 0.1 * libm::cos(3.0 * x);
        }
    }

    #[test]
    fn identity_kernel_passes_signal_through() {
        // k=1, stride 1, padding 0, 1->1 channels, unit weight.
        let mut conv = Conv1d::new(1, 1, 1, 1, 0).unwrap();
        conv.weight.data_mut()[0] = 1.0;
        let x = Tensor::from_vec(&[1, 5, 1], vec![3.0, -1.0, 0.5, 2.0, 7.0]).unwrap();
        let y = conv.forward(&x).unwrap();
        assert_eq!(y.data(), x.data());
    }

    #[test]
    fn known_small_case_by_hand() {
        // length 4, k=3, stride 1, padding 1, single channel,
        // w = [1, 2, 3], bias = 0.5, x = [1, 2, 3, 4].
        // out[0] = 0*1 + 1*2 + 2*3 + 0.5 = 8.5
        // out[1] = 1*1 + 2*2 + 3*3 + 0.5 = 14.5
        // out[2] = 2*1 + 3*2 + 4*3 + 0.5 = 20.5
        // out[3] = 3*1 + 4*2 + 0*3 + 0.5 = 11.5
        let mut conv = Conv1d::new(3, 1, 1, 1, 1).unwrap();
        conv.weight.data_mut().copy_from_slice(&[1.0, 2.0, 3.0]);
        conv.bias.data_mut()[0] = 0.5;
        let x = Tensor::from_vec(&[1, 4, 1], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let y = conv.forward(&x).unwrap();
        assert_eq!(y.data(), &[8.5, 14.5, 20.5, 11.5]);
    }

    #[test]
    fn stride_two_halves_length() {
        let conv = Conv1d::new(3, 2, 4, 2, 1).unwrap();
        assert_eq!(conv.out_len(280).unwrap(), 140);
        assert_eq!(conv.out_len(70).unwrap(), 35);
        // padding 0 on an odd length drops the tail sample pair.
        let conv0 = Conv1d::new(3, 2, 4, 2, 0).unwrap();
        assert_eq!(conv0.out_len(35).unwrap(), 17);
    }

    #[test]
    fn forward_matches_triple_loop_reference() {
        for &(b, l, ic, oc, k, stride, padding) in &[
            (2usize, 9usize, 3usize, 5usize, 3usize, 1usize, 1usize),
            (1, 12, 4, 2, 3, 2, 1),
            (3, 7, 2, 3, 5, 2, 0),
            (2, 10, 1, 1, 1, 1, 0),
            (1, 35, 3, 2, 3, 2, 0),
        ] {
            let mut conv = Conv1d::new(k, ic, oc, stride, padding).unwrap();
            fill_pattern(&mut conv.weight);
            fill_pattern(&mut conv.bias);
            let mut x = Tensor::zeros(&[b, l, ic]);
            fill_pattern(&mut x);
            let y = conv.forward(&x).unwrap();
            let want = conv_reference(
                x.data(),
                (b, l, ic),
                conv.weight.data(),
                conv.bias.data(),
                (k, oc),
                stride,
                padding,
            );
            assert_eq!(y.shape(), &[b, (l + 2 * padding - k) / stride + 1, oc]);
            for (got, want) in y.data().iter().zip(&want) {
                assert!((got - want).abs() < 1e-12, "{got} vs {want}");
            }
        }
    }

    #[test]
    fn backward_matches_finite_differences() {
        let (b, l, ic, oc, k) = (2, 8, 3, 4, 3);
        let mut conv = Conv1d::new(k, ic, oc, 2, 1).unwrap();
        fill_pattern(&mut conv.weight);
        fill_pattern(&mut conv.bias);
        let mut x = Tensor::zeros(&[b, l, ic]);
        fill_pattern(&mut x);

        // Scalar loss: fixed projection of the output.
        let mut proj = conv.forward(&x).unwrap();
        fill_pattern(&mut proj);
        let loss = |conv: &Conv1d, x: &Tensor| -> f64 {
            let y = conv.forward(x).unwrap();
            y.data().iter().zip(proj.data()).map(|(a, p)| a * p).sum()
        };

        conv.weight.zero_grad();
        conv.bias.zero_grad();
        let gin = conv.backward(&x, &proj).unwrap();

        let h = 1e-6;
        // d loss / d input
        for i in 0..x.len() {
            let orig = x.data()[i];
            x.data_mut()[i] = orig + h;
            let up = loss(&conv, &x);
            x.data_mut()[i] = orig - h;
            let dn = loss(&conv, &x);
            x.data_mut()[i] = orig;
            let fd = (up - dn) / (2.0 * h);
            assert!((gin.data()[i] - fd).abs() < 1e-6, "input grad {i}: {} vs {fd}", gin.data()[i]);
        }
        // d loss / d weight and bias
        for i in 0..conv.weight.len() {
            let orig = conv.weight.data()[i];
            conv.weight.data_mut()[i] = orig + h;
            let up = loss(&conv, &x);
            conv.weight.data_mut()[i] = orig - h;
            let dn = loss(&conv, &x);
            conv.weight.data_mut()[i] = orig;
            let fd = (up - dn) / (2.0 * h);
            let got = conv.weight.grad().unwrap()[i];
            assert!((got - fd).abs() < 1e-6, "weight grad {i}: {got} vs {fd}");
        }
        for i in 0..conv.bias.len() {
            let orig = conv.bias.data()[i];
            conv.bias.data_mut()[i] = orig + h;
            let up = loss(&conv, &x);
            conv.bias.data_mut()[i] = orig - h;
            let dn = loss(&conv, &x);
            conv.bias.data_mut()[i] = orig;
            let fd = (up - dn) / (2.0 * h);
            let got = conv.bias.grad().unwrap()[i];
            assert!((got - fd).abs() < 1e-6, "bias grad {i}: {got} vs {fd}");
        }
    }

    #[test]
    fn rejects_bad_shapes() {
        let conv = Conv1d::new(3, 2, 4, 1, 1).unwrap();
        let flat = Tensor::zeros(&[4, 2]);
        assert!(conv.forward(&flat).is_err());
        let wrong_ch = Tensor::zeros(&[1, 8, 3]);
        assert!(conv.forward(&wrong_ch).is_err());
        let too_short = Tensor::zeros(&[1, 1, 2]);
        let conv_nopad = Conv1d::new(3, 2, 4, 1, 0).unwrap();
        assert!(conv_nopad.forward(&too_short).is_err());
    }
}
