//! Fully connected layer over `[batch, features]` activations.

use alloc::format;

use crate::error::{Error, Result};
use crate::params::ParamSet;
use crate::tensor::Tensor;

/// Affine map `out = in @ weight + bias`, weight layout `[in, out]`.
#[derive(Debug, Clone)]
pub struct Dense {
    pub weight: Tensor,
    pub bias: Tensor,
}

impl Dense {
    pub fn new(in_features: usize, out_features: usize) -> Result<Self> {
        if in_features == 0 || out_features == 0 {
            return Err(Error::invalid(
                "dense construction",
                format!("features must be nonzero, got {in_features}/{out_features}"),
            ));
        }
        Ok(Dense {
            weight: Tensor::zeros(&[in_features, out_features]),
            bias: Tensor::zeros(&[out_features]),
        })
    }

    pub fn in_features(&self) -> usize {
        self.weight.dim(0)
    }

    pub fn out_features(&self) -> usize {
        self.weight.dim(1)
    }

    fn check_input(&self, input: &Tensor, context: &'static str) -> Result<()> {
        if input.rank() != 2 || input.dim(1) != self.in_features() {
            return Err(Error::shape(
                context,
                format!(
                    "expected [batch, {}], got {:?}",
                    self.in_features(),
                    input.shape()
                ),
            ));
        }
        Ok(())
    }

    pub fn forward(&self, input: &Tensor) -> Result<Tensor> {
        self.check_input(input, "dense forward")?;
        let (batch, nin, nout) = (input.dim(0), self.in_features(), self.out_features());
        let mut out = Tensor::zeros(&[batch, nout]);
        let w = self.weight.data();
        let x = input.data();
        let o = out.data_mut();
        for b in 0..batch {
            let out_row = &mut o[b * nout..(b + 1) * nout];
            out_row.copy_from_slice(self.bias.data());
            let in_row = &x[b * nin..(b + 1) * nin];
            for (i, &xv) in in_row.iter().enumerate() {
                let w_row = &w[i * nout..(i + 1) * nout];
                for (ov, &wv) in out_row.iter_mut().zip(w_row) {
                    *ov += xv * wv;
                }
            }
        }
        Ok(out)
    }

    pub fn backward(&mut self, input: &Tensor, grad_out: &Tensor) -> Result<Tensor> {
        self.check_input(input, "dense backward")?;
        let (batch, nin, nout) = (input.dim(0), self.in_features(), self.out_features());
        if grad_out.shape() != [batch, nout] {
            return Err(Error::shape(
                "dense backward",
                format!("grad_out shape {:?} does not match [{batch}, {nout}]", grad_out.shape()),
            ));
        }
        let mut grad_in = Tensor::zeros(&[batch, nin]);
        let x = input.data();
        let gy = grad_out.data();
        let w = self.weight.data();
        {
            let gx = grad_in.data_mut();
            for b in 0..batch {
                let gy_row = &gy[b * nout..(b + 1) * nout];
                let gx_row = &mut gx[b * nin..(b + 1) * nin];
                for (i, ge) in gx_row.iter_mut().enumerate() {
                    let w_row = &w[i * nout..(i + 1) * nout];
                    let mut acc = 0.0;
                    for (&gv, &wv) in gy_row.iter().zip(w_row) {
                        acc += gv * wv;
                    }
                    *ge = acc;
                }
            }
        }
        {
            let gw = self.weight.grad_mut();
            for b in 0..batch {
                let gy_row = &gy[b * nout..(b + 1) * nout];
                let in_row = &x[b * nin..(b + 1) * nin];
                for (i, &xv) in in_row.iter().enumerate() {
                    let gw_row = &mut gw[i * nout..(i + 1) * nout];
                    for (ge, &gv) in gw_row.iter_mut().zip(gy_row) {
                        *ge += xv * gv;
                    }
                }
            }
        }
        {
            let gb = self.bias.grad_mut();
            for b in 0..batch {
                let gy_row = &gy[b * nout..(b + 1) * nout];
                for (be, &gv) in gb.iter_mut().zip(gy_row) {
                    *be += gv;
                }
            }
        }
        Ok(grad_in)
    }
}

impl ParamSet for Dense {
    fn for_each_param(&self, f: &mut dyn FnMut(&str, &Tensor)) {
        f("weight", &self.weight);
        f("bias", &self.bias);
    }

    fn for_each_param_mut(&mut self, f: &mut dyn FnMut(&str, &mut Tensor)) {
        f("weight", &mut self.weight);
        f("bias", &mut self.bias);
    }
}
