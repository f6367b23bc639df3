//! Elementwise and row-wise activations with explicit backward passes.

use alloc::format;

use crate::error::{Error, Result};
use crate::fmath;
use crate::tensor::Tensor;

/// `x >= 0 ? x : slope * x`. The derivative at exactly 0 is taken as 1.
pub fn leaky_relu(x: &Tensor, slope: f64) -> Tensor {
    let mut out = x.clone();
    for v in out.data_mut() {
        if *v < 0.0 {
            *v *= slope;
        }
    }
    out
}

/// Backward of [`leaky_relu`]; `pre` is the activation's input.
pub fn leaky_relu_backward(pre: &Tensor, grad_out: &Tensor, slope: f64) -> Result<Tensor> {
    if pre.shape() != grad_out.shape() {
        return Err(Error::shape(
            "leaky_relu backward",
            format!("pre shape {:?} vs grad shape {:?}", pre.shape(), grad_out.shape()),
        ));
    }
    let mut out = grad_out.clone();
    for (g, &p) in out.data_mut().iter_mut().zip(pre.data()) {
        if p < 0.0 {
            *g *= slope;
        }
    }
    Ok(out)
}

/// Numerically stable logistic sigmoid.
pub fn sigmoid(x: &Tensor) -> Tensor {
    let mut out = x.clone();
    for v in out.data_mut() {
        *v = sigmoid_scalar(*v);
    }
    out
}

#[inline]
pub fn sigmoid_scalar(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + fmath::exp(-x))
    } else {
        let e = fmath::exp(x);
        e / (1.0 + e)
    }
}

/// Backward of [`sigmoid`]; `out` is the activation's *output*, so the
/// local derivative is `out * (1 - out)`.
pub fn sigmoid_backward(out: &Tensor, grad_out: &Tensor) -> Result<Tensor> {
    if out.shape() != grad_out.shape() {
        return Err(Error::shape(
            "sigmoid backward",
            format!("out shape {:?} vs grad shape {:?}", out.shape(), grad_out.shape()),
        ));
    }
    let mut g = grad_out.clone();
    for (gv, &y) in g.data_mut().iter_mut().zip(out.data()) {
        *gv *= y * (1.0 - y);
    }
    Ok(g)
}

/// Row-wise softmax over a `[batch, classes]` tensor, max-shifted for
/// stability. Every output row sums to 1 up to rounding.
pub fn softmax_rows(x: &Tensor) -> Result<Tensor> {
    if x.rank() != 2 {
        return Err(Error::shape(
            "softmax",
            format!("expected [batch, classes], got {:?}", x.shape()),
        ));
    }
    let classes = x.dim(1);
    let mut out = x.clone();
    for row in out.data_mut().chunks_exact_mut(classes) {
        let mut max = f64::NEG_INFINITY;
        for &v in row.iter() {
            if v > max {
                max = v;
            }
        }
        let mut sum = 0.0;
        for v in row.iter_mut() {
            *v = fmath::exp(*v - max);
            sum += *v;
        }
        for v in row.iter_mut() {
            *v /= sum;
        }
    }
    Ok(out)
}

/// Backward of [`softmax_rows`] given its output:
/// `dx = y * (dy - sum(y * dy))` per row.
pub fn softmax_backward_rows(out: &Tensor, grad_out: &Tensor) -> Result<Tensor> {
    if out.shape() != grad_out.shape() || out.rank() != 2 {
        return Err(Error::shape(
            "softmax backward",
            format!("out shape {:?} vs grad shape {:?}", out.shape(), grad_out.shape()),
        ));
    }
    let classes = out.dim(1);
    let mut g = grad_out.clone();
    for (g_row, y_row) in g.data_mut().chunks_exact_mut(classes).zip(out.data().chunks_exact(classes))
    {
        let mut dot = 0.0;
        for (&gv, &yv) in g_row.iter().zip(y_row) {
            dot += gv * yv;
        }
        for (gv, &yv) in g_row.iter_mut().zip(y_row) {
            *gv = yv * (*gv - dot);
        }
    }
    Ok(g)
}
