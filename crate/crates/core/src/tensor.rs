//! Dense row-major tensors of rank 1 to 3.
//!
//! Layout conventions used across the crate:
//! * batched signals are `[batch, length, channels]` (channels-last, so
//!   the innermost loops of conv kernels walk contiguous memory),
//! * dense activations are `[batch, features]`,
//! * conv weights are `[kernel, in_channels, out_channels]`,
//! * transposed-conv weights are `[kernel, out_channels, in_channels]`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// A dense tensor with optional gradient storage.
///
/// The gradient buffer is lazily allocated and always has the same
/// length as `data`. Shape extents are all nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
    grad: Option<Vec<f64>>,
}

impl Tensor {
    /// Builds a tensor from a flat buffer, validating that the shape has
    /// rank 1..=3, has no zero extents, and matches the buffer length.
    pub fn from_vec(shape: &[usize], data: Vec<f64>) -> Result<Self> {
        Self::check_shape(shape)?;
        let expected: usize = shape.iter().product();
        if expected != data.len() {
            return Err(Error::shape(
                "tensor construction",
                alloc::format!(
                    "shape {:?} implies {} elements, buffer holds {}",
                    shape,
                    expected,
                    data.len()
                ),
            ));
        }
        Ok(Tensor { shape: shape.to_vec(), data, grad: None })
    }

    /// A zero-filled tensor. Panics on an invalid shape; use `from_vec`
    /// when the shape comes from untrusted input.
    pub fn zeros(shape: &[usize]) -> Self {
        Self::check_shape(shape).expect("tensor shape must have rank 1..=3 with nonzero extents");
        let n: usize = shape.iter().product();
        Tensor { shape: shape.to_vec(), data: vec![0.0; n], grad: None }
    }

    pub fn filled(shape: &[usize], value: f64) -> Self {
        let mut t = Self::zeros(shape);
        t.data.iter_mut().for_each(|x| *x = value);
        t
    }

    fn check_shape(shape: &[usize]) -> Result<()> {
        if shape.is_empty() || shape.len() > 3 {
            return Err(Error::shape(
                "tensor construction",
                alloc::format!("rank must be 1..=3, got shape {:?}", shape),
            ));
        }
        if shape.iter().any(|&d| d == 0) {
            return Err(Error::shape(
                "tensor construction",
                alloc::format!("zero extent in shape {:?}", shape),
            ));
        }
        Ok(())
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    /// Extent along axis `i`.
    pub fn dim(&self, i: usize) -> usize {
        self.shape[i]
    }

    /// Total number of elements.
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    /// Same data, new shape. Element count must be preserved.
    pub fn reshaped(&self, shape: &[usize]) -> Result<Tensor> {
        Self::check_shape(shape)?;
        let expected: usize = shape.iter().product();
        if expected != self.data.len() {
            return Err(Error::shape(
                "tensor reshape",
                alloc::format!(
                    "cannot view {} elements as {:?}",
                    self.data.len(),
                    shape
                ),
            ));
        }
        Ok(Tensor { shape: shape.to_vec(), data: self.data.clone(), grad: None })
    }

    pub fn grad(&self) -> Option<&[f64]> {
        self.grad.as_deref()
    }

    /// Gradient buffer, allocated as zeros on first use.
    pub fn grad_mut(&mut self) -> &mut [f64] {
        if self.grad.is_none() {
            self.grad = Some(vec![0.0; self.data.len()]);
        }
        self.grad.as_deref_mut().expect("grad allocated above")
    }

    /// Clears the gradient to zero (allocating it if absent).
    pub fn zero_grad(&mut self) {
        match self.grad.as_deref_mut() {
            Some(g) => g.iter_mut().for_each(|x| *x = 0.0),
            None => self.grad = Some(vec![0.0; self.data.len()]),
        }
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Contiguous channel row at `[b, l, ..]` of a rank-3 tensor.
    pub fn row3(&self, b: usize, l: usize) -> &[f64] {
        debug_assert_eq!(self.rank(), 3);
        let c = self.shape[2];
        let start = (b * self.shape[1] + l) * c;
        &self.data[start..start + c]
    }

    /// Contiguous feature row at `[b, ..]` of a rank-2 tensor.
    pub fn row2(&self, b: usize) -> &[f64] {
        debug_assert_eq!(self.rank(), 2);
        let f = self.shape[1];
        &self.data[b * f..(b + 1) * f]
    }

    pub fn row2_mut(&mut self, b: usize) -> &mut [f64] {
        debug_assert_eq!(self.rank(), 2);
        let f = self.shape[1];
        &mut self.data[b * f..(b + 1) * f]
    }
}
