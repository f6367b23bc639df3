//! Neural network building blocks: 1D convolutions (plain and
//! transposed), batch normalization, dense layers, activations, and
//! weight initialization.
//!
//! Layers are plain structs over [`crate::Tensor`]. `forward` methods
//! borrow the layer immutably (except batch norm in training mode,
//! which updates running statistics); `backward` methods accumulate
//! parameter gradients into the layers' grad buffers and return the
//! gradient with respect to the layer input. Callers keep whatever
//! activations the backward pass needs; layers do not cache inputs
//! themselves.

mod activations;
mod batchnorm;
mod conv;
mod deconv;
mod dense;
mod init;

pub use activations::{
    leaky_relu, leaky_relu_backward, sigmoid, sigmoid_backward, softmax_backward_rows,
    softmax_rows,
};
pub use batchnorm::{BatchNorm1d, BnCache, Mode};
pub use conv::Conv1d;
pub use deconv::ConvTranspose1d;
pub use dense::Dense;
pub use init::{gaussian_init, INIT_STD};
