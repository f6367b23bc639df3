//! Conditional GAN engine for single-lead ECG heartbeats.
//!
//! The crate trains one generator against one dual-headed discriminator:
//! the generator maps a real beat, smoothed noise, and a one-hot class
//! label to a synthetic beat of the same class, while the discriminator
//! simultaneously classifies beats into four arrhythmia categories and
//! scores how likely a beat is to be real.
//!
//! Everything here is pure computation over `f64` slices: no files, no
//! clocks, no threads. The companion CLI crate layers IO, checkpoints,
//! and plotting on top. The crate is `no_std` (with `alloc`) so the
//! engine can run in embedded or wasm hosts.
//!
//! Determinism is a hard requirement: every random draw flows from a
//! caller-supplied seed through ChaCha20 streams, and all reductions
//! run in fixed order, so a given (seed, input) pair reproduces outputs
//! bit for bit on any platform.

#![cfg_attr(not(any(test, feature = "std")), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod adam;
pub mod data;
pub mod error;
mod fmath;
pub mod gradcheck;
pub mod metrics;
pub mod model;
pub mod nn;
pub mod params;
pub mod seeds;
pub mod tensor;
pub mod train;

pub use error::{Error, Result};
pub use tensor::Tensor;
