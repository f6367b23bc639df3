//! Training hyperparameters.

use alloc::format;

use crate::adam::AdamConfig;
use crate::error::{Error, Result};

/// Everything a training run needs besides the data and architectures.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainingConfig {
    pub adam: AdamConfig,
    /// Weight of the reconstruction term in the generator objective.
    pub lambda_rec: f64,
    /// Weight of the categorical term in both objectives.
    pub lambda_class: f64,
    pub batch_size: usize,
    pub epochs: usize,
    /// Master seed; see [`crate::seeds`] for the stream layout.
    pub seed: u64,
    /// Gaussian smoothing width for the noise input.
    pub noise_sigma: f64,
    /// Emit per-class sample snapshots every this many epochs; 0 disables.
    pub snapshot_every: usize,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            adam: AdamConfig::default(),
            lambda_rec: 1.0,
            lambda_class: 10.0,
            batch_size: 64,
            epochs: 200,
            seed: 42,
            noise_sigma: 4.0,
            snapshot_every: 10,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        self.adam.validate()?;
        for (name, v) in [("lambda_rec", self.lambda_rec), ("lambda_class", self.lambda_class)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(
                    "training config",
                    format!("{name} must be finite and >= 0, got {v}"),
                ));
            }
        }
        if self.batch_size < 2 {
            return Err(Error::invalid(
                "training config",
                format!("batch size must be >= 2 for batch statistics, got {}", self.batch_size),
            ));
        }
        if !(self.noise_sigma > 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::invalid(
                "training config",
                format!("noise sigma must be > 0, got {}", self.noise_sigma),
            ));
        }
        Ok(())
    }
}
