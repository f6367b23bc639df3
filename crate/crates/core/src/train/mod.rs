//! Adversarial training: losses, per-batch steps, and the epoch loop.

pub mod config;
pub mod losses;
pub mod step;
pub mod trainer;

pub use config::TrainingConfig;
pub use step::{discriminator_phase, generator_phase, train_step, DPhaseLosses, GPhaseLosses, StepLosses};
pub use trainer::{batch_tensors, train, NullObserver, StepRecord, TrainObserver};
