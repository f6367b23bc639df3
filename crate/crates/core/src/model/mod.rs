//! The generator and discriminator networks and their shared pieces.

pub mod arch;
mod blocks;
mod discriminator;
mod generator;
mod inputs;
pub mod noise;

pub use arch::{DiscriminatorArch, GeneratorArch, NUM_CLASSES};
pub use discriminator::{DiscriminatorCache, DiscriminatorModel, DiscriminatorOut};
pub use generator::{GeneratorCache, GeneratorModel};
pub use inputs::{
    assemble_discriminator_input, assemble_generator_input, extract_signal_channel,
    validate_one_hot,
};
pub use noise::{gaussian_kernel, make_noise, smooth_reflect};
