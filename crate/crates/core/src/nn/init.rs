//! Weight initialization.

use rand::Rng;

use crate::tensor::Tensor;

/// Standard deviation for all conv/dense weight initialization.
pub const INIT_STD: f64 = 0.02;

/// Fills a tensor with zero-mean Gaussian draws via Box-Muller.
///
/// Each element consumes exactly two uniform draws (`u1` mapped into
/// `(0, 1]` so the log is finite), so the stream position after filling
/// a tensor depends only on its element count. That makes layer-by-layer
/// initialization reproducible from a seeded RNG regardless of platform.
pub fn gaussian_init<R: Rng>(rng: &mut R, t: &mut Tensor, std: f64) {
    for v in t.data_mut() {
        let u1: f64 = 1.0 - rng.gen::<f64>();
        let u2: f64 = rng.gen::<f64>();
        let mag = crate::fmath::sqrt(-2.0 * crate::fmath::ln(u1));
        *v = std * mag * crate::fmath::cos(2.0 * crate::fmath::PI * u2);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn init_is_deterministic_and_plausibly_gaussian() {
        let mut a = Tensor::zeros(&[10_000]);
        let mut b = Tensor::zeros(&[10_000]);
        let mut r1 = ChaCha20Rng::seed_from_u64(7);
        let mut r2 = ChaCha20Rng::seed_from_u64(7);
        gaussian_init(&mut r1, &mut a, INIT_STD);
        gaussian_init(&mut r2, &mut b, INIT_STD);
        assert_eq!(a.data(), b.data());

        let n = a.len() as f64;
        let mean: f64 = a.data().iter().sum::<f64>() / n;
        let var: f64 = a.data().iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        // loose statistical bounds: mean near 0, std near 0.02
        assert!(mean.abs() < 1e-3, "mean {mean}");
        assert!((libm::sqrt(var) - INIT_STD).abs() < 2e-3, "std {}", libm::sqrt(var));
    }

    #[test]
    fn different_seeds_differ() {
        let mut a = Tensor::zeros(&[64]);
        let mut b = Tensor::zeros(&[64]);
        gaussian_init(&mut ChaCha20Rng::seed_from_u64(1), &mut a, INIT_STD);
        gaussian_init(&mut ChaCha20Rng::seed_from_u64(2), &mut b, INIT_STD);
        assert_ne!(a.data(), b.data());
    }
}
