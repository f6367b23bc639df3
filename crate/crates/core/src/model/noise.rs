//! Noise input for the generator: uniform draws smoothed by a Gaussian
//! kernel so the noise has beat-like low-frequency structure.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::fmath;
use crate::tensor::Tensor;

/// Normalized Gaussian kernel with radius `ceil(3 * sigma)`.
pub fn gaussian_kernel(sigma: f64) -> Result<Vec<f64>> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::invalid("gaussian kernel", format!("sigma must be > 0, got {sigma}")));
    }
    let radius = {
        let r = 3.0 * sigma;
        let mut n = r as usize;
        if (n as f64) < r {
            n += 1;
        }
        n
    };
    let mut kernel = vec![0.0; 2 * radius + 1];
    let denom = 2.0 * sigma * sigma;
    let mut sum = 0.0;
    for (i, w) in kernel.iter_mut().enumerate() {
        let d = i as f64 - radius as f64;
        *w = fmath::exp(-d * d / denom);
        sum += *w;
    }
    for w in kernel.iter_mut() {
        *w /= sum;
    }
    Ok(kernel)
}

/// Convolves with reflective boundary handling: position `-1` reads
/// index 0, `-2` reads 1, `len` reads `len - 1`, and so on.
pub fn smooth_reflect(x: &[f64], kernel: &[f64]) -> Result<Vec<f64>> {
    if kernel.is_empty() || kernel.len() % 2 == 0 {
        return Err(Error::invalid(
            "smooth",
            format!("kernel length must be odd and nonzero, got {}", kernel.len()),
        ));
    }
    if x.is_empty() {
        return Err(Error::invalid("smooth", "empty signal"));
    }
    let n = x.len() as isize;
    let radius = (kernel.len() / 2) as isize;
    let mut out = vec![0.0; x.len()];
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (t, &w) in kernel.iter().enumerate() {
            let mut pos = i as isize + t as isize - radius;
            if pos < 0 {
                pos = -pos - 1;
            }
            if pos >= n {
                pos = 2 * n - 1 - pos;
            }
            let pos = pos.clamp(0, n - 1) as usize;
            acc += w * x[pos];
        }
        *o = acc;
    }
    Ok(out)
}

/// Draws a `[batch, len]` noise tensor: per-sample uniform `[0, 1)`
/// draws in row-major order, each row smoothed and clamped to `[0, 1]`.
pub fn make_noise<R: Rng>(rng: &mut R, batch: usize, len: usize, sigma: f64) -> Result<Tensor> {
    if batch == 0 || len == 0 {
        return Err(Error::invalid("make_noise", format!("empty shape [{batch}, {len}]")));
    }
    let kernel = gaussian_kernel(sigma)?;
    let mut out = Tensor::zeros(&[batch, len]);
    let mut row = vec![0.0; len];
    for b in 0..batch {
        for v in row.iter_mut() {
            *v = rng.gen::<f64>();
        }
        let smoothed = smooth_reflect(&row, &kernel)?;
        for (o, s) in out.row2_mut(b).iter_mut().zip(&smoothed) {
            *o = s.clamp(0.0, 1.0);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn kernel_matches_gaussian_density_ratios() {
        // Oracle: w[j] / w[0] must equal exp(-j^2 / (2 sigma^2)), and
        // the kernel must be normalized and symmetric.
        let sigma = 4.0;
        let k = gaussian_kernel(sigma).unwrap();
        assert_eq!(k.len(), 25); // radius ceil(12) = 12
        let center = k.len() / 2;
        for j in 0..=12usize {
            let want = libm::exp(-((j * j) as f64) / (2.0 * sigma * sigma));
            let got = k[center + j] / k[center];
            assert!((got - want).abs() < 1e-12, "offset {j}: {got} vs {want}");
            assert_eq!(k[center + j], k[center - j]);
        }
        let sum: f64 = k.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kernel_radius_rounds_up() {
        // sigma = 1.1 -> radius ceil(3.3) = 4 -> length 9
        assert_eq!(gaussian_kernel(1.1).unwrap().len(), 9);
        // sigma = 1.0 -> radius 3 exactly -> length 7
        assert_eq!(gaussian_kernel(1.0).unwrap().len(), 7);
    }

    #[test]
    fn smoothing_constant_signal_is_identity() {
        let x = vec![0.7; 40];
        let k = gaussian_kernel(2.0).unwrap();
        let y = smooth_reflect(&x, &k).unwrap();
        for v in y {
            assert!((v - 0.7).abs() < 1e-12);
        }
    }

    #[test]
    fn smoothing_small_case_by_hand() {
        // kernel [0.25, 0.5, 0.25] on [1, 2, 4] with reflection:
        // y0 = 0.25*x[-1 -> 0] + 0.5*x0 + 0.25*x1 = 0.25 + 0.5 + 0.5 = 1.25
        // y1 = 0.25*1 + 0.5*2 + 0.25*4 = 2.25
        // y2 = 0.25*2 + 0.5*4 + 0.25*x[3 -> 2] = 0.5 + 2 + 1 = 3.5
        let y = smooth_reflect(&[1.0, 2.0, 4.0], &[0.25, 0.5, 0.25]).unwrap();
        assert_eq!(y, vec![1.25, 2.25, 3.5]);
    }

    #[test]
    fn noise_is_deterministic_in_range_and_smooth() {
        let mut r1 = ChaCha20Rng::seed_from_u64(5);
        let mut r2 = ChaCha20Rng::seed_from_u64(5);
        let a = make_noise(&mut r1, 3, 280, 4.0).unwrap();
        let b = make_noise(&mut r2, 3, 280, 4.0).unwrap();
        assert_eq!(a.data(), b.data());
        assert!(a.data().iter().all(|&v| (0.0..=1.0).contains(&v)));

        // Smoothed uniform noise has far lower sample-to-sample jumps
        // than raw uniform noise.
        let mut raw = ChaCha20Rng::seed_from_u64(5);
        let mut raw_jump = 0.0;
        let mut prev = raw.gen::<f64>();
        for _ in 1..280 {
            let v = raw.gen::<f64>();
            raw_jump += (v - prev).abs();
            prev = v;
        }
        let mut smooth_jump = 0.0;
        for i in 1..280 {
            smooth_jump += (a.row2(0)[i] - a.row2(0)[i - 1]).abs();
        }
        assert!(smooth_jump < raw_jump / 4.0, "{smooth_jump} vs {raw_jump}");
    }
}
