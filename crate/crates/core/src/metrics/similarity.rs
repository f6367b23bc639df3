//! Signal-similarity metrics between synthesized and source beats.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fmath;

fn check_pair(a: &[f64], b: &[f64], context: &'static str) -> Result<()> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::shape(
            context,
            format!("need equal nonzero lengths, got {} and {}", a.len(), b.len()),
        ));
    }
    Ok(())
}

/// Mean squared difference.
pub fn mse(a: &[f64], b: &[f64]) -> Result<f64> {
    check_pair(a, b, "mse")?;
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        acc += (x - y) * (x - y);
    }
    Ok(acc / a.len() as f64)
}

/// Root mean squared error normalized by the dynamic range of the
/// reference signal `b`.
pub fn nrmse(a: &[f64], b: &[f64]) -> Result<f64> {
    check_pair(a, b, "nrmse")?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in b {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !(hi > lo) {
        return Err(Error::degenerate("nrmse", "constant reference signal has no range"));
    }
    Ok(fmath::sqrt(mse(a, b)?) / (hi - lo))
}

/// Pearson correlation at zero lag.
pub fn cross_correlation(a: &[f64], b: &[f64]) -> Result<f64> {
    check_pair(a, b, "cross_correlation")?;
    let n = a.len() as f64;
    let mean_a: f64 = a.iter().sum::<f64>() / n;
    let mean_b: f64 = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    for (x, y) in a.iter().zip(b) {
        let da = x - mean_a;
        let db = y - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if var_a == 0.0 || var_b == 0.0 {
        return Err(Error::degenerate("cross_correlation", "zero-variance input"));
    }
    Ok(cov / fmath::sqrt(var_a * var_b))
}

/// Sliding-window SSIM configuration. Statistics inside each window are
/// population (biased) moments, the convention of the original SSIM.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SsimConfig {
    pub window: usize,
    pub k1: f64,
    pub k2: f64,
    pub dynamic_range: f64,
}

impl Default for SsimConfig {
    fn default() -> Self {
        SsimConfig { window: 11, k1: 0.01, k2: 0.03, dynamic_range: 1.0 }
    }
}

/// Mean SSIM over all full stride-1 windows, uniform weighting.
pub fn ssim_1d(a: &[f64], b: &[f64], cfg: &SsimConfig) -> Result<f64> {
    check_pair(a, b, "ssim_1d")?;
    if cfg.window == 0 || a.len() < cfg.window {
        return Err(Error::invalid(
            "ssim_1d",
            format!("signal length {} shorter than window {}", a.len(), cfg.window),
        ));
    }
    let c1 = (cfg.k1 * cfg.dynamic_range) * (cfg.k1 * cfg.dynamic_range);
    let c2 = (cfg.k2 * cfg.dynamic_range) * (cfg.k2 * cfg.dynamic_range);
    let w = cfg.window;
    let inv_w = 1.0 / w as f64;
    let mut total = 0.0;
    let windows = a.len() - w + 1;
    for start in 0..windows {
        let wa = &a[start..start + w];
        let wb = &b[start..start + w];
        let mu_a: f64 = wa.iter().sum::<f64>() * inv_w;
        let mu_b: f64 = wb.iter().sum::<f64>() * inv_w;
        let mut var_a = 0.0;
        let mut var_b = 0.0;
        let mut cov = 0.0;
        for (x, y) in wa.iter().zip(wb) {
            let da = x - mu_a;
            let db = y - mu_b;
            var_a += da * da;
            var_b += db * db;
            cov += da * db;
        }
        var_a *= inv_w;
        var_b *= inv_w;
        cov *= inv_w;
        total += ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2))
            / ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
    }
    Ok(total / windows as f64)
}

/// Aggregated similarity over a set of beat pairs.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimilarityStats {
    pub n_pairs: usize,
    pub mse: f64,
    pub ssim: f64,
    pub cross_correlation: f64,
    pub nrmse: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassSimilarity {
    pub class: String,
    pub stats: SimilarityStats,
}

/// Overall and per-class similarity, mean over pairs.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimilarityReport {
    pub overall: SimilarityStats,
    /// Classes with at least one pair, in class-index order.
    pub per_class: Vec<ClassSimilarity>,
}

/// Accumulates per-pair metric values and averages them.
#[derive(Debug, Clone, Default)]
pub struct SimilarityAccumulator {
    n: usize,
    mse: f64,
    ssim: f64,
    corr: f64,
    nrmse: f64,
}

impl SimilarityAccumulator {
    /// `a` is the synthesized signal, `b` the real reference.
    pub fn add_pair(&mut self, a: &[f64], b: &[f64], ssim_cfg: &SsimConfig) -> Result<()> {
        self.mse += mse(a, b)?;
        self.ssim += ssim_1d(a, b, ssim_cfg)?;
        self.corr += cross_correlation(a, b)?;
        self.nrmse += nrmse(a, b)?;
        self.n += 1;
        Ok(())
    }

    pub fn n_pairs(&self) -> usize {
        self.n
    }

    pub fn finish(&self) -> Result<SimilarityStats> {
        if self.n == 0 {
            return Err(Error::invalid("similarity aggregation", "no pairs accumulated"));
        }
        let inv = 1.0 / self.n as f64;
        Ok(SimilarityStats {
            n_pairs: self.n,
            mse: self.mse * inv,
            ssim: self.ssim * inv,
            cross_correlation: self.corr * inv,
            nrmse: self.nrmse * inv,
        })
    }
}
