//! Finite-difference verification of analytic gradients.
//!
//! The checker compares the gradients a backward pass left on a model's
//! parameters against central differences of a caller-supplied scalar
//! loss. The loss closure must be a pure function of the parameters
//! (fixed inputs, fixed projection, no RNG, no running-statistic
//! updates), so probes evaluate the same function the backward pass
//! differentiated.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::fmath;
use crate::params::ParamSet;
use crate::seeds::seeded_stream;

pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// Floor in the relative-error denominator; gradients this small are
/// compared absolutely.
pub const REL_ERR_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct BlockReport {
    pub name: String,
    /// Coordinates probed (the whole block, or a seeded sample).
    pub checked: usize,
    pub max_rel_err: f64,
    /// Coordinate where the maximum occurred.
    pub worst_coord: usize,
}

#[derive(Debug, Clone)]
pub struct GradCheckReport {
    pub blocks: Vec<BlockReport>,
}

impl GradCheckReport {
    pub fn max_rel_err(&self) -> f64 {
        let mut m = 0.0f64;
        for b in &self.blocks {
            if b.max_rel_err > m {
                m = b.max_rel_err;
            }
        }
        m
    }

    pub fn total_checked(&self) -> usize {
        self.blocks.iter().map(|b| b.checked).sum()
    }
}

/// Configuration for one check run.
#[derive(Debug, Clone, Copy)]
pub struct GradCheck {
    pub step: f64,
    /// `None` probes every coordinate; `Some(n)` probes a seeded sample
    /// of up to `n` coordinates per parameter block.
    pub coords_per_block: Option<usize>,
    pub seed: u64,
    /// Floor in the relative-error denominator. Gradients below it are
    /// compared absolutely, so it sets the scale below which difference
    /// noise is forgiven; deep compositions need a floor well above the
    /// finite-difference noise on their exactly-zero gradients.
    pub rel_floor: f64,
}

impl Default for GradCheck {
    fn default() -> Self {
        GradCheck {
            step: DEFAULT_FD_STEP,
            coords_per_block: None,
            seed: 0,
            rel_floor: REL_ERR_FLOOR,
        }
    }
}

fn poke<M: ParamSet + ?Sized>(model: &mut M, block: usize, coord: usize, delta: f64) {
    let mut i = 0usize;
    model.for_each_param_mut(&mut |_, t| {
        if i == block {
            t.data_mut()[coord] += delta;
        }
        i += 1;
    });
}

impl GradCheck {
    /// Compares the analytic gradients currently stored on `model`
    /// against central differences of `loss`. Parameters are restored
    /// exactly after each probe (perturbations set and reset the same
    /// coordinate, so restoring writes back the original bits).
    pub fn run<M, L>(&self, model: &mut M, mut loss: L) -> Result<GradCheckReport>
    where
        M: ParamSet + ?Sized,
        L: FnMut(&mut M) -> Result<f64>,
    {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::invalid("gradient check", "step must be positive and finite"));
        }
        if !(self.rel_floor > 0.0 && self.rel_floor.is_finite()) {
            return Err(Error::invalid("gradient check", "rel_floor must be positive and finite"));
        }
        // Snapshot analytic gradients and originals.
        let mut analytic: Vec<(String, Vec<f64>)> = Vec::new();
        let mut originals: Vec<Vec<f64>> = Vec::new();
        let mut missing: Option<String> = None;
        model.for_each_param(&mut |name, t| {
            match t.grad() {
                Some(g) => analytic.push((name.to_string(), g.to_vec())),
                None => {
                    if missing.is_none() {
                        missing = Some(name.to_string());
                    }
                }
            }
            originals.push(t.data().to_vec());
        });
        if let Some(name) = missing {
            return Err(Error::invalid(
                "gradient check",
                alloc::format!("parameter {name} carries no analytic gradient; run backward first"),
            ));
        }

        let mut blocks = Vec::new();
        for (bi, (name, grads)) in analytic.iter().enumerate() {
            let n = grads.len();
            let coords: Vec<usize> = match self.coords_per_block {
                Some(limit) if limit < n => {
                    // Seeded sample without replacement, stream = block
                    // index so reports are stable per block.
                    let mut rng = seeded_stream(self.seed, bi as u64);
                    sample_distinct(&mut rng, n, limit)
                }
                _ => (0..n).collect(),
            };
            let mut max_rel = 0.0f64;
            let mut worst = 0usize;
            for &c in &coords {
                let orig = originals[bi][c];
                poke(model, bi, c, self.step);
                let up = loss(model)?;
                poke(model, bi, c, -2.0 * self.step);
                let down = loss(model)?;
                // restore the exact original value
                let mut i = 0usize;
                model.for_each_param_mut(&mut |_, t| {
                    if i == bi {
                        t.data_mut()[c] = orig;
                    }
                    i += 1;
                });
                let fd = (up - down) / (2.0 * self.step);
                let a = grads[c];
                let denom = fmath::abs(a).max(fmath::abs(fd)).max(self.rel_floor);
                let rel = fmath::abs(a - fd) / denom;
                if rel > max_rel {
                    max_rel = rel;
                    worst = c;
                }
            }
            blocks.push(BlockReport {
                name: name.clone(),
                checked: coords.len(),
                max_rel_err: max_rel,
                worst_coord: worst,
            });
        }
        Ok(GradCheckReport { blocks })
    }
}

/// `m` distinct indices from `0..n` by partial Fisher-Yates, returned
/// in draw order.
fn sample_distinct<R: Rng>(rng: &mut R, n: usize, m: usize) -> Vec<usize> {
    debug_assert!(m <= n);
    let mut pool: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let j = rng.gen_range(i..n);
        pool.swap(i, j);
        out.push(pool[i]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Tensor;

    /// loss = sum((p - c)^2), grad = 2 (p - c)
    struct Quadratic {
        p: Tensor,
        c: Vec<f64>,
    }

    impl ParamSet for Quadratic {
        fn for_each_param(&self, f: &mut dyn FnMut(&str, &Tensor)) {
            f("p", &self.p);
        }
        fn for_each_param_mut(&mut self, f: &mut dyn FnMut(&str, &mut Tensor)) {
            f("p", &mut self.p);
        }
    }

    fn quad_loss(q: &mut Quadratic) -> Result<f64> {
        Ok(q.p.data().iter().zip(&q.c).map(|(p, c)| (p - c) * (p - c)).sum())
    }

    #[test]
    fn correct_gradient_passes() {
        let mut q = Quadratic {
            p: Tensor::from_vec(&[4], alloc::vec![0.3, -0.7, 1.2, 0.0]).unwrap(),
            c: alloc::vec![1.0, -1.0, 0.5, 0.25],
        };
        q.p.zero_grad();
        for i in 0..4 {
            let g = 2.0 * (q.p.data()[i] - q.c[i]);
            q.p.grad_mut()[i] = g;
        }
        let report = GradCheck::default().run(&mut q, quad_loss).unwrap();
        assert_eq!(report.total_checked(), 4);
        assert!(report.max_rel_err() < 1e-8, "max rel err {}", report.max_rel_err());
        // parameters restored exactly
        assert_eq!(q.p.data(), &[0.3, -0.7, 1.2, 0.0]);
    }

    #[test]
    fn planted_gradient_error_is_caught() {
        let mut q = Quadratic {
            p: Tensor::from_vec(&[3], alloc::vec![0.9, -0.4, 0.1]).unwrap(),
            c: alloc::vec![0.0, 0.0, 0.0],
        };
        q.p.zero_grad();
        for i in 0..3 {
            // off by 3%
            q.p.grad_mut()[i] = 2.0 * q.p.data()[i] * 1.03;
        }
        let report = GradCheck::default().run(&mut q, quad_loss).unwrap();
        assert!(report.max_rel_err() > 1e-2, "planted error not caught");
    }

    #[test]
    fn sampling_respects_limit_and_is_deterministic() {
        let mut q = Quadratic { p: Tensor::zeros(&[100]), c: alloc::vec![0.1; 100] };
        q.p.zero_grad();
        for i in 0..100 {
            q.p.grad_mut()[i] = 2.0 * (q.p.data()[i] - 0.1);
        }
        let check = GradCheck { coords_per_block: Some(10), seed: 5, ..Default::default() };
        let r1 = check.run(&mut q, quad_loss).unwrap();
        let r2 = check.run(&mut q, quad_loss).unwrap();
        assert_eq!(r1.total_checked(), 10);
        assert_eq!(r1.blocks[0].worst_coord, r2.blocks[0].worst_coord);
    }

    #[test]
    fn missing_gradient_is_reported() {
        let mut q = Quadratic { p: Tensor::zeros(&[2]), c: alloc::vec![0.0; 2] };
        assert!(GradCheck::default().run(&mut q, quad_loss).is_err());
    }

    #[test]
    fn sample_distinct_covers_range_without_duplicates() {
        let mut rng = seeded_stream(1, 0);
        let s = sample_distinct(&mut rng, 50, 50);
        let mut sorted = s.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 50);
    }
}
