//! Adam optimizer.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fmath;
use crate::params::ParamSet;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AdamConfig {
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig { alpha: 2e-4, beta1: 0.5, beta2: 0.999, epsilon: 1e-8 }
    }
}

impl AdamConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::invalid("adam config", format!("alpha must be > 0, got {}", self.alpha)));
        }
        for (name, b) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(0.0..1.0).contains(&b) {
                return Err(Error::invalid("adam config", format!("{name} must be in [0, 1), got {b}")));
            }
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::invalid(
                "adam config",
                format!("epsilon must be > 0, got {}", self.epsilon),
            ));
        }
        Ok(())
    }
}

struct Slot {
    name: String,
    m: Vec<f64>,
    v: Vec<f64>,
}

/// Adam with bias correction:
///
/// ```text
/// m <- b1 m + (1 - b1) g        v <- b2 v + (1 - b2) g^2
/// p <- p - alpha * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps)
/// ```
///
/// Moment slots bind lazily to the first parameter set stepped; later
/// steps must present the same parameters in the same order.
pub struct Adam {
    cfg: AdamConfig,
    t: u64,
    beta1_t: f64,
    beta2_t: f64,
    slots: Vec<Slot>,
}

impl Adam {
    pub fn new(cfg: AdamConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Adam { cfg, t: 0, beta1_t: 1.0, beta2_t: 1.0, slots: Vec::new() })
    }

    pub fn config(&self) -> &AdamConfig {
        &self.cfg
    }

    pub fn steps_taken(&self) -> u64 {
        self.t
    }

    /// Applies one update using the gradients currently stored on the
    /// parameters. Every parameter must carry a gradient.
    pub fn step<M: ParamSet + ?Sized>(&mut self, model: &mut M) -> Result<()> {
        self.t += 1;
        self.beta1_t *= self.cfg.beta1;
        self.beta2_t *= self.cfg.beta2;
        let bc1 = 1.0 - self.beta1_t;
        let bc2 = 1.0 - self.beta2_t;
        let AdamConfig { alpha, beta1, beta2, epsilon } = self.cfg;

        let first_step = self.slots.is_empty();
        let slots = &mut self.slots;
        let mut idx = 0usize;
        let mut failure: Option<Error> = None;
        model.for_each_param_mut(&mut |name, tensor| {
            if failure.is_some() {
                return;
            }
            if first_step {
                slots.push(Slot {
                    name: name.to_string(),
                    m: vec![0.0; tensor.len()],
                    v: vec![0.0; tensor.len()],
                });
            }
            let Some(slot) = slots.get_mut(idx) else {
                failure = Some(Error::invalid(
                    "adam step",
                    format!("unexpected extra parameter {name}: optimizer bound to a smaller set"),
                ));
                return;
            };
            if slot.name != name || slot.m.len() != tensor.len() {
                failure = Some(Error::invalid(
                    "adam step",
                    format!(
                        "parameter {idx} is {name}[{}], optimizer expects {}[{}]",
                        tensor.len(),
                        slot.name,
                        slot.m.len()
                    ),
                ));
                return;
            }
            let Some(grad) = tensor.grad() else {
                failure = Some(Error::invalid(
                    "adam step",
                    format!("parameter {name} has no gradient"),
                ));
                return;
            };
            // grad() and data_mut() cannot be borrowed simultaneously;
            // the moment update reads grads first, then params mutate.
            for ((mv, vv), &g) in slot.m.iter_mut().zip(slot.v.iter_mut()).zip(grad) {
                *mv = beta1 * *mv + (1.0 - beta1) * g;
                *vv = beta2 * *vv + (1.0 - beta2) * g * g;
            }
            for ((p, &mv), &vv) in
                tensor.data_mut().iter_mut().zip(slot.m.iter()).zip(slot.v.iter())
            {
                let mhat = mv / bc1;
                let vhat = vv / bc2;
                *p -= alpha * mhat / (fmath::sqrt(vhat) + epsilon);
            }
            idx += 1;
        });
        if let Some(e) = failure {
            return Err(e);
        }
        if !first_step && idx != slots.len() {
            return Err(Error::invalid(
                "adam step",
                format!("parameter set shrank: saw {idx} of {} bound parameters", slots.len()),
            ));
        }
        Ok(())
    }
}
