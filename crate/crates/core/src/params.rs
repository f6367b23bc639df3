//! Uniform access to the learnable state of layers and models.
//!
//! One visitor serves four consumers: the Adam optimizer walks
//! parameters to update them, the finite-difference gradient checker
//! perturbs them, checkpointing serializes *state* (parameters plus
//! batch-norm running statistics), and parameter counting audits
//! architectures. Visit order is declaration order and is part of the
//! checkpoint format, so implementations must keep it stable.

use crate::tensor::Tensor;

pub trait ParamSet {
    /// Visits every learnable parameter in a fixed, documented order.
    fn for_each_param(&self, f: &mut dyn FnMut(&str, &Tensor));

    /// Mutable variant of [`ParamSet::for_each_param`]; must visit the
    /// same tensors in the same order.
    fn for_each_param_mut(&mut self, f: &mut dyn FnMut(&str, &mut Tensor));

    /// Visits all persistent state: parameters plus non-learnable
    /// buffers such as batch-norm running statistics. Defaults to the
    /// parameter set for layers without buffers.
    fn for_each_state(&self, f: &mut dyn FnMut(&str, &Tensor)) {
        self.for_each_param(f);
    }

    fn for_each_state_mut(&mut self, f: &mut dyn FnMut(&str, &mut Tensor)) {
        self.for_each_param_mut(f);
    }

    fn param_count(&self) -> usize {
        let mut n = 0;
        self.for_each_param(&mut |_, t| n += t.len());
        n
    }

    fn zero_grads(&mut self) {
        self.for_each_param_mut(&mut |_, t| t.zero_grad());
    }

    /// True when every parameter (not buffers) is finite.
    fn params_finite(&self) -> bool {
        let mut ok = true;
        self.for_each_param(&mut |_, t| ok &= t.all_finite());
        ok
    }
}

/// Wraps a visitor so every reported name gains a `prefix.` qualifier.
/// Models use this to compose their layers' local parameter names into
/// globally unique ones.
pub fn prefixed<'a>(
    prefix: &'a str,
    f: &'a mut dyn FnMut(&str, &Tensor),
) -> impl FnMut(&str, &Tensor) + 'a {
    move |name: &str, t: &Tensor| f(&alloc::format!("{prefix}.{name}"), t)
}

pub fn prefixed_mut<'a>(
    prefix: &'a str,
    f: &'a mut dyn FnMut(&str, &mut Tensor),
) -> impl FnMut(&str, &mut Tensor) + 'a {
    move |name: &str, t: &mut Tensor| f(&alloc::format!("{prefix}.{name}"), t)
}
