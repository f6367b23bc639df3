//! Assembly of network inputs from beats, labels, and noise.

use alloc::format;

use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// Checks that `y` is `[batch, classes]` with rows that are exact
/// one-hot vectors: every entry 0.0 or 1.0, exactly one 1 per row.
pub fn validate_one_hot(y: &Tensor, classes: usize, context: &'static str) -> Result<()> {
    if y.rank() != 2 || y.dim(1) != classes {
        return Err(Error::shape(
            context,
            format!("labels must be [batch, {classes}], got {:?}", y.shape()),
        ));
    }
    for b in 0..y.dim(0) {
        let row = y.row2(b);
        let mut ones = 0usize;
        for &v in row {
            if v == 1.0 {
                ones += 1;
            } else if v != 0.0 {
                return Err(Error::invalid(
                    context,
                    format!("label row {b} holds non-binary entry {v}"),
                ));
            }
        }
        if ones != 1 {
            return Err(Error::invalid(
                context,
                format!("label row {b} has {ones} ones, expected exactly 1"),
            ));
        }
    }
    Ok(())
}

fn check_signal(x: &Tensor, len: usize, what: &'static str, context: &'static str) -> Result<()> {
    if x.rank() != 2 || x.dim(1) != len {
        return Err(Error::shape(
            context,
            format!("{what} must be [batch, {len}], got {:?}", x.shape()),
        ));
    }
    Ok(())
}

/// Generator input `[batch, len, 2 + classes]`: channel 0 the beat,
/// channel 1 the noise, channels `2..` the one-hot label broadcast
/// along the length axis.
pub fn assemble_generator_input(
    x: &Tensor,
    y: &Tensor,
    z: &Tensor,
    len: usize,
    classes: usize,
) -> Result<Tensor> {
    let context = "generator input assembly";
    check_signal(x, len, "beat", context)?;
    check_signal(z, len, "noise", context)?;
    validate_one_hot(y, classes, context)?;
    let batch = x.dim(0);
    if y.dim(0) != batch || z.dim(0) != batch {
        return Err(Error::shape(
            context,
            format!("batch sizes differ: x {batch}, y {}, z {}", y.dim(0), z.dim(0)),
        ));
    }
    let ch = 2 + classes;
    let mut out = Tensor::zeros(&[batch, len, ch]);
    {
        let o = out.data_mut();
        for b in 0..batch {
            let x_row = x.row2(b);
            let z_row = z.row2(b);
            let y_row = y.row2(b);
            for l in 0..len {
                let base = (b * len + l) * ch;
                o[base] = x_row[l];
                o[base + 1] = z_row[l];
                o[base + 2..base + ch].copy_from_slice(y_row);
            }
        }
    }
    Ok(out)
}

/// Discriminator input `[batch, len, 1 + classes]`: channel 0 the beat,
/// channels `1..` the broadcast one-hot label.
pub fn assemble_discriminator_input(
    x: &Tensor,
    y: &Tensor,
    len: usize,
    classes: usize,
) -> Result<Tensor> {
    let context = "discriminator input assembly";
    check_signal(x, len, "beat", context)?;
    validate_one_hot(y, classes, context)?;
    let batch = x.dim(0);
    if y.dim(0) != batch {
        return Err(Error::shape(
            context,
            format!("batch sizes differ: x {batch}, y {}", y.dim(0)),
        ));
    }
    let ch = 1 + classes;
    let mut out = Tensor::zeros(&[batch, len, ch]);
    {
        let o = out.data_mut();
        for b in 0..batch {
            let x_row = x.row2(b);
            let y_row = y.row2(b);
            for l in 0..len {
                let base = (b * len + l) * ch;
                o[base] = x_row[l];
                o[base + 1..base + ch].copy_from_slice(y_row);
            }
        }
    }
    Ok(out)
}

/// Extracts channel 0 of a `[batch, len, ch]` gradient as `[batch, len]`.
/// Used to route discriminator input gradients back to the generator
/// output (the label channels are not differentiable inputs).
pub fn extract_signal_channel(grad: &Tensor) -> Result<Tensor> {
    if grad.rank() != 3 {
        return Err(Error::shape(
            "signal channel extraction",
            format!("expected rank-3 tensor, got {:?}", grad.shape()),
        ));
    }
    let (batch, len, ch) = (grad.dim(0), grad.dim(1), grad.dim(2));
    let mut out = Tensor::zeros(&[batch, len]);
    {
        let o = out.data_mut();
        let g = grad.data();
        for (ov, row) in o.iter_mut().zip(g.chunks_exact(ch)) {
            *ov = row[0];
        }
    }
    Ok(out)
}
