//! Synthetic minority oversampling: balance class counts by
//! interpolating between same-class neighbors.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::data::beat::Beat;
use crate::data::split::ClassCounts;
use crate::error::{Error, Result};
use crate::seeds::seeded_stream;

/// Default neighborhood size.
pub const SMOTE_K: usize = 5;

/// Provenance of one synthetic beat: positions in the input slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmoteParent {
    pub base: usize,
    pub neighbor: usize,
}

/// Balances every class up to the majority count.
///
/// Output order is deterministic: the originals in input order, then
/// synthetics grouped by class in index order. Each synthetic beat is
/// `x + u * (x_nb - x)` for a base beat `x` (bases rotate round-robin
/// through the class), a uniformly chosen one of its `min(k, class - 1)`
/// nearest same-class neighbors (Euclidean distance, ties broken by
/// input position), and `u` uniform in `[0, 1)`. Per synthetic beat the
/// generator is consumed in a fixed order: one neighbor draw, then one
/// interpolation draw.
///
/// A class that needs upsampling but holds fewer than 2 beats cannot be
/// interpolated and is an error; an absent class is left absent.
pub fn smote_balance(train: &[Beat], k: usize, seed: u64) -> Result<Vec<Beat>> {
    let (beats, _) = smote_with_parents(train, k, seed)?;
    Ok(beats)
}

/// [`smote_balance`] plus parent indices for every synthetic beat
/// (appended in output order). Exposed so tests can verify the
/// interpolation geometry.
pub fn smote_with_parents(
    train: &[Beat],
    k: usize,
    seed: u64,
) -> Result<(Vec<Beat>, Vec<SmoteParent>)> {
    if k == 0 {
        return Err(Error::invalid("smote", "k must be >= 1"));
    }
    let counts = ClassCounts::of(train);
    let target = counts.max();
    let mut out: Vec<Beat> = train.to_vec();
    let mut parents = Vec::new();
    if target == 0 {
        return Ok((out, parents));
    }

    let mut rng = seeded_stream(seed, 0);
    for class_idx in 0..counts.counts.len() {
        let have = counts.counts[class_idx];
        if have == 0 || have == target {
            continue;
        }
        if have < 2 {
            return Err(Error::degenerate(
                "smote",
                format!(
                    "class index {class_idx} holds {have} beat(s); interpolation needs >= 2"
                ),
            ));
        }
        let members: Vec<usize> = train
            .iter()
            .enumerate()
            .filter(|(_, b)| b.label.index() == class_idx)
            .map(|(i, _)| i)
            .collect();
        let k_eff = k.min(have - 1);
        let neighbors = nearest_neighbors(train, &members, k_eff);

        let need = target - have;
        for i in 0..need {
            let base_pos = i % members.len();
            let base_idx = members[base_pos];
            let nb_choice = rng.gen_range(0..k_eff);
            let nb_idx = neighbors[base_pos][nb_choice];
            let u: f64 = rng.gen();

            let base = &train[base_idx];
            let nb = &train[nb_idx];
            let mut samples = Vec::with_capacity(base.samples.len());
            for (&a, &b) in base.samples.iter().zip(&nb.samples) {
                // convex combination of in-range values; the clamp is
                // defensive against rounding at the endpoints
                samples.push((a + u * (b - a)).clamp(0.0, 1.0));
            }
            let beat = Beat::new(
                samples,
                base.label,
                base.record_id.clone(),
                base.r_peak_index,
                true,
            )
            .expect("interpolants of valid beats stay valid");
            out.push(beat);
            parents.push(SmoteParent { base: base_idx, neighbor: nb_idx });
        }
    }
    Ok((out, parents))
}

/// For each member (by position in `members`), the indices of its
/// `k_eff` nearest same-class neighbors, nearest first, self excluded.
fn nearest_neighbors(train: &[Beat], members: &[usize], k_eff: usize) -> Vec<Vec<usize>> {
    members
        .iter()
        .map(|&m| {
            let mut dists: Vec<(f64, usize)> = members
                .iter()
                .filter(|&&o| o != m)
                .map(|&o| (sq_dist(&train[m].samples, &train[o].samples), o))
                .collect();
            // stable sort by distance; equal distances keep input order
            dists.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("distances are finite"));
            dists.truncate(k_eff);
            dists.into_iter().map(|(_, i)| i).collect()
        })
        .collect()
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        let d = x - y;
        acc += d * d;
    }
    acc
}
