//! Metric balls, filled metric balls and their boundaries.
//!
//! "Disconnected from infinity" is realised on the finite grid as "not
//! 4-connected to the grid border". Complements are flooded with
//! 4-connectivity and boundaries traced with 8-connectivity, the usual dual
//! pair that avoids pinch-point ambiguities.

mod harmonic;
mod mask;
mod tau;
mod trace;

pub use harmonic::{harmonic_hits, partition_arcs_by_harmonic_measure, HarmonicPartition};
pub use mask::RegionMask;
pub use tau::{tau_r, tau_r_with};
pub use trace::{boundary_vertices, trace_boundary, Arc, BoundaryCycle};

use std::collections::VecDeque;

use crate::error::{LabError, Result};
use crate::grid::neighbors4;
use crate::metric::DistanceField;

/// Vertices with `dist <= s`, plus the sources.
pub fn metric_ball(df: &DistanceField, s: f64) -> RegionMask {
    let n = df.n();
    let mut bits: Vec<bool> = df.distances().iter().map(|&d| d <= s).collect();
    for &i in df.source_indices() {
        bits[i] = true;
    }
    RegionMask::from_bits(n, bits)
}

/// Complement vertices 4-connected to the grid border.
pub(crate) fn outer_complement(mask: &RegionMask) -> RegionMask {
    let n = mask.n();
    let mut seen = RegionMask::empty(n);
    let mut queue = VecDeque::new();
    for i in 0..n {
        for idx in [i, (n - 1) * n + i, i * n, i * n + n - 1] {
            if !mask.contains_index(idx) && !seen.contains_index(idx) {
                seen.set_index(idx, true);
                queue.push_back(idx);
            }
        }
    }
    while let Some(u) = queue.pop_front() {
        for v in neighbors4(u, n) {
            if !mask.contains_index(v) && !seen.contains_index(v) {
                seen.set_index(v, true);
                queue.push_back(v);
            }
        }
    }
    seen
}

/// Fill every hole of `mask`: the result is everything the border flood of
/// the complement does not reach.
pub fn filled_ball(mask: &RegionMask) -> Result<RegionMask> {
    if mask.touches_border() {
        return Err(LabError::BallTouchesBorder);
    }
    Ok(outer_complement(mask).complement())
}
