use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::trace::{Arc, BoundaryCycle};
use super::RegionMask;
use crate::error::{LabError, Result};

/// Relaunches allowed per walker before giving up.
pub const MAX_RELAUNCHES: u64 = 10_000;

/// Result of a harmonic-measure partition.
#[derive(Clone, Debug)]
pub struct HarmonicPartition {
    /// The input cycle with `arcs` filled in.
    pub cycle: BoundaryCycle,
    /// First-hit counts per cycle position.
    pub hits: Vec<u64>,
    /// Hit counts per arc, in label order.
    pub arc_hits: Vec<u64>,
    pub walkers: usize,
}

impl HarmonicPartition {
    /// Binomial standard error of an arc count whose mean is `walkers / k`.
    pub fn count_std_error(&self) -> f64 {
        let k = self.arc_hits.len() as f64;
        let p = 1.0 / k;
        (self.walkers as f64 * p * (1.0 - p)).sqrt()
    }

    /// Empirical harmonic measure of each arc.
    pub fn arc_fractions(&self) -> Vec<f64> {
        self.arc_hits
            .iter()
            .map(|&h| h as f64 / self.walkers as f64)
            .collect()
    }
}

struct WalkGeometry {
    cx: f64,
    cy: f64,
    launch: f64,
    kill2: f64,
}

impl WalkGeometry {
    fn new(cycle: &BoundaryCycle) -> Self {
        let len = cycle.len() as f64;
        let cx = cycle.vertices.iter().map(|p| p.x as f64).sum::<f64>() / len;
        let cy = cycle.vertices.iter().map(|p| p.y as f64).sum::<f64>() / len;
        let reach = cycle
            .vertices
            .iter()
            .map(|p| ((p.x as f64 - cx).powi(2) + (p.y as f64 - cy).powi(2)).sqrt())
            .fold(0.0, f64::max);
        let launch = 1.25 * reach + 3.0;
        let kill = 4.0 * launch;
        WalkGeometry {
            cx,
            cy,
            launch,
            kill2: kill * kill,
        }
    }

    fn start(&self, rng: &mut ChaCha8Rng) -> (i64, i64) {
        let theta = rng.random::<f64>() * std::f64::consts::TAU;
        (
            (self.cx + self.launch * theta.cos()).round() as i64,
            (self.cy + self.launch * theta.sin()).round() as i64,
        )
    }
}

/// Simple random walk on Z^2 until it lands on the mask. Returns the vertex
/// index of the first hit.
fn walk(mask: &RegionMask, geo: &WalkGeometry, seed: u64, walker: u64) -> Result<usize> {
    let n = mask.n() as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(walker);
    for _ in 0..MAX_RELAUNCHES {
        let (mut x, mut y) = geo.start(&mut rng);
        'attempt: loop {
            let mut bits: u64 = rng.random();
            for _ in 0..32 {
                match bits & 3 {
                    0 => x += 1,
                    1 => x -= 1,
                    2 => y += 1,
                    _ => y -= 1,
                }
                bits >>= 2;
                if x >= 0 && y >= 0 && x < n && y < n {
                    let i = (y * n + x) as usize;
                    if mask.contains_index(i) {
                        return Ok(i);
                    }
                }
                let (dx, dy) = (x as f64 - geo.cx, y as f64 - geo.cy);
                if dx * dx + dy * dy > geo.kill2 {
                    break 'attempt;
                }
            }
        }
    }
    Err(LabError::WalkBudgetExceeded {
        attempts: MAX_RELAUNCHES,
    })
}

/// First-hit counts per cycle position for `walkers` walks launched from
/// the uniform distribution on a circle enclosing the mask.
///
/// Walkers that wander past four times the launch radius are relaunched,
/// which approximates the return distribution from far away.
pub fn harmonic_hits(
    mask: &RegionMask,
    cycle: &BoundaryCycle,
    walkers: usize,
    seed: u64,
) -> Result<Vec<u64>> {
    if mask.is_empty() || cycle.is_empty() {
        return Err(LabError::EmptyMask);
    }
    let geo = WalkGeometry::new(cycle);
    let positions = cycle.positions();
    let hit_vertices: Vec<usize> = (0..walkers as u64)
        .into_par_iter()
        .map(|w| walk(mask, &geo, seed, w))
        .collect::<Result<_>>()?;
    let mut hits = vec![0u64; cycle.len()];
    for v in hit_vertices {
        let pos = positions.get(&v).ok_or_else(|| {
            LabError::InvalidSpec("walker hit a mask vertex missing from the cycle".into())
        })?;
        hits[*pos] += 1;
    }
    Ok(hits)
}

/// Cut `cycle` into `k` contiguous arcs of (empirically) equal harmonic
/// measure from infinity.
pub fn partition_arcs_by_harmonic_measure(
    mask: &RegionMask,
    cycle: &BoundaryCycle,
    k: usize,
    walkers: usize,
    seed: u64,
) -> Result<HarmonicPartition> {
    if k == 0 || walkers < 10 * k {
        return Err(LabError::InvalidSpec(format!(
            "need k >= 1 and walkers >= 10k, got k = {k}, walkers = {walkers}"
        )));
    }
    if k > cycle.len() {
        return Err(LabError::InvalidSpec(format!(
            "cannot cut a cycle of {} vertices into {k} arcs",
            cycle.len()
        )));
    }
    let hits = harmonic_hits(mask, cycle, walkers, seed)?;
    let len = hits.len();
    // cum[p] = hits strictly before position p
    let mut cum = Vec::with_capacity(len + 1);
    cum.push(0u64);
    for &h in &hits {
        cum.push(cum.last().unwrap() + h);
    }
    let total = cum[len] as f64;
    let mut cuts = vec![0usize];
    for j in 1..k {
        let target = total * j as f64 / k as f64;
        let lo = cuts[j - 1] + 1;
        let hi = len - (k - j);
        let best = (lo..=hi)
            .min_by(|&a, &b| {
                let da = (cum[a] as f64 - target).abs();
                let db = (cum[b] as f64 - target).abs();
                da.total_cmp(&db).then(a.cmp(&b))
            })
            .unwrap_or(lo);
        cuts.push(best);
    }
    cuts.push(len);
    let arcs: Vec<Arc> = cuts
        .windows(2)
        .enumerate()
        .map(|(label, w)| Arc {
            label,
            start: w[0],
            len: w[1] - w[0],
        })
        .collect();
    let arc_hits = arcs.iter().map(|a| cum[a.start + a.len] - cum[a.start]).collect();
    let mut cycle = cycle.clone();
    cycle.arcs = Some(arcs);
    Ok(HarmonicPartition {
        cycle,
        hits,
        arc_hits,
        walkers,
    })
}
