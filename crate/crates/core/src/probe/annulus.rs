use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Ensemble, MonteCarloResult};
use crate::ball::RegionMask;
use crate::error::{LabError, Result};
use crate::field::{circle_average, ScalarField};
use crate::grid::{neighbors4, GridPoint};
use crate::metric::{
    annulus_crossing_distance, build_metric, local_distances, scaling_constant, LatticeMetric,
};

/// Smallest radius, in lattice units, accepted by the event.
pub const MIN_EVENT_RADIUS: f64 = 16.0;
const HARMONIC_TOLERANCE: f64 = 1e-8;
const HARMONIC_MAX_SWEEPS: usize = 50_000;

/// Parameters of the good-annulus event.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoodAnnulusParams {
    pub c: f64,
    pub delta: f64,
    pub a: f64,
    /// Multiplier of `c_r e^{xi h_r(z)}` bounding the square diameters.
    /// `None` means `c / 100`.
    pub square_factor: Option<f64>,
    /// Number of subdomains `U` tested for the harmonic condition (at most 64).
    pub family_size: usize,
    pub family_seed: u64,
}

impl GoodAnnulusParams {
    pub fn new(c: f64, delta: f64, a: f64) -> Result<Self> {
        if !(c > 0.0 && c < 1.0) {
            return Err(LabError::InvalidSpec(format!("c = {c} must lie in (0, 1)")));
        }
        if !(delta > 0.0 && delta <= 0.5) {
            return Err(LabError::InvalidSpec(format!("delta = {delta} must lie in (0, 1/2]")));
        }
        if !(a >= 0.0 && a.is_finite()) {
            return Err(LabError::InvalidSpec(format!("A = {a} must be non-negative")));
        }
        Ok(GoodAnnulusParams {
            c,
            delta,
            a,
            square_factor: None,
            family_size: 8,
            family_seed: 0,
        })
    }

    pub fn with_square_factor(mut self, factor: f64) -> Self {
        self.square_factor = Some(factor);
        self
    }

    pub fn with_family(mut self, size: usize, seed: u64) -> Self {
        self.family_size = size.clamp(1, 64);
        self.family_seed = seed;
        self
    }

    pub fn square_factor(&self) -> f64 {
        self.square_factor.unwrap_or(self.c / 100.0)
    }
}

/// The three conditions and the quantities they compare.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoodAnnulusRecord {
    pub cond1: bool,
    pub cond2: bool,
    pub cond3: bool,
    /// `c_r e^{xi h_r(z)}`.
    pub scale: f64,
    pub crossing: f64,
    pub max_square_diameter: f64,
    pub max_harmonic_deviation: f64,
    pub subdomains: usize,
}

impl GoodAnnulusRecord {
    pub fn holds(&self) -> bool {
        self.cond1 && self.cond2 && self.cond3
    }
}

#[derive(Clone, Copy, Debug)]
struct Square {
    x0: i64,
    y0: i64,
    side: i64,
    meets_inner: bool,
    meets_outer: bool,
}

impl Square {
    fn contains(&self, x: i64, y: i64) -> bool {
        x >= self.x0 && x <= self.x0 + self.side && y >= self.y0 && y <= self.y0 + self.side
    }

    fn stencil(&self) -> Vec<(i64, i64)> {
        let h = self.side / 2;
        let mut pts = Vec::with_capacity(9);
        for dy in [0, h, self.side] {
            for dx in [0, h, self.side] {
                pts.push((self.x0 + dx, self.y0 + dy));
            }
        }
        pts
    }
}

/// Squares of side `side` on the grid `z + side Z^2` meeting the closed
/// annulus `inner <= |x - z| <= outer` (lattice units).
fn squares_meeting(z: GridPoint, side: i64, inner: f64, outer: f64) -> Vec<Square> {
    let k = (outer / side as f64).ceil() as i64 + 1;
    let (zx, zy) = (z.x as i64, z.y as i64);
    let mut out = Vec::new();
    for j in -k..k {
        for i in -k..k {
            let (x0, y0) = (i * side, j * side);
            let (x1, y1) = (x0 + side, y0 + side);
            let cx = 0i64.clamp(x0, x1) as f64;
            let cy = 0i64.clamp(y0, y1) as f64;
            let near = (cx * cx + cy * cy).sqrt();
            let fx = x0.abs().max(x1.abs()) as f64;
            let fy = y0.abs().max(y1.abs()) as f64;
            let far = (fx * fx + fy * fy).sqrt();
            if near <= outer && far >= inner {
                out.push(Square {
                    x0: zx + x0,
                    y0: zy + y0,
                    side,
                    meets_inner: near <= inner && far >= inner,
                    meets_outer: near <= outer && far >= outer,
                });
            }
        }
    }
    out
}

/// Evaluate the good-annulus conditions for `A_{2r,5r}(z)`.
///
/// * cond1: `D(dB_{2r}, dB_{3r}) >= c * scale`.
/// * cond2: every `delta r` square meeting `A_{3r,4r}` has internal diameter in
///   `A_{2r,5r}` at most `square_factor * scale`. The diameter is the maximum
///   over a 9-point stencil (corners, edge midpoints, centre) of each square.
/// * cond3: for each sampled subdomain `U` of `A_{3r,4r}` made by deleting
///   grid squares, the discrete harmonic extension of `h` from outside `U`
///   stays within `A` of `h_r(z)` on vertices farther than `delta r / 4`
///   from the complement of `U`.
pub fn good_annulus_event(
    field: &ScalarField,
    metric: &LatticeMetric,
    z: GridPoint,
    r: f64,
    params: &GoodAnnulusParams,
    c_r: f64,
) -> Result<GoodAnnulusRecord> {
    let n = metric.n();
    let rho = r / metric.spacing();
    if rho < MIN_EVENT_RADIUS {
        return Err(LabError::InsufficientResolution(format!(
            "r spans {rho:.1} lattice units, need at least {MIN_EVENT_RADIUS}"
        )));
    }
    let reach = 5.0 * rho + 1.0;
    let max = (n - 1) as f64;
    if z.x as f64 - reach < 0.0 || z.y as f64 - reach < 0.0 || z.x as f64 + reach > max || z.y as f64 + reach > max {
        return Err(LabError::OutOfBounds(format!("B_(5r)({z}) leaves the grid")));
    }
    let h_r = circle_average(field, z, r)?;
    let scale = c_r * (metric.params().xi * h_r).exp();

    let crossing = annulus_crossing_distance(metric, z, 2.0 * r, 3.0 * r)?;
    let cond1 = crossing >= params.c * scale;

    let side = ((params.delta * rho).round() as i64).max(2);
    let squares = squares_meeting(z, side, 3.0 * rho, 4.0 * rho);
    let region = RegionMask::annulus(n, z, 2.0 * rho, 5.0 * rho);
    let max_square_diameter = squares
        .par_iter()
        .map(|sq| square_diameter(metric, sq, &region))
        .reduce(|| 0.0, f64::max);
    let cond2 = max_square_diameter <= params.square_factor() * scale;

    let family = subdomain_family(n, z, rho, &squares, params);
    let inner_margin = params.delta * rho / 4.0;
    let deviations = family
        .par_iter()
        .map(|u| harmonic_deviation(field, u, inner_margin, h_r))
        .collect::<Result<Vec<f64>>>()?;
    let max_harmonic_deviation = deviations.iter().copied().fold(0.0, f64::max);
    let cond3 = max_harmonic_deviation <= params.a;

    Ok(GoodAnnulusRecord {
        cond1,
        cond2,
        cond3,
        scale,
        crossing,
        max_square_diameter,
        max_harmonic_deviation,
        subdomains: family.len(),
    })
}

fn square_diameter(metric: &LatticeMetric, sq: &Square, region: &RegionMask) -> f64 {
    let n = metric.n() as i64;
    let pts: Vec<usize> = sq
        .stencil()
        .into_iter()
        .filter(|&(x, y)| x >= 0 && y >= 0 && x < n && y < n)
        .map(|(x, y)| (y * n + x) as usize)
        .filter(|&i| region.contains_index(i))
        .collect();
    let mut best: f64 = 0.0;
    for (k, &s) in pts.iter().enumerate() {
        let rest = &pts[k + 1..];
        if rest.is_empty() {
            best = best.max(metric.weights()[s]);
            continue;
        }
        for d in local_distances(metric, s, rest, region) {
            best = best.max(d);
        }
    }
    best
}

/// Vertices of the open annulus `A_{3r,4r}(z)` minus the deleted squares,
/// for each member of the sampled family. Member 0 is the full annulus,
/// member 1 drops the squares meeting the inner circle, member 2 those
/// meeting the outer circle; the rest drop each square with probability 1/2.
fn subdomain_family(
    n: usize,
    z: GridPoint,
    rho: f64,
    squares: &[Square],
    params: &GoodAnnulusParams,
) -> Vec<RegionMask> {
    let annulus = RegionMask::from_fn(n, |p| {
        let d = p.lattice_distance(z);
        d > 3.0 * rho && d < 4.0 * rho
    });
    let carve = |removed: &[&Square]| {
        let mut m = annulus.clone();
        for p in annulus.points() {
            let (x, y) = (p.x as i64, p.y as i64);
            if removed.iter().any(|s| s.contains(x, y)) {
                m.set(p, false);
            }
        }
        m
    };
    let size = params.family_size.clamp(1, 64);
    let mut family = vec![annulus.clone()];
    if size > 1 {
        family.push(carve(&squares.iter().filter(|s| s.meets_inner).collect::<Vec<_>>()));
    }
    if size > 2 {
        family.push(carve(&squares.iter().filter(|s| s.meets_outer).collect::<Vec<_>>()));
    }
    for member in 3..size {
        let mut rng = ChaCha8Rng::seed_from_u64(params.family_seed);
        rng.set_stream(member as u64);
        let removed: Vec<&Square> = squares.iter().filter(|_| rng.random::<bool>()).collect();
        family.push(carve(&removed));
    }
    family
}

/// Discrete harmonic extension into `inside` of the field values outside,
/// by successive over-relaxation. Returns the full grid with the solution
/// written over the inside vertices.
pub(crate) fn harmonic_extension(field: &ScalarField, inside: &RegionMask) -> Result<Vec<f64>> {
    let n = field.n();
    let mut u = field.values().to_vec();
    let idx: Vec<usize> = inside.indices().filter(|&i| !GridPoint::from_index(i, n).on_border(n)).collect();
    if idx.is_empty() {
        return Ok(u);
    }
    let boundary_mean = {
        let mut sum = 0.0;
        let mut count = 0usize;
        for &i in &idx {
            for j in neighbors4(i, n) {
                if !inside.contains_index(j) {
                    sum += u[j];
                    count += 1;
                }
            }
        }
        if count > 0 { sum / count as f64 } else { 0.0 }
    };
    for &i in &idx {
        u[i] = boundary_mean;
    }
    // Width of the thinnest part sets the relaxation factor; a thin strip of
    // width w has spectral radius cos(pi / (w + 1)).
    let width = (idx.len() as f64).sqrt().max(2.0);
    let omega = 2.0 / (1.0 + (std::f64::consts::PI / (width + 1.0)).sin());
    for _ in 0..HARMONIC_MAX_SWEEPS {
        let mut residual: f64 = 0.0;
        for &i in &idx {
            let avg = 0.25 * neighbors4(i, n).map(|j| u[j]).sum::<f64>();
            let delta = avg - u[i];
            residual = residual.max(delta.abs());
            u[i] += omega * delta;
        }
        if residual <= HARMONIC_TOLERANCE {
            return Ok(u);
        }
    }
    Err(LabError::IterationLimit {
        iterations: HARMONIC_MAX_SWEEPS,
        tolerance: HARMONIC_TOLERANCE,
    })
}

fn harmonic_deviation(field: &ScalarField, u: &RegionMask, margin: f64, h_r: f64) -> Result<f64> {
    let n = field.n();
    let ext = harmonic_extension(field, u)?;
    let reach = margin.ceil() as i64;
    let ni = n as i64;
    let mut worst: f64 = 0.0;
    for p in u.points() {
        let (x, y) = (p.x as i64, p.y as i64);
        let deep = (-reach..=reach).all(|dy| {
            (-reach..=reach).all(|dx| {
                let (qx, qy) = (x + dx, y + dy);
                let d2 = (dx * dx + dy * dy) as f64;
                d2 > margin * margin
                    || (qx >= 0 && qy >= 0 && qx < ni && qy < ni && u.contains_index((qy * ni + qx) as usize))
            })
        });
        if deep {
            worst = worst.max((ext[p.index(n)] - h_r).abs());
        }
    }
    Ok(worst)
}

/// Frequency of the good-annulus event at the grid centre over the ensemble.
///
/// `c_r` defaults to the ensemble's own [`scaling_constant`] estimate.
pub fn good_annulus_probability(
    ensemble: &Ensemble,
    r: f64,
    params: &GoodAnnulusParams,
    c_r: Option<f64>,
) -> Result<MonteCarloResult> {
    ensemble.require(1)?;
    let c_r = match c_r {
        Some(c) => c,
        None => scaling_constant(ensemble, r)?.estimate,
    };
    let n = ensemble.n();
    let z = GridPoint::new(n / 2, n / 2);
    let hits: Vec<bool> = ensemble
        .seeds
        .clone()
        .into_par_iter()
        .map(|seed| {
            let field = ensemble.realize(seed)?;
            let metric = build_metric(&field, &ensemble.params)?;
            Ok(good_annulus_event(&field, &metric, z, r, params, c_r)?.holds())
        })
        .collect::<Result<_>>()?;
    let k = hits.len() as f64;
    let p = hits.iter().filter(|&&h| h).count() as f64 / k;
    Ok(MonteCarloResult {
        estimate: p,
        std_error: (p * (1.0 - p) / k).sqrt(),
        n_samples: hits.len(),
        seeds: ensemble.seeds.clone(),
    })
}
