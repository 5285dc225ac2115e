use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::{ConfluenceRun, GeodesicPath};
use crate::error::{LabError, Result};
use crate::grid::GridPoint;
use crate::metric::LatticeMetric;

/// Pairwise winding differences up to this many turns count as "close".
pub const PAIR_TOLERANCE: f64 = 1.2;

/// Distribution of winding numbers over the geodesics of a confluence run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindingSpread {
    /// Winding in turns, one per geodesic.
    pub winds: Vec<f64>,
    /// `max - min` of `winds`.
    pub spread: f64,
    /// Fraction of unordered pairs differing by at most [`PAIR_TOLERANCE`].
    pub fraction_within: f64,
}

impl WindingSpread {
    pub fn pairs(&self) -> usize {
        let m = self.winds.len();
        m * m.saturating_sub(1) / 2
    }

    /// Fraction of unordered pairs whose windings differ by at most `tol`.
    pub fn fraction_within_tol(&self, tol: f64) -> f64 {
        let mut w = self.winds.clone();
        w.sort_by(f64::total_cmp);
        let m = w.len();
        if m < 2 {
            return 1.0;
        }
        let mut close = 0usize;
        let mut j = 0;
        for i in 0..m {
            if j < i + 1 {
                j = i + 1;
            }
            while j < m && w[j] - w[i] <= tol {
                j += 1;
            }
            close += j - i - 1;
        }
        close as f64 / (m * (m - 1) / 2) as f64
    }
}

pub(crate) fn spread_of(winds: Vec<f64>) -> WindingSpread {
    let lo = winds.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = winds.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out = WindingSpread {
        spread: if winds.is_empty() { 0.0 } else { hi - lo },
        winds,
        fraction_within: 1.0,
    };
    out.fraction_within = out.fraction_within_tol(PAIR_TOLERANCE);
    out
}

/// Angle swept about the origin by the straight segment `a -> b`.
fn sweep(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 * b.1 - a.1 * b.0).atan2(a.0 * b.0 + a.1 * b.1)
}

/// Total angle swept about `z` along the vertex polyline, ignoring a leading
/// run of vertices equal to `z`.
pub(crate) fn turning_between(vertices: &[GridPoint], z: GridPoint) -> f64 {
    let rel: Vec<(f64, f64)> = vertices
        .iter()
        .skip_while(|&&v| v == z)
        .map(|v| (v.x as f64 - z.x as f64, v.y as f64 - z.y as f64))
        .collect();
    rel.windows(2).map(|w| sweep(w[0], w[1])).sum()
}

/// First point where the polyline reaches radius `rho`: the segment index
/// and the interpolated crossing point.
fn first_exit(pts: &[(f64, f64)], rho: f64) -> Option<(usize, (f64, f64))> {
    let r2 = |p: (f64, f64)| p.0 * p.0 + p.1 * p.1;
    for k in 0..pts.len() - 1 {
        let (a, b) = (pts[k], pts[k + 1]);
        if r2(b) >= rho * rho {
            // |a + s(b - a)|^2 = rho^2, larger root; a is strictly inside
            let d = (b.0 - a.0, b.1 - a.1);
            let qa = d.0 * d.0 + d.1 * d.1;
            let qb = 2.0 * (a.0 * d.0 + a.1 * d.1);
            let qc = r2(a) - rho * rho;
            let s = ((-qb + (qb * qb - 4.0 * qa * qc).max(0.0).sqrt()) / (2.0 * qa)).clamp(0.0, 1.0);
            return Some((k, (a.0 + s * d.0, a.1 + s * d.1)));
        }
    }
    None
}

/// Winding number of `path` about `z` across the annulus `A_{r1, r2}(z)`
/// (continuum radii), in turns.
///
/// The angle is accumulated from the first time the path reaches radius
/// `r1` to the first time it reaches `r2`, both located by interpolation
/// along the crossing segment. Using first-exit times on both circles makes
/// the winding exactly additive over nested annuli.
pub fn winding_number(path: &GeodesicPath, z: GridPoint, r1: f64, r2: f64) -> Result<f64> {
    if !(r1 > 0.0 && r1 < r2) {
        return Err(LabError::InvalidSpec(format!("need 0 < r1 < r2, got {r1}, {r2}")));
    }
    let miss = LabError::PathMissesAnnulus { r1, r2 };
    if path.len() < 2 {
        return Err(miss);
    }
    let (rho1, rho2) = (r1 / path.spacing, r2 / path.spacing);
    let pts: Vec<(f64, f64)> = path
        .vertices
        .iter()
        .map(|v| (v.x as f64 - z.x as f64, v.y as f64 - z.y as f64))
        .collect();
    let (x0, y0) = pts[0];
    if x0 * x0 + y0 * y0 >= rho1 * rho1 {
        return Err(miss);
    }
    let (k1, c1) = first_exit(&pts, rho1).ok_or(LabError::PathMissesAnnulus { r1, r2 })?;
    let (k2, c2) = first_exit(&pts, rho2).ok_or(miss)?;
    if pts[k1 + 1..=k2].iter().any(|&(x, y)| x == 0.0 && y == 0.0) {
        return Err(LabError::InvalidSpec(format!("path passes through the centre {z}")));
    }
    let angle = if k1 == k2 {
        sweep(c1, c2)
    } else {
        sweep(c1, pts[k1 + 1])
            + pts[k1 + 1..=k2].windows(2).map(|w| sweep(w[0], w[1])).sum::<f64>()
            + sweep(pts[k2], c2)
    };
    Ok(angle / TAU)
}

/// Windings, through the region between the filled balls of radii `t` and
/// `s`, of the leftmost geodesics from `root` to the boundary of the larger
/// ball.
pub fn winding_spread(metric: &LatticeMetric, root: GridPoint, t: f64, s: f64) -> Result<WindingSpread> {
    Ok(ConfluenceRun::new(metric, root, t, s)?.winding_spread())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(v: &[(usize, usize)]) -> GeodesicPath {
        GeodesicPath::from_vertices(v.iter().map(|&(x, y)| GridPoint::new(x, y)).collect(), 1.0)
    }

    #[test]
    fn radial_segment_has_zero_winding() {
        let p = path(&(20..40).map(|x| (x, 20)).collect::<Vec<_>>());
        let w = winding_number(&p, GridPoint::new(20, 20), 2.5, 15.5).unwrap();
        assert!(w.abs() < 1e-9);
    }

    #[test]
    fn missing_annulus() {
        let p = path(&(20..30).map(|x| (x, 20)).collect::<Vec<_>>());
        assert!(matches!(
            winding_number(&p, GridPoint::new(20, 20), 2.5, 15.5),
            Err(LabError::PathMissesAnnulus { .. })
        ));
    }

    #[test]
    fn spread_pairs_count() {
        let s = spread_of(vec![0.0, 0.5, 2.0]);
        assert_eq!(s.spread, 2.0);
        assert!((s.fraction_within - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(spread_of(vec![0.3]).spread, 0.0);
    }
}
