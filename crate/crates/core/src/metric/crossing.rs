use rayon::prelude::*;

use super::dijkstra::run_multi;
use super::LatticeMetric;
use crate::ball::RegionMask;
use crate::error::{LabError, Result};
use crate::field::{circle_average, ScalarField};
use crate::grid::GridPoint;
use crate::metric::build_metric;
use crate::probe::{median_with_error, Ensemble, MonteCarloResult};

/// Squares smaller than this many lattice units are rejected by the
/// scaling-constant estimator.
pub const MIN_SCALE_VERTICES: usize = 16;

/// Distance across the closed annulus `A_{r1, r2}(z)`, continuum radii.
///
/// The circle of lattice radius `rho` is discretised as the vertices with
/// `| |x - z| - rho | <= 1/2`; the path is confined to
/// `rho1 - 1/2 <= |x - z| <= rho2 + 1/2`.
pub fn annulus_crossing_distance(
    metric: &LatticeMetric,
    z: GridPoint,
    r1: f64,
    r2: f64,
) -> Result<f64> {
    if !(r1 > 0.0 && r1 < r2) {
        return Err(LabError::InvalidSpec(format!("need 0 < r1 < r2, got {r1}, {r2}")));
    }
    let n = metric.n();
    let rho1 = r1 / metric.spacing();
    let rho2 = r2 / metric.spacing();
    let reach = rho2 + 0.5;
    let max = (n - 1) as f64;
    if z.x as f64 - reach < 0.0
        || z.y as f64 - reach < 0.0
        || z.x as f64 + reach > max
        || z.y as f64 + reach > max
    {
        return Err(LabError::OutOfBounds(format!(
            "annulus of outer radius {r2} about {z} leaves the grid"
        )));
    }
    let region = RegionMask::annulus(n, z, rho1 - 0.5, rho2 + 0.5);
    let ring = |rho: f64| {
        region
            .indices()
            .filter(|&i| (GridPoint::from_index(i, n).lattice_distance(z) - rho).abs() <= 0.5)
            .collect::<Vec<_>>()
    };
    let inner = ring(rho1);
    let outer = ring(rho2);
    if inner.is_empty() || outer.is_empty() {
        return Err(LabError::InsufficientResolution(
            "annulus circles contain no lattice vertices".into(),
        ));
    }
    let df = run_multi(metric, &inner, Some(&region));
    Ok(outer
        .iter()
        .map(|&i| df.dist_at(i))
        .fold(f64::INFINITY, f64::min))
}

/// Left-to-right crossing distance of the `side`-by-`side` vertex square
/// centred at `center`, restricted to the square.
pub fn square_crossing_distance(
    metric: &LatticeMetric,
    center: GridPoint,
    side: usize,
) -> Result<f64> {
    let n = metric.n();
    let half = side / 2;
    if side < 2 || center.x < half || center.y < half || center.x - half + side > n || center.y - half + side > n {
        return Err(LabError::OutOfBounds(format!(
            "square of side {side} about {center} leaves the grid"
        )));
    }
    let origin = GridPoint::new(center.x - half, center.y - half);
    let region = RegionMask::rectangle(n, origin, side, side);
    let left: Vec<usize> = (0..side)
        .map(|k| GridPoint::new(origin.x, origin.y + k).index(n))
        .collect();
    let df = run_multi(metric, &left, Some(&region));
    Ok((0..side)
        .map(|k| df.dist_at(GridPoint::new(origin.x + side - 1, origin.y + k).index(n)))
        .fold(f64::INFINITY, f64::min))
}

/// Crossing distance of the square of side `r` about the grid centre with
/// the local factor `e^{xi h_r(center)}` divided out.
pub fn normalized_square_crossing(
    field: &ScalarField,
    metric: &LatticeMetric,
    r: f64,
) -> Result<f64> {
    let n = metric.n();
    let side = (r / metric.spacing()).round() as usize;
    if side < MIN_SCALE_VERTICES {
        return Err(LabError::InsufficientResolution(format!(
            "scale {r} spans {side} lattice units, need at least {MIN_SCALE_VERTICES}"
        )));
    }
    let center = GridPoint::new(n / 2, n / 2);
    let crossing = square_crossing_distance(metric, center, side)?;
    let local = circle_average(field, center, r)?;
    Ok(crossing * (-metric.params().xi * local).exp())
}

/// Median over the ensemble of the normalised square crossing at scale `r`.
/// This is the lattice estimator of the scaling constant `c_r`.
pub fn scaling_constant(ensemble: &Ensemble, r: f64) -> Result<MonteCarloResult> {
    let side = (r / ensemble.spacing()).round() as usize;
    if side < MIN_SCALE_VERTICES {
        return Err(LabError::InsufficientResolution(format!(
            "scale {r} spans {side} lattice units, need at least {MIN_SCALE_VERTICES}"
        )));
    }
    let values: Vec<f64> = ensemble
        .seeds
        .clone()
        .into_par_iter()
        .map(|seed| {
            let field = ensemble.realize(seed)?;
            let metric = build_metric(&field, &ensemble.params)?;
            normalized_square_crossing(&field, &metric, r)
        })
        .collect::<Result<_>>()?;
    let (estimate, std_error) = median_with_error(&values);
    Ok(MonteCarloResult {
        estimate,
        std_error,
        n_samples: values.len(),
        seeds: ensemble.seeds.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::LfppParams;
    use crate::probe::FieldSource;

    fn flat(n: usize) -> LatticeMetric {
        build_metric(&ScalarField::constant(n, 0.0), &LfppParams::pure_gravity()).unwrap()
    }

    #[test]
    fn flat_annulus_crossing_bounds() {
        let m = flat(128);
        let s = m.spacing();
        let z = GridPoint::new(64, 64);
        for (a, b) in [(5.0, 20.0), (10.3, 20.7), (8.0, 40.0), (3.5, 9.25)] {
            let d = annulus_crossing_distance(&m, z, a * s, b * s).unwrap();
            assert!(d >= b - a - 1e-9 && d <= b - a + 3.0, "({a},{b}) -> {d}");
        }
    }

    #[test]
    fn annulus_leaving_grid() {
        let m = flat(32);
        let s = m.spacing();
        let err = annulus_crossing_distance(&m, GridPoint::new(16, 16), 4.0 * s, 16.0 * s);
        assert!(matches!(err, Err(LabError::OutOfBounds(_))));
    }

    #[test]
    fn flat_scaling_constant_is_side_length() {
        let ens = Ensemble::new(FieldSource::Flat { n: 128, spacing: 1.0 / 128.0 }, 0..3, LfppParams::pure_gravity());
        let c = scaling_constant(&ens, 32.0 / 128.0).unwrap();
        assert!((c.estimate - 32.0).abs() <= 2.0);
        assert_eq!(c.n_samples, 3);
    }

    #[test]
    fn small_scale_is_rejected() {
        let ens = Ensemble::new(FieldSource::Flat { n: 64, spacing: 1.0 / 64.0 }, 0..2, LfppParams::pure_gravity());
        let err = scaling_constant(&ens, 4.0 / 64.0).unwrap_err();
        assert!(matches!(err, LabError::InsufficientResolution(_)));
    }
}
