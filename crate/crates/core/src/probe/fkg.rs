use rayon::prelude::*;

use super::{jackknife_covariance, Ensemble, MonteCarloResult};
use crate::ball::RegionMask;
use crate::error::{LabError, Result};
use crate::grid::GridPoint;
use crate::metric::{
    build_metric, distance, internal_distance, run_multi, LatticeMetric,
};

/// A real functional of the metric, evaluated on one realisation.
///
/// The shipped implementations are non-decreasing in the metric (raising any
/// weight cannot lower them), except [`Negated`].
pub trait DistanceFunctional: Send + Sync {
    fn name(&self) -> String;
    fn evaluate(&self, metric: &LatticeMetric) -> Result<f64>;
}

/// `d(u, v)`.
#[derive(Clone, Debug)]
pub struct PointDistance {
    pub u: GridPoint,
    pub v: GridPoint,
}

impl DistanceFunctional for PointDistance {
    fn name(&self) -> String {
        format!("point({}->{})", self.u, self.v)
    }

    fn evaluate(&self, metric: &LatticeMetric) -> Result<f64> {
        distance(metric, self.u, self.v)
    }
}

/// `min_{a in A, b in B} d(a, b)`.
#[derive(Clone, Debug)]
pub struct SetDistance {
    pub a: Vec<GridPoint>,
    pub b: Vec<GridPoint>,
}

impl DistanceFunctional for SetDistance {
    fn name(&self) -> String {
        format!("set({}x{})", self.a.len(), self.b.len())
    }

    fn evaluate(&self, metric: &LatticeMetric) -> Result<f64> {
        let n = metric.n();
        if self.a.is_empty() || self.b.is_empty() {
            return Err(LabError::EmptyTargetSet);
        }
        let src: Vec<usize> = self.a.iter().map(|p| p.index(n)).collect();
        let df = run_multi(metric, &src, None);
        Ok(self.b.iter().map(|&p| df.dist(p)).fold(f64::INFINITY, f64::min))
    }
}

/// Internal diameter `max_{u, v in R} d(u, v; R)`, exact, with one search per
/// vertex of `R`. Meant for small regions.
#[derive(Clone, Debug)]
pub struct RegionDiameter {
    pub region: RegionMask,
}

impl DistanceFunctional for RegionDiameter {
    fn name(&self) -> String {
        format!("diameter({} vertices)", self.region.count())
    }

    fn evaluate(&self, metric: &LatticeMetric) -> Result<f64> {
        let pts: Vec<GridPoint> = self.region.points().collect();
        if pts.is_empty() {
            return Err(LabError::EmptyMask);
        }
        let mut best: f64 = 0.0;
        for &u in &pts {
            for &v in &pts {
                if u.index(metric.n()) < v.index(metric.n()) {
                    best = best.max(internal_distance(metric, u, v, &self.region)?);
                }
            }
        }
        if pts.len() == 1 {
            best = metric.weight(pts[0]);
        }
        Ok(best)
    }
}

/// Left-to-right crossing distance of an axis-aligned rectangle, restricted
/// to the rectangle.
#[derive(Clone, Debug)]
pub struct RectangleCrossing {
    pub origin: GridPoint,
    pub width: usize,
    pub height: usize,
}

impl DistanceFunctional for RectangleCrossing {
    fn name(&self) -> String {
        format!("crossing({}, {}x{})", self.origin, self.width, self.height)
    }

    fn evaluate(&self, metric: &LatticeMetric) -> Result<f64> {
        let n = metric.n();
        let (o, w, h) = (self.origin, self.width, self.height);
        if w < 1 || h < 1 || o.x + w > n || o.y + h > n {
            return Err(LabError::OutOfBounds(format!("rectangle {} leaves the grid", self.name())));
        }
        let region = RegionMask::rectangle(n, o, w, h);
        let left: Vec<usize> = (0..h).map(|k| GridPoint::new(o.x, o.y + k).index(n)).collect();
        let df = run_multi(metric, &left, Some(&region));
        Ok((0..h)
            .map(|k| df.dist(GridPoint::new(o.x + w - 1, o.y + k)))
            .fold(f64::INFINITY, f64::min))
    }
}

/// `-F`, the sign-sanity control.
#[derive(Clone, Debug)]
pub struct Negated<F>(pub F);

impl<F: DistanceFunctional> DistanceFunctional for Negated<F> {
    fn name(&self) -> String {
        format!("-{}", self.0.name())
    }

    fn evaluate(&self, metric: &LatticeMetric) -> Result<f64> {
        Ok(-self.0.evaluate(metric)?)
    }
}

/// Empirical `Cov(Phi, Psi)` over the ensemble with a jackknife standard error.
pub fn fkg_check(
    phi: &dyn DistanceFunctional,
    psi: &dyn DistanceFunctional,
    ensemble: &Ensemble,
) -> Result<MonteCarloResult> {
    ensemble.require(3)?;
    let pairs: Vec<(f64, f64)> = ensemble
        .seeds
        .clone()
        .into_par_iter()
        .map(|seed| {
            let field = ensemble.realize(seed)?;
            let metric = build_metric(&field, &ensemble.params)?;
            Ok((phi.evaluate(&metric)?, psi.evaluate(&metric)?))
        })
        .collect::<Result<_>>()?;
    let (x, y): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let (estimate, std_error) = jackknife_covariance(&x, &y)?;
    Ok(MonteCarloResult {
        estimate,
        std_error,
        n_samples: x.len(),
        seeds: ensemble.seeds.clone(),
    })
}
