use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::winding::{spread_of, turning_between};
use super::{GeodesicPath, GeodesicSelector, Side, WindingSpread};
use crate::ball::{filled_ball, metric_ball, trace_boundary, BoundaryCycle, RegionMask};
use crate::error::{LabError, Result};
use crate::grid::GridPoint;
use crate::metric::{distance_field, DistanceField, LatticeMetric};

/// Summary of one confluence measurement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfluenceReport {
    pub t: f64,
    pub s: f64,
    /// Distinct points of the inner boundary hit by leftmost geodesics to the
    /// outer boundary, sorted by vertex index.
    pub hit_points: Vec<GridPoint>,
    /// Number of geodesics through each hit point.
    pub counts: Vec<usize>,
    /// Vertices of the outer boundary (one geodesic each).
    pub n_targets: usize,
    /// Vertices of the inner boundary.
    pub inner_boundary_len: usize,
    pub coalescence_radius: f64,
    pub winding_spread: f64,
    pub non_crossing_violations: usize,
}

/// Everything computed for one `(root, t, s)` triple: the distance field,
/// both filled balls and their boundaries, and the leftmost geodesic to
/// every outer boundary vertex.
#[derive(Clone, Debug)]
pub struct ConfluenceRun {
    pub root: GridPoint,
    pub t: f64,
    pub s: f64,
    pub df: DistanceField,
    pub inner_ball: RegionMask,
    pub outer_ball: RegionMask,
    pub inner: BoundaryCycle,
    pub outer: BoundaryCycle,
    /// Leftmost geodesic to `outer.vertices[k]`.
    pub geodesics: Vec<GeodesicPath>,
    /// Index into each geodesic of its hit point on the inner boundary.
    pub hit_index: Vec<usize>,
}

impl ConfluenceRun {
    pub fn new(metric: &LatticeMetric, root: GridPoint, t: f64, s: f64) -> Result<Self> {
        let df = distance_field(metric, &[root])?;
        ConfluenceRun::with_field(metric, df, t, s)
    }

    /// Reuse a single-source distance field, e.g. across a sweep over `s`.
    pub fn with_field(metric: &LatticeMetric, df: DistanceField, t: f64, s: f64) -> Result<Self> {
        if !(t > 0.0 && t < s) {
            return Err(LabError::InvalidSpec(format!("need 0 < t < s, got t = {t}, s = {s}")));
        }
        let root = df
            .sources()
            .next()
            .ok_or_else(|| LabError::InvalidSpec("distance field has no source".into()))?;
        let outer_ball = filled_ball(&metric_ball(&df, s))?;
        let inner_ball = filled_ball(&metric_ball(&df, t))?;
        let inner = trace_boundary(&inner_ball)?;
        let outer = trace_boundary(&outer_ball)?;
        let selector = GeodesicSelector::new(metric, &df)?;
        let geodesics = outer
            .vertices
            .par_iter()
            .map(|&y| selector.select(&[y], Side::Left))
            .collect::<Result<Vec<_>>>()?;
        let hit_index = geodesics.iter().map(|g| g.last_within(t).unwrap_or(0)).collect();
        Ok(ConfluenceRun {
            root,
            t,
            s,
            df,
            inner_ball,
            outer_ball,
            inner,
            outer,
            geodesics,
            hit_index,
        })
    }

    pub fn hit_vertex(&self, k: usize) -> GridPoint {
        self.geodesics[k].vertices[self.hit_index[k]]
    }

    /// Distinct hit points with multiplicities, sorted by vertex index.
    pub fn hit_counts(&self) -> BTreeMap<usize, usize> {
        let n = self.df.n();
        let mut m = BTreeMap::new();
        for k in 0..self.geodesics.len() {
            *m.entry(self.hit_vertex(k).index(n)).or_insert(0) += 1;
        }
        m
    }

    pub fn hit_set(&self) -> BTreeSet<usize> {
        self.hit_counts().into_keys().collect()
    }

    /// See [`coalescence_of`].
    pub fn coalescence_radius(&self) -> f64 {
        coalescence_of(&self.geodesics, &self.df, self.s)
    }

    /// Pairs of geodesics that meet at a vertex after having differed
    /// earlier. Counted as conflicting predecessor assignments.
    pub fn non_crossing_violations(&self) -> usize {
        let n = self.df.n();
        let mut pred: HashMap<usize, usize> = HashMap::new();
        let mut bad = 0;
        for g in &self.geodesics {
            for w in g.vertices.windows(2) {
                let (a, b) = (w[0].index(n), w[1].index(n));
                match pred.get(&b) {
                    Some(&p) if p != a => bad += 1,
                    Some(_) => {}
                    None => {
                        pred.insert(b, a);
                    }
                }
            }
        }
        bad
    }

    /// Winding of each geodesic about the root between its hit point and its
    /// endpoint, in turns.
    pub fn windings(&self) -> Vec<f64> {
        self.geodesics
            .iter()
            .zip(&self.hit_index)
            .map(|(g, &h)| turning_between(&g.vertices[h..], self.root) / std::f64::consts::TAU)
            .collect()
    }

    pub fn winding_spread(&self) -> WindingSpread {
        spread_of(self.windings())
    }

    pub fn report(&self) -> ConfluenceReport {
        let counts = self.hit_counts();
        let n = self.df.n();
        ConfluenceReport {
            t: self.t,
            s: self.s,
            hit_points: counts.keys().map(|&i| GridPoint::from_index(i, n)).collect(),
            counts: counts.values().copied().collect(),
            n_targets: self.outer.len(),
            inner_boundary_len: self.inner.len(),
            coalescence_radius: self.coalescence_radius(),
            winding_spread: self.winding_spread().spread,
            non_crossing_violations: self.non_crossing_violations(),
        }
    }
}

/// Largest value of `df` below `s` at which all `paths` have the same hit
/// point (last vertex with distance `<= t'`); 0 if there is none.
///
/// The hits agree exactly while `t'` is below the distance of the first
/// vertex after the common prefix of the paths.
pub fn coalescence_of(paths: &[GeodesicPath], df: &DistanceField, s: f64) -> f64 {
    let Some(head) = paths.first() else {
        return 0.0;
    };
    let first = &head.vertices;
    let mut common = first.len();
    for g in &paths[1..] {
        let m = first.iter().zip(&g.vertices).take_while(|(a, b)| a == b).count();
        common = common.min(m);
    }
    let mut bound = s;
    for g in paths {
        if g.len() > common {
            bound = bound.min(g.lengths[common]);
        }
    }
    df.distances()
        .iter()
        .copied()
        .filter(|&d| d < bound)
        .fold(0.0, f64::max)
}

/// Hit points on the inner boundary of leftmost geodesics from `root` to
/// every vertex of the outer boundary.
pub fn confluence_count(
    metric: &LatticeMetric,
    root: GridPoint,
    t: f64,
    s: f64,
) -> Result<ConfluenceReport> {
    Ok(ConfluenceRun::new(metric, root, t, s)?.report())
}

/// Coalescence radius of the leftmost geodesics from `root` to the boundary
/// of the filled ball of radius `s`.
pub fn coalescence_radius(metric: &LatticeMetric, root: GridPoint, s: f64) -> Result<f64> {
    let run = ConfluenceRun::new(metric, root, 0.5 * s, s)?;
    Ok(run.coalescence_radius())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ScalarField;
    use crate::metric::{build_metric, LfppParams};

    fn noisy(n: usize, seed: u64) -> LatticeMetric {
        let w: Vec<f64> = (0..n * n)
            .map(|i| {
                let x = (i as u64 ^ seed).wrapping_mul(0x9E3779B97F4A7C15);
                1.0 + (x >> 40) as f64 / (1u64 << 24) as f64
            })
            .collect();
        LatticeMetric::from_weights(n, 1.0 / n as f64, w, LfppParams::pure_gravity()).unwrap()
    }

    #[test]
    fn hit_points_lie_on_inner_boundary() {
        let m = noisy(48, 1);
        let run = ConfluenceRun::new(&m, GridPoint::new(24, 24), 6.0, 12.0).unwrap();
        let inner: BTreeSet<usize> = run.inner.indices().collect();
        for h in run.hit_set() {
            assert!(inner.contains(&h));
        }
        assert_eq!(run.non_crossing_violations(), 0);
        assert_eq!(run.hit_counts().values().sum::<usize>(), run.outer.len());
    }

    #[test]
    fn coalescence_matches_brute_scan() {
        let m = noisy(40, 5);
        let run = ConfluenceRun::new(&m, GridPoint::new(20, 20), 3.0, 9.0).unwrap();
        let mut values: Vec<f64> = run.df.distances().iter().copied().filter(|&d| d < run.s).collect();
        values.sort_by(f64::total_cmp);
        let mut brute = 0.0;
        for &tp in &values {
            let hits: BTreeSet<GridPoint> = run
                .geodesics
                .iter()
                .map(|g| g.vertices[g.last_within(tp).unwrap_or(0)])
                .collect();
            if hits.len() == 1 {
                brute = tp;
            }
        }
        assert_eq!(run.coalescence_radius(), brute);
    }

    #[test]
    fn single_path_coalesces_up_to_s() {
        let n = 16;
        let mut w = vec![1e6; n * n];
        for x in 2..14 {
            w[8 * n + x] = 1.0;
        }
        let m = LatticeMetric::from_weights(n, 1.0 / n as f64, w, LfppParams::pure_gravity()).unwrap();
        let df = distance_field(&m, &[GridPoint::new(2, 8)]).unwrap();
        let g = super::super::geodesic(&df, GridPoint::new(7, 8)).unwrap();
        assert_eq!(coalescence_of(&[g], &df, 6.5), 6.0);
    }

    #[test]
    fn invalid_radii_rejected() {
        let m = build_metric(&ScalarField::constant(16, 0.0), &LfppParams::pure_gravity()).unwrap();
        assert!(confluence_count(&m, GridPoint::new(8, 8), 3.0, 2.0).is_err());
        assert!(matches!(
            confluence_count(&m, GridPoint::new(8, 8), 3.0, 20.0),
            Err(LabError::BallTouchesBorder)
        ));
    }
}
