//! Geodesics, leftmost selection and confluence statistics.
//!
//! "Leftmost" is a combinatorial rule: among all minimal paths (equal up to
//! a relative tolerance of [`TIE_TOLERANCE`]) the walk from the root takes,
//! at every vertex, the forward option turning most counterclockwise
//! relative to the direction it arrived from. At the root the reference
//! heading is `+x`. With a fixed reference the rule is consistent under
//! restriction: the prefix of a leftmost geodesic is the leftmost geodesic
//! to its own endpoint.

mod arcs;
mod confluence;
mod winding;

pub use arcs::{arc_image, arc_image_of, ArcImage, ArcImageReport, ArcViolation};
pub use confluence::{
    coalescence_of, coalescence_radius, confluence_count, ConfluenceReport, ConfluenceRun,
};
pub use winding::{winding_number, winding_spread, WindingSpread};

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::grid::{neighbors, GridPoint};
use crate::metric::{distance_field, DistanceField, LatticeMetric};

/// Relative tolerance under which two path lengths count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// A minimal path from the root.
#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicPath {
    pub vertices: Vec<GridPoint>,
    /// Prefix sums of vertex weights; `lengths[k]` is the length of the first
    /// `k + 1` vertices.
    pub lengths: Vec<f64>,
    pub spacing: f64,
}

impl GeodesicPath {
    /// A path with unit weights, for building test polylines by hand.
    pub fn from_vertices(vertices: Vec<GridPoint>, spacing: f64) -> Self {
        let lengths = (1..=vertices.len()).map(|k| k as f64).collect();
        GeodesicPath {
            vertices,
            lengths,
            spacing,
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn root(&self) -> GridPoint {
        self.vertices[0]
    }

    pub fn endpoint(&self) -> GridPoint {
        *self.vertices.last().expect("paths are nonempty")
    }

    pub fn length(&self) -> f64 {
        *self.lengths.last().expect("paths are nonempty")
    }

    /// Index of the last vertex with length `<= t`, if any.
    pub fn last_within(&self, t: f64) -> Option<usize> {
        let k = self.lengths.partition_point(|&l| l <= t);
        k.checked_sub(1)
    }
}

/// Which extremal geodesic to select.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    #[default]
    Left,
    Right,
}

fn path_from(df: &DistanceField, n: usize, spacing: f64, mut idx: Vec<usize>) -> GeodesicPath {
    idx.reverse();
    let vertices: Vec<GridPoint> = idx.iter().map(|&i| GridPoint::from_index(i, n)).collect();
    let lengths = idx.iter().map(|&i| df.dist_at(i)).collect();
    GeodesicPath {
        vertices,
        lengths,
        spacing,
    }
}

/// Follow parent links from `target` back to its source.
///
/// `lengths` are the distance values along the path, which are exactly the
/// front-to-back prefix sums of the weights.
pub fn geodesic(df: &DistanceField, target: GridPoint) -> Result<GeodesicPath> {
    geodesic_with_spacing(df, target, 1.0 / df.n() as f64)
}

pub(crate) fn geodesic_with_spacing(
    df: &DistanceField,
    target: GridPoint,
    spacing: f64,
) -> Result<GeodesicPath> {
    let n = df.n();
    if target.x >= n || target.y >= n {
        return Err(LabError::OutOfBounds(format!("target {target} outside the grid")));
    }
    if !df.is_reached(target) {
        return Err(LabError::NoPath {
            x: target.x,
            y: target.y,
        });
    }
    let mut idx = vec![target.index(n)];
    while let Some(p) = df.parent_index(*idx.last().unwrap()) {
        idx.push(p);
    }
    Ok(path_from(df, n, spacing, idx))
}

/// Signed turning angle from heading `a` to heading `b`, in `(-pi, pi]`.
fn turn(a: (i64, i64), b: (i64, i64)) -> f64 {
    let cross = (a.0 * b.1 - a.1 * b.0) as f64;
    let dot = (a.0 * b.0 + a.1 * b.1) as f64;
    cross.atan2(dot)
}

/// Leftmost/rightmost geodesic extraction against one distance field.
///
/// Reuse one selector for many targets from the same root.
pub struct GeodesicSelector<'a> {
    metric: &'a LatticeMetric,
    df: &'a DistanceField,
    root: usize,
}

impl<'a> GeodesicSelector<'a> {
    /// `df` must be a single-source field of `metric`.
    pub fn new(metric: &'a LatticeMetric, df: &'a DistanceField) -> Result<Self> {
        let srcs = df.source_indices();
        if srcs.len() != 1 {
            return Err(LabError::InvalidSpec("selector needs a single-source distance field".into()));
        }
        Ok(GeodesicSelector {
            metric,
            df,
            root: srcs[0],
        })
    }

    pub fn distance_field(&self) -> &DistanceField {
        self.df
    }

    /// `u -> v` is an edge of some minimal path.
    #[inline]
    fn tied(&self, u: usize, v: usize) -> bool {
        let dv = self.df.dist_at(v);
        let du = self.df.dist_at(u);
        du.is_finite() && (du + self.metric.weights()[v] - dv).abs() <= TIE_TOLERANCE * dv
    }

    /// Extremal minimal path from the root into `targets`.
    pub fn select(&self, targets: &[GridPoint], side: Side) -> Result<GeodesicPath> {
        let n = self.metric.n();
        if targets.is_empty() {
            return Err(LabError::EmptyTargetSet);
        }
        let mut best = f64::INFINITY;
        for t in targets {
            if t.x >= n || t.y >= n {
                return Err(LabError::OutOfBounds(format!("target {t} outside the grid")));
            }
            best = best.min(self.df.dist(*t));
        }
        if !best.is_finite() {
            let t = targets[0];
            return Err(LabError::NoPath { x: t.x, y: t.y });
        }
        let goal: HashSet<usize> = targets
            .iter()
            .map(|t| t.index(n))
            .filter(|&i| self.df.dist_at(i) <= best * (1.0 + TIE_TOLERANCE))
            .collect();

        // Vertices lying on some minimal path into the goal.
        let mut on_path: HashSet<usize> = goal.clone();
        let mut queue: VecDeque<usize> = goal.iter().copied().collect();
        let mut fast = true;
        while let Some(v) = queue.pop_front() {
            if v == self.root {
                continue;
            }
            let mut preds = 0;
            for u in neighbors(v, n, self.metric.adjacency()) {
                if self.tied(u, v) {
                    preds += 1;
                    if on_path.insert(u) {
                        queue.push_back(u);
                    }
                }
            }
            if preds > 1 {
                fast = false;
            }
        }
        if fast && goal.len() == 1 {
            let t = GridPoint::from_index(*goal.iter().next().unwrap(), n);
            return geodesic_with_spacing(self.df, t, self.metric.spacing());
        }

        let mut idx = vec![self.root];
        let mut heading = (1i64, 0i64);
        let mut u = self.root;
        while !goal.contains(&u) {
            let p = GridPoint::from_index(u, n);
            let mut pick: Option<(f64, usize, (i64, i64))> = None;
            for v in neighbors(u, n, self.metric.adjacency()) {
                if !on_path.contains(&v) || !self.tied(u, v) {
                    continue;
                }
                let q = GridPoint::from_index(v, n);
                let dir = (q.x as i64 - p.x as i64, q.y as i64 - p.y as i64);
                let a = match side {
                    Side::Left => turn(heading, dir),
                    Side::Right => -turn(heading, dir),
                };
                if pick.is_none_or(|(b, _, _)| a > b) {
                    pick = Some((a, v, dir));
                }
            }
            let (_, v, dir) = pick.ok_or(LabError::NoPath { x: p.x, y: p.y })?;
            idx.push(v);
            heading = dir;
            u = v;
        }
        idx.reverse();
        Ok(path_from(self.df, n, self.metric.spacing(), idx))
    }
}

/// Leftmost (or rightmost) minimal path from `root` into `targets`.
pub fn leftmost_geodesic(
    metric: &LatticeMetric,
    root: GridPoint,
    targets: &[GridPoint],
    side: Side,
) -> Result<GeodesicPath> {
    if targets.is_empty() {
        return Err(LabError::EmptyTargetSet);
    }
    let df = distance_field(metric, &[root])?;
    GeodesicSelector::new(metric, &df)?.select(targets, side)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ScalarField;
    use crate::metric::{build_metric, LfppParams};

    fn flat(n: usize) -> LatticeMetric {
        build_metric(&ScalarField::constant(n, 0.0), &LfppParams::pure_gravity()).unwrap()
    }

    fn pts(p: &GeodesicPath) -> Vec<(usize, usize)> {
        p.vertices.iter().map(|v| (v.x, v.y)).collect()
    }

    #[test]
    fn source_path_is_single_vertex() {
        let m = flat(6);
        let s = GridPoint::new(2, 2);
        let df = distance_field(&m, &[s]).unwrap();
        let p = geodesic(&df, s).unwrap();
        assert_eq!(p.vertices, vec![s]);
        assert_eq!(p.lengths, vec![1.0]);
    }

    #[test]
    fn flat_path_counts_l1_plus_one() {
        let m = flat(12);
        let df = distance_field(&m, &[GridPoint::new(1, 2)]).unwrap();
        let p = geodesic(&df, GridPoint::new(9, 7)).unwrap();
        assert_eq!(p.len(), 8 + 5 + 1);
        assert_eq!(p.length(), df.dist(GridPoint::new(9, 7)));
        for w in p.vertices.windows(2) {
            assert_eq!(w[0].x.abs_diff(w[1].x) + w[0].y.abs_diff(w[1].y), 1);
        }
    }

    #[test]
    fn flat_leftmost_and_rightmost_staircases() {
        let m = flat(5);
        let root = GridPoint::new(0, 0);
        let target = [GridPoint::new(4, 4)];
        let left = leftmost_geodesic(&m, root, &target, Side::Left).unwrap();
        let right = leftmost_geodesic(&m, root, &target, Side::Right).unwrap();
        let up_then_right: Vec<_> = (0..5).map(|y| (0, y)).chain((1..5).map(|x| (x, 4))).collect();
        let right_then_up: Vec<_> = (0..5).map(|x| (x, 0)).chain((1..5).map(|y| (4, y))).collect();
        assert_eq!(pts(&left), up_then_right);
        assert_eq!(pts(&right), right_then_up);
    }

    #[test]
    fn unique_path_matches_parent_forest() {
        let w: Vec<f64> = (0..64).map(|i| 1.0 + ((i * 7919) % 101) as f64 / 53.0).collect();
        let m = LatticeMetric::from_weights(8, 0.125, w, LfppParams::pure_gravity()).unwrap();
        let root = GridPoint::new(3, 3);
        let df = distance_field(&m, &[root]).unwrap();
        for t in [GridPoint::new(0, 7), GridPoint::new(7, 1), GridPoint::new(5, 5)] {
            let a = geodesic(&df, t).unwrap();
            let b = leftmost_geodesic(&m, root, &[t], Side::Left).unwrap();
            assert_eq!(a.vertices, b.vertices);
        }
    }

    #[test]
    fn empty_target_set() {
        let m = flat(5);
        assert!(matches!(
            leftmost_geodesic(&m, GridPoint::new(0, 0), &[], Side::Left),
            Err(LabError::EmptyTargetSet)
        ));
    }

    #[test]
    fn last_within_finds_hit_index() {
        let p = GeodesicPath::from_vertices((0..5).map(|x| GridPoint::new(x, 0)).collect(), 1.0);
        assert_eq!(p.last_within(0.5), None);
        assert_eq!(p.last_within(3.0), Some(2));
        assert_eq!(p.last_within(99.0), Some(4));
    }
}
