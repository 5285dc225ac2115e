use serde::{Deserialize, Serialize};

use super::ConfluenceRun;
use crate::ball::BoundaryCycle;
use crate::error::{LabError, Result};
use crate::grid::GridPoint;
use crate::metric::LatticeMetric;

/// Outer-boundary positions whose geodesics pass through one inner arc.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcImage {
    pub label: usize,
    /// Sorted positions in the outer cycle.
    pub positions: Vec<usize>,
    /// Number of maximal cyclic runs; at most 1 for a connected arc.
    pub runs: usize,
}

impl ArcImage {
    pub fn is_contiguous(&self) -> bool {
        self.runs <= 1
    }
}

/// A non-contiguous image, with the target and hit point opening each extra run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcViolation {
    pub label: usize,
    pub witnesses: Vec<(GridPoint, GridPoint)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcImageReport {
    pub images: Vec<ArcImage>,
    pub violations: Vec<ArcViolation>,
    pub outer_len: usize,
}

/// Map each arc of the inner boundary to the set of outer boundary vertices
/// whose leftmost geodesics hit the inner boundary inside that arc.
///
/// Violations of contiguity are reported, never repaired.
pub fn arc_image(
    metric: &LatticeMetric,
    root: GridPoint,
    t: f64,
    s: f64,
    inner_arcs: &BoundaryCycle,
) -> Result<ArcImageReport> {
    let run = ConfluenceRun::new(metric, root, t, s)?;
    arc_image_of(&run, inner_arcs)
}

/// [`arc_image`] on an existing run.
pub fn arc_image_of(run: &ConfluenceRun, inner_arcs: &BoundaryCycle) -> Result<ArcImageReport> {
    let positions = inner_arcs.positions();
    let n = run.df.n();
    let n_labels = inner_arcs.arcs.as_ref().map_or(1, |a| a.len());
    let m = run.outer.len();
    let mut labels = Vec::with_capacity(m);
    for k in 0..m {
        let hit = run.hit_vertex(k);
        let pos = positions.get(&hit.index(n)).ok_or_else(|| {
            LabError::InvalidSpec(format!("hit point {hit} is not on the supplied inner boundary"))
        })?;
        labels.push(inner_arcs.arc_label(*pos).unwrap_or(0));
    }
    let mut images = Vec::with_capacity(n_labels);
    let mut violations = Vec::new();
    for label in 0..n_labels {
        let pos: Vec<usize> = (0..m).filter(|&p| labels[p] == label).collect();
        let starts: Vec<usize> = pos
            .iter()
            .copied()
            .filter(|&p| labels[(p + m - 1) % m] != label)
            .collect();
        let runs = if pos.is_empty() { 0 } else { starts.len().max(1) };
        if runs > 1 {
            violations.push(ArcViolation {
                label,
                witnesses: starts[1..]
                    .iter()
                    .map(|&p| (run.outer.vertices[p], run.hit_vertex(p)))
                    .collect(),
            });
        }
        images.push(ArcImage {
            label,
            positions: pos,
            runs,
        });
    }
    Ok(ArcImageReport {
        images,
        violations,
        outer_len: m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ScalarField;
    use crate::metric::{build_metric, LfppParams};

    #[test]
    fn single_arc_maps_to_everything() {
        let m = build_metric(&ScalarField::constant(48, 0.0), &LfppParams::pure_gravity()).unwrap();
        let run = ConfluenceRun::new(&m, GridPoint::new(24, 24), 6.0, 12.0).unwrap();
        let arcs = run.inner.clone().with_equal_arcs(1);
        let rep = arc_image_of(&run, &arcs).unwrap();
        assert_eq!(rep.images.len(), 1);
        assert_eq!(rep.images[0].positions.len(), run.outer.len());
        assert!(rep.violations.is_empty());
    }
}
