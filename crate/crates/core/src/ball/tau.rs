use crate::error::{LabError, Result};
use crate::grid::GridPoint;
use crate::metric::{distance_field, DistanceField, LatticeMetric};

/// First radius `s` at which the filled ball about `root` is no longer
/// contained in the open Euclidean disk of continuum radius `r`.
///
/// The lattice disk is star-shaped with a 4-connected exterior, so filling
/// never pushes a ball out of it; the exit radius is simply the smallest
/// distance among vertices at Euclidean distance `>= r`.
pub fn tau_r(metric: &LatticeMetric, root: GridPoint, r: f64) -> Result<f64> {
    check_disk(metric.n(), root, r / metric.spacing())?;
    let df = distance_field(metric, &[root])?;
    tau_r_with(&df, metric.spacing(), root, r)
}

/// [`tau_r`] for an already computed distance field rooted at `root`.
pub fn tau_r_with(df: &DistanceField, spacing: f64, root: GridPoint, r: f64) -> Result<f64> {
    let rho = r / spacing;
    check_disk(df.n(), root, rho)?;
    let n = df.n();
    let reach = rho.ceil() as usize + 1;
    let mut best = f64::INFINITY;
    for y in root.y.saturating_sub(reach)..=(root.y + reach).min(n - 1) {
        for x in root.x.saturating_sub(reach)..=(root.x + reach).min(n - 1) {
            let p = GridPoint::new(x, y);
            if p.lattice_distance(root) >= rho {
                best = best.min(df.dist(p));
            }
        }
    }
    Ok(best)
}

fn check_disk(n: usize, root: GridPoint, rho: f64) -> Result<()> {
    if !(rho > 0.0) {
        return Err(LabError::InvalidSpec("tau_r needs a positive radius".into()));
    }
    // Exit vertices lie within rho + 1 of the root; keep one more vertex of margin.
    let reach = rho + 2.0;
    let max = (n - 1) as f64;
    let (x, y) = (root.x as f64, root.y as f64);
    if x - reach < 0.0 || y - reach < 0.0 || x + reach > max || y + reach > max {
        return Err(LabError::OutOfBounds(format!(
            "disk of lattice radius {rho:.2} about {root} is too close to the border"
        )));
    }
    Ok(())
}
