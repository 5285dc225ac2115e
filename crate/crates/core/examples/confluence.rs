//! Confluence of geodesics: how many points of the inner boundary the
//! leftmost geodesics to the outer boundary pass through, as `s` grows.
//!
//! cargo run --release --example confluence

use lfpp::ball::tau_r_with;
use lfpp::geodesic::ConfluenceRun;
use lfpp::prelude::*;

fn main() -> Result<()> {
    let n = 256;
    let metric = build_metric(&sample_gff(&FieldSpec::new(n, 2))?, &LfppParams::pure_gravity())?;
    let root = GridPoint::new(n / 2, n / 2);
    let df = distance_field(&metric, &[root])?;
    let t = tau_r_with(&df, metric.spacing(), root, 0.1)?;
    println!("t = {t:.4e}");
    println!("{:>10} {:>6} {:>8} {:>8} {:>8}", "s", "hits", "inner", "coal", "winding");
    for frac in [0.15, 0.2, 0.25, 0.3, 0.35] {
        let s = tau_r_with(&df, metric.spacing(), root, frac)?;
        let run = ConfluenceRun::with_field(&metric, df.clone(), t, s)?;
        let rep = run.report();
        assert_eq!(rep.non_crossing_violations, 0);
        println!(
            "{s:>10.4e} {:>6} {:>8} {:>8.4} {:>8.3}",
            rep.hit_points.len(),
            rep.inner_boundary_len,
            rep.coalescence_radius,
            rep.winding_spread
        );
    }
    Ok(())
}
