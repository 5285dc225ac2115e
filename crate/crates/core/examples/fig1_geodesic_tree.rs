//! The tree of leftmost geodesics from the centre to every point of a
//! coarse sub-lattice inside a filled ball, drawn over the ball.
//!
//! cargo run --release --example fig1_geodesic_tree -- [n]

use std::fs::File;
use std::io::BufWriter;

use lfpp::geodesic::GeodesicSelector;
use lfpp::prelude::*;
use lfpp::render::{overlay_paths, render_ball};

fn main() -> Result<()> {
    let n: usize = std::env::args().nth(1).map_or(512, |s| s.parse().expect("n"));
    let params = LfppParams::from_xi(std::f64::consts::SQRT_2, 1.0 / 6f64.sqrt())?;
    let metric = build_metric(&sample_gff(&FieldSpec::new(n, 0))?, &params)?;
    let root = GridPoint::new(n / 2, n / 2);
    let df = distance_field(&metric, &[root])?;
    let ball = filled_ball(&metric_ball(&df, tau_r(&metric, root, 0.3)?))?;

    let g = (n / 50).max(2);
    let selector = GeodesicSelector::new(&metric, &df)?;
    let paths = ball
        .points()
        .filter(|p| p.x % g == 0 && p.y % g == 0)
        .map(|y| selector.select(&[y], Side::Left))
        .collect::<Result<Vec<_>>>()?;
    let edges: usize = paths.iter().map(|p| p.len() - 1).sum();
    println!("{} geodesics, {edges} path edges", paths.len());

    let img = overlay_paths(&render_ball(&df, &ball)?, &paths, [200, 30, 30]);
    let path = "fig1_geodesic_tree.ppm";
    img.write(&mut BufWriter::new(File::create(path)?), "example")?;
    println!("wrote {path}");
    Ok(())
}
