//! Grow a filled metric ball until it leaves a Euclidean disc, trace its
//! boundary and draw it.
//!
//! cargo run --release --example filled_ball

use std::fs::File;
use std::io::BufWriter;

use lfpp::prelude::*;
use lfpp::render::render_ball;

fn main() -> Result<()> {
    let n = 256;
    let metric = build_metric(&sample_gff(&FieldSpec::new(n, 5))?, &LfppParams::pure_gravity())?;
    let root = GridPoint::new(n / 2, n / 2);
    let df = distance_field(&metric, &[root])?;

    for frac in [0.1, 0.2, 0.3] {
        let s = tau_r(&metric, root, frac)?;
        let raw = metric_ball(&df, s);
        let ball = filled_ball(&raw)?;
        let cycle = trace_boundary(&ball)?;
        println!(
            "r={frac}: s={s:.4e} |B|={} |filled|={} boundary={} revisits={}",
            raw.count(),
            ball.count(),
            cycle.len(),
            cycle.revisits
        );
    }

    let ball = filled_ball(&metric_ball(&df, tau_r(&metric, root, 0.3)?))?;
    let path = "filled_ball.pgm";
    render_ball(&df, &ball)?.write(&mut BufWriter::new(File::create(path)?), "example")?;
    println!("wrote {path}");
    Ok(())
}
