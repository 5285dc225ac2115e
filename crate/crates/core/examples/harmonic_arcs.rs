//! Cut a ball boundary into arcs of equal harmonic measure from infinity.
//!
//! cargo run --release --example harmonic_arcs

use lfpp::prelude::*;

fn main() -> Result<()> {
    let n = 256;
    let metric = build_metric(&sample_gff(&FieldSpec::new(n, 8))?, &LfppParams::pure_gravity())?;
    let root = GridPoint::new(n / 2, n / 2);
    let df = distance_field(&metric, &[root])?;
    let ball = filled_ball(&metric_ball(&df, tau_r(&metric, root, 0.2)?))?;
    let cycle = trace_boundary(&ball)?;

    let k = 8;
    let part = partition_arcs_by_harmonic_measure(&ball, &cycle, k, 40_000, 1)?;
    println!("{} boundary vertices, {} walkers", cycle.len(), part.walkers);
    let arcs = part.cycle.arcs.as_ref().expect("arcs are set");
    for (i, (arc, hits)) in arcs.iter().zip(&part.arc_hits).enumerate() {
        println!("arc {i}: start {:>4} length {:>4} hits {hits}", arc.start, arc.len);
    }
    println!("binomial SE per arc: {:.1}", part.count_std_error());
    Ok(())
}
