//! Sample a whole-plane GFF, look at its circle averages and write a PGM.
//!
//! cargo run --release --example sample_field -- [n] [seed]

use std::fs::File;
use std::io::BufWriter;

use lfpp::prelude::*;
use lfpp::render::render_field;

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(256, |s| s.parse().expect("n"));
    let seed: u64 = args.next().map_or(1, |s| s.parse().expect("seed"));

    let field = sample_gff(&FieldSpec::new(n, seed))?;
    let v = field.values();
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / v.len() as f64;
    println!("n={n} seed={seed} mean={mean:.4} var={var:.4}");

    let z = GridPoint::new(n / 2, n / 2);
    for k in 1..=4 {
        let r = k as f64 * n as f64 / 16.0 * field.spacing();
        println!("h_r(centre) at r={r:.4}: {:+.4}", circle_average(&field, z, r)?);
    }

    let smooth = mollify(&field, 4.0 * field.spacing())?;
    println!("pointwise value {:+.4}, mollified {:+.4}", field.get(z), smooth.get(z));

    let spiked = add_log_singularity(&field, z, 1.0)?;
    println!("with a log singularity of strength 1: {:+.4}", spiked.get(z));

    let path = "sample_field.pgm";
    render_field(&field).write(&mut BufWriter::new(File::create(path)?), "example")?;
    println!("wrote {path}");
    Ok(())
}
