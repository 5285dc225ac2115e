//! Estimate the scaling constants over several radii and check that
//! ratios stay within a power-law sandwich.
//!
//! cargo run --release --example scaling_sandwich

use lfpp::prelude::*;
use lfpp::probe::scaling_sandwich;

fn main() -> Result<()> {
    let n = 512;
    let ens = Ensemble::new(FieldSource::Gff(FieldSpec::new(n, 0)), 0..16, LfppParams::pure_gravity());
    let radii: Vec<f64> = [16.0, 32.0, 64.0].iter().map(|r| r * ens.spacing()).collect();
    let rep = scaling_sandwich(&ens, &radii)?;
    for (r, c) in rep.radii.iter().zip(&rep.estimates) {
        println!("c_r at r={r:.4}: {:.4e} +- {:.1e}", c.estimate, c.std_error);
    }
    println!("Lambda = {:.3}, fitted exponent {:.3}", rep.lambda, rep.exponent);
    println!("Holder window ({:.3}, {:.3})", rep.holder_window.0, rep.holder_window.1);
    Ok(())
}
