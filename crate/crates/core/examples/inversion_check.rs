//! Circle-average covariances should be invariant under `r -> 1/r` for a
//! whole-plane field normalised on the unit circle.
//!
//! cargo run --release --example inversion_check

use lfpp::prelude::*;
use lfpp::probe::{inversion_check, INVERSION_RADII};

fn main() -> Result<()> {
    let spec = FieldSpec::new(512, 0).with_spacing(1.0 / 32.0).with_normalization_radius(1.0);
    let ens = Ensemble::new(FieldSource::Gff(spec), 0..60, LfppParams::pure_gravity());
    let rep = inversion_check(&ens)?;
    println!("radii {INVERSION_RADII:?}");
    for row in &rep.z_scores {
        println!("{}", row.iter().map(|z| format!("{z:+7.2}")).collect::<Vec<_>>().join(" "));
    }
    println!("max |z| = {:.2} over {} fields", rep.result.estimate, rep.result.n_samples);
    Ok(())
}
