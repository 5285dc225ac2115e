//! The field's two-point covariance against `-log |x - y|`.
//!
//! cargo run --release --example covariance_law

use lfpp::prelude::*;
use lfpp::probe::covariance_law;

fn main() -> Result<()> {
    let n = 256;
    let ens = Ensemble::new(FieldSource::Gff(FieldSpec::new(n, 0)), 0..20, LfppParams::pure_gravity());
    let law = covariance_law(&ens, 2, n / 8)?;
    for (d, x, c) in law.points.iter().step_by(4) {
        println!("offset {d:>3}  -log|x-y| {x:6.3}  cov {c:7.4}");
    }
    println!(
        "slope {:.4} (convention {:.4}), R^2 {:.4}",
        law.slope, law.convention, law.r_squared
    );
    Ok(())
}
