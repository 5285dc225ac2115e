//! Positive association of two increasing distance functionals: the
//! crossings of two disjoint rectangles.
//!
//! cargo run --release --example fkg_probe

use lfpp::prelude::*;
use lfpp::probe::{fkg_check, Negated, RectangleCrossing};

fn main() -> Result<()> {
    let n = 64;
    let spec = FieldSpec::new(n, 0).zero_boundary();
    let ens = Ensemble::new(FieldSource::Gff(spec), 0..200, LfppParams::pure_gravity());
    let a = RectangleCrossing { origin: GridPoint::new(n / 8, n / 4), width: n / 4, height: n / 2 };
    let b = RectangleCrossing { origin: GridPoint::new(5 * n / 8, n / 4), width: n / 4, height: n / 2 };

    let cov = fkg_check(&a, &b, &ens)?;
    println!("Cov(A, B)  = {:+.4e} +- {:.2e} over {} fields", cov.estimate, cov.std_error, cov.n_samples);
    let neg = fkg_check(&a, &Negated(b), &ens)?;
    println!("Cov(A, -B) = {:+.4e} +- {:.2e}", neg.estimate, neg.std_error);
    Ok(())
}
