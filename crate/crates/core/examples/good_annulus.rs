//! The three-condition good-annulus event at the grid centre, on one field
//! and as a frequency over an ensemble.
//!
//! cargo run --release --example good_annulus

use lfpp::prelude::*;
use lfpp::probe::{good_annulus_event, good_annulus_probability, GoodAnnulusParams};

fn main() -> Result<()> {
    let n = 512;
    let ens = Ensemble::new(FieldSource::Gff(FieldSpec::new(n, 0)), 0..8, LfppParams::pure_gravity());
    let r = 32.0 * ens.spacing();
    let c_r = lfpp::metric::scaling_constant(&ens, r)?.estimate;
    println!("c_r = {c_r:.4e} at r = {r}");

    // the default square factor c/100 is out of reach on a lattice
    let strict = GoodAnnulusParams::new(0.05, 0.25, 10.0)?;
    let loose = strict.clone().with_square_factor(20.0);

    let field = ens.realize(0)?;
    let metric = build_metric(&field, &ens.params)?;
    let z = GridPoint::new(n / 2, n / 2);
    for (name, p) in [("c/100", &strict), ("20", &loose)] {
        let rec = good_annulus_event(&field, &metric, z, r, p, c_r)?;
        println!(
            "square factor {name}: cond1={} cond2={} cond3={} (crossing {:.3e}, max diam {:.3e}, scale {:.3e})",
            rec.cond1, rec.cond2, rec.cond3, rec.crossing, rec.max_square_diameter, rec.scale
        );
    }

    let p = good_annulus_probability(&ens, r, &loose, Some(c_r))?;
    println!("P(good) = {:.3} +- {:.3} over {} fields", p.estimate, p.std_error, p.n_samples);
    Ok(())
}
