//! LFPP distances from the centre of a sampled field, and one geodesic.
//!
//! cargo run --release --example distance_field

use lfpp::prelude::*;

fn main() -> Result<()> {
    let n = 256;
    let field = sample_gff(&FieldSpec::new(n, 3))?;
    let params = LfppParams::pure_gravity();
    println!("gamma={:.4} xi={:.4} d_gamma={:.4}", params.gamma, params.xi, params.d_gamma);
    let metric = build_metric(&field, &params)?;

    let root = GridPoint::new(n / 2, n / 2);
    let df = distance_field(&metric, &[root])?;
    for p in [GridPoint::new(0, 0), GridPoint::new(n - 1, 0), GridPoint::new(n / 2, n - 1)] {
        println!("d({root}, {p}) = {:.4e}", df.dist(p));
    }

    // pairwise distances are symmetric bit for bit
    let (a, b) = (GridPoint::new(10, 200), GridPoint::new(230, 40));
    assert_eq!(distance(&metric, a, b)?, distance(&metric, b, a)?);

    let g = geodesic(&df, GridPoint::new(n - 1, n - 1))?;
    println!(
        "geodesic to the corner: {} vertices, length {:.4e}, euclidean {:.0}",
        g.len(),
        g.lengths.last().unwrap(),
        root.lattice_distance(GridPoint::new(n - 1, n - 1)),
    );
    Ok(())
}
