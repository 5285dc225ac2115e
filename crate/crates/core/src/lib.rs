//! Lattice laboratory for Liouville first passage percolation (LFPP).
//!
//! The crate samples discrete Gaussian free fields, turns them into
//! vertex-weighted path metrics with weights `e^{xi h(x)}`, grows filled
//! metric balls, extracts leftmost geodesic trees and measures how geodesics
//! coalesce. The [`probe`] module wraps Monte Carlo checks of the structural
//! properties such metrics are expected to satisfy.
//!
//! ```no_run
//! use lfpp::prelude::*;
//!
//! let field = sample_gff(&FieldSpec::new(256, 7))?;
//! let metric = build_metric(&field, &LfppParams::pure_gravity())?;
//! let root = GridPoint::new(128, 128);
//! let report = confluence_count(&metric, root, 20.0, 30.0)?;
//! println!("{} hit points", report.hit_points.len());
//! # Ok::<(), lfpp::LabError>(())
//! ```

pub mod ball;
pub mod cli;
pub mod error;
pub mod field;
pub mod geodesic;
pub mod grid;
pub mod io;
pub mod metric;
pub mod probe;
pub mod render;

pub use error::{LabError, Result};
pub use grid::{Adjacency, GridPoint};

pub mod prelude {
    pub use crate::ball::{
        filled_ball, metric_ball, partition_arcs_by_harmonic_measure, tau_r, trace_boundary,
        BoundaryCycle, RegionMask,
    };
    pub use crate::error::{LabError, Result};
    pub use crate::field::{
        add_log_singularity, circle_average, mollify, sample_gff, Boundary, FieldSpec,
        ScalarField,
    };
    pub use crate::geodesic::{
        arc_image, coalescence_radius, confluence_count, geodesic, leftmost_geodesic,
        winding_number, winding_spread, ConfluenceReport, GeodesicPath, Side,
    };
    pub use crate::grid::{Adjacency, GridPoint};
    pub use crate::metric::{
        annulus_crossing_distance, build_metric, distance, distance_field, internal_distance,
        scaling_constant, DistanceField, LatticeMetric, LfppParams,
    };
    pub use crate::probe::{Ensemble, FieldSource, MonteCarloResult};
}
