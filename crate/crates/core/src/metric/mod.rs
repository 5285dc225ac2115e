//! LFPP lattice metrics.
//!
//! A path visiting vertices `x_0, ..., x_k` has length
//! `sum_i e^{xi h(x_i)}`, first vertex included. With that convention
//! `d(u, u) = weight(u)`; [`normalized_distance`] subtracts half of each
//! endpoint weight to obtain a function vanishing on the diagonal.

mod crossing;
mod dijkstra;

pub use crossing::{
    annulus_crossing_distance, normalized_square_crossing, scaling_constant,
    square_crossing_distance,
};
pub use dijkstra::{
    distance, distance_field, distance_field_in, internal_distance, normalized_distance,
    DistanceField,
};
pub(crate) use dijkstra::{local_distances, run_multi};

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::field::{mollify, ScalarField};
use crate::grid::{Adjacency, GridPoint};

/// Largest `|xi h|` accepted before exponentiation.
pub const EXPONENT_GUARD: f64 = 700.0;

/// LQG exponents and the mollification scale.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LfppParams {
    pub gamma: f64,
    pub d_gamma: f64,
    pub xi: f64,
    pub q: f64,
    /// Continuum heat-kernel scale applied to the field before exponentiating.
    pub mollify_eps: f64,
}

impl LfppParams {
    /// `xi = gamma / d_gamma`, `Q = 2 / gamma + gamma / 2`.
    pub fn new(gamma: f64, d_gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 2.0) {
            return Err(LabError::InvalidSpec(format!("gamma {gamma} must lie in (0, 2)")));
        }
        if !(d_gamma > 2.0 && d_gamma.is_finite()) {
            return Err(LabError::InvalidSpec(format!("d_gamma {d_gamma} must exceed 2")));
        }
        Ok(LfppParams {
            gamma,
            d_gamma,
            xi: gamma / d_gamma,
            q: 2.0 / gamma + gamma / 2.0,
            mollify_eps: 0.0,
        })
    }

    /// Specify `xi` directly; `d_gamma` is then `gamma / xi`.
    pub fn from_xi(gamma: f64, xi: f64) -> Result<Self> {
        if !(xi > 0.0 && xi.is_finite()) {
            return Err(LabError::InvalidSpec(format!("xi {xi} must be positive")));
        }
        let mut p = LfppParams::new(gamma, gamma / xi)?;
        p.xi = xi;
        Ok(p)
    }

    /// `gamma = sqrt(8/3)`, the only case with a known dimension, `d_gamma = 4`.
    pub fn pure_gravity() -> Self {
        LfppParams::new((8.0f64 / 3.0).sqrt(), 4.0).expect("constants are valid")
    }

    pub fn with_mollify(mut self, eps: f64) -> Self {
        self.mollify_eps = eps;
        self
    }
}

impl Default for LfppParams {
    fn default() -> Self {
        LfppParams::pure_gravity()
    }
}

/// Vertex-weighted grid graph.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeMetric {
    n: usize,
    spacing: f64,
    weights: Vec<f64>,
    adjacency: Adjacency,
    params: LfppParams,
}

impl LatticeMetric {
    /// Wrap explicit weights. All weights must be positive and finite.
    pub fn from_weights(
        n: usize,
        spacing: f64,
        weights: Vec<f64>,
        params: LfppParams,
    ) -> Result<Self> {
        if weights.len() != n * n {
            return Err(LabError::InvalidSpec("weights need n*n entries".into()));
        }
        if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(LabError::InvalidSpec(format!("weight {i} is not positive and finite")));
        }
        Ok(LatticeMetric {
            n,
            spacing,
            weights,
            adjacency: Adjacency::Four,
            params,
        })
    }

    pub fn with_adjacency(mut self, adjacency: Adjacency) -> Self {
        self.adjacency = adjacency;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    #[inline]
    pub fn weight(&self, p: GridPoint) -> f64 {
        self.weights[p.index(self.n)]
    }

    pub fn adjacency(&self) -> Adjacency {
        self.adjacency
    }

    pub fn params(&self) -> &LfppParams {
        &self.params
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max)
    }

    /// Length of an explicit vertex sequence, summed front to back.
    pub fn path_length(&self, path: &[GridPoint]) -> f64 {
        path.iter().fold(0.0, |acc, &p| acc + self.weight(p))
    }
}

/// `weights = exp(xi * mollify(field, mollify_eps))`.
pub fn build_metric(field: &ScalarField, params: &LfppParams) -> Result<LatticeMetric> {
    let smoothed;
    let source = if params.mollify_eps > 0.0 {
        smoothed = mollify(field, params.mollify_eps)?;
        &smoothed
    } else if params.mollify_eps == 0.0 {
        field
    } else {
        return Err(LabError::InvalidSpec("mollify_eps must be >= 0".into()));
    };
    let xi = params.xi;
    let mut weights = Vec::with_capacity(source.values().len());
    for &h in source.values() {
        let e = xi * h;
        if e.abs() > EXPONENT_GUARD {
            return Err(LabError::WeightOverflow { value: e.abs() });
        }
        weights.push(e.exp());
    }
    LatticeMetric::from_weights(field.n(), field.spacing(), weights, *params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_gravity_constants() {
        let p = LfppParams::pure_gravity();
        assert!((p.xi - 1.0 / 6.0f64.sqrt()).abs() < 1e-12);
        assert!((p.xi - 0.40824829).abs() < 1e-8);
        assert!((p.q - (2.0 / p.gamma + p.gamma / 2.0)).abs() < 1e-12);
        assert_eq!(p.d_gamma, 4.0);
    }

    #[test]
    fn exponent_ranges_validated() {
        assert!(LfppParams::new(2.0, 4.0).is_err());
        assert!(LfppParams::new(1.0, 2.0).is_err());
        let p = LfppParams::from_xi(1.0, 0.25).unwrap();
        assert!((p.d_gamma - 4.0).abs() < 1e-12);
    }

    #[test]
    fn flat_field_has_unit_weights() {
        let f = ScalarField::constant(16, 0.0);
        let m = build_metric(&f, &LfppParams::pure_gravity()).unwrap();
        assert!(m.weights().iter().all(|&w| w == 1.0));
    }

    #[test]
    fn constant_field_weights() {
        let c = 1.7;
        let p = LfppParams::pure_gravity();
        let m = build_metric(&ScalarField::constant(16, c), &p).unwrap();
        assert!(m.weights().iter().all(|&w| w == (p.xi * c).exp()));
    }

    #[test]
    fn overflow_guard() {
        let f = ScalarField::constant(8, 2000.0);
        let err = build_metric(&f, &LfppParams::pure_gravity()).unwrap_err();
        assert!(matches!(err, LabError::WeightOverflow { .. }));
    }
}
