//! Monte Carlo probes of the structural properties of LFPP metrics.
//!
//! Every probe draws its samples from an [`Ensemble`] and returns results that
//! are bit-for-bit reproducible from the seed range.

mod annulus;
mod covariance;
mod fkg;
mod inversion;
mod scaling;

pub use annulus::{
    good_annulus_event, good_annulus_probability, GoodAnnulusParams, GoodAnnulusRecord,
};
pub use covariance::{covariance_law, CovarianceLaw};
pub use fkg::{
    fkg_check, DistanceFunctional, Negated, PointDistance, RectangleCrossing, RegionDiameter,
    SetDistance,
};
pub use inversion::{inversion_check, InversionReport, INVERSION_RADII};
pub use scaling::{scaling_sandwich, SandwichReport};

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::field::{sample_gff, FieldSpec, ScalarField};
use crate::metric::LfppParams;

/// A Monte Carlo estimate with its standard error.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloResult {
    pub estimate: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub seeds: Range<u64>,
}

impl MonteCarloResult {
    /// One ledger row: `probe,params,estimate,std_error,n,seed_range`.
    pub fn ledger_row(&self, probe: &str, params: &str) -> [String; 6] {
        [
            probe.to_string(),
            params.to_string(),
            format!("{:.12e}", self.estimate),
            format!("{:.12e}", self.std_error),
            self.n_samples.to_string(),
            format!("{}..{}", self.seeds.start, self.seeds.end),
        ]
    }
}

/// Where the fields of an ensemble come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum FieldSource {
    /// `sample_gff(spec)` with the seed replaced per sample.
    Gff(FieldSpec),
    /// `h = 0` everywhere; the degenerate control ensemble.
    Flat { n: usize, spacing: f64 },
}

/// A family of fields indexed by seed, with the metric parameters used on them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    pub source: FieldSource,
    pub seeds: Range<u64>,
    pub params: LfppParams,
}

impl Ensemble {
    pub fn new(source: FieldSource, seeds: Range<u64>, params: LfppParams) -> Self {
        Ensemble {
            source,
            seeds,
            params,
        }
    }

    pub fn gff(spec: FieldSpec, seeds: Range<u64>, params: LfppParams) -> Self {
        Ensemble::new(FieldSource::Gff(spec), seeds, params)
    }

    pub fn realize(&self, seed: u64) -> Result<ScalarField> {
        match &self.source {
            FieldSource::Gff(spec) => sample_gff(&spec.clone().with_seed(seed)),
            FieldSource::Flat { n, spacing } => {
                ScalarField::from_values(*n, *spacing, vec![0.0; n * n])
            }
        }
    }

    pub fn n(&self) -> usize {
        match &self.source {
            FieldSource::Gff(spec) => spec.n,
            FieldSource::Flat { n, .. } => *n,
        }
    }

    pub fn spacing(&self) -> f64 {
        match &self.source {
            FieldSource::Gff(spec) => spec.spacing(),
            FieldSource::Flat { spacing, .. } => *spacing,
        }
    }

    pub fn len(&self) -> usize {
        (self.seeds.end.saturating_sub(self.seeds.start)) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub(crate) fn require(&self, min: usize) -> Result<()> {
        if self.len() < min {
            return Err(LabError::InsufficientSamples {
                got: self.len(),
                min,
            });
        }
        Ok(())
    }
}

/// Sample median and its asymptotic standard error
/// `sd * sqrt(pi / 2) / sqrt(N)` (exact for Gaussian data).
pub fn median_with_error(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    };
    if n < 2 {
        return (median, 0.0);
    }
    let (_, sd) = mean_sd(values);
    (median, sd * (std::f64::consts::FRAC_PI_2).sqrt() / (n as f64).sqrt())
}

/// Mean and sample standard deviation.
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Unbiased sample covariance with its delete-one jackknife standard error.
///
/// The leave-one-out covariances have the closed form
/// `(S - N/(N-1) dx_i dy_i) / (N - 2)` where `S` is the centred cross sum,
/// so the whole computation is linear in `N`.
pub fn jackknife_covariance(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    let n = x.len();
    if n < 3 || y.len() != n {
        return Err(LabError::InsufficientSamples { got: n.min(y.len()), min: 3 });
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let prods: Vec<f64> = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).collect();
    let s: f64 = prods.iter().sum();
    let cov = s / (nf - 1.0);
    let loo: Vec<f64> = prods
        .iter()
        .map(|p| (s - nf / (nf - 1.0) * p) / (nf - 2.0))
        .collect();
    let mean_loo = loo.iter().sum::<f64>() / nf;
    let var = (nf - 1.0) / nf * loo.iter().map(|c| (c - mean_loo).powi(2)).sum::<f64>();
    Ok((cov, var.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_odd_and_even() {
        assert_eq!(median_with_error(&[3.0, 1.0, 2.0]).0, 2.0);
        assert_eq!(median_with_error(&[4.0, 1.0, 2.0, 3.0]).0, 2.5);
        assert_eq!(median_with_error(&[7.0]), (7.0, 0.0));
    }

    #[test]
    fn jackknife_matches_brute_force() {
        let x = [1.0, 4.0, 2.5, -1.0, 3.0, 0.5];
        let y = [2.0, 3.5, 1.0, -2.0, 4.0, 1.5];
        let (cov, se) = jackknife_covariance(&x, &y).unwrap();
        let direct = |xs: &[f64], ys: &[f64]| {
            let n = xs.len() as f64;
            let mx = xs.iter().sum::<f64>() / n;
            let my = ys.iter().sum::<f64>() / n;
            xs.iter().zip(ys).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / (n - 1.0)
        };
        assert!((cov - direct(&x, &y)).abs() < 1e-12);
        let loo: Vec<f64> = (0..x.len())
            .map(|i| {
                let xs: Vec<f64> = x.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| *v).collect();
                let ys: Vec<f64> = y.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| *v).collect();
                direct(&xs, &ys)
            })
            .collect();
        let m = loo.iter().sum::<f64>() / 6.0;
        let brute = (5.0 / 6.0 * loo.iter().map(|c| (c - m).powi(2)).sum::<f64>()).sqrt();
        assert!((se - brute).abs() < 1e-12);
    }

    #[test]
    fn jackknife_needs_three_samples() {
        assert!(matches!(
            jackknife_covariance(&[1.0, 2.0], &[1.0, 2.0]),
            Err(LabError::InsufficientSamples { got: 2, min: 3 })
        ));
    }

    #[test]
    fn flat_ensemble_realizes_zeros() {
        let e = Ensemble::new(FieldSource::Flat { n: 8, spacing: 0.5 }, 0..4, LfppParams::pure_gravity());
        let f = e.realize(3).unwrap();
        assert!(f.values().iter().all(|&v| v == 0.0));
        assert_eq!((e.n(), e.spacing(), e.len()), (8, 0.5, 4));
    }
}
