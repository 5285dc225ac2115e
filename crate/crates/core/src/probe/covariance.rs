use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Ensemble;
use crate::error::{LabError, Result};
use crate::field::COVARIANCE_SLOPE;

/// Regression of the empirical field covariance on `-log(distance)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CovarianceLaw {
    /// `(lattice offset, -log(offset * spacing), covariance)`.
    pub points: Vec<(usize, f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// The sampler's documented slope.
    pub convention: f64,
    pub n_samples: usize,
}

impl CovarianceLaw {
    pub fn slope_error(&self) -> f64 {
        (self.slope - self.convention).abs() / self.convention
    }
}

/// Empirical `Cov(h(x), h(x + d e))` for lattice offsets `d` in
/// `[min_offset, max_offset]`, averaged over every `x` (cyclically) and both
/// axes, then over samples. Each sample's spatial mean is removed first,
/// which cancels the random additive constant of the normalisation.
pub fn covariance_law(
    ensemble: &Ensemble,
    min_offset: usize,
    max_offset: usize,
) -> Result<CovarianceLaw> {
    ensemble.require(2)?;
    let n = ensemble.n();
    if min_offset < 1 || max_offset <= min_offset || max_offset >= n / 2 {
        return Err(LabError::InvalidSpec(format!(
            "offsets [{min_offset}, {max_offset}] do not fit a grid of side {n}"
        )));
    }
    let offsets: Vec<usize> = (min_offset..=max_offset).collect();
    let per_sample: Vec<Vec<f64>> = ensemble
        .seeds
        .clone()
        .into_par_iter()
        .map(|seed| {
            let f = ensemble.realize(seed)?;
            let v = f.values();
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            let c: Vec<f64> = v.iter().map(|x| x - mean).collect();
            Ok(offsets
                .iter()
                .map(|&d| {
                    let mut acc = 0.0;
                    for y in 0..n {
                        let yd = (y + d) % n;
                        for x in 0..n {
                            let here = c[y * n + x];
                            acc += here * (c[y * n + (x + d) % n] + c[yd * n + x]);
                        }
                    }
                    acc / (2 * n * n) as f64
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let m = per_sample.len() as f64;
    let spacing = ensemble.spacing();
    let points: Vec<(usize, f64, f64)> = offsets
        .iter()
        .enumerate()
        .map(|(k, &d)| {
            let cov = per_sample.iter().map(|s| s[k]).sum::<f64>() / m;
            (d, -(d as f64 * spacing).ln(), cov)
        })
        .collect();
    let xs: Vec<f64> = points.iter().map(|p| p.1).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.2).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    Ok(CovarianceLaw {
        points,
        slope,
        intercept: my - slope * mx,
        r_squared: if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 0.0 },
        convention: COVARIANCE_SLOPE,
        n_samples: per_sample.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::metric::LfppParams;
    use crate::probe::FieldSource;

    #[test]
    fn small_ensemble_has_log_slope() {
        let ens = Ensemble::new(FieldSource::Gff(FieldSpec::new(128, 0)), 0..40, LfppParams::pure_gravity());
        let law = covariance_law(&ens, 4, 16).unwrap();
        assert!(law.r_squared > 0.9, "{law:?}");
        assert!(law.slope_error() < 0.2, "{}", law.slope);
    }

    #[test]
    fn bad_offsets_rejected() {
        let ens = Ensemble::new(FieldSource::Gff(FieldSpec::new(32, 0)), 0..4, LfppParams::pure_gravity());
        assert!(covariance_law(&ens, 4, 16).is_err());
    }
}
