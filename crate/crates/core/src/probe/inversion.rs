use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Ensemble, FieldSource, MonteCarloResult};
use crate::error::{LabError, Result};
use crate::field::{circle_average, Boundary};
use crate::grid::GridPoint;

/// Circle-average radii, closed under `r -> 1/r`.
pub const INVERSION_RADII: [f64; 4] = [0.25, 0.5, 2.0, 4.0];

/// Entry-wise comparison of circle-average covariances at `r` and `1/r`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InversionReport {
    /// `estimate` is the largest absolute z-score.
    pub result: MonteCarloResult,
    /// Empirical covariance matrix of the circle averages at [`INVERSION_RADII`].
    pub covariance: [[f64; 4]; 4],
    pub z_scores: [[f64; 4]; 4],
}

/// Compare `Cov(h_{r_i}, h_{r_j})` with `Cov(h_{1/r_i}, h_{1/r_j})` about the
/// grid centre.
///
/// Each z-score is the mean over samples of the paired difference of centred
/// products divided by its standard error, so identical samples give 0.
/// The ensemble must be whole-plane with continuum normalisation radius 1.
pub fn inversion_check(ensemble: &Ensemble) -> Result<InversionReport> {
    let spec = match &ensemble.source {
        FieldSource::Gff(spec) if spec.boundary == Boundary::WholePlaneApprox => spec,
        _ => {
            return Err(LabError::InvalidSpec(
                "inversion check needs a whole-plane ensemble".into(),
            ))
        }
    };
    if spec.normalization_radius.is_none_or(|r| (r - 1.0).abs() > 1e-12) {
        return Err(LabError::InvalidSpec(
            "inversion check needs normalization radius 1".into(),
        ));
    }
    ensemble.require(3)?;
    let n = ensemble.n();
    let z = GridPoint::new(n / 2, n / 2);
    let samples: Vec<[f64; 4]> = ensemble
        .seeds
        .clone()
        .into_par_iter()
        .map(|seed| {
            let f = ensemble.realize(seed)?;
            let mut v = [0.0; 4];
            for (k, &r) in INVERSION_RADII.iter().enumerate() {
                v[k] = circle_average(&f, z, r)?;
            }
            Ok(v)
        })
        .collect::<Result<_>>()?;
    Ok(compare(&samples, ensemble))
}

fn compare(samples: &[[f64; 4]], ensemble: &Ensemble) -> InversionReport {
    let m = samples.len() as f64;
    let mut mean = [0.0; 4];
    for s in samples {
        for k in 0..4 {
            mean[k] += s[k] / m;
        }
    }
    // index of 1/r_k in INVERSION_RADII
    let inv = |k: usize| 3 - k;
    let mut covariance = [[0.0; 4]; 4];
    let mut z_scores = [[0.0; 4]; 4];
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let prods = |a: usize, b: usize| -> Vec<f64> {
                samples.iter().map(|s| (s[a] - mean[a]) * (s[b] - mean[b])).collect()
            };
            let p = prods(i, j);
            let q = prods(inv(i), inv(j));
            covariance[i][j] = p.iter().sum::<f64>() / (m - 1.0);
            let d: Vec<f64> = p.iter().zip(&q).map(|(a, b)| a - b).collect();
            let dm = d.iter().sum::<f64>() / m;
            let var = d.iter().map(|x| (x - dm).powi(2)).sum::<f64>() / (m - 1.0);
            let se = (var / m).sqrt();
            let z = if se > 0.0 { dm / se } else { 0.0 };
            z_scores[i][j] = z;
            worst = worst.max(z.abs());
        }
    }
    InversionReport {
        result: MonteCarloResult {
            estimate: worst,
            std_error: 0.0,
            n_samples: samples.len(),
            seeds: ensemble.seeds.clone(),
        },
        covariance,
        z_scores,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::metric::LfppParams;

    #[test]
    fn symmetric_samples_score_zero() {
        let ens = Ensemble::new(
            FieldSource::Gff(FieldSpec::new(64, 0).with_normalization_radius(1.0)),
            0..3,
            LfppParams::pure_gravity(),
        );
        let samples = vec![[1.0, 2.0, 2.0, 1.0], [0.5, -1.0, -1.0, 0.5], [2.0, 0.0, 0.0, 2.0]];
        let rep = compare(&samples, &ens);
        assert_eq!(rep.result.estimate, 0.0);
    }

    #[test]
    fn requires_unit_normalization() {
        let ens = Ensemble::new(FieldSource::Gff(FieldSpec::new(64, 0)), 0..10, LfppParams::pure_gravity());
        assert!(matches!(inversion_check(&ens), Err(LabError::InvalidSpec(_))));
    }
}
