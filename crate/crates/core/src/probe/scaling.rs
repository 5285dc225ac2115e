use serde::{Deserialize, Serialize};

use super::{Ensemble, MonteCarloResult};
use crate::error::{LabError, Result};
use crate::metric::scaling_constant;

/// Scale-constant estimates across radii and the tightest sandwich constant.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SandwichReport {
    pub radii: Vec<f64>,
    pub estimates: Vec<MonteCarloResult>,
    /// `(r, r', c_r / c_r')` for every pair `r < r'`.
    pub ratios: Vec<(f64, f64, f64)>,
    /// Smallest `Lambda >= 1` with `Lambda^-1 d^Lambda <= c_{dr'}/c_{r'} <= Lambda d^-Lambda`
    /// for all pairs, `d = r / r'`.
    pub lambda: f64,
    /// Least-squares slope of `log c_r` against `log r`.
    pub exponent: f64,
    /// The Hoelder window `(0, xi (Q - 2))` the exponent is compared with.
    pub holder_window: (f64, f64),
}

fn sandwich_holds(lambda: f64, delta: f64, ratio: f64) -> bool {
    let lo = delta.powf(lambda) / lambda;
    let hi = lambda * delta.powf(-lambda);
    lo <= ratio && ratio <= hi
}

/// Minimal `Lambda` for one pair; the two bounds loosen monotonically in
/// `Lambda`, so bisection applies.
fn minimal_lambda(delta: f64, ratio: f64) -> f64 {
    if sandwich_holds(1.0, delta, ratio) {
        return 1.0;
    }
    let mut hi = 2.0;
    while !sandwich_holds(hi, delta, ratio) {
        hi *= 2.0;
        if hi > 1e6 {
            return f64::INFINITY;
        }
    }
    let mut lo = hi / 2.0;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if sandwich_holds(mid, delta, ratio) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Estimate `c_r` at each radius (continuum units) and fit the sandwich.
pub fn scaling_sandwich(ensemble: &Ensemble, radii: &[f64]) -> Result<SandwichReport> {
    let mut radii = radii.to_vec();
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    if radii.len() < 3 {
        return Err(LabError::InsufficientResolution(format!(
            "the sandwich needs at least 3 distinct radii, got {}",
            radii.len()
        )));
    }
    ensemble.require(1)?;
    let estimates = radii
        .iter()
        .map(|&r| scaling_constant(ensemble, r))
        .collect::<Result<Vec<_>>>()?;
    let mut ratios = Vec::new();
    let mut lambda: f64 = 1.0;
    for i in 0..radii.len() {
        for j in i + 1..radii.len() {
            let ratio = estimates[i].estimate / estimates[j].estimate;
            let delta = radii[i] / radii[j];
            lambda = lambda.max(minimal_lambda(delta, ratio));
            ratios.push((radii[i], radii[j], ratio));
        }
    }
    let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = estimates.iter().map(|e| e.estimate.ln()).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let p = &ensemble.params;
    Ok(SandwichReport {
        radii,
        estimates,
        ratios,
        lambda,
        exponent: sxy / sxx,
        holder_window: (0.0, p.xi * (p.q - 2.0)),
    })
}
