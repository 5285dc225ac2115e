use rustfft::num_complex::Complex64;
use std::f64::consts::PI;

use super::{spectral, NormalizationKind, ScalarField, Singularity};
use crate::error::{LabError, Result};
use crate::grid::GridPoint;

/// Bilinear interpolation at fractional lattice coordinates inside the grid.
pub(crate) fn bilinear(field: &ScalarField, fx: f64, fy: f64) -> f64 {
    let n = field.n();
    let max = (n - 1) as f64;
    let fx = fx.clamp(0.0, max);
    let fy = fy.clamp(0.0, max);
    let x0 = (fx.floor() as usize).min(n - 2);
    let y0 = (fy.floor() as usize).min(n - 2);
    let tx = fx - x0 as f64;
    let ty = fy - y0 as f64;
    let v = field.values();
    let at = |x: usize, y: usize| v[y * n + x];
    (1.0 - ty) * ((1.0 - tx) * at(x0, y0) + tx * at(x0 + 1, y0))
        + ty * ((1.0 - tx) * at(x0, y0 + 1) + tx * at(x0 + 1, y0 + 1))
}

/// Mean of the field over the circle of continuum radius `r` about `z`.
///
/// Uses `max(64, ceil(2 pi r / spacing))` equispaced bilinear samples.
pub fn circle_average(field: &ScalarField, z: GridPoint, r: f64) -> Result<f64> {
    let spacing = field.spacing();
    if !(r >= 2.0 * spacing) {
        return Err(LabError::OutOfBounds(format!(
            "circle radius {r} is below two lattice spacings ({})",
            2.0 * spacing
        )));
    }
    let rho = r / spacing;
    let max = (field.n() - 1) as f64;
    let (cx, cy) = (z.x as f64, z.y as f64);
    if cx - rho < 0.0 || cy - rho < 0.0 || cx + rho > max || cy + rho > max {
        return Err(LabError::OutOfBounds(format!(
            "circle of radius {r} about {z} leaves the grid"
        )));
    }
    let count = ((2.0 * PI * rho).ceil() as usize).max(64);
    let sum: f64 = (0..count)
        .map(|k| {
            let theta = 2.0 * PI * k as f64 / count as f64;
            bilinear(field, cx + rho * theta.cos(), cy + rho * theta.sin())
        })
        .sum();
    Ok(sum / count as f64)
}

/// Periodic convolution with the heat kernel `p_{eps^2 / 2}`, i.e. a
/// Gaussian of variance `eps^2 / 2` per axis, sampled on the lattice and
/// renormalised to unit mass. `eps = 0` returns the field unchanged.
pub fn mollify(field: &ScalarField, eps: f64) -> Result<ScalarField> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(LabError::InvalidSpec(format!("mollifier scale {eps} must be >= 0")));
    }
    if eps == 0.0 {
        return Ok(field.clone());
    }
    let n = field.n();
    let kernel = heat_kernel(n, field.spacing(), eps);
    let mut k_hat: Vec<Complex64> = kernel.into_iter().map(|v| Complex64::new(v, 0.0)).collect();
    spectral::fft2(&mut k_hat, n, false);
    let mut data: Vec<Complex64> = field
        .values()
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect();
    spectral::fft2(&mut data, n, false);
    for (d, k) in data.iter_mut().zip(&k_hat) {
        *d *= k;
    }
    spectral::fft2(&mut data, n, true);
    let nn = (n * n) as f64;
    let mut out = field.clone();
    for (o, d) in out.values_mut().iter_mut().zip(&data) {
        *o = d.re / nn;
    }
    out.normalization.kind = NormalizationKind::None;
    Ok(out)
}

/// Unit-mass lattice kernel centred at index 0 with wrapped offsets.
fn heat_kernel(n: usize, spacing: f64, eps: f64) -> Vec<f64> {
    // variance eps^2 / 2 per axis: exp(-|d|^2 / (2 * eps^2 / 2)) = exp(-|d|^2 / eps^2)
    let inv = spacing * spacing / (eps * eps);
    let mut k = vec![0.0; n * n];
    for y in 0..n {
        let dy = spectral::wavenumber(y, n);
        for x in 0..n {
            let dx = spectral::wavenumber(x, n);
            k[y * n + x] = (-(dx * dx + dy * dy) * inv).exp();
        }
    }
    let mass: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= mass);
    k
}

/// Add `-alpha log(max(|x - z|, spacing / 2))` (continuum distances).
pub fn add_log_singularity(field: &ScalarField, z: GridPoint, alpha: f64) -> Result<ScalarField> {
    let n = field.n();
    if z.x >= n || z.y >= n || !z.is_interior(n) {
        return Err(LabError::InvalidCenter { x: z.x, y: z.y });
    }
    if alpha == 0.0 {
        return Ok(field.clone());
    }
    let spacing = field.spacing();
    let floor = spacing / 2.0;
    let mut out = field.clone();
    for (i, v) in out.values_mut().iter_mut().enumerate() {
        let d = GridPoint::from_index(i, n).lattice_distance(z) * spacing;
        *v -= alpha * d.max(floor).ln();
    }
    out.singularities.push(Singularity { center: z, alpha });
    out.normalization.kind = NormalizationKind::None;
    Ok(out)
}
