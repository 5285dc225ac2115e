//! Discrete Gaussian free field sampling and pointwise field transforms.
//!
//! Two samplers are provided:
//!
//! * **whole-plane approximation**: Fourier synthesis on the `n`-torus with
//!   spectral density `|k|^-2`, zero mode dropped, then shifted so that a
//!   circle average about the grid centre vanishes;
//! * **zero boundary**: synthesis in the discrete sine eigenbasis of the grid
//!   Laplacian, which gives exactly the discrete Green's function covariance
//!   with zero values on the ring of vertices just outside the grid.
//!
//! Both are scaled so that `Cov(h(x), h(y)) ~ -COVARIANCE_SLOPE * log|x - y|`
//! at separations well inside the grid.

mod ops;
pub(crate) mod spectral;

pub use ops::{add_log_singularity, circle_average, mollify};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{LabError, Result};
use crate::grid::GridPoint;

/// Smallest grid side accepted by the samplers.
pub const MIN_GRID: usize = 8;

/// Slope of `Cov(h(x), h(y))` against `-log|x - y|` for both samplers.
pub const COVARIANCE_SLOPE: f64 = 1.0;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizationKind {
    None,
    CircleAverageZero,
}

/// How the additive constant of a field was fixed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub kind: NormalizationKind,
    pub center: GridPoint,
    /// Continuum radius of the normalising circle.
    pub radius: f64,
    /// Documented covariance convention of the sampler that produced the field.
    pub covariance_slope: f64,
}

impl Normalization {
    pub fn none(n: usize) -> Self {
        Normalization {
            kind: NormalizationKind::None,
            center: GridPoint::new(n / 2, n / 2),
            radius: 0.0,
            covariance_slope: COVARIANCE_SLOPE,
        }
    }
}

/// A `-alpha log|. - center|` term added to a field.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Singularity {
    pub center: GridPoint,
    pub alpha: f64,
}

/// Real values on an `n`-by-`n` grid, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    n: usize,
    spacing: f64,
    values: Vec<f64>,
    pub normalization: Normalization,
    pub seed: Option<u64>,
    pub singularities: Vec<Singularity>,
}

impl ScalarField {
    /// Wrap raw values. Fails unless there are exactly `n * n` finite entries.
    pub fn from_values(n: usize, spacing: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(LabError::InvalidSpec(format!(
                "expected {} values, got {}",
                n * n,
                values.len()
            )));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(LabError::InvalidSpec(format!("spacing {spacing} must be positive")));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(LabError::InvalidSpec(format!("non-finite value at index {i}")));
        }
        Ok(ScalarField {
            n,
            spacing,
            values,
            normalization: Normalization::none(n),
            seed: None,
            singularities: Vec::new(),
        })
    }

    /// Constant field on the unit square (`spacing = 1 / n`).
    pub fn constant(n: usize, value: f64) -> Self {
        ScalarField::from_values(n, 1.0 / n as f64, vec![value; n * n])
            .expect("constant field is valid")
    }

    /// Field whose value at `p` is `f(p)`.
    pub fn from_fn(n: usize, spacing: f64, mut f: impl FnMut(GridPoint) -> f64) -> Result<Self> {
        let values = (0..n * n).map(|i| f(GridPoint::from_index(i, n))).collect();
        ScalarField::from_values(n, spacing, values)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, p: GridPoint) -> f64 {
        self.values[p.index(self.n)]
    }

    /// Mutable access; callers are responsible for keeping values finite.
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Continuum distance between two vertices.
    pub fn distance(&self, a: GridPoint, b: GridPoint) -> f64 {
        a.lattice_distance(b) * self.spacing
    }

    /// Cyclic shift by `(dx, dy)`: the value at `p` moves to `p + (dx, dy) mod n`.
    pub fn translated(&self, dx: usize, dy: usize) -> ScalarField {
        let n = self.n;
        let mut values = vec![0.0; n * n];
        for y in 0..n {
            for x in 0..n {
                values[((y + dy) % n) * n + (x + dx) % n] = self.values[y * n + x];
            }
        }
        ScalarField {
            values,
            normalization: Normalization::none(n),
            ..self.clone()
        }
    }

    /// `a * self + b * other` on the same grid.
    pub fn linear_combination(&self, a: f64, other: &ScalarField, b: f64) -> Result<ScalarField> {
        if self.n != other.n {
            return Err(LabError::InvalidSpec("grid sizes differ".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        ScalarField::from_values(self.n, self.spacing, values)
    }
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    #[default]
    WholePlaneApprox,
    ZeroBoundary,
}

/// Everything needed to reproduce a sampled field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub n: usize,
    pub seed: u64,
    pub boundary: Boundary,
    /// Whole-plane only: integer wavenumbers with `|m|` below this are dropped.
    pub spectral_cutoff: Option<f64>,
    pub singularities: Vec<Singularity>,
    /// Continuum lattice spacing; `1 / n` when absent.
    pub spacing: Option<f64>,
    /// Whole-plane only: continuum radius of the normalising circle about the
    /// grid centre; `n / 8` lattice units when absent.
    pub normalization_radius: Option<f64>,
    /// Whole-plane only: the spectral density decays as `|k|^-spectral_power`.
    /// 2 is the Gaussian free field; other values exist for negative controls.
    pub spectral_power: f64,
}

impl FieldSpec {
    pub fn new(n: usize, seed: u64) -> Self {
        FieldSpec {
            n,
            seed,
            boundary: Boundary::WholePlaneApprox,
            spectral_cutoff: None,
            singularities: Vec::new(),
            spacing: None,
            normalization_radius: None,
            spectral_power: 2.0,
        }
    }

    pub fn zero_boundary(mut self) -> Self {
        self.boundary = Boundary::ZeroBoundary;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_spacing(mut self, spacing: f64) -> Self {
        self.spacing = Some(spacing);
        self
    }

    pub fn with_normalization_radius(mut self, radius: f64) -> Self {
        self.normalization_radius = Some(radius);
        self
    }

    pub fn with_singularity(mut self, center: GridPoint, alpha: f64) -> Self {
        self.singularities.push(Singularity { center, alpha });
        self
    }

    pub fn with_spectral_power(mut self, power: f64) -> Self {
        self.spectral_power = power;
        self
    }

    pub fn with_cutoff(mut self, cutoff: f64) -> Self {
        self.spectral_cutoff = Some(cutoff);
        self
    }

    pub fn spacing(&self) -> f64 {
        self.spacing.unwrap_or(1.0 / self.n as f64)
    }

    fn normalization_radius(&self) -> f64 {
        let spacing = self.spacing();
        self.normalization_radius
            .unwrap_or_else(|| (self.n / 8).max(2) as f64 * spacing)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < MIN_GRID {
            return Err(LabError::GridTooSmall {
                n: self.n,
                min: MIN_GRID,
            });
        }
        let spacing = self.spacing();
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(LabError::InvalidSpec(format!("spacing {spacing} must be positive")));
        }
        if !(self.spectral_power.is_finite() && self.spectral_power > 0.0) {
            return Err(LabError::InvalidSpec("spectral_power must be positive".into()));
        }
        for s in &self.singularities {
            if !s.center.is_interior(self.n) {
                return Err(LabError::InvalidSpec(format!(
                    "singularity center {} is not strictly inside the grid",
                    s.center
                )));
            }
            if !s.alpha.is_finite() {
                return Err(LabError::InvalidSpec("singularity alpha must be finite".into()));
            }
        }
        Ok(())
    }
}

/// Draw a field from `spec`. Bit-identical for identical specs.
pub fn sample_gff(spec: &FieldSpec) -> Result<ScalarField> {
    spec.validate()?;
    let n = spec.n;
    let spacing = spec.spacing();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let noise: Vec<f64> = (0..n * n).map(|_| StandardNormal.sample(&mut rng)).collect();

    let values = match spec.boundary {
        Boundary::WholePlaneApprox => torus_synthesis(spec, noise),
        Boundary::ZeroBoundary => sine_synthesis(n, noise),
    };
    let mut field = ScalarField::from_values(n, spacing, values)?;
    field.seed = Some(spec.seed);
    for s in &spec.singularities {
        field = add_log_singularity(&field, s.center, s.alpha)?;
    }

    if spec.boundary == Boundary::WholePlaneApprox {
        let center = GridPoint::new(n / 2, n / 2);
        let radius = spec.normalization_radius();
        let avg = circle_average(&field, center, radius)?;
        for v in field.values.iter_mut() {
            *v -= avg;
        }
        field.normalization = Normalization {
            kind: NormalizationKind::CircleAverageZero,
            center,
            radius,
            covariance_slope: COVARIANCE_SLOPE,
        };
    } else {
        field.normalization = Normalization::none(n);
    }
    Ok(field)
}

/// `h = IFFT( sqrt(S) * FFT(w) )` with `S(m) = n^2 / (2 pi) |m|^-p`.
///
/// For `p = 2` the covariance is `(1 / 2pi) sum_m e^{2 pi i m.d/n} / |m|^2`,
/// which behaves like `log(n / |d|)`.
fn torus_synthesis(spec: &FieldSpec, noise: Vec<f64>) -> Vec<f64> {
    let n = spec.n;
    let mut data: Vec<Complex64> = noise.into_iter().map(|w| Complex64::new(w, 0.0)).collect();
    spectral::fft2(&mut data, n, false);
    let nn = (n * n) as f64;
    let half_power = spec.spectral_power / 2.0;
    let cutoff = spec.spectral_cutoff.unwrap_or(0.0);
    for ky in 0..n {
        let my = spectral::wavenumber(ky, n);
        for kx in 0..n {
            let mx = spectral::wavenumber(kx, n);
            let m2 = mx * mx + my * my;
            let slot = &mut data[ky * n + kx];
            if m2 == 0.0 || m2.sqrt() < cutoff {
                *slot = Complex64::new(0.0, 0.0);
                continue;
            }
            let amplitude = (nn / (2.0 * PI)).sqrt() * m2.powf(-half_power / 2.0);
            *slot *= amplitude;
        }
    }
    spectral::fft2(&mut data, n, true);
    data.into_iter().map(|c| c.re / nn).collect()
}

/// Zero-boundary field: `h = 2 pi`-scaled inverse square root of the grid
/// Laplacian applied to white noise, expanded in sine modes.
fn sine_synthesis(n: usize, mut coeffs: Vec<f64>) -> Vec<f64> {
    let big = (n + 1) as f64;
    let cos: Vec<f64> = (1..=n).map(|j| (PI * j as f64 / big).cos()).collect();
    for j in 0..n {
        for k in 0..n {
            let lambda = 4.0 - 2.0 * cos[j] - 2.0 * cos[k];
            coeffs[k * n + j] *= (2.0 * PI / lambda).sqrt();
        }
    }
    spectral::dst2(&mut coeffs, n);
    // Orthonormal sine basis: phi_j(x) = sqrt(2 / (n + 1)) sin(pi j (x + 1) / (n + 1)).
    let norm = 2.0 / big;
    coeffs.iter_mut().for_each(|v| *v *= norm);
    coeffs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_grid_is_rejected() {
        let err = sample_gff(&FieldSpec::new(4, 1)).unwrap_err();
        assert!(matches!(err, LabError::GridTooSmall { n: 4, .. }));
    }

    #[test]
    fn singularity_on_border_is_invalid_spec() {
        let spec = FieldSpec::new(16, 1).with_singularity(GridPoint::new(0, 5), 1.0);
        assert!(matches!(sample_gff(&spec), Err(LabError::InvalidSpec(_))));
    }

    #[test]
    fn whole_plane_is_normalized() {
        let field = sample_gff(&FieldSpec::new(256, 7)).unwrap();
        assert_eq!(field.normalization.kind, NormalizationKind::CircleAverageZero);
        let spacing = field.spacing();
        let avg = circle_average(&field, GridPoint::new(128, 128), 32.0 * spacing).unwrap();
        assert!(avg.abs() < 1e-9, "avg = {avg}");
        assert_eq!(field.normalization.covariance_slope, COVARIANCE_SLOPE);
    }

    #[test]
    fn sampling_is_deterministic() {
        let spec = FieldSpec::new(64, 99);
        let a = sample_gff(&spec).unwrap();
        let b = sample_gff(&spec).unwrap();
        assert!(a.values().iter().zip(b.values()).all(|(x, y)| x.to_bits() == y.to_bits()));
        let c = sample_gff(&spec.clone().with_seed(100)).unwrap();
        assert_ne!(a.values(), c.values());
    }

    #[test]
    fn thread_count_does_not_change_bits() {
        let spec = FieldSpec::new(64, 5).zero_boundary();
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| sample_gff(&spec).unwrap());
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| sample_gff(&spec).unwrap());
        assert_eq!(single, many);
    }

    /// The sine synthesis must reproduce the inverse of the grid Laplacian:
    /// applying `(4 - A)` to the covariance column gives `2 pi` times a delta.
    #[test]
    fn zero_boundary_covariance_inverts_laplacian() {
        let n = 8;
        let samples = 4000;
        let probe = GridPoint::new(3, 4).index(n);
        let mut cov = vec![0.0; n * n];
        for seed in 0..samples {
            let f = sample_gff(&FieldSpec::new(n, seed).zero_boundary()).unwrap();
            let hp = f.values()[probe];
            for (c, v) in cov.iter_mut().zip(f.values()) {
                *c += hp * v / samples as f64;
            }
        }
        let lap = |i: usize| {
            let nb: f64 = crate::grid::neighbors4(i, n).map(|j| cov[j]).sum();
            4.0 * cov[i] - nb
        };
        assert!((lap(probe) - 2.0 * PI).abs() < 0.6, "diag {}", lap(probe));
        let far = GridPoint::new(6, 1).index(n);
        assert!(lap(far).abs() < 0.6);
    }
}
