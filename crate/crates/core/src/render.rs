//! Binary PPM (P6) and PGM (P5) images of fields, balls and geodesics.
//!
//! Image row 0 is the top of the picture, i.e. lattice row `y = n - 1`.

use std::io::Write;

use crate::ball::RegionMask;
use crate::error::{LabError, Result};
use crate::field::ScalarField;
use crate::geodesic::GeodesicPath;
use crate::metric::DistanceField;

/// 8-bit raster with one (gray) or three (RGB) channels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub data: Vec<u8>,
}

impl Image {
    pub fn gray(width: usize, height: usize) -> Self {
        Image { width, height, channels: 1, data: vec![0; width * height] }
    }

    pub fn rgb(width: usize, height: usize) -> Self {
        Image { width, height, channels: 3, data: vec![0; 3 * width * height] }
    }

    /// Set the pixel at lattice coordinates `(x, y)`.
    pub fn put(&mut self, x: usize, y: usize, color: [u8; 3]) {
        let row = self.height - 1 - y;
        let at = (row * self.width + x) * self.channels;
        if self.channels == 1 {
            self.data[at] = color[0];
        } else {
            self.data[at..at + 3].copy_from_slice(&color);
        }
    }

    pub fn pixel(&self, x: usize, y: usize) -> &[u8] {
        let at = ((self.height - 1 - y) * self.width + x) * self.channels;
        &self.data[at..at + self.channels]
    }

    /// Promote a gray image to RGB.
    pub fn to_rgb(&self) -> Image {
        if self.channels == 3 {
            return self.clone();
        }
        Image {
            width: self.width,
            height: self.height,
            channels: 3,
            data: self.data.iter().flat_map(|&g| [g, g, g]).collect(),
        }
    }

    /// P5 for gray images, P6 for RGB, with the config hash as a comment.
    pub fn write(&self, w: &mut impl Write, config_hash: &str) -> Result<()> {
        let magic = if self.channels == 1 { "P5" } else { "P6" };
        write!(w, "{magic}\n# config {config_hash}\n{} {}\n255\n", self.width, self.height)?;
        w.write_all(&self.data)?;
        Ok(())
    }

    pub fn extension(&self) -> &'static str {
        if self.channels == 1 {
            "pgm"
        } else {
            "ppm"
        }
    }
}

/// Gray-scale image of a field, linearly stretched from min (black) to max.
pub fn render_field(field: &ScalarField) -> Image {
    let n = field.n();
    let v = field.values();
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut img = Image::gray(n, n);
    for (i, &x) in v.iter().enumerate() {
        let g = (255.0 * (x - lo) / span).round() as u8;
        img.put(i % n, i / n, [g; 3]);
    }
    img
}

/// Ball shaded by distance (light near the root, darker towards the edge)
/// on a black background.
pub fn render_ball(df: &DistanceField, ball: &RegionMask) -> Result<Image> {
    let n = df.n();
    if ball.n() != n {
        return Err(LabError::InvalidSpec(format!("mask side {} != field side {n}", ball.n())));
    }
    let top = ball
        .indices()
        .map(|i| df.distances()[i])
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut img = Image::gray(n, n);
    for i in ball.indices() {
        let g = (230.0 - 150.0 * (df.distances()[i] / top).min(1.0)).round() as u8;
        img.put(i % n, i / n, [g; 3]);
    }
    Ok(img)
}

/// Overlay geodesic polylines. Consecutive vertices are lattice neighbours,
/// so every vertex is painted.
pub fn overlay_paths(img: &Image, paths: &[GeodesicPath], color: [u8; 3]) -> Image {
    let mut out = img.to_rgb();
    for p in paths {
        for v in &p.vertices {
            if v.x < out.width && v.y < out.height {
                out.put(v.x, v.y, color);
            }
        }
    }
    out
}
