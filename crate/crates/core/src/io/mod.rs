//! Binary grid formats and CSV writers.
//!
//! The three binary formats share one little-endian envelope:
//!
//! | bytes | content |
//! |-------|---------|
//! | 12 | ASCII magic, NUL padded (`SFGrid v1`, `DFGrid v1`, `RMask v1`) |
//! | 4 | `u32` format version (1) |
//! | 4 | `u32` grid side `n` |
//! | 8 | `f64` lattice spacing |
//! | ... | payload |
//! | 4 + k | `u32` length, then a UTF-8 JSON metadata trailer |
//!
//! Payloads: `SFGrid` holds `n^2` `f64` values row-major; `DFGrid` holds `n^2`
//! `f64` distances followed by `n^2` `i64` parents (`-1` for none); `RMask`
//! holds `n^2` bits packed least-significant bit first.

mod csv_out;

pub use csv_out::{append_ledger_rows, write_boundary_csv, write_confluence_csv, ConfluenceRow};

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::ball::RegionMask;
use crate::error::{LabError, Result};
use crate::field::{Normalization, ScalarField, Singularity};
use crate::metric::DistanceField;

pub const VERSION: u32 = 1;
pub const SFGRID_MAGIC: &str = "SFGrid v1";
pub const DFGRID_MAGIC: &str = "DFGrid v1";
pub const RMASK_MAGIC: &str = "RMask v1";

fn magic_bytes(magic: &str) -> [u8; 12] {
    let mut out = [0u8; 12];
    out[..magic.len()].copy_from_slice(magic.as_bytes());
    out
}

fn write_header(w: &mut impl Write, magic: &str, n: usize, spacing: f64) -> Result<()> {
    w.write_all(&magic_bytes(magic))?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(n as u32).to_le_bytes())?;
    w.write_all(&spacing.to_le_bytes())?;
    Ok(())
}

fn write_trailer(w: &mut impl Write, meta: &Value) -> Result<()> {
    let text = serde_json::to_vec(meta).map_err(|e| LabError::Format(e.to_string()))?;
    w.write_all(&(text.len() as u32).to_le_bytes())?;
    w.write_all(&text)?;
    Ok(())
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64s(r: &mut impl Read, count: usize) -> Result<Vec<f64>> {
    let mut buf = vec![0u8; count * 8];
    r.read_exact(&mut buf)?;
    Ok(buf
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

fn read_header(r: &mut impl Read, magic: &str) -> Result<(usize, f64)> {
    let mut m = [0u8; 12];
    r.read_exact(&mut m)?;
    if m != magic_bytes(magic) {
        return Err(LabError::Format(format!("expected magic {magic:?}")));
    }
    let version = read_u32(r)?;
    if version != VERSION {
        return Err(LabError::Format(format!("unsupported version {version}")));
    }
    let n = read_u32(r)? as usize;
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok((n, f64::from_le_bytes(b)))
}

fn read_trailer(r: &mut impl Read) -> Result<Value> {
    let len = read_u32(r)? as usize;
    let mut text = vec![0u8; len];
    r.read_exact(&mut text)?;
    serde_json::from_slice(&text).map_err(|e| LabError::Format(e.to_string()))
}

#[derive(Serialize, Deserialize)]
struct FieldMeta {
    normalization: Normalization,
    seed: Option<u64>,
    singularities: Vec<Singularity>,
    #[serde(default)]
    extra: Value,
}

/// Write a field with its provenance; `extra` lands in the trailer verbatim.
pub fn write_sfgrid(w: &mut impl Write, field: &ScalarField, extra: &Value) -> Result<()> {
    write_header(w, SFGRID_MAGIC, field.n(), field.spacing())?;
    for v in field.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    let meta = FieldMeta {
        normalization: field.normalization.clone(),
        seed: field.seed,
        singularities: field.singularities.clone(),
        extra: extra.clone(),
    };
    write_trailer(w, &serde_json::to_value(meta).map_err(|e| LabError::Format(e.to_string()))?)
}

/// Read a field and the `extra` part of its trailer.
pub fn read_sfgrid(r: &mut impl Read) -> Result<(ScalarField, Value)> {
    let (n, spacing) = read_header(r, SFGRID_MAGIC)?;
    let values = read_f64s(r, n * n)?;
    let meta: FieldMeta =
        serde_json::from_value(read_trailer(r)?).map_err(|e| LabError::Format(e.to_string()))?;
    let mut field = ScalarField::from_values(n, spacing, values)?;
    field.normalization = meta.normalization;
    field.seed = meta.seed;
    field.singularities = meta.singularities;
    Ok((field, meta.extra))
}

pub fn write_dfgrid(w: &mut impl Write, df: &DistanceField, spacing: f64, meta: &Value) -> Result<()> {
    write_header(w, DFGRID_MAGIC, df.n(), spacing)?;
    for d in df.distances() {
        w.write_all(&d.to_le_bytes())?;
    }
    for p in df.parents_i64() {
        w.write_all(&p.to_le_bytes())?;
    }
    write_trailer(w, meta)
}

pub fn read_dfgrid(r: &mut impl Read) -> Result<(DistanceField, f64, Value)> {
    let (n, spacing) = read_header(r, DFGRID_MAGIC)?;
    let dist = read_f64s(r, n * n)?;
    let mut buf = vec![0u8; n * n * 8];
    r.read_exact(&mut buf)?;
    let parents: Vec<i64> = buf
        .chunks_exact(8)
        .map(|c| i64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let df = DistanceField::from_parts(n, dist, &parents)?;
    Ok((df, spacing, read_trailer(r)?))
}

pub fn write_rmask(w: &mut impl Write, mask: &RegionMask, spacing: f64, meta: &Value) -> Result<()> {
    let n = mask.n();
    write_header(w, RMASK_MAGIC, n, spacing)?;
    let mut bytes = vec![0u8; (n * n).div_ceil(8)];
    for i in mask.indices() {
        bytes[i / 8] |= 1 << (i % 8);
    }
    w.write_all(&bytes)?;
    write_trailer(w, meta)
}

pub fn read_rmask(r: &mut impl Read) -> Result<(RegionMask, f64, Value)> {
    let (n, spacing) = read_header(r, RMASK_MAGIC)?;
    let mut bytes = vec![0u8; (n * n).div_ceil(8)];
    r.read_exact(&mut bytes)?;
    let bits = (0..n * n).map(|i| bytes[i / 8] >> (i % 8) & 1 == 1).collect();
    Ok((RegionMask::from_bits(n, bits), spacing, read_trailer(r)?))
}

/// Create `path` and run `f` on a buffered writer.
pub fn save(path: impl AsRef<Path>, f: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    f(&mut w)?;
    w.flush()?;
    Ok(())
}

/// Open `path` and run `f` on a buffered reader.
pub fn load<T>(path: impl AsRef<Path>, f: impl FnOnce(&mut BufReader<File>) -> Result<T>) -> Result<T> {
    let mut r = BufReader::new(File::open(path)?);
    f(&mut r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{sample_gff, FieldSpec};
    use crate::grid::GridPoint;
    use crate::metric::{build_metric, distance_field, LfppParams};
    use serde_json::json;

    #[test]
    fn sfgrid_round_trip() {
        let f = sample_gff(&FieldSpec::new(16, 3).with_singularity(GridPoint::new(8, 8), 1.0)).unwrap();
        let mut buf = Vec::new();
        write_sfgrid(&mut buf, &f, &json!({"config_hash": "abc"})).unwrap();
        assert_eq!(&buf[..9], b"SFGrid v1");
        assert_eq!(buf.len(), 16 + 4 + 8 + 16 * 16 * 8 + 4 + u32::from_le_bytes(buf[28 + 2048..32 + 2048].try_into().unwrap()) as usize);
        let (g, extra) = read_sfgrid(&mut buf.as_slice()).unwrap();
        assert_eq!(g, f);
        assert_eq!(extra["config_hash"], "abc");
    }

    #[test]
    fn dfgrid_round_trip() {
        let f = sample_gff(&FieldSpec::new(12, 1)).unwrap();
        let m = build_metric(&f, &LfppParams::pure_gravity()).unwrap();
        let df = distance_field(&m, &[GridPoint::new(3, 4)]).unwrap();
        let mut buf = Vec::new();
        write_dfgrid(&mut buf, &df, m.spacing(), &json!({})).unwrap();
        let (back, spacing, _) = read_dfgrid(&mut buf.as_slice()).unwrap();
        assert_eq!(back, df);
        assert_eq!(spacing, m.spacing());
    }

    #[test]
    fn rmask_round_trip() {
        let m = RegionMask::from_fn(13, |p| (p.x * 7 + p.y * 3) % 5 == 0);
        let mut buf = Vec::new();
        write_rmask(&mut buf, &m, 0.5, &json!({"k": 1})).unwrap();
        let (back, spacing, meta) = read_rmask(&mut buf.as_slice()).unwrap();
        assert_eq!(back, m);
        assert_eq!((spacing, meta["k"].as_i64()), (0.5, Some(1)));
    }

    #[test]
    fn wrong_magic_is_a_format_error() {
        let mut buf = Vec::new();
        write_rmask(&mut buf, &RegionMask::empty(8), 1.0, &json!({})).unwrap();
        assert!(matches!(read_sfgrid(&mut buf.as_slice()), Err(LabError::Format(_))));
    }
}
