use std::ops::Range;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{LabError, Result};
use crate::field::{FieldSpec, Singularity};
use crate::grid::GridPoint;
use crate::metric::LfppParams;

/// Flat parameter record behind every command.
///
/// Stored as `key=value` lines; values are JSON scalars or arrays, and
/// strings are written bare unless they would read back as another type.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// `a..b`, half-open.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seeds: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dgamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spacing: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zero_boundary: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalization_radius: Option<f64>,
    /// `[x, y, alpha]` triples.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub singularity: Vec<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flat: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub root: Option<[usize; 2]>,
    /// Euclidean radius (continuum units) whose exit time sets a ball radius.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub s: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub arcs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub walkers: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fig1: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_grid: Option<usize>,
    /// Lattice units.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub radii: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_offset: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_offset: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub square_factor: Option<f64>,
}

fn config_err(e: impl std::fmt::Display) -> LabError {
    LabError::Config(e.to_string())
}

impl ExperimentConfig {
    /// Parse `key=value` lines. Blank lines and `#` comments are skipped.
    pub fn from_kv(text: &str) -> Result<Self> {
        let mut map = Map::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, raw) = line
                .split_once('=')
                .ok_or_else(|| config_err(format!("line {}: expected key=value", lineno + 1)))?;
            let (key, raw) = (key.trim(), raw.trim());
            let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
            if map.insert(key.to_string(), value).is_some() {
                return Err(config_err(format!("duplicate key {key:?}")));
            }
        }
        serde_json::from_value(Value::Object(map)).map_err(config_err)
    }

    /// Canonical `key=value` text, fields in declaration order.
    pub fn to_kv(&self) -> String {
        let Value::Object(map) = serde_json::to_value(self).expect("config serializes") else {
            unreachable!()
        };
        let mut out = String::new();
        for (key, value) in map {
            let text = match value {
                Value::String(s) if serde_json::from_str::<Value>(&s).is_err() => s,
                v => v.to_string(),
            };
            out.push_str(&format!("{key}={text}\n"));
        }
        out
    }

    /// Fill every field unset in `self` from `base`.
    pub fn or(self, base: ExperimentConfig) -> ExperimentConfig {
        let Value::Object(mut merged) = serde_json::to_value(base).expect("config serializes") else {
            unreachable!()
        };
        let Value::Object(top) = serde_json::to_value(self).expect("config serializes") else {
            unreachable!()
        };
        merged.extend(top);
        serde_json::from_value(Value::Object(merged)).expect("merged config deserializes")
    }

    /// Hex SHA-256 of [`ExperimentConfig::to_kv`] with `out` and `threads`
    /// cleared, so the same experiment hashes the same wherever it runs.
    pub fn hash(&self) -> String {
        let bare = ExperimentConfig {
            out: None,
            threads: None,
            ..self.clone()
        };
        hex::encode(Sha256::digest(bare.to_kv().as_bytes()))
    }

    pub fn seed_range(&self, default: Range<u64>) -> Result<Range<u64>> {
        match &self.seeds {
            None => Ok(match self.seed {
                Some(s) => s..s + 1,
                None => default,
            }),
            Some(text) => parse_seed_range(text),
        }
    }

    pub fn params(&self) -> Result<LfppParams> {
        let gamma = self.gamma.unwrap_or_else(|| (8.0f64 / 3.0).sqrt());
        match (self.xi, self.dgamma) {
            (Some(_), Some(_)) => Err(config_err("give at most one of xi and dgamma")),
            (Some(xi), None) => LfppParams::from_xi(gamma, xi),
            (None, Some(d)) => LfppParams::new(gamma, d),
            (None, None) if self.gamma.is_none() => Ok(LfppParams::pure_gravity()),
            (None, None) => Err(config_err("gamma alone does not fix the metric; add xi or dgamma")),
        }
    }

    pub fn field_spec(&self, default_n: usize) -> Result<FieldSpec> {
        let mut spec = FieldSpec::new(self.n.unwrap_or(default_n), self.seed.unwrap_or(0));
        if self.zero_boundary == Some(true) {
            spec = spec.zero_boundary();
        }
        if let Some(h) = self.spacing {
            spec = spec.with_spacing(h);
        }
        if let Some(r) = self.normalization_radius {
            spec = spec.with_normalization_radius(r);
        }
        for &[x, y, alpha] in &self.singularity {
            if x < 0.0 || y < 0.0 || x.fract() != 0.0 || y.fract() != 0.0 {
                return Err(LabError::InvalidSpec(format!("singularity centre ({x}, {y}) is not a vertex")));
            }
            spec.singularities.push(Singularity {
                center: GridPoint::new(x as usize, y as usize),
                alpha,
            });
        }
        Ok(spec)
    }
}

/// `a..b` with `a <= b`.
pub fn parse_seed_range(text: &str) -> Result<Range<u64>> {
    let (a, b) = text
        .split_once("..")
        .ok_or_else(|| config_err(format!("seed range {text:?} is not of the form a..b")))?;
    let a: u64 = a.trim().parse().map_err(config_err)?;
    let b: u64 = b.trim().parse().map_err(config_err)?;
    if b < a {
        return Err(config_err(format!("seed range {text:?} is reversed")));
    }
    Ok(a..b)
}
