//! Command-line driver behind the `lfpp` binary.
//!
//! Every subcommand is turned into an [`ExperimentConfig`] first (flags
//! override a `--config` file), so each run can be replayed from the
//! `key=value` record written next to its outputs.

mod commands;
mod config;

pub use commands::{execute, fig1_reproduction, Fig1Report, Outcome};
pub use config::{parse_seed_range, ExperimentConfig};

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{LabError, Result};

#[derive(Debug, Parser)]
#[command(name = "lfpp", version, about = "Liouville first passage percolation on the lattice")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Shared {
    /// Grid side.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Half-open seed range `a..b`.
    #[arg(long)]
    pub seeds: Option<String>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub xi: Option<f64>,
    #[arg(long)]
    pub dgamma: Option<f64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// `key=value` file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Continuum lattice spacing (default `1/n`).
    #[arg(long)]
    pub spacing: Option<f64>,
    /// Dirichlet field instead of the whole-plane approximation.
    #[arg(long)]
    pub zero_boundary: bool,
    #[arg(long)]
    pub normalization_radius: Option<f64>,
    /// `x,y,alpha`; repeatable.
    #[arg(long)]
    pub singularity: Vec<String>,
    /// Use `h = 0` instead of a sampled field.
    #[arg(long)]
    pub flat: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a field and write it as SFGrid.
    Sample(#[command(flatten)] Shared),
    /// Distance field from a root, written as DFGrid.
    Metric {
        #[command(flatten)]
        shared: Shared,
        /// SFGrid input instead of sampling.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        root: Option<String>,
    },
    /// Filled metric ball, its boundary and optional harmonic arcs.
    Ball {
        #[command(flatten)]
        shared: Shared,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        root: Option<String>,
        /// Metric radius; defaults to the exit time of `--radius`.
        #[arg(long)]
        s: Option<f64>,
        /// Euclidean radius (continuum units).
        #[arg(long)]
        radius: Option<f64>,
        /// Cut the boundary into this many arcs of equal harmonic measure.
        #[arg(long)]
        arcs: Option<usize>,
        #[arg(long)]
        walkers: Option<u64>,
    },
    /// Confluence sweep over `s`, or the geodesic-tree figure with `--fig1`.
    Confluence {
        #[command(flatten)]
        shared: Shared,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        root: Option<String>,
        #[arg(long)]
        t: Option<f64>,
        /// Comma-separated outer radii.
        #[arg(long, value_delimiter = ',')]
        s: Vec<f64>,
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long)]
        fig1: bool,
        #[arg(long)]
        target_grid: Option<usize>,
    },
    /// Monte Carlo probes; each appends to `ledger.csv`.
    #[command(subcommand)]
    Probe(ProbeCommand),
    /// Render an SFGrid, DFGrid or RMask file as PGM.
    Render {
        #[command(flatten)]
        shared: Shared,
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum ProbeCommand {
    /// Covariance of two disjoint rectangle crossings.
    Fkg(#[command(flatten)] Shared),
    /// Scaling constants and the sandwich constant.
    Scaling {
        #[command(flatten)]
        shared: Shared,
        /// Lattice units, comma separated.
        #[arg(long, value_delimiter = ',')]
        radii: Vec<f64>,
    },
    /// Circle-average covariances under `r -> 1/r`.
    Inversion(#[command(flatten)] Shared),
    /// Log-covariance regression.
    Covariance {
        #[command(flatten)]
        shared: Shared,
        #[arg(long)]
        min_offset: Option<usize>,
        #[arg(long)]
        max_offset: Option<usize>,
    },
    /// Frequency of the good-annulus event.
    Annulus {
        #[command(flatten)]
        shared: Shared,
        /// Continuum radius.
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        square_factor: Option<f64>,
    },
}

fn parse_root(text: &str) -> Result<[usize; 2]> {
    let parts: Vec<&str> = text.split(',').collect();
    match parts.as_slice() {
        [x, y] => Ok([
            x.trim().parse().map_err(|e| LabError::Config(format!("root: {e}")))?,
            y.trim().parse().map_err(|e| LabError::Config(format!("root: {e}")))?,
        ]),
        _ => Err(LabError::Config(format!("root {text:?} is not x,y"))),
    }
}

fn parse_singularity(text: &str) -> Result<[f64; 3]> {
    let v: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| LabError::Config(format!("singularity {text:?}: {e}")))?;
    v.try_into()
        .map_err(|_| LabError::Config(format!("singularity {text:?} is not x,y,alpha")))
}

fn path_string(p: &Option<PathBuf>) -> Option<String> {
    p.as_ref().map(|p| p.to_string_lossy().into_owned())
}

impl Shared {
    fn to_config(&self, command: &str) -> Result<ExperimentConfig> {
        let flags = ExperimentConfig {
            command: Some(command.to_string()),
            n: self.n,
            seed: self.seed,
            seeds: self.seeds.clone(),
            gamma: self.gamma,
            xi: self.xi,
            dgamma: self.dgamma,
            out: path_string(&self.out),
            threads: self.threads,
            spacing: self.spacing,
            zero_boundary: self.zero_boundary.then_some(true),
            normalization_radius: self.normalization_radius,
            singularity: self
                .singularity
                .iter()
                .map(|s| parse_singularity(s))
                .collect::<Result<_>>()?,
            flat: self.flat.then_some(true),
            ..Default::default()
        };
        let Some(path) = &self.config else {
            return Ok(flags);
        };
        let file = ExperimentConfig::from_kv(&std::fs::read_to_string(path)?)?;
        if let Some(c) = &file.command {
            if c != command {
                return Err(LabError::Config(format!(
                    "config file is for {c:?}, not {command:?}"
                )));
            }
        }
        Ok(flags.or(file))
    }
}

impl Command {
    /// The full configuration this command line describes.
    pub fn to_config(&self) -> Result<ExperimentConfig> {
        let root = |r: &Option<String>| r.as_deref().map(parse_root).transpose();
        Ok(match self {
            Command::Sample(shared) => shared.to_config("sample")?,
            Command::Metric { shared, input, root: r } => ExperimentConfig {
                input: path_string(input),
                root: root(r)?,
                ..Default::default()
            }
            .or(shared.to_config("metric")?),
            Command::Ball { shared, input, root: r, s, radius, arcs, walkers } => ExperimentConfig {
                input: path_string(input),
                root: root(r)?,
                s: s.iter().copied().collect(),
                radius: *radius,
                arcs: *arcs,
                walkers: *walkers,
                ..Default::default()
            }
            .or(shared.to_config("ball")?),
            Command::Confluence { shared, input, root: r, t, s, radius, fig1, target_grid } => {
                ExperimentConfig {
                    input: path_string(input),
                    root: root(r)?,
                    t: *t,
                    s: s.clone(),
                    radius: *radius,
                    fig1: fig1.then_some(true),
                    target_grid: *target_grid,
                    ..Default::default()
                }
                .or(shared.to_config("confluence")?)
            }
            Command::Render { shared, input } => ExperimentConfig {
                input: Some(input.to_string_lossy().into_owned()),
                ..Default::default()
            }
            .or(shared.to_config("render")?),
            Command::Probe(p) => match p {
                ProbeCommand::Fkg(shared) => shared.to_config("probe fkg")?,
                ProbeCommand::Inversion(shared) => shared.to_config("probe inversion")?,
                ProbeCommand::Scaling { shared, radii } => ExperimentConfig {
                    radii: radii.clone(),
                    ..Default::default()
                }
                .or(shared.to_config("probe scaling")?),
                ProbeCommand::Covariance { shared, min_offset, max_offset } => ExperimentConfig {
                    min_offset: *min_offset,
                    max_offset: *max_offset,
                    ..Default::default()
                }
                .or(shared.to_config("probe covariance")?),
                ProbeCommand::Annulus { shared, radius, c, delta, a, square_factor } => {
                    ExperimentConfig {
                        radius: *radius,
                        c: *c,
                        delta: *delta,
                        a: *a,
                        square_factor: *square_factor,
                        ..Default::default()
                    }
                    .or(shared.to_config("probe annulus")?)
                }
            },
        })
    }
}

/// Parse `args` (program name first), run, and return the process exit code.
///
/// Output lines go to stdout; on failure the error name goes to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = cli.command.to_config().and_then(|cfg| {
        if let Some(t) = cfg.threads {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
                log::warn!("thread pool already initialised: {e}");
            }
        }
        execute(&cfg)
    });
    match result {
        Ok(outcome) => {
            for line in &outcome.lines {
                println!("{line}");
            }
            0
        }
        Err(e) => {
            eprintln!("{}: {e}", e.name());
            e.exit_code()
        }
    }
}
