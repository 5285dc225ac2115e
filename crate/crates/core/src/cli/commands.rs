use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use super::ExperimentConfig;
use crate::ball::{
    filled_ball, metric_ball, partition_arcs_by_harmonic_measure, tau_r_with, trace_boundary,
};
use crate::error::{LabError, Result};
use crate::field::{sample_gff, ScalarField};
use crate::geodesic::{ConfluenceRun, GeodesicPath, GeodesicSelector, Side, TIE_TOLERANCE};
use crate::grid::GridPoint;
use crate::io::{self, ConfluenceRow};
use crate::metric::{build_metric, distance_field, DistanceField, LatticeMetric};
use crate::probe::{
    covariance_law, fkg_check, good_annulus_probability, inversion_check, scaling_sandwich,
    Ensemble, FieldSource, GoodAnnulusParams, MonteCarloResult, RectangleCrossing,
};
use crate::render::{overlay_paths, render_ball, render_field, Image};

/// Files written and the summary lines printed by one command.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub lines: Vec<String>,
    pub config_hash: String,
}

impl Outcome {
    fn say(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }
}

const GEODESIC_COLOR: [u8; 3] = [220, 30, 30];

/// Run the command named in `cfg.command`.
pub fn execute(cfg: &ExperimentConfig) -> Result<Outcome> {
    let command = cfg.command.as_deref().unwrap_or("");
    let mut out = Outcome {
        config_hash: cfg.hash(),
        ..Default::default()
    };
    let dir = PathBuf::from(cfg.out.as_deref().unwrap_or("."));
    std::fs::create_dir_all(&dir)?;
    match command {
        "sample" => cmd_sample(cfg, &dir, &mut out)?,
        "metric" => cmd_metric(cfg, &dir, &mut out)?,
        "ball" => cmd_ball(cfg, &dir, &mut out)?,
        "confluence" if cfg.fig1 == Some(true) => {
            let report = fig1_reproduction(cfg, &dir, &mut out)?;
            report.check()?;
        }
        "confluence" => cmd_confluence(cfg, &dir, &mut out)?,
        "render" => cmd_render(cfg, &dir, &mut out)?,
        p if p.starts_with("probe ") => cmd_probe(&p[6..], cfg, &dir, &mut out)?,
        other => return Err(LabError::Config(format!("unknown command {other:?}"))),
    }
    let record = dir.join("config.txt");
    std::fs::write(&record, cfg.to_kv())?;
    out.files.push(record);
    Ok(out)
}

fn provenance(cfg: &ExperimentConfig) -> serde_json::Value {
    json!({ "config_hash": cfg.hash(), "config": cfg.to_kv() })
}

fn sha256_file(path: &Path) -> Result<String> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn write_image(img: &Image, dir: &Path, stem: &str, hash: &str, out: &mut Outcome) -> Result<PathBuf> {
    let path = dir.join(format!("{stem}.{}", img.extension()));
    io::save(&path, |w| img.write(w, hash))?;
    out.files.push(path.clone());
    Ok(path)
}

/// Write a CSV preceded by a `# config <hash>` comment line.
fn write_csv(
    path: &Path,
    hash: &str,
    body: impl FnOnce(&mut BufWriter<File>) -> Result<()>,
) -> Result<()> {
    io::save(path, |w| {
        writeln!(w, "# config {hash}")?;
        body(w)
    })
}

fn load_field(cfg: &ExperimentConfig, default_n: usize) -> Result<ScalarField> {
    if let Some(input) = &cfg.input {
        return Ok(io::load(input, io::read_sfgrid)?.0);
    }
    let spec = cfg.field_spec(default_n)?;
    if cfg.flat == Some(true) {
        spec.validate()?;
        return ScalarField::from_values(spec.n, spec.spacing(), vec![0.0; spec.n * spec.n]);
    }
    sample_gff(&spec)
}

fn root_of(cfg: &ExperimentConfig, n: usize) -> Result<GridPoint> {
    let p = cfg.root.map_or(GridPoint::new(n / 2, n / 2), |[x, y]| GridPoint::new(x, y));
    if p.x >= n || p.y >= n {
        return Err(LabError::OutOfBounds(format!("root {p} outside a grid of side {n}")));
    }
    Ok(p)
}

fn cmd_sample(cfg: &ExperimentConfig, dir: &Path, out: &mut Outcome) -> Result<()> {
    let field = load_field(cfg, 256)?;
    let path = dir.join("field.sfgrid");
    io::save(&path, |w| io::write_sfgrid(w, &field, &provenance(cfg)))?;
    let digest = sha256_file(&path)?;
    let sidecar = dir.join("field.json");
    let meta = json!({
        "file": "field.sfgrid",
        "sha256": digest,
        "config_hash": cfg.hash(),
        "config": cfg.to_kv(),
        "seed": field.seed,
        "singularities": field.singularities,
    });
    std::fs::write(&sidecar, serde_json::to_string_pretty(&meta).expect("json"))?;
    out.say(format!("{} sha256={digest}", path.display()));
    out.files.extend([path, sidecar]);
    Ok(())
}

fn metric_and_field(cfg: &ExperimentConfig, default_n: usize) -> Result<(ScalarField, LatticeMetric)> {
    let field = load_field(cfg, default_n)?;
    let metric = build_metric(&field, &cfg.params()?)?;
    Ok((field, metric))
}

fn cmd_metric(cfg: &ExperimentConfig, dir: &Path, out: &mut Outcome) -> Result<()> {
    let (_, metric) = metric_and_field(cfg, 256)?;
    let root = root_of(cfg, metric.n())?;
    let df = distance_field(&metric, &[root])?;
    let path = dir.join("distance.dfgrid");
    io::save(&path, |w| io::write_dfgrid(w, &df, metric.spacing(), &provenance(cfg)))?;
    let far = df.distances().iter().copied().filter(|d| d.is_finite()).fold(0.0, f64::max);
    out.say(format!("{} root={root} max_distance={far:.6e}", path.display()));
    out.files.push(path);
    Ok(())
}

/// Explicit `s`, else the exit time of `radius` (default `frac * n * spacing`).
fn ball_radius(cfg: &ExperimentConfig, df: &DistanceField, spacing: f64, root: GridPoint, frac: f64) -> Result<f64> {
    if let Some(&s) = cfg.s.first() {
        return Ok(s);
    }
    let r = cfg.radius.unwrap_or(frac * df.n() as f64 * spacing);
    tau_r_with(df, spacing, root, r)
}

fn cmd_ball(cfg: &ExperimentConfig, dir: &Path, out: &mut Outcome) -> Result<()> {
    let (_, metric) = metric_and_field(cfg, 256)?;
    let root = root_of(cfg, metric.n())?;
    let df = distance_field(&metric, &[root])?;
    let s = ball_radius(cfg, &df, metric.spacing(), root, 0.25)?;
    let ball = filled_ball(&metric_ball(&df, s))?;
    let mut cycle = trace_boundary(&ball)?;
    if let Some(k) = cfg.arcs {
        let part = partition_arcs_by_harmonic_measure(
            &ball,
            &cycle,
            k,
            cfg.walkers.unwrap_or(20_000) as usize,
            cfg.seed.unwrap_or(0),
        )?;
        cycle = part.cycle;
    }
    let hash = cfg.hash();
    let mask_path = dir.join("ball.rmask");
    io::save(&mask_path, |w| io::write_rmask(w, &ball, metric.spacing(), &provenance(cfg)))?;
    let csv_path = dir.join("boundary.csv");
    write_csv(&csv_path, &hash, |w| io::write_boundary_csv(w, &cycle))?;
    write_image(&render_ball(&df, &ball)?, dir, "ball", &hash, out)?;
    out.say(format!(
        "s={s:.6e} ball_vertices={} boundary_len={} revisits={}",
        ball.count(),
        cycle.len(),
        cycle.revisits
    ));
    out.files.extend([mask_path, csv_path]);
    Ok(())
}

fn write_polylines(path: &Path, hash: &str, paths: &[GeodesicPath]) -> Result<()> {
    write_csv(path, hash, |w| {
        writeln!(w, "path,k,x,y")?;
        for (i, p) in paths.iter().enumerate() {
            for (k, v) in p.vertices.iter().enumerate() {
                writeln!(w, "{i},{k},{},{}", v.x, v.y)?;
            }
        }
        Ok(())
    })
}

fn cmd_confluence(cfg: &ExperimentConfig, dir: &Path, out: &mut Outcome) -> Result<()> {
    let (field, metric) = metric_and_field(cfg, 256)?;
    let n = metric.n();
    let h = metric.spacing();
    let root = root_of(cfg, n)?;
    let df = distance_field(&metric, &[root])?;
    let t = match cfg.t {
        Some(t) => t,
        None => tau_r_with(&df, h, root, 0.1 * n as f64 * h)?,
    };
    let s_values: Vec<f64> = if cfg.s.is_empty() {
        let top = tau_r_with(&df, h, root, cfg.radius.unwrap_or(0.4 * n as f64 * h))?;
        (1..=8).map(|k| t + (top - t) * k as f64 / 8.0).collect()
    } else {
        cfg.s.clone()
    };
    let seed = field.seed.unwrap_or(0);
    let mut rows = Vec::new();
    let mut previous: Option<BTreeSet<usize>> = None;
    let mut monotone = true;
    let mut last_run = None;
    let mut failure = None;
    for &s in &s_values {
        let run = match ConfluenceRun::with_field(&metric, df.clone(), t, s) {
            Ok(run) => run,
            Err(e) => {
                failure = Some(e);
                break;
            }
        };
        let report = run.report();
        let hits = run.hit_set();
        if let Some(prev) = &previous {
            monotone &= hits.is_subset(prev);
        }
        previous = Some(hits);
        rows.push(ConfluenceRow {
            t,
            s,
            n_hit_points: report.hit_points.len(),
            coalescence_radius: report.coalescence_radius,
            winding_spread: report.winding_spread,
            seed,
        });
        last_run = Some(run);
    }
    let hash = cfg.hash();
    let csv_path = dir.join("confluence.csv");
    write_csv(&csv_path, &hash, |w| io::write_confluence_csv(w, &rows))?;
    out.files.push(csv_path.clone());
    if let Some(run) = &last_run {
        let img = overlay_paths(&render_ball(&run.df, &run.outer_ball)?, &run.geodesics, GEODESIC_COLOR);
        write_image(&img, dir, "confluence", &hash, out)?;
        let poly = dir.join("geodesics.csv");
        write_polylines(&poly, &hash, &run.geodesics)?;
        out.files.push(poly);
    }
    for r in &rows {
        out.say(format!("t={:.6e} s={:.6e} hit_points={}", r.t, r.s, r.n_hit_points));
    }
    if let Some(e) = failure {
        out.say(format!("partial: {} of {} rows written", rows.len(), s_values.len()));
        eprintln!("partial results in {}", csv_path.display());
        return Err(e);
    }
    out.say(format!("monotone={monotone}"));
    if !monotone {
        return Err(LabError::AssertionFailed("hit-point sets grew with s".into()));
    }
    Ok(())
}

/// Outcome of the geodesic-tree figure run.
#[derive(Clone, Debug, Serialize)]
pub struct Fig1Report {
    pub n: usize,
    pub s: f64,
    pub n_geodesics: usize,
    pub non_crossing_violations: usize,
    pub length_violations: usize,
    pub image: PathBuf,
    pub seconds: f64,
}

impl Fig1Report {
    pub fn check(&self) -> Result<()> {
        if self.non_crossing_violations > 0 || self.length_violations > 0 {
            return Err(LabError::AssertionFailed(format!(
                "{} crossing and {} length violations",
                self.non_crossing_violations, self.length_violations
            )));
        }
        Ok(())
    }
}

/// Conflicting predecessor assignments among paths sharing a root.
fn crossing_violations(paths: &[GeodesicPath], n: usize) -> usize {
    let mut pred: HashMap<usize, usize> = HashMap::new();
    let mut bad = 0;
    for g in paths {
        for w in g.vertices.windows(2) {
            let (a, b) = (w[0].index(n), w[1].index(n));
            if *pred.entry(b).or_insert(a) != a {
                bad += 1;
            }
        }
    }
    bad
}

/// Steps that are not lattice edges, or whose length increment is not the
/// weight of the new vertex, or lengths that disagree with the distance field.
fn length_violations(p: &GeodesicPath, metric: &LatticeMetric, df: &DistanceField) -> usize {
    let mut bad = 0;
    for (k, v) in p.vertices.iter().enumerate() {
        if p.lengths[k] != df.dist(*v) {
            bad += 1;
        }
        if k > 0 {
            let u = p.vertices[k - 1];
            let step = u.x.abs_diff(v.x) + u.y.abs_diff(v.y);
            let inc = p.lengths[k] - p.lengths[k - 1];
            if step != 1 || (inc - metric.weight(*v)).abs() > TIE_TOLERANCE * p.lengths[k] {
                bad += 1;
            }
        }
    }
    if p.lengths[0] != metric.weight(p.vertices[0]) {
        bad += 1;
    }
    bad
}

/// All leftmost geodesics from the grid centre to the points of the filled
/// ball lying on the sub-lattice `(g Z)^2`, drawn over the ball.
pub fn fig1_reproduction(cfg: &ExperimentConfig, dir: &Path, out: &mut Outcome) -> Result<Fig1Report> {
    let clock = std::time::Instant::now();
    let mut cfg = cfg.clone();
    cfg.n.get_or_insert(1024);
    if cfg.xi.is_none() && cfg.dgamma.is_none() && cfg.gamma.is_none() {
        cfg.xi = Some(1.0 / 6f64.sqrt());
    }
    let g = cfg.target_grid.unwrap_or(20).max(1);
    let (_, metric) = metric_and_field(&cfg, 1024)?;
    let n = metric.n();
    let root = root_of(&cfg, n)?;
    let df = distance_field(&metric, &[root])?;
    let s = ball_radius(&cfg, &df, metric.spacing(), root, 0.3)?;
    let ball = filled_ball(&metric_ball(&df, s))?;
    let targets: Vec<GridPoint> = ball.points().filter(|p| p.x % g == 0 && p.y % g == 0).collect();
    let selector = GeodesicSelector::new(&metric, &df)?;
    let paths = targets
        .par_iter()
        .map(|&y| selector.select(&[y], Side::Left))
        .collect::<Result<Vec<_>>>()?;
    let non_crossing_violations = crossing_violations(&paths, n);
    let length_violations = paths.iter().map(|p| length_violations(p, &metric, &df)).sum();
    let hash = cfg.hash();
    let img = overlay_paths(&render_ball(&df, &ball)?, &paths, GEODESIC_COLOR);
    let image = write_image(&img, dir, "fig1", &hash, out)?;
    let poly = dir.join("geodesics.csv");
    write_polylines(&poly, &hash, &paths)?;
    out.files.push(poly);
    let report = Fig1Report {
        n,
        s,
        n_geodesics: paths.len(),
        non_crossing_violations,
        length_violations,
        image,
        seconds: clock.elapsed().as_secs_f64(),
    };
    out.say(format!(
        "fig1 n={n} s={s:.6e} geodesics={} crossing_violations={} length_violations={} seconds={:.2}",
        report.n_geodesics, report.non_crossing_violations, report.length_violations, report.seconds
    ));
    Ok(report)
}

fn cmd_render(cfg: &ExperimentConfig, dir: &Path, out: &mut Outcome) -> Result<()> {
    let input = cfg
        .input
        .as_ref()
        .ok_or_else(|| LabError::Config("render needs --input".into()))?;
    let mut magic = [0u8; 12];
    File::open(input)?.read_exact(&mut magic)?;
    let head = String::from_utf8_lossy(&magic).trim_end_matches('\0').to_string();
    let img = match head.as_str() {
        io::SFGRID_MAGIC => render_field(&io::load(input, io::read_sfgrid)?.0),
        io::DFGRID_MAGIC => {
            let (df, spacing, _) = io::load(input, io::read_dfgrid)?;
            let far = df.distances().iter().copied().filter(|d| d.is_finite()).fold(0.0, f64::max);
            let v = df.distances().iter().map(|&d| if d.is_finite() { d } else { far }).collect();
            render_field(&ScalarField::from_values(df.n(), spacing, v)?)
        }
        io::RMASK_MAGIC => {
            let (mask, _, _) = io::load(input, io::read_rmask)?;
            let mut img = Image::gray(mask.n(), mask.n());
            for p in mask.points() {
                img.put(p.x, p.y, [255; 3]);
            }
            img
        }
        _ => return Err(LabError::Format(format!("{input}: unknown magic {head:?}"))),
    };
    let stem = Path::new(input)
        .file_stem()
        .map_or("render".into(), |s| s.to_string_lossy().into_owned());
    let path = write_image(&img, dir, &stem, &cfg.hash(), out)?;
    out.say(path.display().to_string());
    Ok(())
}

fn ensemble(cfg: &ExperimentConfig, default_n: usize, default_seeds: std::ops::Range<u64>) -> Result<Ensemble> {
    let spec = cfg.field_spec(default_n)?;
    let seeds = cfg.seed_range(default_seeds)?;
    let source = if cfg.flat == Some(true) {
        FieldSource::Flat {
            n: spec.n,
            spacing: spec.spacing(),
        }
    } else {
        FieldSource::Gff(spec)
    };
    Ok(Ensemble::new(source, seeds, cfg.params()?))
}

fn cmd_probe(which: &str, cfg: &ExperimentConfig, dir: &Path, out: &mut Outcome) -> Result<()> {
    let hash = cfg.hash();
    let tag = |params: String| format!("{params};config={hash}");
    let mut rows: Vec<[String; 6]> = Vec::new();
    let mut push = |out: &mut Outcome, name: &str, params: String, r: &MonteCarloResult| {
        out.say(format!("{name}: estimate={:.6e} std_error={:.6e} n={}", r.estimate, r.std_error, r.n_samples));
        rows.push(r.ledger_row(name, &tag(params)));
    };
    match which {
        "fkg" => {
            let ens = ensemble(cfg, 128, 0..100)?;
            let n = ens.n();
            let (w, hgt) = (n / 4, n / 2);
            let a = RectangleCrossing { origin: GridPoint::new(n / 8, n / 4), width: w, height: hgt };
            let b = RectangleCrossing { origin: GridPoint::new(5 * n / 8, n / 4), width: w, height: hgt };
            let cov = fkg_check(&a, &b, &ens)?;
            let var = fkg_check(&a, &a, &ens)?;
            push(out, "fkg", format!("n={n}"), &cov);
            push(out, "fkg_variance", format!("n={n}"), &var);
            out.say(format!("fkg_positive={}", cov.estimate >= -3.0 * cov.std_error));
        }
        "scaling" => {
            let ens = ensemble(cfg, 1024, 0..50)?;
            let lattice = if cfg.radii.is_empty() { vec![32.0, 64.0, 128.0] } else { cfg.radii.clone() };
            let radii: Vec<f64> = lattice.iter().map(|r| r * ens.spacing()).collect();
            let rep = scaling_sandwich(&ens, &radii)?;
            for (r, est) in rep.radii.iter().zip(&rep.estimates) {
                push(out, "scaling_constant", format!("n={};r={r}", ens.n()), est);
            }
            out.say(format!(
                "lambda={:.6} exponent={:.4} window=({:.4}, {:.4})",
                rep.lambda, rep.exponent, rep.holder_window.0, rep.holder_window.1
            ));
            let path = dir.join("scaling.json");
            std::fs::write(&path, serde_json::to_string_pretty(&rep).expect("json"))?;
            out.files.push(path);
        }
        "inversion" => {
            let mut cfg = cfg.clone();
            cfg.spacing.get_or_insert(1.0 / 32.0);
            cfg.normalization_radius.get_or_insert(1.0);
            let ens = ensemble(&cfg, 512, 0..200)?;
            let rep = inversion_check(&ens)?;
            push(out, "inversion_max_z", format!("n={}", ens.n()), &rep.result);
        }
        "covariance" => {
            let ens = ensemble(cfg, 256, 0..200)?;
            let n = ens.n();
            let law = covariance_law(&ens, cfg.min_offset.unwrap_or(2), cfg.max_offset.unwrap_or(n / 8))?;
            let k = law.points.len() as f64;
            let se = law.slope.abs() * ((1.0 / law.r_squared - 1.0).max(0.0) / (k - 2.0).max(1.0)).sqrt();
            let r = MonteCarloResult {
                estimate: law.slope,
                std_error: se,
                n_samples: law.n_samples,
                seeds: ens.seeds.clone(),
            };
            push(out, "covariance_slope", format!("n={n};r2={:.6}", law.r_squared), &r);
            out.say(format!("r_squared={:.6} convention={}", law.r_squared, law.convention));
        }
        "annulus" => {
            let ens = ensemble(cfg, 512, 0..20)?;
            let r = cfg.radius.unwrap_or(32.0 * ens.spacing());
            let mut params = GoodAnnulusParams::new(
                cfg.c.unwrap_or(0.05),
                cfg.delta.unwrap_or(0.25),
                cfg.a.unwrap_or(10.0),
            )?;
            if let Some(f) = cfg.square_factor {
                params = params.with_square_factor(f);
            }
            let res = good_annulus_probability(&ens, r, &params, None)?;
            push(out, "good_annulus", format!("n={};r={r};c={};delta={};A={}", ens.n(), params.c, params.delta, params.a), &res);
        }
        other => return Err(LabError::Config(format!("unknown probe {other:?}"))),
    }
    let ledger = dir.join("ledger.csv");
    io::append_ledger_rows(&ledger, &rows)?;
    out.files.push(ledger);
    Ok(())
}
