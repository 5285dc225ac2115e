use std::path::Path;
use std::process::{Command, Output};

use lfpp::cli::ExperimentConfig;
use lfpp::io;

fn lfpp(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lfpp"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .expect("spawn lfpp")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn ok(o: &Output) {
    assert_eq!(o.status.code(), Some(0), "stderr: {}", stderr(o));
}

#[test]
fn tiny_grid_is_a_precondition_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = lfpp(dir.path(), &["sample", "--n", "4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("GridTooSmall:"), "{}", stderr(&o));
}

#[test]
fn sampling_is_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        ok(&lfpp(d.path(), &["sample", "--n", "64", "--seed", "11"]));
    }
    let read = |d: &tempfile::TempDir| io::load(d.path().join("field.sfgrid"), io::read_sfgrid).unwrap();
    let ((fa, ma), (fb, mb)) = (read(&a), read(&b));
    assert_eq!(fa.values(), fb.values());
    assert_eq!(ma["config_hash"], mb["config_hash"]);
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(a.path().join("field.json")).unwrap()).unwrap();
    assert_eq!(meta["seed"], 11);
    assert_eq!(meta["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn singularity_flag_adds_a_log_spike() {
    let dir = tempfile::tempdir().unwrap();
    ok(&lfpp(dir.path(), &["sample", "--n", "256", "--seed", "3", "--singularity", "128,128,1.633"]));
    let (field, _) = io::load(dir.path().join("field.sfgrid"), io::read_sfgrid).unwrap();
    assert_eq!(field.singularities.len(), 1);
    let plain = tempfile::tempdir().unwrap();
    ok(&lfpp(plain.path(), &["sample", "--n", "256", "--seed", "3"]));
    let (base, _) = io::load(plain.path().join("field.sfgrid"), io::read_sfgrid).unwrap();
    let bump = |x: usize, y: usize| {
        let p = lfpp::GridPoint::new(x, y);
        field.get(p) - base.get(p)
    };
    assert!(bump(128, 129) > bump(128, 160) + 1.0);
    assert!(bump(128, 160) > bump(128, 250));
}

#[test]
fn empty_seed_range_is_insufficient() {
    let dir = tempfile::tempdir().unwrap();
    let o = lfpp(dir.path(), &["probe", "fkg", "--n", "32", "--seeds", "0..0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("InsufficientSamples:"), "{}", stderr(&o));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "n=32\nwobble=3\n").unwrap();
    let o = lfpp(dir.path(), &["sample", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("wobble"), "{}", stderr(&o));
}

#[test]
fn written_config_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    ok(&lfpp(dir.path(), &["sample", "--n", "32", "--seed", "5", "--xi", "0.3"]));
    let text = std::fs::read_to_string(dir.path().join("config.txt")).unwrap();
    let cfg = ExperimentConfig::from_kv(&text).unwrap();
    assert_eq!((cfg.n, cfg.seed, cfg.xi), (Some(32), Some(5), Some(0.3)));
    let again = tempfile::tempdir().unwrap();
    let o = lfpp(again.path(), &["sample", "--config", dir.path().join("config.txt").to_str().unwrap()]);
    ok(&o);
    let read = |d: &Path| io::load(d.join("field.sfgrid"), io::read_sfgrid).unwrap().0;
    assert_eq!(read(dir.path()).values(), read(again.path()).values());
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "n=32\nseed=1\n").unwrap();
    ok(&lfpp(dir.path(), &["sample", "--config", cfg.to_str().unwrap(), "--seed", "9"]));
    let (field, _) = io::load(dir.path().join("field.sfgrid"), io::read_sfgrid).unwrap();
    assert_eq!((field.n(), field.seed), (32, Some(9)));
}

#[test]
fn flat_confluence_sweep_is_reproducible() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        ok(&lfpp(d.path(), &["confluence", "--flat", "--n", "64"]));
    }
    let csv = std::fs::read_to_string(a.path().join("confluence.csv")).unwrap();
    let mut lines = csv.lines();
    let hash = lines.next().unwrap().strip_prefix("# config ").unwrap().to_string();
    assert_eq!(hash.len(), 64);
    assert!(lines.next().unwrap().starts_with("t,s,n_hit_points"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 8);
    assert!(rows.windows(2).all(|w| w[0][1] < w[1][1] && w[0][2] >= w[1][2]));
    for f in ["confluence.csv", "confluence.ppm", "geodesics.csv"] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
    let ppm = std::fs::read(a.path().join("confluence.ppm")).unwrap();
    assert!(ppm.starts_with(b"P6\n"));
    assert!(String::from_utf8_lossy(&ppm[..120]).contains(&hash));
}

#[test]
fn render_reads_every_grid_format() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&lfpp(d, &["sample", "--n", "48", "--seed", "2"]));
    let field = d.join("field.sfgrid");
    ok(&lfpp(d, &["metric", "--input", field.to_str().unwrap(), "--root", "24,24"]));
    ok(&lfpp(d, &["ball", "--input", field.to_str().unwrap(), "--root", "24,24", "--radius", "0.2"]));
    for (file, image) in [("field.sfgrid", "field.pgm"), ("distance.dfgrid", "distance.pgm"), ("ball.rmask", "ball.pgm")] {
        let o = lfpp(d, &["render", "--input", d.join(file).to_str().unwrap()]);
        ok(&o);
        let img = std::fs::read(d.join(image)).unwrap();
        assert!(img.starts_with(b"P5\n"), "{image}");
    }
    let junk = d.join("junk.bin");
    std::fs::write(&junk, b"not a grid at all").unwrap();
    let o = lfpp(d, &["render", "--input", junk.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}
