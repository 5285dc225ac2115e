use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::ball::BoundaryCycle;
use crate::error::{LabError, Result};

fn csv_err(e: csv::Error) -> LabError {
    LabError::Format(e.to_string())
}

/// `index,x,y,arc_label`, one row per boundary vertex in cycle order. The
/// label column is empty when the cycle carries no arc partition.
pub fn write_boundary_csv(w: impl Write, cycle: &BoundaryCycle) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["index", "x", "y", "arc_label"]).map_err(csv_err)?;
    for (k, v) in cycle.vertices.iter().enumerate() {
        let label = cycle.arc_label(k).map(|l| l.to_string()).unwrap_or_default();
        out.write_record([k.to_string(), v.x.to_string(), v.y.to_string(), label])
            .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

/// One row of a confluence sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfluenceRow {
    pub t: f64,
    pub s: f64,
    pub n_hit_points: usize,
    pub coalescence_radius: f64,
    pub winding_spread: f64,
    pub seed: u64,
}

pub fn write_confluence_csv(w: impl Write, rows: &[ConfluenceRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for row in rows {
        out.serialize(row).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

/// Append Monte Carlo rows (`probe,params,estimate,std_error,n,seed_range`)
/// to the ledger at `path`, writing the header only for a new file.
pub fn append_ledger_rows(path: impl AsRef<Path>, rows: &[[String; 6]]) -> Result<()> {
    let path = path.as_ref();
    let fresh = !path.exists() || std::fs::metadata(path)?.len() == 0;
    let file = OpenOptions::new().create(true).append(true).open(path)?;
    let mut out = csv::Writer::from_writer(file);
    if fresh {
        out.write_record(["probe", "params", "estimate", "std_error", "n", "seed_range"])
            .map_err(csv_err)?;
    }
    for row in rows {
        out.write_record(row).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::{trace_boundary, RegionMask};
    use crate::grid::GridPoint;

    #[test]
    fn boundary_rows() {
        let m = RegionMask::rectangle(8, GridPoint::new(2, 2), 3, 3);
        let c = trace_boundary(&m).unwrap().with_equal_arcs(2);
        let mut buf = Vec::new();
        write_boundary_csv(&mut buf, &c).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "index,x,y,arc_label");
        assert_eq!(lines.len(), 1 + c.len());
        assert!(lines[1].ends_with(",0"));
    }

    #[test]
    fn confluence_header() {
        let mut buf = Vec::new();
        let row = ConfluenceRow {
            t: 1.0,
            s: 2.0,
            n_hit_points: 3,
            coalescence_radius: 0.5,
            winding_spread: 0.25,
            seed: 9,
        };
        write_confluence_csv(&mut buf, &[row]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "t,s,n_hit_points,coalescence_radius,winding_spread,seed\n1.0,2.0,3,0.5,0.25,9\n"
        );
    }

    #[test]
    fn ledger_appends_one_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ledger.csv");
        let row = ["fkg".to_string(), "n=8".into(), "0.1".into(), "0.01".into(), "10".into(), "0..10".into()];
        append_ledger_rows(&path, std::slice::from_ref(&row)).unwrap();
        append_ledger_rows(&path, &[row]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.starts_with("probe,"));
    }
}
