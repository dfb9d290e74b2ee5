//! CSV files for sweep results and trajectories.
//!
//! Floats are written in Rust's shortest round-trip decimal form, so reading a
//! file back reproduces every value bit for bit. Files are written to a
//! temporary sibling and renamed into place.

use std::io::Write;
use std::path::{Path, PathBuf};

use renyite_core::dynamics::Trajectory;

use crate::error::{CliError, Result};
use crate::sweep::{SweepResult, SweepRow};

pub const SWEEP_HEADER: [&str; 8] =
    ["epsilon", "alpha", "quantity", "direction", "value", "std", "n_effective", "seed"];
pub const TRAJECTORY_HEADER: [&str; 7] = ["t", "x1", "x2", "x3", "y1", "y2", "y3"];

fn writer(buf: &mut Vec<u8>) -> csv::Writer<&mut Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(buf)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = PathBuf::from(path);
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".partial");
    tmp.set_file_name(name);
    let mut f = std::fs::File::create(&tmp).map_err(|e| CliError::io(&tmp, e))?;
    f.write_all(bytes).map_err(|e| CliError::io(&tmp, e))?;
    f.sync_all().map_err(|e| CliError::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

/// Serialises rows sorted by (quantity, direction, epsilon, alpha).
pub fn sweep_csv_bytes(result: &SweepResult) -> Vec<u8> {
    let mut sorted = result.clone();
    sorted.sort();
    let mut buf = Vec::new();
    {
        let mut w = writer(&mut buf);
        w.write_record(SWEEP_HEADER).unwrap();
        for r in &sorted.rows {
            w.write_record([
                r.epsilon.to_string(),
                r.alpha.to_string(),
                r.quantity.clone(),
                r.direction.clone(),
                r.value.to_string(),
                r.std.to_string(),
                r.n_effective.to_string(),
                r.seed.to_string(),
            ])
            .unwrap();
        }
        w.flush().unwrap();
    }
    buf
}

pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<()> {
    write_atomic(path, &sweep_csv_bytes(result))
}

fn parse_field<T: std::str::FromStr>(path: &Path, line: u64, name: &str, text: &str) -> Result<T> {
    text.parse().map_err(|_| CliError::Parse {
        path: path.display().to_string(),
        line: line as usize,
        message: format!("bad {name} `{text}`"),
    })
}

pub fn parse_sweep_csv(bytes: &[u8], path: &Path) -> Result<SweepResult> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(bytes);
    let header = rdr.headers().map_err(|e| CliError::csv(path, e))?.clone();
    if header.iter().ne(SWEEP_HEADER) {
        return Err(CliError::Parse {
            path: path.display().to_string(),
            line: 1,
            message: format!("expected header `{}`", SWEEP_HEADER.join(",")),
        });
    }
    let mut rows = Vec::new();
    for record in rdr.records() {
        let rec = record.map_err(|e| CliError::csv(path, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        rows.push(SweepRow {
            epsilon: parse_field(path, line, "epsilon", &rec[0])?,
            alpha: parse_field(path, line, "alpha", &rec[1])?,
            quantity: rec[2].to_string(),
            direction: rec[3].to_string(),
            value: parse_field(path, line, "value", &rec[4])?,
            std: parse_field(path, line, "std", &rec[5])?,
            n_effective: parse_field(path, line, "n_effective", &rec[6])?,
            seed: parse_field(path, line, "seed", &rec[7])?,
        });
    }
    Ok(SweepResult { rows })
}

pub fn read_csv(path: &Path) -> Result<SweepResult> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    parse_sweep_csv(&bytes, path)
}

pub fn emit_trajectory(traj: &Trajectory, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    {
        let mut w = writer(&mut buf);
        w.write_record(TRAJECTORY_HEADER).unwrap();
        for (i, s) in traj.states.iter().enumerate() {
            let mut rec = Vec::with_capacity(7);
            rec.push(traj.time(i).to_string());
            rec.extend(s.iter().map(f64::to_string));
            w.write_record(&rec).unwrap();
        }
        w.flush().unwrap();
    }
    write_atomic(path, &buf)
}
