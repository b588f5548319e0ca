//! CSV and JSON emitters. Trajectory CSV is UTF-8, comma-separated, LF line
//! endings, header `t,x`, floats printed with 17 significant digits so a
//! parse of the file reproduces the in-memory values bit for bit.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use fraclog_core::scheme::{SolveStatus, Trajectory};

/// 17 significant digits: enough for exact f64 round-trips.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_trajectory_csv(path: &Path, traj: &Trajectory) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "t,x")?;
    for (m, &x) in traj.values.iter().enumerate() {
        writeln!(w, "{},{}", fmt_f64(traj.time_at(m)), fmt_f64(x))?;
    }
    w.flush()
}

pub fn read_trajectory_csv(path: &Path) -> std::io::Result<Vec<(f64, f64)>> {
    let reader = BufReader::new(File::open(path)?);
    let mut rows = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if idx == 0 {
            continue; // header
        }
        let mut parts = line.splitn(2, ',');
        let t = parts.next().and_then(|s| s.parse().ok());
        let x = parts.next().and_then(|s| s.parse().ok());
        if let (Some(t), Some(x)) = (t, x) {
            rows.push((t, x));
        }
    }
    Ok(rows)
}

/// Machine-readable summary of one solve.
#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub model: String,
    pub scheme: String,
    pub x0: f64,
    pub final_time: f64,
    pub final_value: f64,
    pub nearest_equilibrium: Option<f64>,
    pub distance_to_equilibrium: Option<f64>,
    pub status: String,
    pub k_cut: usize,
    pub table_converged: bool,
    pub correction_sweeps: usize,
    pub csv: String,
}

pub fn status_string(status: &SolveStatus) -> String {
    match status {
        SolveStatus::Completed => "completed".to_string(),
        SolveStatus::NonFinite { step } => format!("non_finite_at_step_{step}"),
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()
}
