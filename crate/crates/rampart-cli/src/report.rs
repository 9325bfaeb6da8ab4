//! Result rows and deterministic CSV output.
//!
//! The main results file carries only run-deterministic columns, so two runs
//! of the same config are byte-identical; wall times (and the per-trial
//! dataset checksum) go to a `_timings` sidecar instead.

use std::io::Write;
use std::path::{Path, PathBuf};

/// One simulation outcome: a (grid point, method, trial) triple.
#[derive(Debug, Clone)]
pub struct ResultRow {
    pub scenario: String,
    pub covariance: String,
    pub gamma: f64,
    pub method: String,
    pub trial: usize,
    pub rbo: f64,
    pub exact_topk: bool,
    pub wall_time_ms: u64,
    pub total_minipatches: usize,
    pub dataset_checksum: u64,
}

pub fn results_csv_bytes(rows: &[ResultRow]) -> Vec<u8> {
    let mut out = Vec::new();
    writeln!(
        out,
        "scenario,covariance,gamma,method,trial,rbo,exact_topk,total_minipatches"
    )
    .unwrap();
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.scenario,
            r.covariance,
            r.gamma,
            r.method,
            r.trial,
            r.rbo,
            r.exact_topk,
            r.total_minipatches
        )
        .unwrap();
    }
    out
}

pub fn timings_csv_bytes(rows: &[ResultRow]) -> Vec<u8> {
    let mut out = Vec::new();
    writeln!(
        out,
        "scenario,covariance,gamma,method,trial,wall_time_ms,dataset_checksum"
    )
    .unwrap();
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{:016x}",
            r.scenario, r.covariance, r.gamma, r.method, r.trial, r.wall_time_ms, r.dataset_checksum
        )
        .unwrap();
    }
    out
}

/// Aggregated success-probability row from the theory-validation preset.
#[derive(Debug, Clone)]
pub struct TheoryRow {
    pub method: String,
    pub total_minipatches: usize,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub std_error: f64,
}

pub fn theory_csv_bytes(rows: &[TheoryRow]) -> Vec<u8> {
    let mut out = Vec::new();
    writeln!(
        out,
        "method,total_minipatches,trials,successes,success_rate,std_error"
    )
    .unwrap();
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.method, r.total_minipatches, r.trials, r.successes, r.success_rate, r.std_error
        )
        .unwrap();
    }
    out
}

/// Writes via a temporary file in the same directory plus an atomic rename,
/// so a crashed run never leaves a half-written results file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = tmp_path(path);
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)
}

fn tmp_path(path: &Path) -> PathBuf {
    let mut name = path
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_else(|| "out".into());
    name.push(".tmp");
    path.with_file_name(name)
}

/// `results.csv` -> `results_timings.csv`, next to the main output.
pub fn timings_path_for(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "results".to_owned());
    let ext = out
        .extension()
        .map(|e| format!(".{}", e.to_string_lossy()))
        .unwrap_or_else(|| ".csv".to_owned());
    out.with_file_name(format!("{stem}_timings{ext}"))
}
