//! Metric CSVs.
//!
//! Floats are written as `{:.16e}` (17 significant digits), so equal runs give
//! byte-identical files. `U, V, C, Phi` are empty when `f*` is unknown. For
//! centralized solvers with a known optimum they are `0, 0, 0, gap`: exact
//! gradients and a single iterate leave only the gap term.

use std::path::{Path, PathBuf};

use plopt_core::solvers::{Algorithm, GapKind, RecordRow, RunRecord};

use crate::experiment::SolverRun;
use crate::CliError;

pub const CSV_HEADER: [&str; 11] =
    ["iter", "lfo_total", "comm_rounds", "time_units", "gap", "grad_norm", "consensus_err", "U", "V", "C", "Phi"];

fn float(v: f64) -> String {
    format!("{v:.16e}")
}

fn row_fields(row: &RecordRow, central_fill: bool) -> [String; 11] {
    let opt = |v: Option<f64>| v.map(float).unwrap_or_default();
    let (u, v, c, phi) = match &row.lyapunov {
        Some(l) => (Some(l.u), Some(l.v), Some(l.c), Some(l.phi)),
        None if central_fill => (Some(0.0), Some(0.0), Some(0.0), Some(row.gap)),
        None => (None, None, None, None),
    };
    [
        row.iter.to_string(),
        row.lfo_total.to_string(),
        row.comm_rounds.to_string(),
        float(row.time_units),
        float(row.gap),
        opt(row.grad_norm),
        float(row.consensus_err),
        opt(u),
        opt(v),
        opt(c),
        opt(phi),
    ]
}

/// CSV text of a record; `central` marks GD/CGD records.
pub fn csv_string(rec: &RunRecord, central: bool) -> Result<String, CliError> {
    let central_fill = central && rec.gap_kind == GapKind::Absolute;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for row in &rec.rows {
        w.write_record(row_fields(row, central_fill))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Failed(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("CSV fields are ASCII"))
}

/// Writes `<label>.csv` for every run into `dir` and returns the paths.
pub fn write_runs(dir: &Path, runs: &[SolverRun]) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut paths = Vec::with_capacity(runs.len());
    for r in runs {
        let path = dir.join(format!("{}.csv", r.solver.label));
        let central = matches!(r.solver.algorithm, Algorithm::Gd | Algorithm::Cgd);
        std::fs::write(&path, csv_string(&r.record, central)?).map_err(|e| CliError::io(&path, e))?;
        paths.push(path);
    }
    Ok(paths)
}
