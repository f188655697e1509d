//! Diagnostics table as comma-separated values with full precision.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::diagnostics::{DiagnosticsRow, EnergyReport};
use crate::error::{Error, Result};

pub const CSV_COLUMNS: [&str; 15] = [
    "t",
    "e_fluid",
    "e_mag",
    "e_particles",
    "e_total",
    "diss_cum",
    "r1",
    "r2",
    "div_u",
    "div_b",
    "px",
    "py",
    "pz",
    "mass",
    "balance_residual",
];

fn values(r: &DiagnosticsRow) -> [f64; 15] {
    let e = &r.energy;
    [
        r.t,
        e.e_fluid,
        e.e_mag,
        e.e_particles,
        e.e_total,
        e.cumulative_dissipation,
        e.r1,
        e.r2,
        r.div_u,
        r.div_b,
        r.momentum[0],
        r.momentum[1],
        r.momentum[2],
        r.mass,
        e.balance_residual,
    ]
}

/// Row-at-a-time writer, flushed after each row.
pub struct DiagnosticsCsv {
    out: BufWriter<File>,
}

impl DiagnosticsCsv {
    /// New file with a header line.
    pub fn create(path: &Path) -> Result<Self> {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "{}", CSV_COLUMNS.join(","))?;
        out.flush()?;
        Ok(DiagnosticsCsv { out })
    }

    /// Keep the header and first `keep_rows` rows of `source`, rewrite them
    /// to `path` and continue appending there.
    pub fn resume(source: &Path, path: &Path, keep_rows: usize) -> Result<Self> {
        let kept: Vec<String> = BufReader::new(File::open(source)?)
            .lines()
            .take(keep_rows + 1)
            .collect::<std::io::Result<_>>()?;
        let mut out = BufWriter::new(OpenOptions::new().create(true).write(true).truncate(true).open(path)?);
        for line in kept {
            writeln!(out, "{line}")?;
        }
        out.flush()?;
        Ok(DiagnosticsCsv { out })
    }

    pub fn write_row(&mut self, row: &DiagnosticsRow) -> Result<()> {
        let line: Vec<String> = values(row).iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(self.out, "{}", line.join(","))?;
        self.out.flush()?;
        Ok(())
    }
}

pub fn write_diagnostics_csv(path: &Path, rows: &[DiagnosticsRow]) -> Result<()> {
    let mut w = DiagnosticsCsv::create(path)?;
    for r in rows {
        w.write_row(r)?;
    }
    Ok(())
}

/// Parse a table written by [`DiagnosticsCsv`].
pub fn read_diagnostics_csv(path: &Path) -> Result<Vec<DiagnosticsRow>> {
    let mut lines = BufReader::new(File::open(path)?).lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    if header != CSV_COLUMNS.join(",") {
        return Err(Error::Input(format!("unexpected diagnostics header `{header}`")));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let v: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Input(format!("row {}: {e}", i + 1)))?;
        if v.len() != CSV_COLUMNS.len() {
            return Err(Error::Input(format!("row {}: expected {} columns", i + 1, CSV_COLUMNS.len())));
        }
        rows.push(DiagnosticsRow {
            t: v[0],
            energy: EnergyReport {
                e_fluid: v[1],
                e_mag: v[2],
                e_particles: v[3],
                e_total: v[4],
                cumulative_dissipation: v[5],
                r1: v[6],
                r2: v[7],
                dissipation_rate: f64::NAN,
                balance_residual: v[14],
            },
            div_u: v[8],
            div_b: v[9],
            momentum: [v[10], v[11], v[12]],
            mass: v[13],
        });
    }
    Ok(rows)
}
