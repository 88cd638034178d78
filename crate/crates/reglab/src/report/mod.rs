//! Deterministic artifact emission: frozen CSV schemas, versioned JSON
//! reports, and dependency-free SVG plots.

mod svg;

pub use svg::{emit_plot, histogram_bins, Bin, PlotKind};

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::interpolate::CouplingProfile;
use crate::locallaw::ScanTable;
use crate::malliavin::EnergyReport;
use crate::stein::EnsembleResult;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("plot input does not match kind {kind}: {reason}")]
    BadColumns { kind: &'static str, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Shortest round-trip decimal for a float; fixed across platforms.
pub fn fmt_f64(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        // keep integral values unambiguous ("2" not "2.0" varies nowhere,
        // but the explicit form reads better in CSV)
        format!("{x:.1}")
    } else {
        format!("{x}")
    }
}

/// Write bytes through a .partial file; the final path appears only when
/// the content is complete.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), ReportError> {
    let partial = partial_path(path);
    {
        let mut f = fs::File::create(&partial)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&partial, path)?;
    Ok(())
}

pub fn partial_path(path: &Path) -> PathBuf {
    let mut os = path.as_os_str().to_os_string();
    os.push(".partial");
    PathBuf::from(os)
}

pub fn write_csv(
    path: &Path,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<(), ReportError> {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}

/// JSON with the report schema version on the outside.
pub fn write_json<T: Serialize>(path: &Path, payload: &T) -> Result<(), ReportError> {
    #[derive(Serialize)]
    struct Versioned<'a, T> {
        schema_version: u32,
        payload: &'a T,
    }
    let doc = Versioned { schema_version: SCHEMA_VERSION, payload };
    let mut text = serde_json::to_string_pretty(&doc).expect("serializable report");
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// Frozen schema: overlap ensemble samples, one block per cell.
pub fn ensemble_csv(path: &Path, ensembles: &[EnsembleResult]) -> Result<(), ReportError> {
    let mut rows = Vec::new();
    for ens in ensembles {
        for (i, (x, seed)) in ens.samples.iter().zip(&ens.seeds).enumerate() {
            rows.push(vec![
                ens.n.to_string(),
                ens.d.to_string(),
                i.to_string(),
                fmt_f64(*x),
                seed.to_string(),
            ]);
        }
    }
    write_csv(path, &["n", "d", "sample_idx", "overlap", "seed"], &rows)
}

/// Frozen schema: local-law variance scan rows.
pub fn scan_csv(path: &Path, table: &ScanTable, samples_per_cell: usize) -> Result<(), ReportError> {
    let rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .enumerate()
        .map(|(i, s)| {
            vec![
                s.n.to_string(),
                s.d.to_string(),
                fmt_f64(s.e),
                fmt_f64(s.eta),
                (i % samples_per_cell).to_string(),
                fmt_f64(s.re_gq),
                fmt_f64(s.im_gq),
                fmt_f64(s.err),
                fmt_f64(s.remainder_norm),
                fmt_f64(s.fluct_norm),
                s.seed.to_string(),
            ]
        })
        .collect();
    write_csv(
        path,
        &[
            "n", "d", "E", "eta", "sample_idx", "re_gq", "im_gq", "err", "remainder_norm",
            "fluct_norm", "seed",
        ],
        &rows,
    )
}

/// Frozen schema: coupling error profiles.
pub fn profiles_csv(path: &Path, profiles: &[CouplingProfile]) -> Result<(), ReportError> {
    let mut rows = Vec::new();
    for p in profiles {
        for r in &p.rows {
            rows.push(vec![
                p.n.to_string(),
                p.d.to_string(),
                fmt_f64(p.t),
                fmt_f64(r.s),
                fmt_f64(p.e),
                fmt_f64(p.eta),
                fmt_f64(r.err),
                (r.argmin as u8).to_string(),
                p.seed.to_string(),
            ]);
        }
    }
    write_csv(
        path,
        &["n", "d", "t", "s", "E", "eta", "err", "argmin_flag", "seed"],
        &rows,
    )
}

/// Frozen schema: per-edge switching derivatives, one row per mode.
pub fn derivatives_csv(path: &Path, reports: &[EnergyReport]) -> Result<(), ReportError> {
    let mut rows = Vec::new();
    for report in reports {
        derivative_rows(report, &mut rows);
    }
    write_csv(
        path,
        &["n", "d", "edge_i", "edge_j", "functional", "derivative", "switch_count", "mode"],
        &rows,
    )
}

fn derivative_rows(report: &EnergyReport, rows: &mut Vec<Vec<String>>) {
    for e in &report.edges {
        rows.push(vec![
            report.n.to_string(),
            report.d.to_string(),
            e.edge.0.to_string(),
            e.edge.1.to_string(),
            "overlap_x2".to_string(),
            fmt_f64(e.perturbative),
            e.switch_count.to_string(),
            "perturbative".to_string(),
        ]);
        if let Some(exact) = e.exact {
            rows.push(vec![
                report.n.to_string(),
                report.d.to_string(),
                e.edge.0.to_string(),
                e.edge.1.to_string(),
                "overlap_x2".to_string(),
                fmt_f64(exact),
                e.switch_count.to_string(),
                "exact".to_string(),
            ]);
        }
    }
}

/// Frozen schema: histogram bin table (shared with the SVG overlay).
pub fn bins_csv(path: &Path, bins: &[Bin]) -> Result<(), ReportError> {
    let rows: Vec<Vec<String>> = bins
        .iter()
        .map(|b| vec![fmt_f64(b.lo), fmt_f64(b.hi), b.count.to_string()])
        .collect();
    write_csv(path, &["lo", "hi", "count"], &rows)
}
