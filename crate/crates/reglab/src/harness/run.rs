//! Experiment dispatch and artifact emission.
//!
//! Every artifact goes through the report module's atomic writer, and the
//! manifest is written last, so the presence of manifest.json certifies a
//! complete run. Output bytes depend only on the spec (wall time lives in
//! the manifest alone).

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{ExperimentKind, ExperimentSpec, HarnessError};
use crate::exec;
use crate::graph::sample_configuration_model;
use crate::interpolate::{argmin_ensemble, CouplingProfile};
use crate::malliavin::{overlap_derivative_energy, EnergyReport};
use crate::report::{
    bins_csv, derivatives_csv, emit_plot, ensemble_csv, fmt_f64, histogram_bins, partial_path,
    profiles_csv, scan_csv, write_csv, write_json, PlotKind,
};
use crate::rng::{derive_seed, derive_stream};
use crate::spectral::{second_eigenpair, ComplexEnergy};
use crate::stein::{
    berry_esseen_experiment, build_direction, run_ensemble, BerryEsseenPlan, EnsembleResult,
};

/// Environment hook for the atomicity tests: when set, the first artifact
/// write leaves a .partial behind and the run aborts, as a crash would.
pub const FAIL_MIDCELL_ENV: &str = "REGLAB_FAIL_MIDCELL";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellNote {
    pub n: usize,
    pub d: usize,
    pub samples: usize,
    pub excluded: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub spec: ExperimentSpec,
    pub tool_version: String,
    pub workers: usize,
    pub files: Vec<String>,
    pub cells: Vec<CellNote>,
    pub wall_time_secs: f64,
}

/// Artifact sink: remembers what was written and implements the induced
/// mid-run failure.
struct Artifacts {
    dir: PathBuf,
    files: Vec<String>,
    fail_midcell: bool,
}

impl Artifacts {
    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// The failure hook fires on the first write: leave a truncated
    /// .partial and bail before any final file exists.
    fn gate(&mut self, name: &str) -> Result<(), HarnessError> {
        if self.fail_midcell {
            fs::write(partial_path(&self.path(name)), b"truncated by induced failure\n")?;
            return Err(HarnessError::Numeric(format!(
                "induced mid-run failure before {name} ({FAIL_MIDCELL_ENV} set)"
            )));
        }
        Ok(())
    }

    fn csv(
        &mut self,
        name: &str,
        write: impl FnOnce(&Path) -> Result<(), crate::report::ReportError>,
    ) -> Result<(), HarnessError> {
        self.gate(name)?;
        write(&self.path(name))?;
        self.files.push(name.to_string());
        Ok(())
    }
}

pub fn run(
    spec: &ExperimentSpec,
    workers: usize,
    output: &Path,
) -> Result<RunManifest, HarnessError> {
    let start = Instant::now();
    fs::create_dir_all(output)?;
    let art = Artifacts {
        dir: output.to_path_buf(),
        files: Vec::new(),
        fail_midcell: std::env::var_os(FAIL_MIDCELL_ENV).is_some(),
    };
    let spec_c = spec.clone();
    let cells = exec::with_workers(workers, move || {
        let mut art = art;
        dispatch(&spec_c, &mut art).map(|cells| (art, cells))
    });
    let (art, cells) = cells?;
    let mut files = art.files;
    let manifest = RunManifest {
        spec: spec.clone(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        workers,
        files: {
            files.push("manifest.json".to_string());
            files
        },
        cells,
        wall_time_secs: start.elapsed().as_secs_f64(),
    };
    write_json(&output.join("manifest.json"), &manifest)?;
    Ok(manifest)
}

/// Stable per-(n, d) cell seed, shared by every experiment kind.
fn cell_seed(base: u64, ni: usize, di: usize) -> u64 {
    derive_stream(base, ((di as u64) << 32) | ni as u64)
}

fn dispatch(spec: &ExperimentSpec, art: &mut Artifacts) -> Result<Vec<CellNote>, HarnessError> {
    match spec.experiment {
        ExperimentKind::Sample => run_sample(spec, art),
        ExperimentKind::Spectrum => run_spectrum(spec, art),
        ExperimentKind::Clt => run_clt(spec, art),
        ExperimentKind::Locallaw => run_locallaw(spec, art),
        ExperimentKind::Interpolate => run_interpolate(spec, art),
        ExperimentKind::Malliavin => run_malliavin(spec, art),
        ExperimentKind::Scaling => run_scaling(spec, art),
    }
}

fn numeric<E: std::fmt::Display>(e: E) -> HarnessError {
    HarnessError::Numeric(e.to_string())
}

/// Cross product of the N and d grids with per-cell seeds.
fn cell_grid(spec: &ExperimentSpec) -> Vec<(usize, usize, u64)> {
    let mut out = Vec::new();
    for (di, &d) in spec.d_list.iter().enumerate() {
        for (ni, &n) in spec.n_list.iter().enumerate() {
            out.push((n, d, cell_seed(spec.base_seed, ni, di)));
        }
    }
    out
}

fn run_sample(spec: &ExperimentSpec, art: &mut Artifacts) -> Result<Vec<CellNote>, HarnessError> {
    let mut rows = Vec::new();
    let mut cells = Vec::new();
    for (n, d, cseed) in cell_grid(spec) {
        let graphs: Vec<Result<(u64, String), String>> = exec::map_indexed(spec.m, |i| {
            let seed_i = derive_seed(cseed, i as u64);
            let g = sample_configuration_model(n, d, derive_stream(seed_i, 0x6ea9))
                .map_err(|e| e.to_string())?;
            // single-token edge list so the row stays one CSV record
            let token: Vec<String> =
                g.edges().iter().map(|&(a, b)| format!("{a}-{b}")).collect();
            Ok((seed_i, token.join(";")))
        });
        for (i, r) in graphs.into_iter().enumerate() {
            let (seed_i, edges) = r.map_err(HarnessError::Numeric)?;
            rows.push(vec![
                n.to_string(),
                d.to_string(),
                i.to_string(),
                seed_i.to_string(),
                edges,
            ]);
        }
        cells.push(CellNote { n, d, samples: spec.m, excluded: 0 });
    }
    art.csv("samples.csv", |p| {
        write_csv(p, &["n", "d", "sample_idx", "seed", "edges"], &rows)
    })?;
    Ok(cells)
}

fn run_spectrum(spec: &ExperimentSpec, art: &mut Artifacts) -> Result<Vec<CellNote>, HarnessError> {
    let mut rows = Vec::new();
    let mut cells = Vec::new();
    for (n, d, cseed) in cell_grid(spec) {
        let got: Vec<Result<(u64, f64, f64, bool), String>> = exec::map_indexed(spec.m, |i| {
            let seed_i = derive_seed(cseed, i as u64);
            let g = sample_configuration_model(n, d, derive_stream(seed_i, 0x6ea9))
                .map_err(|e| e.to_string())?;
            let pair = second_eigenpair(&g, seed_i).map_err(|e| e.to_string())?;
            Ok((seed_i, pair.lambda2, pair.lambda3, pair.degenerate))
        });
        let mut excluded = 0;
        for (i, r) in got.into_iter().enumerate() {
            let (seed_i, l2, l3, degenerate) = r.map_err(HarnessError::Numeric)?;
            if degenerate {
                excluded += 1;
            }
            rows.push(vec![
                n.to_string(),
                d.to_string(),
                i.to_string(),
                seed_i.to_string(),
                fmt_f64(l2),
                fmt_f64(l3),
                (degenerate as u8).to_string(),
            ]);
        }
        cells.push(CellNote { n, d, samples: spec.m, excluded });
    }
    art.csv("spectra.csv", |p| {
        write_csv(p, &["n", "d", "sample_idx", "seed", "lambda2", "lambda3", "degenerate"], &rows)
    })?;
    Ok(cells)
}

fn run_clt(spec: &ExperimentSpec, art: &mut Artifacts) -> Result<Vec<CellNote>, HarnessError> {
    let mut ensembles: Vec<EnsembleResult> = Vec::new();
    for (n, d, cseed) in cell_grid(spec) {
        ensembles.push(run_ensemble(n, d, spec.m, &spec.direction, cseed).map_err(numeric)?);
    }
    art.csv("ensemble.csv", |p| ensemble_csv(p, &ensembles))?;
    art.csv("stats.json", |p| write_json(p, &ensembles))?;
    for ens in &ensembles {
        let bins = histogram_bins(&ens.samples, spec.bins);
        art.csv(&format!("bins_n{}_d{}.csv", ens.n, ens.d), |p| bins_csv(p, &bins))?;
        art.csv(&format!("hist_n{}_d{}.svg", ens.n, ens.d), |p| {
            emit_plot(PlotKind::HistogramVsNormal { samples: &ens.samples, bins: spec.bins }, p)
        })?;
    }
    Ok(ensembles
        .iter()
        .map(|e| CellNote { n: e.n, d: e.d, samples: e.m, excluded: e.excluded })
        .collect())
}

fn run_locallaw(spec: &ExperimentSpec, art: &mut Artifacts) -> Result<Vec<CellNote>, HarnessError> {
    let grid: Vec<(usize, usize, ComplexEnergy)> = cell_grid(spec)
        .into_iter()
        .map(|(n, d, _)| (n, d, ComplexEnergy::new(spec.e, spec.eta_for(n))))
        .collect();
    let table =
        crate::locallaw::ensemble_variance_scan(&grid, spec.m, spec.base_seed).map_err(numeric)?;
    art.csv("scan.csv", |p| scan_csv(p, &table, spec.m))?;
    art.csv("scan.json", |p| write_json(p, &table))?;
    Ok(grid
        .iter()
        .map(|&(n, d, _)| CellNote { n, d, samples: spec.m, excluded: 0 })
        .collect())
}

fn run_interpolate(
    spec: &ExperimentSpec,
    art: &mut Artifacts,
) -> Result<Vec<CellNote>, HarnessError> {
    let s_grid = spec.s_grid();
    let mut reports = Vec::new();
    let mut all_profiles: Vec<CouplingProfile> = Vec::new();
    let mut cells = Vec::new();
    for (n, d, cseed) in cell_grid(spec) {
        let z = ComplexEnergy::new(spec.e, spec.eta_for(n));
        let ens = argmin_ensemble(n, d, spec.t_for(n), z, &spec.direction, &s_grid, spec.m, cseed)
            .map_err(numeric)?;
        all_profiles.extend(ens.profiles.iter().cloned());
        cells.push(CellNote { n, d, samples: spec.m, excluded: 0 });
        reports.push(ens);
    }
    art.csv("profiles.csv", |p| profiles_csv(p, &all_profiles))?;
    art.csv("interpolate.json", |p| write_json(p, &reports))?;
    for ens in &reports {
        let first = &ens.profiles[0];
        let pts: Vec<(f64, f64)> = first.rows.iter().map(|r| (r.s, r.err)).collect();
        art.csv(&format!("profile_n{}_d{}.svg", ens.n, ens.d), |p| {
            emit_plot(PlotKind::ErrorVsS { points: &pts }, p)
        })?;
    }
    Ok(cells)
}

fn run_malliavin(
    spec: &ExperimentSpec,
    art: &mut Artifacts,
) -> Result<Vec<CellNote>, HarnessError> {
    let mut reports: Vec<EnergyReport> = Vec::new();
    let mut cells = Vec::new();
    for (n, d, cseed) in cell_grid(spec) {
        let q = build_direction(&spec.direction, n, d, derive_stream(cseed, 0x0d1e))
            .map_err(numeric)?;
        let got: Vec<Result<EnergyReport, String>> = exec::map_indexed(spec.m, |i| {
            let seed_i = derive_seed(cseed, i as u64);
            let g = sample_configuration_model(n, d, derive_stream(seed_i, 0x6ea9))
                .map_err(|e| e.to_string())?;
            overlap_derivative_energy(&g, &q, seed_i).map_err(|e| e.to_string())
        });
        let got: Vec<EnergyReport> =
            got.into_iter().collect::<Result<_, _>>().map_err(HarnessError::Numeric)?;
        cells.push(CellNote { n, d, samples: got.len(), excluded: spec.m - got.len() });
        reports.extend(got);
    }
    art.csv("derivatives.csv", |p| derivatives_csv(p, &reports))?;
    art.csv("malliavin.json", |p| write_json(p, &reports))?;
    Ok(cells)
}

fn run_scaling(spec: &ExperimentSpec, art: &mut Artifacts) -> Result<Vec<CellNote>, HarnessError> {
    let plan = BerryEsseenPlan {
        n_list: spec.n_list.clone(),
        d_list: spec.d_list.clone(),
        m: spec.m,
        direction: spec.direction,
        base_seed: spec.base_seed,
    };
    let report = berry_esseen_experiment(&plan).map_err(numeric)?;
    let rows: Vec<Vec<String>> = report
        .cells
        .iter()
        .map(|c| {
            vec![
                c.n.to_string(),
                c.d.to_string(),
                c.m.to_string(),
                c.excluded.to_string(),
                fmt_f64(c.ks),
                fmt_f64(c.variance),
                fmt_f64(c.kappa2),
                fmt_f64(c.kappa4),
            ]
        })
        .collect();
    art.csv("cells.csv", |p| {
        write_csv(
            p,
            &["n", "d", "m", "excluded", "ks", "variance", "kappa2", "kappa4"],
            &rows,
        )
    })?;
    art.csv("scaling.json", |p| write_json(p, &report))?;
    for &d in &spec.d_list {
        let pts: Vec<(f64, f64)> = report
            .cells
            .iter()
            .filter(|c| c.d == d && c.ks > 0.0)
            .map(|c| (c.n as f64, c.ks))
            .collect();
        if pts.len() >= 2 {
            art.csv(&format!("ks_vs_n_d{d}.svg"), |p| {
                emit_plot(PlotKind::LogLogScatterWithFit { points: &pts }, p)
            })?;
        }
    }
    Ok(report
        .cells
        .iter()
        .map(|c| CellNote { n: c.n, d: c.d, samples: c.m, excluded: c.excluded })
        .collect())
}
