//! Scaling experiments over (N, d) grids: KS decay in N, KS growth in d,
//! and the fourth cumulant against the degree.

use serde::{Deserialize, Serialize};

use super::{run_ensemble, scaling_fit, DirectionSpec, EnsembleResult, Interval, LogLogFit,
            SteinError};
use crate::rng::derive_stream;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BerryEsseenPlan {
    pub n_list: Vec<usize>,
    pub d_list: Vec<usize>,
    pub m: usize,
    pub direction: DirectionSpec,
    pub base_seed: u64,
}

/// Per-cell digest of an EnsembleResult, for fits and CSV rows.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellSummary {
    pub n: usize,
    pub d: usize,
    pub m: usize,
    pub excluded: usize,
    pub ks: f64,
    pub variance: f64,
    pub kappa2: f64,
    pub kappa4: f64,
    pub kappa4_ci: Interval,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BerryEsseenReport {
    pub plan: BerryEsseenPlan,
    pub cells: Vec<CellSummary>,
    /// (d, fit of KS against N) for every degree with >= 3 grid points
    pub ks_vs_n: Vec<(usize, LogLogFit)>,
    /// (n, fit of KS against d) for every size with >= 3 grid points
    pub ks_vs_d: Vec<(usize, LogLogFit)>,
    pub warnings: Vec<String>,
    /// full per-cell ensembles, cell order = d-major then n
    pub ensembles: Vec<EnsembleResult>,
}

fn summarize(r: &EnsembleResult) -> CellSummary {
    CellSummary {
        n: r.n,
        d: r.d,
        m: r.m,
        excluded: r.excluded,
        ks: r.stats.ks,
        variance: r.stats.cumulants.variance,
        kappa2: r.stats.cumulants.kappa2,
        kappa4: r.stats.cumulants.kappa4,
        kappa4_ci: r.stats.cumulants.kappa4_ci,
    }
}

/// Run the grid and fit the scaling laws. Pure computation; the harness
/// writes the CSV and plot artifacts.
pub fn berry_esseen_experiment(plan: &BerryEsseenPlan) -> Result<BerryEsseenReport, SteinError> {
    if plan.m < 500 {
        return Err(SteinError::SampleTooSmall { got: plan.m, want: 500 });
    }
    let mut warnings = Vec::new();
    let mut ensembles = Vec::new();
    for (di, &d) in plan.d_list.iter().enumerate() {
        for (ni, &n) in plan.n_list.iter().enumerate() {
            if (d as f64) > (n as f64).powf(0.25) {
                warnings.push(format!(
                    "cell (n={n}, d={d}): degree exceeds n^(1/4); sparse-regime asymptotics may not apply"
                ));
            }
            let cell_seed =
                derive_stream(plan.base_seed, ((di as u64) << 32) | ni as u64);
            ensembles.push(run_ensemble(n, d, plan.m, &plan.direction, cell_seed)?);
        }
    }
    let cells: Vec<CellSummary> = ensembles.iter().map(summarize).collect();

    let mut ks_vs_n = Vec::new();
    for &d in &plan.d_list {
        let pts: Vec<(f64, f64)> = cells
            .iter()
            .filter(|c| c.d == d)
            .map(|c| (c.n as f64, c.ks))
            .collect();
        if pts.len() >= 3 {
            ks_vs_n.push((d, scaling_fit(&pts)?));
        }
    }
    let mut ks_vs_d = Vec::new();
    for &n in &plan.n_list {
        let pts: Vec<(f64, f64)> = cells
            .iter()
            .filter(|c| c.n == n)
            .map(|c| (c.d as f64, c.ks))
            .collect();
        if pts.len() >= 3 {
            ks_vs_d.push((n, scaling_fit(&pts)?));
        }
    }
    Ok(BerryEsseenReport { plan: plan.clone(), cells, ks_vs_n, ks_vs_d, warnings, ensembles })
}
