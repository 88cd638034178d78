//! Overlap ensembles and their statistics: the law of
//! sqrt(N) <q, u2> against the standard normal.

mod experiment;
mod stats;

pub use experiment::{berry_esseen_experiment, BerryEsseenPlan, BerryEsseenReport, CellSummary};
pub use stats::{
    cumulants, ks_statistic, scaling_fit, slope_bootstrap_ci, stein_discrepancy, Cumulants,
    Interval, LogLogFit, KOLMOGOROV_99, STEIN_FAMILY,
};

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec;
use crate::graph::{sample_configuration_model, GraphError, RegularGraph};
use crate::rng::{derive_seed, derive_stream, rng_from_seed};
use crate::spectral::{second_eigenpair, SpectralError};

#[derive(Debug, Error)]
pub enum SteinError {
    #[error("empty sample")]
    EmptySample,
    #[error("sample of {got} below minimum {want}")]
    SampleTooSmall { got: usize, want: usize },
    #[error("degenerate sample (zero variance)")]
    DegenerateSample,
    #[error("unknown test function `{0}`")]
    UnknownTestFunction(String),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("bad support: {0}")]
    BadSupport(String),
    #[error("direction/graph dimension mismatch: {q} vs {g}")]
    DimensionMismatch { q: usize, g: usize },
    #[error("direction not orthogonal to the ones vector (|<q,e>| = {0:.3e})")]
    NotOrthogonal(f64),
    #[error("{0} of {1} samples degenerate (limit is one tenth)")]
    ExcessDegeneracy(usize, usize),
    #[error("ensemble worker failed: {0}")]
    Worker(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirectionKind {
    CoordinateDifference,
    RandomOrthogonal,
    DSupported,
}

/// How to build the deterministic test direction for an ensemble cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectionSpec {
    pub kind: DirectionKind,
    /// support size for d-supported (defaults to the cell's degree)
    pub support: Option<usize>,
    /// project the d-supported vector onto the e-complement (default true)
    pub project: bool,
}

impl DirectionSpec {
    pub fn coordinate_difference() -> Self {
        DirectionSpec { kind: DirectionKind::CoordinateDifference, support: None, project: true }
    }

    pub fn random_orthogonal() -> Self {
        DirectionSpec { kind: DirectionKind::RandomOrthogonal, support: None, project: true }
    }

    pub fn d_supported(size: usize) -> Self {
        DirectionSpec { kind: DirectionKind::DSupported, support: Some(size), project: true }
    }
}

/// Deterministic unit vector; orthogonal to the all-ones vector except for
/// the unprojected d-supported variant.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction {
    pub coords: Vec<f64>,
    pub kind: DirectionKind,
    pub support: Option<Vec<usize>>,
}

impl Direction {
    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn dot_ones(&self) -> f64 {
        self.coords.iter().sum()
    }
}

/// Build a direction of the given kind on n coordinates. `seed` only
/// matters for the random-orthogonal kind.
pub fn build_direction(
    spec: &DirectionSpec,
    n: usize,
    default_support: usize,
    seed: u64,
) -> Result<Direction, SteinError> {
    if n < 2 {
        return Err(SteinError::BadSupport(format!("n={n} too small")));
    }
    match spec.kind {
        DirectionKind::CoordinateDifference => {
            let mut coords = vec![0.0; n];
            coords[0] = 1.0 / std::f64::consts::SQRT_2;
            coords[1] = -1.0 / std::f64::consts::SQRT_2;
            Ok(Direction { coords, kind: spec.kind, support: None })
        }
        DirectionKind::RandomOrthogonal => {
            let mut rng = rng_from_seed(derive_stream(seed, 0xd12));
            let mut coords: Vec<f64> =
                (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            let mean = coords.iter().sum::<f64>() / n as f64;
            for c in &mut coords {
                *c -= mean;
            }
            let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
            if norm < 1e-12 {
                return Err(SteinError::DegenerateSample);
            }
            for c in &mut coords {
                *c /= norm;
            }
            Ok(Direction { coords, kind: spec.kind, support: None })
        }
        DirectionKind::DSupported => {
            let k = spec.support.unwrap_or(default_support);
            if k == 0 || k > n {
                return Err(SteinError::BadSupport(format!("support {k} out of 1..={n}")));
            }
            let mut coords = vec![0.0; n];
            let w = 1.0 / (k as f64).sqrt();
            for c in coords.iter_mut().take(k) {
                *c = w;
            }
            if spec.project {
                let mean = coords.iter().sum::<f64>() / n as f64;
                for c in &mut coords {
                    *c -= mean;
                }
                let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
                for c in &mut coords {
                    *c /= norm;
                }
            }
            Ok(Direction { coords, kind: spec.kind, support: Some((0..k).collect()) })
        }
    }
}

/// Require unit norm and orthogonality to e at 1e-12.
pub fn check_orthogonal(q: &Direction) -> Result<(), SteinError> {
    let dot = q.dot_ones().abs();
    if dot > 1e-12 * (q.n() as f64).sqrt() {
        return Err(SteinError::NotOrthogonal(dot));
    }
    Ok(())
}

/// The overlap statistic sqrt(N) <q, u2> with sign-randomized u2.
pub fn overlap(g: &RegularGraph, q: &Direction, seed: u64) -> Result<(f64, bool), SteinError> {
    if q.n() != g.n() {
        return Err(SteinError::DimensionMismatch { q: q.n(), g: g.n() });
    }
    check_orthogonal(q)?;
    let pair = second_eigenpair(g, seed)?;
    let dot: f64 = q.coords.iter().zip(&pair.u2).map(|(a, b)| a * b).sum();
    Ok(((g.n() as f64).sqrt() * dot, pair.degenerate))
}

/// Per-ensemble summary statistics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub ks: f64,
    pub cumulants: Cumulants,
    pub stein: std::collections::BTreeMap<String, f64>,
}

/// Overlap ensemble with full seed provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub n: usize,
    pub d: usize,
    pub m: usize,
    pub direction: DirectionSpec,
    pub base_seed: u64,
    /// non-degenerate overlaps, in sample-index order
    pub samples: Vec<f64>,
    /// per-sample seeds aligned with `samples`
    pub seeds: Vec<u64>,
    pub excluded: usize,
    pub stats: EnsembleStats,
}

/// Compute the stats block for a (possibly injected) sample stream.
pub fn ensemble_stats(samples: &[f64], seed: u64) -> Result<EnsembleStats, SteinError> {
    Ok(EnsembleStats {
        ks: ks_statistic(samples)?,
        cumulants: cumulants(samples, seed)?,
        stein: stein_discrepancy(samples, &STEIN_FAMILY)?,
    })
}

/// M independent (graph, sign) samples; degenerate-lambda2 samples are
/// excluded and counted, never re-drawn.
pub fn run_ensemble(
    n: usize,
    d: usize,
    m: usize,
    direction: &DirectionSpec,
    base_seed: u64,
) -> Result<EnsembleResult, SteinError> {
    if m < 100 {
        return Err(SteinError::SampleTooSmall { got: m, want: 100 });
    }
    let q = build_direction(direction, n, d, derive_stream(base_seed, 0x0d1e))?;
    let raw: Vec<Result<(u64, f64, bool), String>> = exec::map_indexed(m, |i| {
        let seed_i = derive_seed(base_seed, i as u64);
        let g = sample_configuration_model(n, d, derive_stream(seed_i, 0x6ea9))
            .map_err(|e| e.to_string())?;
        let (x, degenerate) = overlap(&g, &q, seed_i).map_err(|e| e.to_string())?;
        Ok((seed_i, x, degenerate))
    });
    let mut samples = Vec::with_capacity(m);
    let mut seeds = Vec::with_capacity(m);
    let mut excluded = 0usize;
    for r in raw {
        let (seed_i, x, degenerate) = r.map_err(SteinError::Worker)?;
        if degenerate {
            excluded += 1;
        } else {
            samples.push(x);
            seeds.push(seed_i);
        }
    }
    if excluded > m / 10 {
        return Err(SteinError::ExcessDegeneracy(excluded, m));
    }
    let stats = ensemble_stats(&samples, base_seed)?;
    Ok(EnsembleResult {
        n,
        d,
        m,
        direction: *direction,
        base_seed,
        samples,
        seeds,
        excluded,
        stats,
    })
}
