//! The graph-to-GOE interpolation H_{t,s} = (1-s) H_0 + s H_t^GOE, the
//! operator norm of Delta_t = H_t^GOE - H_0, and the empirical location of
//! the optimal coupling s(t) = sqrt(d t / N).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec;
use crate::graph::{sample_configuration_model, GraphError, RegularGraph};
use crate::locallaw::{resolvent_solve, LocalLawError};
use crate::rng::{derive_seed, derive_stream, rng_from_seed};
use crate::spectral::{
    m_sc, normalize_adjacency, sample_constrained_goe, ComplexEnergy, SpectralError, SymMatrix,
};
use crate::stein::{build_direction, Direction, DirectionSpec, SteinError};
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

#[derive(Debug, Error)]
pub enum InterpolateError {
    #[error("evolution time {0} outside [0, 1]")]
    TimeOutOfRange(f64),
    #[error("coupling {0} outside [0, 1]")]
    CouplingOutOfRange(f64),
    #[error("need at least {want} samples, got {got}")]
    TooFewSamples { got: usize, want: usize },
    #[error("empty grid")]
    EmptyGrid,
    #[error("power iteration failed to settle within {0} iterations")]
    PowerIteration(usize),
    #[error("worker failed: {0}")]
    Worker(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    LocalLaw(#[from] LocalLawError),
    #[error(transparent)]
    Stein(#[from] SteinError),
}

/// sqrt(1-t) H0 + sqrt(t) W with W a constrained (PWP) GOE draw; the
/// adopted meaning of "constrained GOE evolved to time t". t = 0 returns
/// H0 unchanged.
pub fn goe_evolved(h0: &SymMatrix, t: f64, seed: u64) -> Result<SymMatrix, InterpolateError> {
    if !(0.0..=1.0).contains(&t) {
        return Err(InterpolateError::TimeOutOfRange(t));
    }
    if t == 0.0 {
        return Ok(h0.clone());
    }
    let w = sample_constrained_goe(h0.n(), seed);
    Ok(SymMatrix::linear_combination((1.0 - t).sqrt(), h0, t.sqrt(), &w))
}

/// (1-s) H0 + s Ht_goe.
pub fn interpolated_matrix(
    h0: &SymMatrix,
    ht_goe: &SymMatrix,
    s: f64,
) -> Result<SymMatrix, InterpolateError> {
    if !(0.0..=1.0).contains(&s) {
        return Err(InterpolateError::CouplingOutOfRange(s));
    }
    Ok(SymMatrix::linear_combination(1.0 - s, h0, s, ht_goe))
}

/// The theoretically optimal coupling scale sqrt(dt/n), clamped into [0, 1].
pub fn optimal_s(d: usize, t: f64, n: usize) -> f64 {
    (d as f64 * t / n as f64).sqrt().min(1.0)
}

const POWER_MAX_ITERS: usize = 50_000;

/// Operator norm of a symmetric matrix by power iteration on its square
/// (so sign-extremal eigenvalues cannot cancel); Rayleigh tolerance 1e-8.
pub fn operator_norm(m: &SymMatrix, seed: u64) -> Result<f64, InterpolateError> {
    let n = m.n();
    let mut rng = rng_from_seed(derive_stream(seed, 0x0909));
    let mut x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    for v in &mut x {
        *v /= norm;
    }
    let mut prev = 0.0f64;
    for it in 0..POWER_MAX_ITERS {
        let y = m.apply(&m.apply(&x));
        let nu: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let ynorm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if ynorm == 0.0 {
            return Ok(0.0);
        }
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / ynorm;
        }
        if it > 0 && (nu - prev).abs() <= 1e-10 * nu.max(1e-300) {
            return Ok(nu.max(0.0).sqrt());
        }
        prev = nu;
    }
    Err(InterpolateError::PowerIteration(POWER_MAX_ITERS))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeltaRow {
    pub t: f64,
    /// mean of ||Delta_t||_op^2 over the sample
    pub mean_sq_norm: f64,
    /// normal-theory 95% half-width
    pub ci_half_width: f64,
    /// the theoretical scaling predictor d t + d^2/n
    pub predictor: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeltaTable {
    pub n: usize,
    pub d: usize,
    pub samples: usize,
    pub rows: Vec<DeltaRow>,
    /// least-squares slope through the origin of mean vs predictor
    pub origin_slope: f64,
    pub relative_rmse: f64,
}

/// Sample Delta_t = Ht_goe - H0 over fresh graphs and GOE draws per t.
pub fn delta_norm_stats(
    n: usize,
    d: usize,
    t_grid: &[f64],
    samples: usize,
    base_seed: u64,
) -> Result<DeltaTable, InterpolateError> {
    if t_grid.is_empty() {
        return Err(InterpolateError::EmptyGrid);
    }
    if samples < 30 {
        return Err(InterpolateError::TooFewSamples { got: samples, want: 30 });
    }
    let mut rows = Vec::with_capacity(t_grid.len());
    for (ti, &t) in t_grid.iter().enumerate() {
        if !(0.0..=1.0).contains(&t) {
            return Err(InterpolateError::TimeOutOfRange(t));
        }
        let cell_seed = derive_stream(base_seed, ti as u64);
        let sq: Vec<Result<f64, String>> = exec::map_indexed(samples, |i| {
            let seed_i = derive_seed(cell_seed, i as u64);
            let g = sample_configuration_model(n, d, derive_stream(seed_i, 0x6ea9))
                .map_err(|e| e.to_string())?;
            let h0 = normalize_adjacency(&g);
            let ht = goe_evolved(&h0, t, derive_stream(seed_i, 0x60e))
                .map_err(|e| e.to_string())?;
            let delta = SymMatrix::linear_combination(1.0, &ht, -1.0, &h0);
            let norm = operator_norm(&delta, seed_i).map_err(|e| e.to_string())?;
            Ok(norm * norm)
        });
        let sq: Vec<f64> =
            sq.into_iter().collect::<Result<_, _>>().map_err(InterpolateError::Worker)?;
        let mean = sq.iter().sum::<f64>() / sq.len() as f64;
        let var =
            sq.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (sq.len() - 1) as f64;
        rows.push(DeltaRow {
            t,
            mean_sq_norm: mean,
            ci_half_width: 1.96 * (var / sq.len() as f64).sqrt(),
            predictor: d as f64 * t + (d * d) as f64 / n as f64,
        });
    }
    let sxx: f64 = rows.iter().map(|r| r.predictor * r.predictor).sum();
    let sxy: f64 = rows.iter().map(|r| r.predictor * r.mean_sq_norm).sum();
    let origin_slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let ss: f64 = rows
        .iter()
        .map(|r| (r.mean_sq_norm - origin_slope * r.predictor).powi(2))
        .sum::<f64>()
        / rows.len() as f64;
    let scale: f64 = rows.iter().map(|r| r.mean_sq_norm.powi(2)).sum::<f64>()
        / rows.len() as f64;
    let relative_rmse = if scale > 0.0 { (ss / scale).sqrt() } else { 0.0 };
    Ok(DeltaTable { n, d, samples, rows, origin_slope, relative_rmse })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileRow {
    pub s: f64,
    pub err: f64,
    pub argmin: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CouplingProfile {
    pub n: usize,
    pub d: usize,
    pub t: f64,
    pub e: f64,
    pub eta: f64,
    pub seed: u64,
    pub rows: Vec<ProfileRow>,
    pub argmin_s: f64,
    /// max jump between adjacent grid errors within 10x the median jump
    pub continuous: bool,
}

/// err(s) = |<q, (H_{t,s} - z)^{-1} q> - m_sc(z)| across the s grid, one
/// GOE realization shared by the whole grid (set `fresh_goe` to resample
/// per grid point instead).
pub fn coupling_error_profile_with(
    g: &RegularGraph,
    t: f64,
    z: ComplexEnergy,
    q: &Direction,
    s_grid: &[f64],
    seed: u64,
    fresh_goe: bool,
) -> Result<CouplingProfile, InterpolateError> {
    if s_grid.is_empty() {
        return Err(InterpolateError::EmptyGrid);
    }
    let h0 = normalize_adjacency(g);
    let shared = goe_evolved(&h0, t, derive_stream(seed, 0x60e))?;
    let msc = m_sc(z)?;
    let mut rows = Vec::with_capacity(s_grid.len());
    let mut warm: Option<Vec<Complex64>> = None;
    for (si, &s) in s_grid.iter().enumerate() {
        let ht = if fresh_goe && si > 0 {
            goe_evolved(&h0, t, derive_stream(seed, 0x60e + si as u64))?
        } else {
            shared.clone()
        };
        let hts = interpolated_matrix(&h0, &ht, s)?;
        let (v, _) = resolvent_solve(&hts, z, &q.coords, warm.as_deref())?;
        let gq: Complex64 = q.coords.iter().zip(&v).map(|(&a, b)| a * b).sum();
        rows.push(ProfileRow { s, err: (gq - msc).norm(), argmin: false });
        warm = Some(v);
    }
    let mut best = 0usize;
    for i in 1..rows.len() {
        if rows[i].err < rows[best].err {
            best = i;
        }
    }
    rows[best].argmin = true;
    let mut jumps: Vec<f64> = rows.windows(2).map(|w| (w[1].err - w[0].err).abs()).collect();
    jumps.sort_by(|a, b| a.total_cmp(b));
    let continuous = if jumps.len() >= 3 {
        let median = jumps[jumps.len() / 2];
        let max = *jumps.last().unwrap();
        median == 0.0 || max <= 10.0 * median
    } else {
        true
    };
    Ok(CouplingProfile {
        n: g.n(),
        d: g.d(),
        t,
        e: z.e,
        eta: z.eta,
        seed,
        argmin_s: rows[best].s,
        rows,
        continuous,
    })
}

pub fn coupling_error_profile(
    g: &RegularGraph,
    t: f64,
    z: ComplexEnergy,
    q: &Direction,
    s_grid: &[f64],
    seed: u64,
) -> Result<CouplingProfile, InterpolateError> {
    coupling_error_profile_with(g, t, z, q, s_grid, seed, false)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArgminEnsemble {
    pub n: usize,
    pub d: usize,
    pub t: f64,
    pub profiles: Vec<CouplingProfile>,
    pub median_argmin: f64,
    pub predicted_s: f64,
}

/// Fresh (graph, GOE) profile per index; the argmin distribution against
/// the predicted coupling sqrt(d t / n).
pub fn argmin_ensemble(
    n: usize,
    d: usize,
    t: f64,
    z: ComplexEnergy,
    q_spec: &DirectionSpec,
    s_grid: &[f64],
    profiles: usize,
    base_seed: u64,
) -> Result<ArgminEnsemble, InterpolateError> {
    if profiles == 0 {
        return Err(InterpolateError::TooFewSamples { got: 0, want: 1 });
    }
    let q = build_direction(q_spec, n, d, derive_stream(base_seed, 0x0d1e))?;
    let out: Vec<Result<CouplingProfile, String>> = exec::map_indexed(profiles, |i| {
        let seed_i = derive_seed(base_seed, i as u64);
        let g = sample_configuration_model(n, d, derive_stream(seed_i, 0x6ea9))
            .map_err(|e| e.to_string())?;
        coupling_error_profile(&g, t, z, &q, s_grid, seed_i).map_err(|e| e.to_string())
    });
    let profiles_v: Vec<CouplingProfile> =
        out.into_iter().collect::<Result<_, _>>().map_err(InterpolateError::Worker)?;
    let mut argmins: Vec<f64> = profiles_v.iter().map(|p| p.argmin_s).collect();
    argmins.sort_by(|a, b| a.total_cmp(b));
    let k = argmins.len();
    let median_argmin = if k % 2 == 1 {
        argmins[k / 2]
    } else {
        0.5 * (argmins[k / 2 - 1] + argmins[k / 2])
    };
    Ok(ArgminEnsemble {
        n,
        d,
        t,
        profiles: profiles_v,
        median_argmin,
        predicted_s: optimal_s(d, t, n),
    })
}
