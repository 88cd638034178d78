//! Empirical distribution functionals: exact KS statistic against the
//! standard normal, cumulants with bootstrap confidence intervals, Stein
//! discrepancies over a fixed test-function family, and log-log fits.

use std::collections::BTreeMap;

use rand::Rng;

use super::SteinError;
use crate::rng::{derive_stream, rng_from_seed};
use crate::spectral::{normal_cdf, normal_pdf};

/// Exact sup distance between the empirical CDF and Phi:
/// max over the sorted sample of |i/M - Phi(x_i)| and |(i-1)/M - Phi(x_i)|.
pub fn ks_statistic(samples: &[f64]) -> Result<f64, SteinError> {
    if samples.is_empty() {
        return Err(SteinError::EmptySample);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = sorted.len() as f64;
    let mut sup: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let phi = normal_cdf(x);
        let hi = ((i + 1) as f64 / m - phi).abs();
        let lo = (i as f64 / m - phi).abs();
        sup = sup.max(hi).max(lo);
    }
    Ok(sup)
}

/// 99% quantile constant of the Kolmogorov distribution: KS of an exact
/// normal sample is below KOLMOGOROV_99 / sqrt(M) with probability 0.99.
pub const KOLMOGOROV_99: f64 = 1.63;

#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Plug-in cumulants of a sample: raw variance, kappa2 = var - 1, and the
/// standardized third and fourth cumulants. Bootstrap percentile CIs with
/// 1000 seeded resamples.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct Cumulants {
    pub variance: f64,
    pub kappa2: f64,
    pub kappa3: f64,
    pub kappa4: f64,
    pub variance_ci: Interval,
    pub kappa2_ci: Interval,
    pub kappa3_ci: Interval,
    pub kappa4_ci: Interval,
}

const BOOTSTRAP_RESAMPLES: usize = 1000;

fn point_cumulants(samples: &[f64]) -> Option<(f64, f64, f64, f64)> {
    let m = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / m;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / m;
    if var <= 0.0 {
        return None;
    }
    let sd = var.sqrt();
    let mut m3 = 0.0;
    let mut m4 = 0.0;
    for &x in samples {
        let s = (x - mean) / sd;
        let s2 = s * s;
        m3 += s2 * s;
        m4 += s2 * s2;
    }
    m3 /= m;
    m4 /= m;
    Some((var, var - 1.0, m3, m4 - 3.0))
}

pub fn cumulants(samples: &[f64], seed: u64) -> Result<Cumulants, SteinError> {
    if samples.len() < 100 {
        return Err(SteinError::SampleTooSmall { got: samples.len(), want: 100 });
    }
    let (variance, kappa2, kappa3, kappa4) =
        point_cumulants(samples).ok_or(SteinError::DegenerateSample)?;
    let mut rng = rng_from_seed(derive_stream(seed, 0xb007));
    let m = samples.len();
    let mut boots: Vec<(f64, f64, f64, f64)> = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
    let mut resample = vec![0.0; m];
    for _ in 0..BOOTSTRAP_RESAMPLES {
        for slot in resample.iter_mut() {
            *slot = samples[rng.random_range(0..m)];
        }
        if let Some(c) = point_cumulants(&resample) {
            boots.push(c);
        }
    }
    let ci = |pick: fn(&(f64, f64, f64, f64)) -> f64| -> Interval {
        let mut vals: Vec<f64> = boots.iter().map(pick).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let lo_idx = (vals.len() as f64 * 0.025) as usize;
        let hi_idx = ((vals.len() as f64 * 0.975) as usize).min(vals.len() - 1);
        Interval { lo: vals[lo_idx], hi: vals[hi_idx] }
    };
    Ok(Cumulants {
        variance,
        kappa2,
        kappa3,
        kappa4,
        variance_ci: ci(|c| c.0),
        kappa2_ci: ci(|c| c.1),
        kappa3_ci: ci(|c| c.2),
        kappa4_ci: ci(|c| c.3),
    })
}

/// Exact standard-normal expectation of min(Z^2, 9):
/// 1 - 6 phi(3) + 16 (1 - Phi(3)).
fn square_capped_mean() -> f64 {
    1.0 - 6.0 * normal_pdf(3.0) + 16.0 * (1.0 - normal_cdf(3.0))
}

/// Built-in Stein test functions with exact Gaussian means.
pub const STEIN_FAMILY: [&str; 3] = ["cos", "clipped_id", "square_capped"];

fn eval_test_function(name: &str, x: f64) -> Option<f64> {
    match name {
        "cos" => Some(x.cos()),
        "clipped_id" => Some(if x.abs() <= 3.0 { x } else { 3.0 * x.signum() }),
        "square_capped" => Some((x * x).min(9.0)),
        _ => None,
    }
}

fn gaussian_mean(name: &str) -> Option<f64> {
    match name {
        "cos" => Some((-0.5f64).exp()),
        "clipped_id" => Some(0.0),
        "square_capped" => Some(square_capped_mean()),
        _ => None,
    }
}

/// |mean h(X) - E h(Z)| per named test function.
pub fn stein_discrepancy(
    samples: &[f64],
    family: &[&str],
) -> Result<BTreeMap<String, f64>, SteinError> {
    if family.is_empty() {
        return Err(SteinError::EmptySample);
    }
    let m = samples.len() as f64;
    let mut out = BTreeMap::new();
    for &name in family {
        let target =
            gaussian_mean(name).ok_or_else(|| SteinError::UnknownTestFunction(name.into()))?;
        let mean = samples
            .iter()
            .map(|&x| eval_test_function(name, x).unwrap())
            .sum::<f64>()
            / m;
        out.insert(name.to_string(), (mean - target).abs());
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
}

/// Ordinary least squares on (log x, log y).
pub fn scaling_fit(points: &[(f64, f64)]) -> Result<LogLogFit, SteinError> {
    if points.len() < 3 {
        return Err(SteinError::DegenerateFit("fewer than 3 points".into()));
    }
    if points.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        return Err(SteinError::DegenerateFit("nonpositive coordinate".into()));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx = logs.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    if sxx < 1e-14 {
        return Err(SteinError::DegenerateFit("x values collinear".into()));
    }
    let sxy = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = logs
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let dof = (logs.len() - 2).max(1) as f64;
    let stderr = (sse / dof / sxx).sqrt();
    Ok(LogLogFit { slope, intercept, stderr })
}

/// Bootstrap CI for the fitted slope given per-point resampled y values.
pub fn slope_bootstrap_ci(
    x: &[f64],
    y_samples: &[Vec<f64>],
    seed: u64,
) -> Result<Interval, SteinError> {
    if x.len() != y_samples.len() || x.len() < 3 {
        return Err(SteinError::DegenerateFit("bad bootstrap input".into()));
    }
    let mut rng = rng_from_seed(derive_stream(seed, 0x5107e));
    let mut slopes = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
    for _ in 0..BOOTSTRAP_RESAMPLES {
        let pts: Vec<(f64, f64)> = x
            .iter()
            .zip(y_samples)
            .map(|(&xi, ys)| {
                // resample the per-cell overlap values and recompute KS
                let mut res: Vec<f64> = (0..ys.len())
                    .map(|_| ys[rng.random_range(0..ys.len())])
                    .collect();
                res.sort_by(|a, b| a.partial_cmp(b).unwrap());
                (xi, ks_statistic(&res).unwrap().max(1e-12))
            })
            .collect();
        slopes.push(scaling_fit(&pts)?.slope);
    }
    slopes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let lo = slopes[(slopes.len() as f64 * 0.025) as usize];
    let hi = slopes[((slopes.len() as f64 * 0.975) as usize).min(slopes.len() - 1)];
    Ok(Interval { lo, hi })
}
