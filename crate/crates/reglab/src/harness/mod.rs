//! Experiment configuration, dispatch, and run manifests.
//!
//! One experiment per config file, flat `key=value` lines. Every run is a
//! pure function of (spec, tool version): all randomness flows from the
//! mandatory seed, and artifacts are written atomically through .partial
//! files so interrupted runs never leave a final-looking output behind.

mod run;

pub use run::{run, RunManifest};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::report::ReportError;
use crate::stein::{DirectionKind, DirectionSpec};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("invalid spec: {0}")]
    Validation(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

impl From<ReportError> for HarnessError {
    fn from(e: ReportError) -> Self {
        match e {
            ReportError::Io(io) => HarnessError::Io(io),
            other => HarnessError::Numeric(other.to_string()),
        }
    }
}

impl HarnessError {
    /// CLI exit code: 2 validation, 3 numeric, 4 i/o.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Parse { .. } | HarnessError::Validation(_) => 2,
            HarnessError::Numeric(_) => 3,
            HarnessError::Io(_) => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Sample,
    Spectrum,
    Clt,
    Locallaw,
    Interpolate,
    Malliavin,
    Scaling,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::Sample,
        ExperimentKind::Spectrum,
        ExperimentKind::Clt,
        ExperimentKind::Locallaw,
        ExperimentKind::Interpolate,
        ExperimentKind::Malliavin,
        ExperimentKind::Scaling,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Sample => "sample",
            ExperimentKind::Spectrum => "spectrum",
            ExperimentKind::Clt => "clt",
            ExperimentKind::Locallaw => "locallaw",
            ExperimentKind::Interpolate => "interpolate",
            ExperimentKind::Malliavin => "malliavin",
            ExperimentKind::Scaling => "scaling",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown experiment `{s}`"))
    }
}

/// One fully validated experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub experiment: ExperimentKind,
    pub n_list: Vec<usize>,
    pub d_list: Vec<usize>,
    /// samples per cell
    pub m: usize,
    pub direction: DirectionSpec,
    /// spectral parameter for resolvent experiments
    pub e: f64,
    /// None means the per-cell rule eta = n^(-1/2)
    pub eta: Option<f64>,
    /// None means the per-cell rule t = n^(-1/3)
    pub t: Option<f64>,
    /// uniform coupling grid size on [0, 1]
    pub s_points: usize,
    /// histogram bins for the clt plots
    pub bins: usize,
    pub base_seed: u64,
}

impl ExperimentSpec {
    pub fn eta_for(&self, n: usize) -> f64 {
        self.eta.unwrap_or_else(|| (n as f64).powf(-0.5))
    }

    pub fn t_for(&self, n: usize) -> f64 {
        self.t.unwrap_or_else(|| (n as f64).powf(-1.0 / 3.0))
    }

    pub fn s_grid(&self) -> Vec<f64> {
        (0..self.s_points)
            .map(|i| i as f64 / (self.s_points - 1) as f64)
            .collect()
    }
}

fn parse_usize_list(v: &str) -> Result<Vec<usize>, String> {
    v.split(',')
        .map(|tok| tok.trim().parse::<usize>().map_err(|_| format!("bad count `{tok}`")))
        .collect()
}

/// Flat key=value config text, `#` comments, one experiment per file.
pub fn parse_spec(text: &str) -> Result<ExperimentSpec, HarnessError> {
    let mut experiment = None;
    let mut n_list = None;
    let mut d_list = None;
    let mut m = None;
    let mut seed = None;
    let mut direction_kind = DirectionKind::CoordinateDifference;
    let mut support = None;
    let mut project = true;
    let mut e = 2.0;
    let mut eta = None;
    let mut t = None;
    let mut s_points = 21usize;
    let mut bins = 40usize;

    let mut seen = std::collections::HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or(HarnessError::Parse {
            line,
            reason: "expected key=value".into(),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if !seen.insert(key.to_string()) {
            return Err(HarnessError::Parse { line, reason: format!("duplicate key `{key}`") });
        }
        let bad = |reason: String| HarnessError::Parse { line, reason };
        match key {
            "experiment" => experiment = Some(value.parse::<ExperimentKind>().map_err(bad)?),
            "N" => n_list = Some(parse_usize_list(value).map_err(bad)?),
            "d" => d_list = Some(parse_usize_list(value).map_err(bad)?),
            "M" => m = Some(value.parse().map_err(|_| bad(format!("bad count `{value}`")))?),
            "seed" => {
                seed = Some(value.parse().map_err(|_| bad(format!("bad seed `{value}`")))?)
            }
            "direction" => {
                direction_kind = match value {
                    "coordinate-difference" => DirectionKind::CoordinateDifference,
                    "random-orthogonal" => DirectionKind::RandomOrthogonal,
                    "d-supported" => DirectionKind::DSupported,
                    other => return Err(bad(format!("unknown direction `{other}`"))),
                }
            }
            "support" => {
                support =
                    Some(value.parse().map_err(|_| bad(format!("bad support `{value}`")))?)
            }
            "project" => {
                project = value
                    .parse()
                    .map_err(|_| bad(format!("bad boolean `{value}`")))?
            }
            "E" => e = value.parse().map_err(|_| bad(format!("bad energy `{value}`")))?,
            "eta" => {
                eta = Some(value.parse().map_err(|_| bad(format!("bad eta `{value}`")))?)
            }
            "t" => t = Some(value.parse().map_err(|_| bad(format!("bad t `{value}`")))?),
            "s_points" => {
                s_points =
                    value.parse().map_err(|_| bad(format!("bad count `{value}`")))?
            }
            "bins" => {
                bins = value.parse().map_err(|_| bad(format!("bad count `{value}`")))?
            }
            other => return Err(bad(format!("unknown key `{other}`"))),
        }
    }

    let experiment =
        experiment.ok_or_else(|| HarnessError::Validation("missing `experiment`".into()))?;
    let base_seed =
        seed.ok_or_else(|| HarnessError::Validation("missing `seed` (no wall-clock default; runs must be reproducible)".into()))?;
    let n_list = n_list.ok_or_else(|| HarnessError::Validation("missing `N`".into()))?;
    let d_list = d_list.ok_or_else(|| HarnessError::Validation("missing `d`".into()))?;
    let spec = ExperimentSpec {
        experiment,
        n_list,
        d_list,
        m: m.unwrap_or(100),
        direction: DirectionSpec { kind: direction_kind, support, project },
        e,
        eta,
        t,
        s_points,
        bins,
        base_seed,
    };
    validate(&spec)?;
    Ok(spec)
}

fn validate(spec: &ExperimentSpec) -> Result<(), HarnessError> {
    let fail = |msg: String| Err(HarnessError::Validation(msg));
    if spec.n_list.is_empty() || spec.d_list.is_empty() {
        return fail("empty N or d grid".into());
    }
    for &n in &spec.n_list {
        for &d in &spec.d_list {
            if d >= n {
                return fail(format!("degree {d} must be below N={n}"));
            }
            if n * d % 2 != 0 {
                return fail(format!("N*d must be even, got N={n}, d={d}"));
            }
        }
    }
    if spec.m == 0 {
        return fail("M must be positive".into());
    }
    if spec.s_points < 2 && spec.experiment == ExperimentKind::Interpolate {
        return fail("s_points must be at least 2".into());
    }
    if spec.bins == 0 {
        return fail("bins must be positive".into());
    }
    if let Some(eta) = spec.eta {
        if eta <= 0.0 {
            return fail("eta must be positive".into());
        }
    }
    if let Some(t) = spec.t {
        if !(0.0..=1.0).contains(&t) {
            return fail("t must lie in [0, 1]".into());
        }
    }
    Ok(())
}
