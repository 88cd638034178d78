//! Switching-based discrete derivatives of graph functionals, the
//! first-order eigenvector perturbation they compose with, and the
//! variance-decomposition diagnostics built on both.

use std::sync::Arc;

use rand::seq::index::sample as index_sample;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec;
use crate::graph::{apply_switching, list_switchable_pairs, GraphError, RegularGraph};
use crate::rng::{derive_stream, rng_from_seed};
use crate::spectral::{
    degeneracy_tol, full_eigensystem, normalize_adjacency, second_eigenpair, SpectralError,
};
use crate::stein::{ensemble_stats, run_ensemble, Cumulants, Direction, DirectionSpec,
                   SteinError};

/// Frozen constant for the normalization check |Var - 1| <= C/d.
pub const VARIANCE_C: f64 = 2.0;

#[derive(Debug, Error)]
pub enum MalliavinError {
    #[error("second eigenvalue is degenerate; derivative undefined")]
    Degenerate,
    #[error("vertices must differ")]
    EqualVertices,
    #[error("worker failed: {0}")]
    Worker(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Stein(#[from] SteinError),
}

/// A pure functional of a graph, named for reporting.
#[derive(Clone)]
pub struct GraphFunctional {
    pub name: String,
    eval: Arc<dyn Fn(&RegularGraph) -> f64 + Send + Sync>,
}

impl GraphFunctional {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(&RegularGraph) -> f64 + Send + Sync + 'static,
    ) -> Self {
        GraphFunctional { name: name.into(), eval: Arc::new(f) }
    }

    pub fn constant(c: f64) -> Self {
        GraphFunctional::new(format!("const({c})"), move |_| c)
    }

    /// 1 when the (undirected) edge is present.
    pub fn edge_indicator(i: u32, j: u32) -> Self {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        GraphFunctional::new(format!("edge({a},{b})"), move |g| {
            if g.has_edge(a, b) {
                1.0
            } else {
                0.0
            }
        })
    }

    /// alpha F + beta G as one functional.
    pub fn combine(alpha: f64, f: &GraphFunctional, beta: f64, g: &GraphFunctional) -> Self {
        let (fe, ge) = (f.eval.clone(), g.eval.clone());
        GraphFunctional::new(
            format!("{}*{} + {}*{}", alpha, f.name, beta, g.name),
            move |graph| alpha * fe(graph) + beta * ge(graph),
        )
    }

    pub fn value(&self, g: &RegularGraph) -> f64 {
        (self.eval)(g)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DerivativeRecord {
    pub edge: (u32, u32),
    pub functional: String,
    /// bare sum of switch differences (Def-4.2 style, epsilon absorbed)
    pub value: f64,
    /// same quantity averaged over the valid switchings
    pub averaged: f64,
    pub switch_count: usize,
}

/// D_e F = sum over valid switchings s at e of F(g^s) - F(g).
pub fn malliavin_derivative(
    g: &RegularGraph,
    e: (u32, u32),
    f: &GraphFunctional,
) -> Result<DerivativeRecord, MalliavinError> {
    let switchings = list_switchable_pairs(g, e)?;
    let base = f.value(g);
    let mut value = 0.0;
    for s in &switchings {
        let switched = apply_switching(g, s)?;
        value += f.value(&switched) - base;
    }
    let switch_count = switchings.len();
    let averaged = if switch_count > 0 { value / switch_count as f64 } else { 0.0 };
    Ok(DerivativeRecord {
        edge: e,
        functional: f.name.clone(),
        value,
        averaged,
        switch_count,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerturbationFormula {
    /// standard first-order theory (passes finite-difference checks)
    Standard,
    /// the displayed -((u2)_i e_j + (u2)_j e_i) / lambda2 variant, kept
    /// for comparison; fails finite-difference validation generically
    Displayed,
}

struct SpectralContext {
    values: Vec<f64>,
    vectors: Vec<Vec<f64>>,
    lambda2: f64,
    u2: Vec<f64>,
    sqrt_d: f64,
}

fn spectral_context(g: &RegularGraph) -> Result<SpectralContext, MalliavinError> {
    let h = normalize_adjacency(g);
    let sys = full_eigensystem(&h)?;
    let tol = degeneracy_tol(g.d());
    if sys.values.len() < 3
        || sys.values[0] - sys.values[1] < tol
        || sys.values[1] - sys.values[2] < tol
    {
        return Err(MalliavinError::Degenerate);
    }
    let lambda2 = sys.values[1];
    let u2 = sys.vectors[1].clone();
    Ok(SpectralContext {
        values: sys.values,
        vectors: sys.vectors,
        lambda2,
        u2,
        sqrt_d: (g.d() as f64).sqrt(),
    })
}

fn perturbation_from_context(
    ctx: &SpectralContext,
    i: usize,
    j: usize,
    formula: PerturbationFormula,
) -> Vec<f64> {
    let n = ctx.u2.len();
    match formula {
        PerturbationFormula::Standard => {
            let mut out = vec![0.0; n];
            for (k, (lambda, uk)) in ctx.values.iter().zip(&ctx.vectors).enumerate() {
                if k == 1 {
                    continue;
                }
                let num = uk[i] * ctx.u2[j] + uk[j] * ctx.u2[i];
                let coeff = num / (ctx.sqrt_d * (ctx.lambda2 - lambda));
                for (o, v) in out.iter_mut().zip(uk) {
                    *o += coeff * v;
                }
            }
            out
        }
        PerturbationFormula::Displayed => {
            let mut out = vec![0.0; n];
            out[j] -= ctx.u2[i] / ctx.lambda2;
            out[i] -= ctx.u2[j] / ctx.lambda2;
            out
        }
    }
}

/// du2/dA_ij by first-order perturbation of H = A/sqrt(d).
pub fn eigvec_perturbation(
    g: &RegularGraph,
    i: u32,
    j: u32,
) -> Result<Vec<f64>, MalliavinError> {
    eigvec_perturbation_with(g, i, j, PerturbationFormula::Standard)
}

pub fn eigvec_perturbation_with(
    g: &RegularGraph,
    i: u32,
    j: u32,
    formula: PerturbationFormula,
) -> Result<Vec<f64>, MalliavinError> {
    if i == j {
        return Err(MalliavinError::EqualVertices);
    }
    let ctx = spectral_context(g)?;
    Ok(perturbation_from_context(&ctx, i as usize, j as usize, formula))
}

/// X2 = sqrt(n) <q, u2> with u2's sign aligned to a reference vector
/// (derivatives need a consistent branch, not the randomized sign).
fn x2_aligned(g: &RegularGraph, q: &[f64], reference: &[f64]) -> Result<f64, MalliavinError> {
    let pair = second_eigenpair(g, 0)?;
    if pair.degenerate {
        return Err(MalliavinError::Degenerate);
    }
    let align: f64 = pair.u2.iter().zip(reference).map(|(a, b)| a * b).sum();
    let sign = if align < 0.0 { -1.0 } else { 1.0 };
    let dot: f64 = q.iter().zip(&pair.u2).map(|(a, b)| a * b).sum();
    Ok(sign * (g.n() as f64).sqrt() * dot)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeDerivative {
    pub edge: (u32, u32),
    pub perturbative: f64,
    /// filled only for the cross-checked subset
    pub exact: Option<f64>,
    pub switch_count: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnergyReport {
    pub n: usize,
    pub d: usize,
    /// sum over edges of the squared perturbative derivative
    pub energy: f64,
    pub edges: Vec<EdgeDerivative>,
    pub checked: usize,
    pub max_relative_deviation: f64,
}

/// ||D X2||^2: per-edge switching derivatives of the overlap, first-order
/// in the four entry changes of each switching, with an exact-recompute
/// cross-check on up to 20 seeded edges.
pub fn overlap_derivative_energy(
    g: &RegularGraph,
    q: &Direction,
    seed: u64,
) -> Result<EnergyReport, MalliavinError> {
    let n = g.n();
    let ctx = spectral_context(g)?;
    // <q, du2/dA_ab> = w_a (u2)_b + w_b (u2)_a with
    // w = sum_{k != 2} <q,u_k> / (sqrt(d) (l2 - l_k)) u_k evaluated
    // coordinatewise; precomputing w makes each entry change O(1).
    let mut w = vec![0.0; n];
    for (k, (lambda, uk)) in ctx.values.iter().zip(&ctx.vectors).enumerate() {
        if k == 1 {
            continue;
        }
        let qk: f64 = q.coords.iter().zip(uk).map(|(a, b)| a * b).sum();
        let coeff = qk / (ctx.sqrt_d * (ctx.lambda2 - lambda));
        for (wi, v) in w.iter_mut().zip(uk) {
            *wi += coeff * v;
        }
    }
    let sqrt_n = (n as f64).sqrt();
    let pair_term = |a: usize, b: usize| w[a] * ctx.u2[b] + w[b] * ctx.u2[a];

    let edges: Vec<(u32, u32)> = g.edges().to_vec();
    let mut check_set = vec![false; edges.len()];
    let mut rng = rng_from_seed(derive_stream(seed, 0xc4ec));
    let picks = index_sample(&mut rng, edges.len(), edges.len().min(20));
    for idx in picks {
        check_set[idx] = true;
    }

    let rows: Vec<Result<EdgeDerivative, String>> = exec::map_indexed(edges.len(), |ei| {
        let e = edges[ei];
        let switchings = list_switchable_pairs(g, e).map_err(|er| er.to_string())?;
        let mut pert = 0.0;
        for s in &switchings {
            let (i, j) = s.first;
            let (k, l) = s.second;
            let [(a1, b1), (a2, b2)] = s.replacements();
            pert += pair_term(a1 as usize, b1 as usize)
                + pair_term(a2 as usize, b2 as usize)
                - pair_term(i as usize, j as usize)
                - pair_term(k as usize, l as usize);
        }
        let pert = sqrt_n * pert;
        let exact = if check_set[ei] && !switchings.is_empty() {
            let base =
                x2_aligned(g, &q.coords, &ctx.u2).map_err(|er| er.to_string())?;
            let mut acc = 0.0;
            for s in &switchings {
                let switched = apply_switching(g, s).map_err(|er| er.to_string())?;
                let xs = x2_aligned(&switched, &q.coords, &ctx.u2)
                    .map_err(|er| er.to_string())?;
                acc += xs - base;
            }
            Some(acc)
        } else if check_set[ei] {
            Some(0.0)
        } else {
            None
        };
        Ok(EdgeDerivative { edge: e, perturbative: pert, exact, switch_count: switchings.len() })
    });
    let rows: Vec<EdgeDerivative> =
        rows.into_iter().collect::<Result<_, _>>().map_err(MalliavinError::Worker)?;

    let energy: f64 = rows.iter().map(|r| r.perturbative * r.perturbative).sum();
    let mut max_rel = 0.0f64;
    let mut checked = 0;
    for r in &rows {
        if let Some(exact) = r.exact {
            checked += 1;
            let scale = exact.abs().max(1e-12);
            max_rel = max_rel.max((r.perturbative - exact).abs() / scale);
        }
    }
    Ok(EnergyReport {
        n,
        d: g.d(),
        energy,
        edges: rows,
        checked,
        max_relative_deviation: max_rel,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VarianceReport {
    pub n: usize,
    pub d: usize,
    pub m: usize,
    pub variance: f64,
    pub cumulants: Cumulants,
    /// | (1 + kappa2) - variance |, an estimator identity
    pub reconstruction_gap: f64,
    /// the frozen C/d envelope and whether |Var - 1| sits inside it
    pub c_over_d: f64,
    pub within_bound: bool,
    /// kappa2 of the sigma-hat-normalized stream (identically 0)
    pub normalized_kappa2: f64,
}

/// Variance-normalization diagnostics on an overlap ensemble.
pub fn variance_decomposition_check(
    n: usize,
    d: usize,
    m: usize,
    q_spec: &DirectionSpec,
    base_seed: u64,
) -> Result<VarianceReport, MalliavinError> {
    if m < 500 {
        return Err(SteinError::SampleTooSmall { got: m, want: 500 }.into());
    }
    let ens = run_ensemble(n, d, m, q_spec, base_seed)?;
    let variance = ens.stats.cumulants.variance;
    let kappa2 = ens.stats.cumulants.kappa2;
    let sd = variance.sqrt();
    let normalized: Vec<f64> = ens.samples.iter().map(|x| x / sd).collect();
    let norm_stats = ensemble_stats(&normalized, derive_stream(base_seed, 0x0a))?;
    let c_over_d = VARIANCE_C / d as f64;
    Ok(VarianceReport {
        n,
        d,
        m,
        variance,
        reconstruction_gap: ((1.0 + kappa2) - variance).abs(),
        c_over_d,
        within_bound: (variance - 1.0).abs() <= c_over_d,
        normalized_kappa2: norm_stats.cumulants.kappa2,
        cumulants: ens.stats.cumulants,
    })
}
