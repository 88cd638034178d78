//! Lanczos iteration with full reorthogonalization, Ritz-residual
//! stopping, locking, and random restarts. Restarts recover degenerate
//! multiplicities that a single Krylov space cannot see.

use rand::Rng;

use super::{degeneracy_tol, gap_flags, normalize_adjacency, EigenKind, EigenSystem, SpectralError, SymMatrix};
use crate::graph::RegularGraph;
use crate::rng::{derive_stream, rng_from_seed};

const MAX_BASIS: usize = 450;
const CHECK_EVERY: usize = 10;

struct LanczosOpts<'a> {
    tol: f64,
    max_matvecs: usize,
    /// unit vectors projected out of every Krylov vector
    deflate: &'a [Vec<f64>],
    seed: u64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Two rounds of modified Gram-Schmidt against every vector in `sets`.
fn orthogonalize(v: &mut [f64], sets: &[&[Vec<f64>]]) {
    for _ in 0..2 {
        for set in sets {
            for u in set.iter() {
                let c = dot(v, u);
                axpy(v, -c, u);
            }
        }
    }
}

/// Eigen-decomposition of the symmetric tridiagonal (alphas, betas);
/// returns (values, dense eigenvector matrix column-major j x j).
fn tridiag_eig(alphas: &[f64], betas: &[f64]) -> (Vec<f64>, nalgebra::DMatrix<f64>) {
    let j = alphas.len();
    let mut t = nalgebra::DMatrix::zeros(j, j);
    for i in 0..j {
        t[(i, i)] = alphas[i];
        if i + 1 < j {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = nalgebra::SymmetricEigen::new(t);
    let mut order: Vec<usize> = (0..j).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = nalgebra::DMatrix::zeros(j, j);
    for (c, &i) in order.iter().enumerate() {
        vecs.set_column(c, &eig.eigenvectors.column(i));
    }
    (values, vecs)
}

fn lanczos(
    h: &SymMatrix,
    k: usize,
    opts: &LanczosOpts,
) -> Result<(Vec<f64>, Vec<Vec<f64>>, usize), SpectralError> {
    let n = h.n();
    let n_eff = n - opts.deflate.len();
    let k = k.min(n_eff);
    let mut locked_vals: Vec<f64> = Vec::new();
    let mut locked_vecs: Vec<Vec<f64>> = Vec::new();
    let mut matvecs = 0usize;

    for round in 0..(4 * k as u64 + 8) {
        if locked_vals.len() >= k {
            break;
        }
        let mut rng = rng_from_seed(derive_stream(opts.seed, 0x4c41_4e43 + round));
        let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0f64)).collect();
        orthogonalize(&mut v, &[opts.deflate, &locked_vecs]);
        let nv = norm(&v);
        if nv < 1e-10 {
            break; // space exhausted
        }
        for x in &mut v {
            *x /= nv;
        }

        let mut basis: Vec<Vec<f64>> = vec![v];
        let mut alphas: Vec<f64> = Vec::new();
        let mut betas: Vec<f64> = Vec::new();
        let needed = k - locked_vals.len();

        loop {
            let vj = basis.last().unwrap().clone();
            let mut w = h.apply(&vj);
            matvecs += 1;
            if matvecs > opts.max_matvecs {
                return Err(SpectralError::NoConvergence(format!(
                    "matvec budget {} exhausted with {} of {} pairs locked",
                    opts.max_matvecs,
                    locked_vals.len(),
                    k
                )));
            }
            let alpha = dot(&w, &vj);
            alphas.push(alpha);
            orthogonalize(&mut w, &[opts.deflate, &locked_vecs, &basis]);
            let beta = norm(&w);
            let j = alphas.len();
            let exhausted = beta < 1e-13 * alphas[0].abs().max(1.0);
            let at_cap = j == MAX_BASIS.min(n_eff - locked_vals.len());

            if exhausted || at_cap || j % CHECK_EVERY == 0 {
                let (tvals, tvecs) = tridiag_eig(&alphas, &betas);
                let mut converged = Vec::new();
                for i in 0..needed.min(j) {
                    let resid = if exhausted { 0.0 } else { (beta * tvecs[(j - 1, i)]).abs() };
                    if resid <= opts.tol * tvals[i].abs().max(1.0) {
                        converged.push(i);
                    } else {
                        break; // keep top-ordering intact
                    }
                }
                let done = converged.len() == needed.min(j);
                if done || exhausted || at_cap {
                    for &i in &converged {
                        let mut ritz = vec![0.0; n];
                        for (b, vb) in basis.iter().enumerate() {
                            axpy(&mut ritz, tvecs[(b, i)], vb);
                        }
                        orthogonalize(&mut ritz, &[&locked_vecs]);
                        let nr = norm(&ritz);
                        if nr > 1e-8 {
                            for x in &mut ritz {
                                *x /= nr;
                            }
                            locked_vals.push(tvals[i]);
                            locked_vecs.push(ritz);
                        }
                    }
                    break; // restart (fresh random vector) for the rest
                }
            }
            if exhausted {
                break;
            }
            betas.push(beta);
            let next: Vec<f64> = w.iter().map(|x| x / beta).collect();
            basis.push(next);
        }
    }

    if locked_vals.len() < k {
        return Err(SpectralError::NoConvergence(format!(
            "locked only {} of {} pairs",
            locked_vals.len(),
            k
        )));
    }
    let mut order: Vec<usize> = (0..locked_vals.len()).collect();
    order.sort_by(|&a, &b| locked_vals[b].partial_cmp(&locked_vals[a]).unwrap());
    order.truncate(k);
    let values: Vec<f64> = order.iter().map(|&i| locked_vals[i]).collect();
    let vectors: Vec<Vec<f64>> = order.iter().map(|&i| locked_vecs[i].clone()).collect();
    Ok((values, vectors, matvecs))
}

/// Top-k eigenpairs by algebraic value via restarted Lanczos.
pub fn topk_eigenpairs(h: &SymMatrix, k: usize, tol: f64) -> Result<EigenSystem, SpectralError> {
    topk_eigenpairs_deflated(h, k, tol, &[], 0)
}

/// Same, with a deflation subspace removed from the iteration; every
/// returned vector is orthogonal to `deflate`.
pub fn topk_eigenpairs_deflated(
    h: &SymMatrix,
    k: usize,
    tol: f64,
    deflate: &[Vec<f64>],
    seed: u64,
) -> Result<EigenSystem, SpectralError> {
    let n = h.n();
    if k == 0 || k > n.min(32) {
        return Err(SpectralError::BadRank { k, n });
    }
    let opts = LanczosOpts { tol, max_matvecs: (40 * n).max(8000), deflate, seed };
    let (values, vectors, matvecs) = lanczos(h, k, &opts)?;
    let gtol = 1e-8 * values.first().map(|v| v.abs().max(1.0)).unwrap_or(1.0);
    let flags = gap_flags(&values, gtol);
    Ok(EigenSystem { values, vectors, kind: EigenKind::Partial(k), gap_flags: flags, matvecs })
}

/// Second eigenpair of the normalized adjacency matrix.
#[derive(Debug, Clone)]
pub struct SecondEigenpair {
    pub lambda2: f64,
    pub lambda3: f64,
    pub u2: Vec<f64>,
    pub degenerate: bool,
}

/// lambda_2 and its eigenvector for H~ = A/sqrt(d), with the overall sign
/// multiplied by an independent uniform +-1 drawn from `seed`. The Perron
/// direction e is deflated exactly, so <u2, e> is zero to rounding.
pub fn second_eigenpair(g: &RegularGraph, seed: u64) -> Result<SecondEigenpair, SpectralError> {
    let n = g.n();
    let h = normalize_adjacency(g);
    let ehat = vec![1.0 / (n as f64).sqrt(); n];
    let (lambda2, lambda3, mut u2) = if n <= 128 {
        let eig = super::full_eigensystem(&h)?;
        let mut u2 = eig.vectors[1].clone();
        // e is an exact eigenvector; projecting it out only removes
        // rounding noise from the dense solve.
        let c = dot(&u2, &ehat);
        axpy(&mut u2, -c, &ehat);
        let nn = norm(&u2);
        for x in &mut u2 {
            *x /= nn;
        }
        (eig.values[1], eig.values[2], u2)
    } else {
        let eig = topk_eigenpairs_deflated(&h, 2, 1e-11, std::slice::from_ref(&ehat), seed)?;
        (eig.values[0], eig.values[1], eig.vectors[0].clone())
    };
    let degenerate = (lambda2 - lambda3).abs() < degeneracy_tol(g.d());
    let mut rng = rng_from_seed(derive_stream(seed, 0x5349_474e));
    if rng.random::<bool>() {
        for x in &mut u2 {
            *x = -*x;
        }
    }
    Ok(SecondEigenpair { lambda2, lambda3, u2, degenerate })
}
