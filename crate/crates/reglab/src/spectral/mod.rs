//! Normalized adjacency matrices, symmetric eigensolvers, Gaussian
//! ensembles, and the semicircle Stieltjes transform.

mod dense;
mod goe;
mod lanczos;
mod special;

pub use dense::{effective_dense_limit, full_eigensystem, full_eigensystem_with_limit, DENSE_LIMIT};
pub use goe::{projected_offdiag_variance, sample_constrained_goe};
pub use lanczos::{second_eigenpair, topk_eigenpairs, topk_eigenpairs_deflated, SecondEigenpair};
pub use special::{m_sc, normal_cdf, normal_pdf, normal_quantile};

use num_complex::Complex64;
use thiserror::Error;

use crate::graph::RegularGraph;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("eigensolver failed to converge ({0})")]
    NoConvergence(String),
    #[error("dimension {n} exceeds dense limit {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("second eigenvalue is degenerate")]
    DegenerateEigenvalue,
    #[error("m_sc branch undefined on the real axis inside [-2, 2] (E={0})")]
    BranchUndefined(f64),
    #[error("k={k} out of range for n={n}")]
    BadRank { k: usize, n: usize },
}

/// Real symmetric matrix: dense storage or a scaled graph adjacency.
#[derive(Debug, Clone)]
pub struct SymMatrix {
    n: usize,
    storage: Storage,
}

#[derive(Debug, Clone)]
enum Storage {
    /// Row-major n*n, symmetric.
    Dense(Vec<f64>),
    /// scale * adjacency given by per-vertex neighbor lists.
    Sparse { neighbors: Vec<Vec<u32>>, scale: f64 },
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix { n, storage: Storage::Dense(vec![0.0; n * n]) }
    }

    /// Dense symmetric matrix from row-major data (caller guarantees symmetry).
    pub fn from_dense(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n);
        SymMatrix { n, storage: Storage::Dense(data) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse { .. })
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        match &self.storage {
            Storage::Dense(d) => d[i * self.n + j],
            Storage::Sparse { neighbors, scale } => {
                if neighbors[i].binary_search(&(j as u32)).is_ok() {
                    *scale
                } else {
                    0.0
                }
            }
        }
    }

    /// y = H x
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        match &self.storage {
            Storage::Dense(d) => {
                for (i, yi) in y.iter_mut().enumerate() {
                    let row = &d[i * self.n..(i + 1) * self.n];
                    *yi = row.iter().zip(x).map(|(a, b)| a * b).sum();
                }
            }
            Storage::Sparse { neighbors, scale } => {
                for (i, yi) in y.iter_mut().enumerate() {
                    *yi = scale * neighbors[i].iter().map(|&j| x[j as usize]).sum::<f64>();
                }
            }
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec(x, &mut y);
        y
    }

    /// y = (H - z) x for complex x, as (re, im) slices.
    pub fn shifted_matvec(
        &self,
        z: Complex64,
        xr: &[f64],
        xi: &[f64],
        yr: &mut [f64],
        yi: &mut [f64],
    ) {
        self.matvec(xr, yr);
        self.matvec(xi, yi);
        for k in 0..self.n {
            let (hr, hi) = (yr[k], yi[k]);
            yr[k] = hr - (z.re * xr[k] - z.im * xi[k]);
            yi[k] = hi - (z.re * xi[k] + z.im * xr[k]);
        }
    }

    /// a*A + b*B, densified.
    pub fn linear_combination(a: f64, ma: &SymMatrix, b: f64, mb: &SymMatrix) -> SymMatrix {
        assert_eq!(ma.n, mb.n);
        let n = ma.n;
        let mut data = vec![0.0; n * n];
        ma.add_scaled_into(a, &mut data);
        mb.add_scaled_into(b, &mut data);
        SymMatrix { n, storage: Storage::Dense(data) }
    }

    fn add_scaled_into(&self, c: f64, data: &mut [f64]) {
        match &self.storage {
            Storage::Dense(d) => {
                for (o, v) in data.iter_mut().zip(d) {
                    *o += c * v;
                }
            }
            Storage::Sparse { neighbors, scale } => {
                let cs = c * scale;
                for (i, nb) in neighbors.iter().enumerate() {
                    for &j in nb {
                        data[i * self.n + j as usize] += cs;
                    }
                }
            }
        }
    }

    pub fn to_nalgebra(&self) -> nalgebra::DMatrix<f64> {
        let n = self.n;
        match &self.storage {
            Storage::Dense(d) => nalgebra::DMatrix::from_row_slice(n, n, d),
            Storage::Sparse { .. } => {
                nalgebra::DMatrix::from_fn(n, n, |i, j| self.entry(i, j))
            }
        }
    }

    /// Frobenius norm.
    pub fn norm_hs(&self) -> f64 {
        match &self.storage {
            Storage::Dense(d) => d.iter().map(|x| x * x).sum::<f64>().sqrt(),
            Storage::Sparse { neighbors, scale } => {
                let cnt: usize = neighbors.iter().map(|nb| nb.len()).sum();
                scale.abs() * (cnt as f64).sqrt()
            }
        }
    }
}

/// H~ = A / sqrt(d); sparse storage, row sums all sqrt(d).
pub fn normalize_adjacency(g: &RegularGraph) -> SymMatrix {
    let n = g.n();
    let scale = 1.0 / (g.d() as f64).sqrt();
    let neighbors = (0..n as u32).map(|v| g.neighbors(v).to_vec()).collect();
    SymMatrix { n, storage: Storage::Sparse { neighbors, scale } }
}

/// Spectral parameter z = E + i eta.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexEnergy {
    pub e: f64,
    pub eta: f64,
}

impl ComplexEnergy {
    pub fn new(e: f64, eta: f64) -> Self {
        assert!(eta >= 0.0, "eta must be nonnegative");
        ComplexEnergy { e, eta }
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.e, self.eta)
    }

    /// Edge regime: |E-2| <= n^(-2/3+eps) and n^(-2/3) <= eta <= 1.
    pub fn edge_regime(&self, n: usize, eps: f64) -> bool {
        let nf = n as f64;
        (self.e - 2.0).abs() <= nf.powf(-2.0 / 3.0 + eps)
            && self.eta >= nf.powf(-2.0 / 3.0)
            && self.eta <= 1.0
    }
}

/// Default epsilon for edge-regime classification.
pub const EDGE_EPSILON: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenKind {
    Full,
    Partial(usize),
}

/// Eigenvalues in descending order with orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    /// vectors[i] pairs with values[i]
    pub vectors: Vec<Vec<f64>>,
    pub kind: EigenKind,
    /// flag at i when |values[i] - values[i+1]| < degeneracy tolerance
    pub gap_flags: Vec<bool>,
    /// matrix-vector products spent (0 for the dense path)
    pub matvecs: usize,
}

impl EigenSystem {
    /// Max residual ||H v - lambda v|| over returned pairs.
    pub fn max_residual(&self, h: &SymMatrix) -> f64 {
        let mut worst: f64 = 0.0;
        for (lam, v) in self.values.iter().zip(&self.vectors) {
            let hv = h.apply(v);
            let r = hv
                .iter()
                .zip(v)
                .map(|(a, b)| (a - lam * b).powi(2))
                .sum::<f64>()
                .sqrt();
            worst = worst.max(r);
        }
        worst
    }

    /// Max deviation |<v_i, v_j> - delta_ij|.
    pub fn max_orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.vectors.len() {
            for j in i..self.vectors.len() {
                let dot: f64 = self.vectors[i].iter().zip(&self.vectors[j]).map(|(a, b)| a * b).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

pub(crate) fn gap_flags(values: &[f64], tol: f64) -> Vec<bool> {
    let mut flags = vec![false; values.len()];
    for i in 0..values.len().saturating_sub(1) {
        if (values[i] - values[i + 1]).abs() < tol {
            flags[i] = true;
            flags[i + 1] = true;
        }
    }
    flags
}

/// Degeneracy tolerance for graph matrices: 1e-8 * sqrt(d).
pub fn degeneracy_tol(d: usize) -> f64 {
    1e-8 * (d as f64).sqrt()
}
