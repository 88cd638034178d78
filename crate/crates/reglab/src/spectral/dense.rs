//! Dense reference eigensolver (tridiagonalization + implicit QL via
//! nalgebra's symmetric eigendecomposition).

use super::{gap_flags, EigenKind, EigenSystem, SpectralError, SymMatrix};

/// Default cutoff for the dense path; override per call or via the
/// harness's LAB_DENSE_LIMIT.
pub const DENSE_LIMIT: usize = 4096;

/// DENSE_LIMIT unless the LAB_DENSE_LIMIT environment variable overrides
/// it (read once per process).
pub fn effective_dense_limit() -> usize {
    static LIMIT: std::sync::OnceLock<usize> = std::sync::OnceLock::new();
    *LIMIT.get_or_init(|| {
        std::env::var("LAB_DENSE_LIMIT")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(DENSE_LIMIT)
    })
}

pub fn full_eigensystem(h: &SymMatrix) -> Result<EigenSystem, SpectralError> {
    full_eigensystem_with_limit(h, effective_dense_limit())
}

pub fn full_eigensystem_with_limit(h: &SymMatrix, limit: usize) -> Result<EigenSystem, SpectralError> {
    let n = h.n();
    if n > limit {
        return Err(SpectralError::TooLarge { n, limit });
    }
    let m = h.to_nalgebra();
    let eig = nalgebra::SymmetricEigen::try_new(m, 1e-15, 0)
        .ok_or_else(|| SpectralError::NoConvergence("dense QL iteration cap".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
        .collect();
    let tol = 1e-8 * values.first().map(|v| v.abs().max(1.0)).unwrap_or(1.0);
    let flags = gap_flags(&values, tol);
    Ok(EigenSystem { values, vectors, kind: EigenKind::Full, gap_flags: flags, matvecs: 0 })
}
