//! Numerical laboratory for eigenvector statistics of random regular graphs.
//!
//! The crate samples uniform labeled simple d-regular graphs, computes
//! second-eigenvector overlap ensembles, resolvent local-law error
//! functionals, GOE interpolation diagnostics, switching-based discrete
//! derivatives, and Berry-Esseen style scaling fits. Everything is seeded
//! and deterministic: a run is a pure function of its configuration,
//! independent of worker count.

pub mod exec;
pub mod graph;
pub mod harness;
pub mod interpolate;
pub mod locallaw;
pub mod malliavin;
pub mod report;
pub mod rng;
pub mod spectral;
pub mod stein;
