//! Degree-preserving edge switchings and the lazy switching walk.

use rand::Rng;

use super::{GraphError, RegularGraph};
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwitchVariant {
    /// {i,j},{k,l} -> {i,k},{j,l}
    Parallel,
    /// {i,j},{k,l} -> {i,l},{j,k}
    Crossed,
}

/// A candidate rewiring of two vertex-disjoint edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Switching {
    pub first: (u32, u32),
    pub second: (u32, u32),
    pub variant: SwitchVariant,
}

impl Switching {
    /// The two replacement edges, normalized to (lo, hi).
    pub fn replacements(&self) -> [(u32, u32); 2] {
        let (i, j) = self.first;
        let (k, l) = self.second;
        let (a, b) = match self.variant {
            SwitchVariant::Parallel => ((i, k), (j, l)),
            SwitchVariant::Crossed => ((i, l), (j, k)),
        };
        [norm(a), norm(b)]
    }

    /// The switching that undoes this one on the switched graph.
    pub fn inverse(&self) -> Switching {
        let [a, b] = self.replacements();
        Switching { first: a, second: b, variant: self.variant }
    }
}

fn norm((a, b): (u32, u32)) -> (u32, u32) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn disjoint(e: (u32, u32), f: (u32, u32)) -> bool {
    e.0 != f.0 && e.0 != f.1 && e.1 != f.0 && e.1 != f.1
}

/// All valid switchings with `first = e`: the partner edge must be
/// vertex-disjoint and both replacement edges absent from `g`. The two
/// variants are checked independently.
pub fn list_switchable_pairs(g: &RegularGraph, e: (u32, u32)) -> Result<Vec<Switching>, GraphError> {
    let e = norm(e);
    if !g.has_edge(e.0, e.1) {
        return Err(GraphError::EdgeNotPresent(e.0, e.1));
    }
    let mut out = Vec::new();
    for &f in g.edges() {
        if f == e || !disjoint(e, f) {
            continue;
        }
        for variant in [SwitchVariant::Parallel, SwitchVariant::Crossed] {
            let s = Switching { first: e, second: f, variant };
            let [a, b] = s.replacements();
            if !g.has_edge(a.0, a.1) && !g.has_edge(b.0, b.1) {
                out.push(s);
            }
        }
    }
    Ok(out)
}

/// Apply a switching, returning the rewired graph; the input is untouched.
pub fn apply_switching(g: &RegularGraph, s: &Switching) -> Result<RegularGraph, GraphError> {
    let first = norm(s.first);
    let second = norm(s.second);
    if !g.has_edge(first.0, first.1) {
        return Err(GraphError::InvalidSwitching(format!("edge {:?} missing", first)));
    }
    if !g.has_edge(second.0, second.1) {
        return Err(GraphError::InvalidSwitching(format!("edge {:?} missing", second)));
    }
    if !disjoint(first, second) {
        return Err(GraphError::InvalidSwitching(format!(
            "edges {:?} and {:?} share a vertex",
            first, second
        )));
    }
    let [a, b] = s.replacements();
    if g.has_edge(a.0, a.1) {
        return Err(GraphError::InvalidSwitching(format!("replacement edge {:?} exists", a)));
    }
    if g.has_edge(b.0, b.1) {
        return Err(GraphError::InvalidSwitching(format!("replacement edge {:?} exists", b)));
    }
    let edges = g
        .edges()
        .iter()
        .copied()
        .filter(|&x| x != first && x != second)
        .chain([a, b]);
    Ok(RegularGraph::from_edges(g.n(), g.d(), edges))
}

/// Lazy double-edge-swap walk: each step draws a uniform ordered pair of
/// distinct edges and a uniform variant, applying the switch only when
/// valid. Invalid proposals still count as a step.
pub fn switching_walk(g: &RegularGraph, steps: usize, seed: u64) -> RegularGraph {
    let mut rng = rng_from_seed(seed);
    let m = g.edges().len();
    if m < 2 || steps == 0 {
        return g.clone();
    }
    let mut edges: Vec<(u32, u32)> = g.edges().to_vec();
    let mut neighbors: Vec<Vec<u32>> = (0..g.n() as u32).map(|v| g.neighbors(v).to_vec()).collect();
    let has = |nb: &[Vec<u32>], i: u32, j: u32| nb[i as usize].contains(&j);
    for _ in 0..steps {
        let a = rng.random_range(0..m);
        let mut b = rng.random_range(0..m - 1);
        if b >= a {
            b += 1;
        }
        let variant = if rng.random::<bool>() { SwitchVariant::Parallel } else { SwitchVariant::Crossed };
        let first = edges[a];
        let second = edges[b];
        if !disjoint(first, second) {
            continue;
        }
        let s = Switching { first, second, variant };
        let [x, y] = s.replacements();
        if has(&neighbors, x.0, x.1) || has(&neighbors, y.0, y.1) {
            continue;
        }
        for &(i, j) in &[first, second] {
            neighbors[i as usize].retain(|&v| v != j);
            neighbors[j as usize].retain(|&v| v != i);
        }
        for &(i, j) in &[x, y] {
            neighbors[i as usize].push(j);
            neighbors[j as usize].push(i);
        }
        edges[a] = x;
        edges[b] = y;
    }
    RegularGraph::from_edges(g.n(), g.d(), edges)
}
