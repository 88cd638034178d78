//! Exact enumeration of labeled simple d-regular graphs (uniformity oracle).
//!
//! Backtracking over the lexicographic list of candidate edges with degree
//! pruning; output order is lexicographic on sorted edge lists, which is
//! the canonical order used everywhere downstream.

use super::{GraphError, RegularGraph};

/// All labeled simple d-regular graphs on n vertices, canonically ordered.
/// Guarded to n <= 10, d <= 3.
pub fn enumerate_regular_graphs(n: usize, d: usize) -> Result<Vec<RegularGraph>, GraphError> {
    if n > 10 || d > 3 {
        return Err(GraphError::TooLarge { n, d });
    }
    if n * d % 2 != 0 {
        return Err(GraphError::OddDegreeSum { n, d });
    }
    if d >= n || d == 0 || n == 0 {
        return Err(GraphError::InfeasibleDegree { n, d });
    }
    let mut all_edges = Vec::new();
    for i in 0..n as u32 {
        for j in (i + 1)..n as u32 {
            all_edges.push((i, j));
        }
    }
    let target = n * d / 2;
    let mut deg = vec![0usize; n];
    let mut chosen: Vec<(u32, u32)> = Vec::with_capacity(target);
    let mut out = Vec::new();
    backtrack(&all_edges, 0, d, target, &mut deg, &mut chosen, &mut out, n);
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn backtrack(
    all: &[(u32, u32)],
    pos: usize,
    d: usize,
    target: usize,
    deg: &mut Vec<usize>,
    chosen: &mut Vec<(u32, u32)>,
    out: &mut Vec<RegularGraph>,
    n: usize,
) {
    if chosen.len() == target {
        if deg.iter().all(|&x| x == d) {
            out.push(RegularGraph::from_edges(n, d, chosen.iter().copied()));
        }
        return;
    }
    if pos == all.len() || all.len() - pos < target - chosen.len() {
        return;
    }
    let (i, j) = all[pos];
    // every vertex below i has seen all of its candidate edges
    for v in 0..i as usize {
        if deg[v] != d {
            return;
        }
    }
    if deg[i as usize] < d && deg[j as usize] < d {
        deg[i as usize] += 1;
        deg[j as usize] += 1;
        chosen.push((i, j));
        backtrack(all, pos + 1, d, target, deg, chosen, out, n);
        chosen.pop();
        deg[i as usize] -= 1;
        deg[j as usize] -= 1;
    }
    backtrack(all, pos + 1, d, target, deg, chosen, out, n);
}
