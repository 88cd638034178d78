//! Labeled simple d-regular graphs: sampling, validation, enumeration,
//! and degree-preserving edge switchings.

mod enumerate;
mod sample;
mod switching;

pub use enumerate::enumerate_regular_graphs;
pub use sample::{sample_configuration_model, sample_configuration_model_with, DEFAULT_MAX_RETRIES};
pub use switching::{apply_switching, list_switchable_pairs, switching_walk, SwitchVariant, Switching};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("n*d must be even, got n={n} d={d}")]
    OddDegreeSum { n: usize, d: usize },
    #[error("degree d={d} infeasible for n={n} vertices")]
    InfeasibleDegree { n: usize, d: usize },
    #[error("rejection sampler exceeded {max_retries} retries")]
    RetryBudgetExceeded { max_retries: usize },
    #[error("enumeration guard: n<=10 and d<=3 required, got n={n} d={d}")]
    TooLarge { n: usize, d: usize },
    #[error("edge ({0}, {1}) not present")]
    EdgeNotPresent(u32, u32),
    #[error("invalid switching: {0}")]
    InvalidSwitching(String),
    #[error("graph parse error at line {line}: {reason}")]
    ParseError { line: usize, reason: String },
}

/// Labeled simple d-regular graph. Immutable after construction; the edge
/// list is kept sorted with `i < j` per pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RegularGraph {
    n: usize,
    d: usize,
    edges: Vec<(u32, u32)>,
    neighbors: Vec<Vec<u32>>,
}

/// One violated invariant, with the offending vertex or edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    SelfLoop { vertex: u32 },
    MultiEdge { i: u32, j: u32 },
    VertexOutOfRange { i: u32, j: u32 },
    WrongDegree { vertex: u32, degree: usize },
    EdgeCountMismatch { got: usize, want: usize },
}

impl RegularGraph {
    /// Build from an edge list without enforcing regularity; pairs are
    /// normalized to `i < j` and sorted. Duplicates and degree defects are
    /// kept so `validate` can report them.
    pub fn from_edges(n: usize, d: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut edges: Vec<(u32, u32)> = edges
            .into_iter()
            .map(|(a, b)| if a <= b { (a, b) } else { (b, a) })
            .collect();
        edges.sort_unstable();
        let mut neighbors = vec![Vec::new(); n];
        for &(i, j) in &edges {
            if (i as usize) < n && (j as usize) < n && i != j {
                neighbors[i as usize].push(j);
                neighbors[j as usize].push(i);
            }
        }
        for nb in &mut neighbors {
            nb.sort_unstable();
        }
        RegularGraph { n, d, edges, neighbors }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.neighbors[v as usize]
    }

    pub fn has_edge(&self, i: u32, j: u32) -> bool {
        if i as usize >= self.n || j as usize >= self.n {
            return false;
        }
        self.neighbors[i as usize].binary_search(&j).is_ok()
    }

    /// Report every violated regularity invariant; empty means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for w in self.edges.windows(2) {
            if w[0] == w[1] {
                out.push(Violation::MultiEdge { i: w[0].0, j: w[0].1 });
            }
        }
        for &(i, j) in &self.edges {
            if i == j {
                out.push(Violation::SelfLoop { vertex: i });
            }
            if i as usize >= self.n || j as usize >= self.n {
                out.push(Violation::VertexOutOfRange { i, j });
            }
        }
        let mut deg = vec![0usize; self.n];
        for &(i, j) in &self.edges {
            if (i as usize) < self.n {
                deg[i as usize] += 1;
            }
            if (j as usize) < self.n && i != j {
                deg[j as usize] += 1;
            }
        }
        for (v, &dv) in deg.iter().enumerate() {
            if dv != self.d {
                out.push(Violation::WrongDegree { vertex: v as u32, degree: dv });
            }
        }
        let want = self.n * self.d;
        if want % 2 != 0 || self.edges.len() != want / 2 {
            out.push(Violation::EdgeCountMismatch { got: self.edges.len(), want: want / 2 });
        }
        out
    }

    /// Text serialization: line 1 `n d`, then one `i j` per edge, i < j, sorted.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.d);
        for &(i, j) in &self.edges {
            s.push_str(&format!("{} {}\n", i, j));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, GraphError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or(GraphError::ParseError { line: 1, reason: "empty input".into() })?;
        let mut it = header.split_whitespace();
        let parse = |tok: Option<&str>, line: usize| -> Result<usize, GraphError> {
            tok.ok_or(GraphError::ParseError { line, reason: "missing field".into() })?
                .parse()
                .map_err(|_| GraphError::ParseError { line, reason: "not an integer".into() })
        };
        let n = parse(it.next(), 1)?;
        let d = parse(it.next(), 1)?;
        let mut edges = Vec::new();
        for (idx, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let i = parse(it.next(), idx + 1)? as u32;
            let j = parse(it.next(), idx + 1)? as u32;
            edges.push((i, j));
        }
        Ok(RegularGraph::from_edges(n, d, edges))
    }
}

/// The cycle graph C_n; handy fixture with known circulant spectrum.
pub fn cycle_graph(n: usize) -> RegularGraph {
    let edges = (0..n).map(|i| (i as u32, ((i + 1) % n) as u32));
    RegularGraph::from_edges(n, 2, edges)
}

/// The complete graph K_n.
pub fn complete_graph(n: usize) -> RegularGraph {
    let mut edges = Vec::new();
    for i in 0..n as u32 {
        for j in (i + 1)..n as u32 {
            edges.push((i, j));
        }
    }
    RegularGraph::from_edges(n, n - 1, edges)
}
