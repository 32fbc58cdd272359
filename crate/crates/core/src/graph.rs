//! Finite, connected, simple, k-regular graphs and the random-walk
//! quantities defined on them.
//!
//! Vertices are dense labels `0..N`. Every constructor runs the same
//! validation, so a [`Graph`] value is always simple, connected and regular.

use std::collections::{BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of pairing-model attempts before `random_regular` gives up.
pub const RANDOM_REGULAR_RETRIES: usize = 1000;

/// Named graph families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GraphKind {
    Cycle { n: usize },
    Complete { n: usize },
    /// `rows x cols` discrete torus, 4-regular.
    Torus2d { rows: usize, cols: usize },
    RandomRegular { n: usize, k: usize, seed: u64 },
    Petersen,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    degree: usize,
    n_edges: usize,
}

impl Graph {
    pub fn build_named(kind: GraphKind) -> Result<Self> {
        match kind {
            GraphKind::Cycle { n } => Self::cycle(n),
            GraphKind::Complete { n } => Self::complete(n),
            GraphKind::Torus2d { rows, cols } => Self::torus2d(rows, cols),
            GraphKind::RandomRegular { n, k, seed } => Self::random_regular(n, k, seed),
            GraphKind::Petersen => Self::petersen(),
        }
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Construction(format!(
                "a simple cycle needs at least 3 vertices, got {n}"
            )));
        }
        let edges: Vec<_> = (0..n).map(|x| (x, (x + 1) % n)).collect();
        Self::from_edge_list(&edges)
    }

    pub fn complete(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Construction(format!(
                "a complete graph needs at least 2 vertices, got {n}"
            )));
        }
        let mut edges = Vec::with_capacity(n * (n - 1) / 2);
        for x in 0..n {
            for y in x + 1..n {
                edges.push((x, y));
            }
        }
        Self::from_edge_list(&edges)
    }

    pub fn torus2d(rows: usize, cols: usize) -> Result<Self> {
        if rows < 3 || cols < 3 {
            return Err(Error::Construction(format!(
                "torus sides must be at least 3, got {rows}x{cols}"
            )));
        }
        let id = |r: usize, c: usize| r * cols + c;
        let mut edges = Vec::with_capacity(2 * rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                edges.push((id(r, c), id(r, (c + 1) % cols)));
                edges.push((id(r, c), id((r + 1) % rows, c)));
            }
        }
        Self::from_edge_list(&edges)
    }

    pub fn petersen() -> Result<Self> {
        let mut edges = Vec::with_capacity(15);
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        Self::from_edge_list(&edges)
    }

    /// Uniform-ish random k-regular graph from the pairing (configuration)
    /// model. Outcomes with loops, multi-edges or several components are
    /// rejected and redrawn, up to [`RANDOM_REGULAR_RETRIES`] times.
    pub fn random_regular(n: usize, k: usize, seed: u64) -> Result<Self> {
        Self::random_regular_with_retries(n, k, seed, RANDOM_REGULAR_RETRIES)
    }

    pub fn random_regular_with_retries(
        n: usize,
        k: usize,
        seed: u64,
        retries: usize,
    ) -> Result<Self> {
        if k == 0 || k >= n {
            return Err(Error::Construction(format!(
                "need 1 <= k < N for a simple k-regular graph, got N={n}, k={k}"
            )));
        }
        if (n * k) % 2 == 1 {
            return Err(Error::Construction(format!(
                "N*k must be even, got N={n}, k={k}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut stubs: Vec<usize> = (0..n).flat_map(|x| std::iter::repeat_n(x, k)).collect();
        'attempt: for _ in 0..retries {
            stubs.shuffle(&mut rng);
            let mut seen = BTreeSet::new();
            let mut edges = Vec::with_capacity(n * k / 2);
            for pair in stubs.chunks_exact(2) {
                let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
                if u == v || !seen.insert((u, v)) {
                    continue 'attempt;
                }
                edges.push((u, v));
            }
            match Self::from_edge_list(&edges) {
                Ok(g) => return Ok(g),
                Err(Error::Connectivity { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
        Err(Error::Construction(format!(
            "no simple connected {k}-regular graph on {n} vertices after {retries} pairings"
        )))
    }

    /// Builds a graph from an undirected edge list over labels `0..N`, where
    /// `N` is one more than the largest label.
    pub fn from_edge_list(edges: &[(usize, usize)]) -> Result<Self> {
        let n = edges
            .iter()
            .map(|&(u, v)| u.max(v) + 1)
            .max()
            .ok_or_else(|| Error::Construction("empty edge list".into()))?;
        let mut adjacency = vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        for &(u, v) in edges {
            if u == v {
                return Err(Error::NotSimple(format!("self-loop at vertex {u}")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::NotSimple(format!("duplicate edge {u}-{v}")));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }

        let degrees: Vec<usize> = adjacency.iter().map(Vec::len).collect();
        let degree = degrees[0];
        if degrees.iter().any(|&d| d != degree) {
            return Err(Error::Regularity { degrees });
        }
        let components = count_components(&adjacency);
        if components != 1 {
            return Err(Error::Connectivity { components });
        }
        Ok(Self {
            adjacency,
            degree,
            n_edges: seen.len(),
        })
    }

    /// Parses the edge-list text format: one `u v` pair per line, blank lines
    /// ignored, `#` starts a comment.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let mut next = || -> Result<usize> {
                let tok = fields.next().ok_or_else(|| {
                    Error::Parse(format!("line {}: expected two vertex labels", lineno + 1))
                })?;
                tok.parse().map_err(|_| {
                    Error::Parse(format!("line {}: bad vertex label {tok:?}", lineno + 1))
                })
            };
            let (u, v) = (next()?, next()?);
            if fields.next().is_some() {
                return Err(Error::Parse(format!(
                    "line {}: trailing fields after edge",
                    lineno + 1
                )));
            }
            edges.push((u, v));
        }
        Self::from_edge_list(&edges)
    }

    pub fn n_vertices(&self) -> usize {
        self.adjacency.len()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n_edges(&self) -> usize {
        self.n_edges
    }

    pub fn neighbors(&self, x: usize) -> &[usize] {
        &self.adjacency[x]
    }

    pub fn adjacent(&self, x: usize, y: usize) -> bool {
        self.adjacency[x].binary_search(&y).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(x, nbrs)| nbrs.iter().filter(move |&&y| x < y).map(move |&y| (x, y)))
    }

    /// Vertices within graph distance 2 of `x`, including `x`, sorted.
    pub fn ball2(&self, x: usize) -> Vec<usize> {
        let mut ball: Vec<usize> = std::iter::once(x)
            .chain(self.neighbors(x).iter().copied())
            .chain(
                self.neighbors(x)
                    .iter()
                    .flat_map(|&y| self.neighbors(y).iter().copied()),
            )
            .collect();
        ball.sort_unstable();
        ball.dedup();
        ball
    }

    pub fn stationary(&self) -> VertexDistribution {
        let total = (2 * self.n_edges) as f64;
        VertexDistribution {
            weights: self
                .adjacency
                .iter()
                .map(|nbrs| nbrs.len() as f64 / total)
                .collect(),
        }
    }
}

fn count_components(adjacency: &[Vec<usize>]) -> usize {
    let mut seen = vec![false; adjacency.len()];
    let mut components = 0;
    let mut queue = VecDeque::new();
    for start in 0..adjacency.len() {
        if seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        queue.push_back(start);
        while let Some(x) = queue.pop_front() {
            for &y in &adjacency[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
    }
    components
}

/// A probability vector indexed by vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexDistribution {
    weights: Vec<f64>,
}

impl VertexDistribution {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
            return Err(Error::OutOfRange("distribution weights must be finite and nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::OutOfRange(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn get(&self, x: usize) -> f64 {
        self.weights[x]
    }
}
