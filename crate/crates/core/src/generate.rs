//! Graph generators: random regular graphs from the pairing model and the
//! deterministic reference families used as oracles in tests.

use std::collections::VecDeque;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::seed;

/// Pairing attempts before giving up. The simple-graph acceptance rate of
/// the pairing model is about `exp(-(d²-1)/4)`, roughly 1.6e-4 at `d = 6`.
pub const DEFAULT_MAX_RETRIES: u32 = 1_000_000;

/// Parameters for [`random_regular`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenSpec {
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    pub max_retries: u32,
    pub require_connected: bool,
}

impl GenSpec {
    pub fn new(n: usize, d: usize, seed: u64) -> Self {
        GenSpec {
            n,
            d,
            seed,
            max_retries: DEFAULT_MAX_RETRIES,
            require_connected: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 1 {
            return Err(Error::InvalidParameter("degree must be at least 1".into()));
        }
        if self.n <= self.d {
            return Err(Error::InvalidParameter(format!(
                "need n > d, got n={} d={}",
                self.n, self.d
            )));
        }
        if (self.n * self.d) % 2 == 1 {
            return Err(Error::InvalidParameter(format!(
                "n*d = {} half-edges is odd",
                self.n * self.d
            )));
        }
        if self.max_retries == 0 {
            return Err(Error::InvalidParameter(
                "max_retries must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Samples a simple d-regular graph.
///
/// Each attempt lays out `n*d` half-edges, permutes them with a forward
/// Fisher-Yates shuffle and pairs consecutive entries. An attempt is
/// abandoned as soon as a pair closes a loop or repeats an edge (or, when
/// required, if the finished graph is disconnected), and the next attempt
/// starts a fresh shuffle. Abandoning early only skips permutations that
/// would be rejected anyway, so accepted graphs are uniform over simple
/// d-regular graphs. The output is a pure function of `(n, d, seed)`.
pub fn random_regular(spec: &GenSpec) -> Result<Graph> {
    spec.validate()?;
    let (n, d) = (spec.n, spec.d);
    let half_edges = n * d;
    let mut rng = seed::rng(spec.seed);
    let mut stubs: Vec<usize> = (0..half_edges).map(|i| i / d).collect();
    let mut adj: Vec<usize> = vec![0; half_edges];
    let mut fill = vec![0usize; n];
    let mut edges = Vec::with_capacity(half_edges / 2);

    'attempt: for _ in 0..spec.max_retries {
        for &(u, v) in &edges {
            fill[u] = 0;
            fill[v] = 0;
        }
        edges.clear();
        for i in (0..half_edges).step_by(2) {
            for k in i..i + 2 {
                let j = rng.gen_range(k..half_edges);
                stubs.swap(k, j);
            }
            let (u, v) = (stubs[i], stubs[i + 1]);
            if u == v || adj[u * d..u * d + fill[u]].contains(&v) {
                continue 'attempt;
            }
            adj[u * d + fill[u]] = v;
            fill[u] += 1;
            adj[v * d + fill[v]] = u;
            fill[v] += 1;
            edges.push((u, v));
        }
        let g = Graph::build(n, &edges)?;
        if spec.require_connected && !is_connected(&g) {
            continue;
        }
        return Ok(g);
    }
    Err(Error::RetriesExhausted(spec.max_retries))
}

/// Complete rooted tree: the root (vertex 0) has `k` children, every other
/// internal vertex `k - 1`, and all leaves sit at distance `depth` from the
/// root. Vertices are numbered in level order.
pub fn regular_tree(k: usize, depth: usize) -> Result<Graph> {
    if k < 2 || depth < 1 {
        return Err(Error::InvalidParameter(format!(
            "regular tree needs k >= 2 and depth >= 1, got k={k} depth={depth}"
        )));
    }
    let n = regular_tree_size(k, depth);
    let mut edges = Vec::with_capacity(n - 1);
    let mut next = 1;
    let mut level = vec![0usize];
    for level_idx in 0..depth {
        let children = if level_idx == 0 { k } else { k - 1 };
        let mut below = Vec::with_capacity(level.len() * children);
        for &parent in &level {
            for _ in 0..children {
                edges.push((parent, next));
                below.push(next);
                next += 1;
            }
        }
        level = below;
    }
    debug_assert_eq!(next, n);
    Graph::build(n, &edges)
}

/// Vertex count of [`regular_tree`]`(k, depth)`.
pub fn regular_tree_size(k: usize, depth: usize) -> usize {
    if k == 2 {
        1 + 2 * depth
    } else {
        1 + k * ((k - 1).pow(depth as u32) - 1) / (k - 2)
    }
}

/// Random recursive tree: vertex `i > 0` attaches to a uniform earlier vertex.
pub fn random_tree(n: usize, seed: u64) -> Result<Graph> {
    if n < 1 {
        return Err(Error::InvalidParameter("tree needs n >= 1".into()));
    }
    let mut rng = seed::rng(seed);
    let edges: Vec<_> = (1..n).map(|i| (rng.gen_range(0..i), i)).collect();
    Graph::build(n, &edges)
}

pub fn cycle_graph(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "cycle needs n >= 3, got {n}"
        )));
    }
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Graph::build(n, &edges)
}

pub fn path_graph(n: usize) -> Result<Graph> {
    if n < 1 {
        return Err(Error::InvalidParameter("path needs n >= 1".into()));
    }
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Graph::build(n, &edges)
}

pub fn complete_graph(n: usize) -> Result<Graph> {
    if n < 1 {
        return Err(Error::InvalidParameter(
            "complete graph needs n >= 1".into(),
        ));
    }
    let edges: Vec<_> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    Graph::build(n, &edges)
}

/// True iff a BFS from vertex 0 reaches every vertex; graphs with at most
/// one vertex count as connected.
pub fn is_connected(g: &Graph) -> bool {
    let n = g.n();
    if n <= 1 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    let mut reached = 1;
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if !seen[w] {
                seen[w] = true;
                reached += 1;
                queue.push_back(w);
            }
        }
    }
    reached == n
}
