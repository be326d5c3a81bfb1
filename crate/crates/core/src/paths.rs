//! Unweighted shortest paths: single-source BFS with geodesic counting,
//! all-pairs distance matrices and the diameter.

use std::collections::VecDeque;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Default vertex cap for materialising an all-pairs distance matrix.
pub const DEFAULT_MATRIX_CAP: usize = 5_000;

/// Sources per parallel work unit. Fixed so that reductions see the same
/// partials in the same order whatever the worker count.
pub(crate) const SOURCE_CHUNK: usize = 32;

pub(crate) const UNREACHED: u32 = u32::MAX;

/// Result of a BFS from `source`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShortestPathData {
    pub source: usize,
    /// Hop distance, `None` when unreachable.
    pub dist: Vec<Option<u32>>,
    /// Number of distinct geodesics from `source`, exact.
    pub sigma: Vec<BigUint>,
    /// Geodesic predecessors, ascending.
    pub preds: Vec<Vec<usize>>,
    /// Reached vertices in nondecreasing distance order.
    pub order: Vec<usize>,
}

pub fn bfs(g: &Graph, source: usize) -> Result<ShortestPathData> {
    g.check_vertex(source)?;
    let n = g.n();
    let mut dist = vec![None; n];
    let mut sigma = vec![BigUint::zero(); n];
    let mut preds = vec![Vec::new(); n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::from([source]);
    dist[source] = Some(0);
    sigma[source] = BigUint::one();

    while let Some(u) = queue.pop_front() {
        order.push(u);
        let du = dist[u].unwrap();
        for &w in g.neighbors(u) {
            match dist[w] {
                None => {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
                Some(dw) if dw != du + 1 => continue,
                Some(_) => {}
            }
            let add = sigma[u].clone();
            sigma[w] += add;
            preds[w].push(u);
        }
    }
    // u is popped in BFS order, which is not index order within a level
    for p in &mut preds {
        p.sort_unstable();
    }
    Ok(ShortestPathData {
        source,
        dist,
        sigma,
        preds,
        order,
    })
}

/// One geodesic from `spd.source` to `target`, built by always stepping to
/// the smallest-index predecessor.
pub fn extract_one_geodesic(spd: &ShortestPathData, target: usize) -> Result<Vec<usize>> {
    if target >= spd.dist.len() {
        return Err(Error::VertexOutOfRange {
            vertex: target,
            n: spd.dist.len(),
        });
    }
    let len = spd.dist[target].ok_or(Error::Unreachable(spd.source, target))? as usize;
    let mut path = Vec::with_capacity(len + 1);
    let mut v = target;
    path.push(v);
    while v != spd.source {
        v = spd.preds[v][0];
        path.push(v);
    }
    path.reverse();
    Ok(path)
}

/// Plain BFS hop distances into `dist` (resized to `n`), unreachable
/// entries set to [`UNREACHED`]. Returns the number of reached vertices.
pub(crate) fn bfs_hops_into(
    g: &Graph,
    source: usize,
    dist: &mut Vec<u32>,
    queue: &mut VecDeque<usize>,
) -> usize {
    dist.clear();
    dist.resize(g.n(), UNREACHED);
    queue.clear();
    dist[source] = 0;
    queue.push_back(source);
    let mut reached = 0;
    while let Some(u) = queue.pop_front() {
        reached += 1;
        let next = dist[u] + 1;
        for &w in g.neighbors(u) {
            if dist[w] == UNREACHED {
                dist[w] = next;
                queue.push_back(w);
            }
        }
    }
    reached
}

pub(crate) fn bfs_hops(g: &Graph, source: usize) -> Vec<u32> {
    let mut dist = Vec::new();
    bfs_hops_into(g, source, &mut dist, &mut VecDeque::new());
    dist
}

/// Dense symmetric all-pairs hop distances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<u32>,
}

impl DistanceMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> Option<u32> {
        match self.data[u * self.n + v] {
            UNREACHED => None,
            d => Some(d),
        }
    }

    pub fn is_connected(&self) -> bool {
        !self.data.contains(&UNREACHED)
    }

    /// Raw row; only meaningful when the graph is connected.
    #[inline]
    pub(crate) fn row(&self, u: usize) -> &[u32] {
        &self.data[u * self.n..(u + 1) * self.n]
    }
}

/// Per-source BFS rows computed on first use and kept for the lifetime of
/// the value. Intended for connected graphs where only a subset of sources
/// is ever queried.
#[derive(Debug)]
pub struct LazyDistances<'g> {
    graph: &'g Graph,
    rows: Vec<OnceLock<Vec<u32>>>,
}

impl<'g> LazyDistances<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        LazyDistances {
            graph,
            rows: (0..graph.n()).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    #[inline]
    pub(crate) fn row(&self, s: usize) -> &[u32] {
        self.rows[s].get_or_init(|| bfs_hops(self.graph, s))
    }

    pub fn get(&self, u: usize, v: usize) -> Option<u32> {
        match self.row(u)[v] {
            UNREACHED => None,
            d => Some(d),
        }
    }

    pub fn cached_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.get().is_some()).count()
    }
}

pub fn distance_matrix(g: &Graph) -> Result<DistanceMatrix> {
    distance_matrix_capped(g, DEFAULT_MATRIX_CAP)
}

pub fn distance_matrix_capped(g: &Graph, cap: usize) -> Result<DistanceMatrix> {
    let n = g.n();
    if n > cap {
        return Err(Error::TooLarge { n, cap });
    }
    let mut data = vec![0u32; n * n];
    if n > 0 {
        data.par_chunks_mut(n).enumerate().for_each_init(
            || (Vec::new(), VecDeque::new()),
            |(dist, queue), (s, row)| {
                bfs_hops_into(g, s, dist, queue);
                row.copy_from_slice(dist);
            },
        );
    }
    Ok(DistanceMatrix { n, data })
}

/// Largest finite hop distance. Streams one BFS per source, so it works
/// beyond the distance-matrix cap.
pub fn diameter(g: &Graph) -> Result<u32> {
    let n = g.n();
    if n == 0 {
        return Ok(0);
    }
    let sources: Vec<usize> = (0..n).collect();
    let per_chunk: Vec<Option<u32>> = sources
        .par_chunks(SOURCE_CHUNK)
        .map_init(
            || (Vec::new(), VecDeque::new()),
            |(dist, queue), chunk| {
                let mut best = 0;
                for &s in chunk {
                    if bfs_hops_into(g, s, dist, queue) != n {
                        return None;
                    }
                    best = best.max(*dist.iter().max().unwrap());
                }
                Some(best)
            },
        )
        .collect();
    per_chunk
        .into_iter()
        .try_fold(0, |acc, c| c.map(|c| acc.max(c)))
        .ok_or(Error::Disconnected)
}
