//! Gromov hyperbolicity of the hop metric.
//!
//! For a quadruple the three pair-sums `d(x1,x3)+d(x2,x4)`,
//! `d(x1,x2)+d(x3,x4)` and `d(x1,x4)+d(x2,x3)` are formed; the defect is
//! half the gap between the largest and the second largest. The graph's δ
//! is the largest defect over all quadruples. Defects are handled as
//! integers (twice the defect) and only halved on output.

use std::collections::VecDeque;
use std::fmt;
use std::fmt::Write as _;

use rand::Rng as _;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::generate::is_connected;
use crate::graph::Graph;
use crate::paths::{self, bfs, extract_one_geodesic, DistanceMatrix, LazyDistances, UNREACHED};
use crate::seed;

/// Default vertex cap for the `O(n⁴)` exact scan.
pub const DEFAULT_EXACT_CAP: usize = 400;

/// Quadruples per independently seeded sampling block.
const SAMPLE_BLOCK: u64 = 4096;

pub type Quadruple = [usize; 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Sampled,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Sampled => "sampled",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HyperbolicityReport {
    pub n: usize,
    /// Common degree when the graph is regular.
    pub d: Option<usize>,
    /// Twice the four-point δ.
    pub twice_delta: u32,
    pub witness: Quadruple,
    pub mode: Mode,
    pub samples_used: u64,
}

impl HyperbolicityReport {
    pub fn delta(&self) -> f64 {
        f64::from(self.twice_delta) / 2.0
    }

    pub const CSV_HEADER: &'static str = "n,d,mode,delta,x1,x2,x3,x4,samples_used";

    pub fn to_csv_row(&self) -> String {
        let [a, b, c, e] = self.witness;
        format!(
            "{},{},{},{},{a},{b},{c},{e},{}",
            self.n,
            self.d.map(|d| d.to_string()).unwrap_or_default(),
            self.mode,
            self.delta(),
            self.samples_used
        )
    }

    pub fn to_json_line(&self) -> String {
        let mut s = String::new();
        write!(
            s,
            "{{\"n\":{},\"d\":{},\"mode\":\"{}\",\"delta\":{},\"witness\":[{},{},{},{}],\"samples_used\":{}}}",
            self.n,
            self.d.map(|d| d.to_string()).unwrap_or_else(|| "null".into()),
            self.mode,
            self.delta(),
            self.witness[0],
            self.witness[1],
            self.witness[2],
            self.witness[3],
            self.samples_used
        )
        .unwrap();
        s
    }
}

/// Twice the four-point defect of three pair-sums.
#[inline]
pub fn twice_defect_of_sums(a: u32, b: u32, c: u32) -> u32 {
    let (hi, mid) = if a >= b {
        if b >= c {
            (a, b)
        } else if a >= c {
            (a, c)
        } else {
            (c, a)
        }
    } else if a >= c {
        (b, a)
    } else if b >= c {
        (b, c)
    } else {
        (c, b)
    };
    hi - mid
}

/// Twice the defect of `q` given any symmetric distance lookup.
#[inline]
pub(crate) fn twice_defect_with(q: Quadruple, d: impl Fn(usize, usize) -> u32) -> u32 {
    let [x1, x2, x3, x4] = q;
    twice_defect_of_sums(
        d(x1, x3) + d(x2, x4),
        d(x1, x2) + d(x3, x4),
        d(x1, x4) + d(x2, x3),
    )
}

/// Four-point defect of `(x1, x2, x3, x4)`. Invariant under relabeling.
pub fn four_point_defect(
    dm: &DistanceMatrix,
    x1: usize,
    x2: usize,
    x3: usize,
    x4: usize,
) -> Result<f64> {
    let q = [x1, x2, x3, x4];
    for &x in &q {
        if x >= dm.n() {
            return Err(Error::VertexOutOfRange {
                vertex: x,
                n: dm.n(),
            });
        }
    }
    for i in 0..4 {
        for j in i + 1..4 {
            if dm.get(q[i], q[j]).is_none() {
                return Err(Error::Unreachable(q[i], q[j]));
            }
        }
    }
    let twice = twice_defect_with(q, |u, v| dm.get(u, v).unwrap());
    Ok(f64::from(twice) / 2.0)
}

pub fn exact_delta(g: &Graph) -> Result<HyperbolicityReport> {
    exact_delta_capped(g, DEFAULT_EXACT_CAP)
}

/// Maximum defect over all `x1 < x2 < x3 < x4`. The witness is the
/// lexicographically first quadruple attaining it.
pub fn exact_delta_capped(g: &Graph, cap: usize) -> Result<HyperbolicityReport> {
    let n = g.n();
    if n > cap {
        return Err(Error::TooLarge { n, cap });
    }
    if n == 0 {
        return Err(Error::InvalidParameter("empty graph".into()));
    }
    let dm = paths::distance_matrix_capped(g, cap)?;
    if !dm.is_connected() {
        return Err(Error::Disconnected);
    }
    exact_delta_from_matrix(g, &dm)
}

pub fn exact_delta_from_matrix(g: &Graph, dm: &DistanceMatrix) -> Result<HyperbolicityReport> {
    let n = dm.n();
    if !dm.is_connected() {
        return Err(Error::Disconnected);
    }
    let best_per_x1: Vec<(u32, Quadruple)> = (0..n.saturating_sub(3))
        .into_par_iter()
        .map(|x1| {
            let r1 = dm.row(x1);
            let mut best = (0u32, [usize::MAX; 4]);
            for x2 in x1 + 1..n {
                let r2 = dm.row(x2);
                let d12 = r1[x2];
                for x3 in x2 + 1..n {
                    let r3 = dm.row(x3);
                    let (d13, d23) = (r1[x3], r2[x3]);
                    for x4 in x3 + 1..n {
                        let t = twice_defect_of_sums(d13 + r2[x4], d12 + r3[x4], r1[x4] + d23);
                        if t > best.0 || best.1[0] == usize::MAX {
                            best = (t, [x1, x2, x3, x4]);
                        }
                    }
                }
            }
            best
        })
        .collect();
    let mut best = (0u32, [0usize; 4]);
    for (t, q) in best_per_x1 {
        if t > best.0 {
            best = (t, q);
        }
    }
    if best.0 == 0 && n >= 4 {
        best.1 = [0, 1, 2, 3];
    }
    Ok(HyperbolicityReport {
        n,
        d: g.regular_degree(),
        twice_delta: best.0,
        witness: best.1,
        mode: Mode::Exact,
        samples_used: 0,
    })
}

/// Lower bound on δ from `samples` uniform ordered quadruples, drawn with
/// replacement. Sampling is split into fixed-size blocks, each with its
/// own derived seed, so the result does not depend on the thread count.
pub fn sampled_delta(g: &Graph, samples: u64, seed: u64) -> Result<HyperbolicityReport> {
    if !is_connected(g) {
        return Err(Error::Disconnected);
    }
    let lazy = LazyDistances::new(g);
    sampled_delta_with(&lazy, samples, seed)
}

/// [`sampled_delta`] over an existing row cache, which must belong to a
/// connected graph.
pub fn sampled_delta_with(
    dist: &LazyDistances<'_>,
    samples: u64,
    seed: u64,
) -> Result<HyperbolicityReport> {
    let g = dist.graph();
    let n = g.n();
    if samples < 1 {
        return Err(Error::InvalidParameter("samples must be at least 1".into()));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("empty graph".into()));
    }
    let blocks = samples.div_ceil(SAMPLE_BLOCK);
    let per_block: Vec<(u32, Quadruple)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = seed::rng(seed::derive(seed, b, 0));
            let count = SAMPLE_BLOCK.min(samples - b * SAMPLE_BLOCK);
            let mut best: Option<(u32, Quadruple)> = None;
            for _ in 0..count {
                let q: Quadruple = std::array::from_fn(|_| rng.gen_range(0..n));
                let r1 = dist.row(q[0]);
                let r2 = dist.row(q[1]);
                let r3 = dist.row(q[2]);
                let t = twice_defect_of_sums(
                    r1[q[2]] + r2[q[3]],
                    r1[q[1]] + r3[q[3]],
                    r1[q[3]] + r2[q[2]],
                );
                if best.is_none_or(|(b, _)| t > b) {
                    best = Some((t, q));
                }
            }
            best.unwrap()
        })
        .collect();
    let mut best = per_block[0];
    for &(t, q) in &per_block[1..] {
        if t > best.0 {
            best = (t, q);
        }
    }
    Ok(HyperbolicityReport {
        n,
        d: g.regular_degree(),
        twice_delta: best.0,
        witness: best.1,
        mode: Mode::Sampled,
        samples_used: samples,
    })
}

/// Fatness of the geodesic triangle `abc` built from canonical geodesics
/// (smallest-index predecessor rule): the largest distance from a point on
/// one side to the union of the other two sides.
pub fn triangle_fatness(g: &Graph, a: usize, b: usize, c: usize) -> Result<f64> {
    let side = |s: usize, t: usize| -> Result<Vec<usize>> {
        let spd = bfs(g, s)?;
        extract_one_geodesic(&spd, t)
    };
    let sides = [side(a, b)?, side(b, c)?, side(c, a)?];
    let mut fat = 0u32;
    let mut dist = Vec::new();
    let mut queue = VecDeque::new();
    for i in 0..3 {
        let others: Vec<usize> = (0..3)
            .filter(|&j| j != i)
            .flat_map(|j| sides[j].iter().copied())
            .collect();
        multi_source_hops(g, &others, &mut dist, &mut queue);
        for &u in &sides[i] {
            // sides are connected to each other through shared corners
            debug_assert_ne!(dist[u], UNREACHED);
            fat = fat.max(dist[u]);
        }
    }
    Ok(f64::from(fat))
}

fn multi_source_hops(
    g: &Graph,
    sources: &[usize],
    dist: &mut Vec<u32>,
    queue: &mut VecDeque<usize>,
) {
    dist.clear();
    dist.resize(g.n(), UNREACHED);
    queue.clear();
    for &s in sources {
        if dist[s] == UNREACHED {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        let next = dist[u] + 1;
        for &w in g.neighbors(u) {
            if dist[w] == UNREACHED {
                dist[w] = next;
                queue.push_back(w);
            }
        }
    }
}
