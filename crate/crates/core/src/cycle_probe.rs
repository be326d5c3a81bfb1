//! Almost-geodesic cycles through vertex pairs and the four-point
//! violations they carry.
//!
//! The probe for a pair `(v, w)` takes the canonical geodesic `P` from `v`
//! to `w`, deletes its interior vertices (or the edge itself when `P` is a
//! single edge) and looks for a shortest second path `Q` from `v` to `w`.
//! `P` followed by `Q` reversed is a simple cycle through both vertices.
//! This is one constructive choice, not a search for the best cycle: the
//! probe reports what it finds.
//!
//! For a cycle `C` of length `L`, the geodesic defect is
//! `e = max over u, x in C of d_C(u, x) - d_G(u, x)`, where `d_C` is the
//! shorter of the two arcs. Four points spaced `L/4` apart on such a cycle
//! have four-point defect at least about `L/2 - 2e`.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::Rng as _;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::generate::is_connected;
use crate::graph::Graph;
use crate::hyperbolicity::{self, twice_defect_with, HyperbolicityReport, Quadruple};
use crate::paths::{bfs, extract_one_geodesic, LazyDistances, UNREACHED};
use crate::seed;

/// Label written into probe outputs so readers know how cycles were built.
pub const CONSTRUCTION: &str = "geodesic plus shortest interior-disjoint return path";

#[derive(Debug, Clone, PartialEq)]
pub struct CycleProbeResult {
    /// The `(v, w)` pair the probe started from.
    pub pair: (usize, usize),
    /// Cycle vertices starting at `v`; the closing edge back to `v` is implicit.
    pub cycle: Vec<usize>,
    pub length: usize,
    /// Geodesic defect `e`.
    pub defect: u32,
    pub quadruple: Option<Quadruple>,
    pub quadruple_defect: Option<f64>,
}

impl CycleProbeResult {
    /// Distance along the cycle between positions `i` and `j`.
    pub fn cycle_distance(&self, i: usize, j: usize) -> usize {
        let arc = i.abs_diff(j);
        arc.min(self.length - arc)
    }
}

pub fn find_cycle_through_pair(g: &Graph, v: usize, w: usize) -> Result<Option<CycleProbeResult>> {
    let dist = LazyDistances::new(g);
    find_cycle_with(&dist, v, w)
}

/// [`find_cycle_through_pair`] reusing a shared distance-row cache for the
/// defect computation.
pub fn find_cycle_with(
    dist: &LazyDistances<'_>,
    v: usize,
    w: usize,
) -> Result<Option<CycleProbeResult>> {
    let g = dist.graph();
    g.check_vertex(v)?;
    g.check_vertex(w)?;
    if v == w {
        return Err(Error::InvalidParameter(format!(
            "cycle probe needs two distinct vertices, got {v} twice"
        )));
    }
    let spd = bfs(g, v)?;
    let forward = extract_one_geodesic(&spd, w)?;

    let mut blocked = vec![false; g.n()];
    for &x in &forward[1..forward.len() - 1] {
        blocked[x] = true;
    }
    let skip_edge = forward.len() == 2;
    let Some(back) = restricted_path(g, v, w, &blocked, skip_edge) else {
        return Ok(None);
    };

    let mut cycle = forward;
    cycle.extend(back[1..back.len() - 1].iter().rev());
    let defect = defect_with(dist, &cycle);
    Ok(Some(CycleProbeResult {
        pair: (v, w),
        length: cycle.len(),
        cycle,
        defect,
        quadruple: None,
        quadruple_defect: None,
    }))
}

/// Shortest `v`-`w` path avoiding `blocked` vertices (and the edge `vw`
/// when `skip_edge`), following smallest-index predecessors back from `w`.
fn restricted_path(
    g: &Graph,
    v: usize,
    w: usize,
    blocked: &[bool],
    skip_edge: bool,
) -> Option<Vec<usize>> {
    let usable = |a: usize, b: usize| {
        !blocked[b] && !(skip_edge && ((a == v && b == w) || (a == w && b == v)))
    };
    let mut dist = vec![UNREACHED; g.n()];
    let mut queue = VecDeque::from([v]);
    dist[v] = 0;
    while let Some(u) = queue.pop_front() {
        if u == w {
            break;
        }
        for &x in g.neighbors(u) {
            if dist[x] == UNREACHED && usable(u, x) {
                dist[x] = dist[u] + 1;
                queue.push_back(x);
            }
        }
    }
    if dist[w] == UNREACHED {
        return None;
    }
    let mut path = vec![w];
    let mut x = w;
    while x != v {
        x = *g
            .neighbors(x)
            .iter()
            .find(|&&p| dist[p] != UNREACHED && dist[p] + 1 == dist[x] && usable(p, x))
            .expect("BFS predecessor");
        path.push(x);
    }
    path.reverse();
    Some(path)
}

fn defect_with(dist: &LazyDistances<'_>, cycle: &[usize]) -> u32 {
    let len = cycle.len();
    let mut worst = 0;
    for i in 0..len {
        let row = dist.row(cycle[i]);
        for j in i + 1..len {
            let arc = (j - i).min(len - (j - i)) as u32;
            worst = worst.max(arc.saturating_sub(row[cycle[j]]));
        }
    }
    worst
}

fn validate_cycle(g: &Graph, cycle: &[usize]) -> Result<()> {
    if cycle.len() < 3 {
        return Err(Error::NotACycle(format!(
            "{} vertices, need at least 3",
            cycle.len()
        )));
    }
    let mut seen = vec![false; g.n()];
    for &x in cycle {
        g.check_vertex(x)?;
        if std::mem::replace(&mut seen[x], true) {
            return Err(Error::NotACycle(format!("vertex {x} repeats")));
        }
    }
    for i in 0..cycle.len() {
        let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
        if !g.has_edge(a, b) {
            return Err(Error::NotACycle(format!("no edge between {a} and {b}")));
        }
    }
    Ok(())
}

/// `max over cycle pairs of d_C(u, x) - d_G(u, x)`; zero iff the cycle is
/// isometrically embedded.
pub fn cycle_defect(g: &Graph, cycle: &[usize]) -> Result<u32> {
    validate_cycle(g, cycle)?;
    Ok(defect_with(&LazyDistances::new(g), cycle))
}

/// Picks cycle positions `0, ⌊L/4⌋, ⌊L/2⌋, ⌊3L/4⌋` and measures their
/// four-point defect in the graph metric. Stores both on `probe`.
pub fn witness_quadruple(g: &Graph, probe: &mut CycleProbeResult) -> Result<(Quadruple, f64)> {
    witness_with(&LazyDistances::new(g), probe)
}

pub fn witness_with(
    dist: &LazyDistances<'_>,
    probe: &mut CycleProbeResult,
) -> Result<(Quadruple, f64)> {
    let len = probe.length;
    if len < 4 {
        return Err(Error::InvalidParameter(format!(
            "quadruple needs a cycle of length >= 4, got {len}"
        )));
    }
    let q = quadruple_positions(len).map(|p| probe.cycle[p]);
    let twice = twice_defect_with(q, |a, b| dist.row(a)[b]);
    let defect = f64::from(twice) / 2.0;
    probe.quadruple = Some(q);
    probe.quadruple_defect = Some(defect);
    Ok((q, defect))
}

pub fn quadruple_positions(len: usize) -> [usize; 4] {
    [0, len / 4, len / 2, 3 * len / 4]
}

/// Checks `d_C - e <= d_G <= d_C` on all six pairs of the probe's quadruple.
pub fn quadruple_chain_holds(dist: &LazyDistances<'_>, probe: &CycleProbeResult) -> bool {
    if probe.length < 4 {
        return true;
    }
    let pos = quadruple_positions(probe.length);
    let e = probe.defect as usize;
    (0..4).all(|i| {
        (i + 1..4).all(|j| {
            let dc = probe.cycle_distance(pos[i], pos[j]);
            let dg = dist.row(probe.cycle[pos[i]])[probe.cycle[pos[j]]] as usize;
            dc.saturating_sub(e) <= dg && dg <= dc
        })
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spread {
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

impl Spread {
    pub fn of(values: &[f64]) -> Option<Spread> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        Some(Spread {
            min: v[0],
            median: median_sorted(&v),
            max: v[v.len() - 1],
        })
    }
}

/// Median of sorted values; the mean of the two middle values for even counts.
pub fn median_sorted(v: &[f64]) -> f64 {
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeRecord {
    pub v: usize,
    pub w: usize,
    pub result: Option<CycleProbeResult>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSummary {
    pub records: Vec<ProbeRecord>,
    pub found_fraction: f64,
    pub length: Option<Spread>,
    pub defect: Option<Spread>,
    pub quadruple_defect: Option<Spread>,
    /// `log_{d-1} n` for regular graphs with `d >= 3`.
    pub log_scale: Option<f64>,
    /// `log_{d-1} log_{d-1} n`.
    pub loglog_scale: Option<f64>,
    /// Whether every found quadruple satisfied `d_C - e <= d_G <= d_C`.
    pub chain_holds: bool,
}

impl ProbeSummary {
    pub fn found(&self) -> usize {
        self.records.iter().filter(|r| r.result.is_some()).count()
    }

    pub fn best_witness(&self) -> Option<(Quadruple, f64)> {
        let mut best: Option<(Quadruple, f64)> = None;
        for r in self.records.iter().filter_map(|r| r.result.as_ref()) {
            if let (Some(q), Some(d)) = (r.quadruple, r.quadruple_defect) {
                if best.is_none_or(|(_, b)| d > b) {
                    best = Some((q, d));
                }
            }
        }
        best
    }

    pub const CSV_HEADER: &'static str = "v,w,found,length,defect,quadruple_defect";

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# construction={CONSTRUCTION}").unwrap();
        if let (Some(l), Some(ll)) = (self.log_scale, self.loglog_scale) {
            writeln!(out, "# log_d1_n={l}").unwrap();
            writeln!(out, "# loglog_d1_n={ll}").unwrap();
        }
        writeln!(out, "{}", Self::CSV_HEADER).unwrap();
        for r in &self.records {
            match &r.result {
                Some(p) => {
                    let qd = p
                        .quadruple_defect
                        .map(|d| d.to_string())
                        .unwrap_or_default();
                    writeln!(out, "{},{},1,{},{},{qd}", r.v, r.w, p.length, p.defect).unwrap();
                }
                None => writeln!(out, "{},{},0,,,", r.v, r.w).unwrap(),
            }
        }
        writeln!(out, "# found_fraction={}", self.found_fraction).unwrap();
        out
    }
}

/// `(log_{d-1} n, log_{d-1} log_{d-1} n)`, defined for `d >= 3`.
pub fn reference_scales(n: usize, d: usize) -> Option<(f64, f64)> {
    if d < 3 || n < 2 {
        return None;
    }
    let base = ((d - 1) as f64).ln();
    let l = (n as f64).ln() / base;
    Some((l, l.ln() / base))
}

/// Probes `pair_samples` uniform random pairs of distinct vertices.
pub fn probe_statistics(g: &Graph, pair_samples: usize, seed: u64) -> Result<ProbeSummary> {
    if !is_connected(g) {
        return Err(Error::Disconnected);
    }
    let dist = LazyDistances::new(g);
    probe_statistics_with(&dist, pair_samples, seed)
}

pub fn probe_statistics_with(
    dist: &LazyDistances<'_>,
    pair_samples: usize,
    seed: u64,
) -> Result<ProbeSummary> {
    let g = dist.graph();
    let n = g.n();
    if n < 2 {
        return Err(Error::InvalidParameter(
            "cycle probes need at least two vertices".into(),
        ));
    }
    let mut rng = seed::rng(seed);
    let pairs: Vec<(usize, usize)> = (0..pair_samples)
        .map(|_| {
            let v = rng.gen_range(0..n);
            let mut w = rng.gen_range(0..n - 1);
            if w >= v {
                w += 1;
            }
            (v, w)
        })
        .collect();

    let records = pairs
        .par_iter()
        .map(|&(v, w)| {
            let mut result = find_cycle_with(dist, v, w)?;
            if let Some(p) = result.as_mut() {
                if p.length >= 4 {
                    witness_with(dist, p)?;
                }
            }
            Ok(ProbeRecord { v, w, result })
        })
        .collect::<Result<Vec<_>>>()?;

    let found: Vec<&CycleProbeResult> = records.iter().filter_map(|r| r.result.as_ref()).collect();
    let lengths: Vec<f64> = found.iter().map(|p| p.length as f64).collect();
    let defects: Vec<f64> = found.iter().map(|p| f64::from(p.defect)).collect();
    let quads: Vec<f64> = found.iter().filter_map(|p| p.quadruple_defect).collect();
    let chain_holds = found.iter().all(|p| quadruple_chain_holds(dist, p));
    let scales = g.regular_degree().and_then(|d| reference_scales(n, d));
    Ok(ProbeSummary {
        found_fraction: if records.is_empty() {
            0.0
        } else {
            found.len() as f64 / records.len() as f64
        },
        length: Spread::of(&lengths),
        defect: Spread::of(&defects),
        quadruple_defect: Spread::of(&quads),
        log_scale: scales.map(|s| s.0),
        loglog_scale: scales.map(|s| s.1),
        chain_holds,
        records,
    })
}

/// δ lower bound combining the best cycle-witness quadruple from
/// `probe_pairs` probes with `samples` uniformly sampled quadruples.
pub fn witness_and_sampled_delta(
    g: &Graph,
    probe_pairs: usize,
    samples: u64,
    seed: u64,
) -> Result<HyperbolicityReport> {
    if !is_connected(g) {
        return Err(Error::Disconnected);
    }
    let dist = LazyDistances::new(g);
    let mut report = hyperbolicity::sampled_delta_with(&dist, samples, seed::derive(seed, 1, 0))?;
    if probe_pairs > 0 && g.n() >= 2 {
        let summary = probe_statistics_with(&dist, probe_pairs, seed::derive(seed, 2, 0))?;
        if let Some((q, d)) = summary.best_witness() {
            let twice = (2.0 * d) as u32;
            if twice > report.twice_delta {
                report.twice_delta = twice;
                report.witness = q;
            }
        }
    }
    Ok(report)
}
