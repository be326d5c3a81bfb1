//! Vertex congestion under geodesic routing.
//!
//! Every unordered pair of connected vertices exchanges one unit of flow,
//! split equally over all of its geodesics. `T(v)` is the flow carried by
//! paths containing `v`, endpoints included, so a vertex receives exactly 1
//! from every pair it terminates and `σ_st(v)/σ_st` from every pair it
//! relays.
//!
//! The fast path is Brandes-style dependency accumulation in `f64`, one BFS
//! per source. [`brute_force_congestion`] enumerates every geodesic with
//! exact rationals and serves as its oracle.

use std::collections::VecDeque;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::paths::{self, bfs, UNREACHED};

/// Geodesic counts at or above this are no longer exact in an `f64`; a
/// source whose counts reach it is redone with exact arithmetic.
const SIGMA_EXACT_LIMIT: f64 = 4_503_599_627_370_496.0; // 2^52

pub const BRUTE_FORCE_CAP: usize = 200;

/// Relative tolerance for treating two fast-path flows as tied.
pub const FLOW_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct CongestionReport {
    /// `T(v)` per vertex.
    pub flows: Vec<f64>,
    pub max_flow: f64,
    /// Smallest vertex attaining `max_flow`.
    pub argmax: usize,
    /// Number of connected unordered pairs, i.e. routed units of demand.
    pub total_demand: u64,
    /// Unordered pairs with no path between them; they carry no flow.
    pub unrouted_pairs: u64,
    /// Sum of hop distances over routed pairs. Flow conservation says
    /// `Σ T(v) = pair_length_total + total_demand`.
    pub pair_length_total: u64,
    /// Sources that hit the `f64` geodesic-count guard and were
    /// accumulated exactly instead.
    pub exact_sources: usize,
}

impl CongestionReport {
    fn from_flows(
        flows: Vec<f64>,
        total_demand: u64,
        pair_length_total: u64,
        exact_sources: usize,
    ) -> Self {
        let n = flows.len() as u64;
        let max_flow = flows.iter().copied().fold(0.0, f64::max);
        let slack = FLOW_TOLERANCE * max_flow.max(1.0);
        let argmax = flows
            .iter()
            .position(|&f| f >= max_flow - slack)
            .unwrap_or(0);
        CongestionReport {
            flows,
            max_flow,
            argmax,
            total_demand,
            unrouted_pairs: (n * n.saturating_sub(1) / 2).saturating_sub(total_demand),
            pair_length_total,
            exact_sources,
        }
    }

    pub fn total_flow(&self) -> f64 {
        self.flows.iter().sum()
    }

    /// `vertex,flow` rows followed by `# key=value` metadata lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("vertex,flow\n");
        for (v, f) in self.flows.iter().enumerate() {
            writeln!(out, "{v},{f}").unwrap();
        }
        writeln!(out, "# max_flow={}", self.max_flow).unwrap();
        writeln!(out, "# argmax={}", self.argmax).unwrap();
        writeln!(out, "# total_demand={}", self.total_demand).unwrap();
        writeln!(out, "# unrouted_pairs={}", self.unrouted_pairs).unwrap();
        out
    }
}

struct Workspace {
    dist: Vec<u32>,
    sigma: Vec<f64>,
    delta: Vec<f64>,
    order: Vec<usize>,
    queue: VecDeque<usize>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Workspace {
            dist: vec![UNREACHED; n],
            sigma: vec![0.0; n],
            delta: vec![0.0; n],
            order: Vec::with_capacity(n),
            queue: VecDeque::with_capacity(n),
        }
    }
}

#[derive(Default)]
struct Partial {
    /// Interior dependencies summed over ordered source/target pairs.
    interior: Vec<f64>,
    endpoint: Vec<u64>,
    reached_pairs: u64,
    length_total: u64,
    exact_sources: usize,
}

/// Accumulates the dependencies of source `s` into `part`. Returns false if
/// the geodesic counts outgrew the `f64` guard, leaving `part` untouched.
fn accumulate_fast(g: &Graph, s: usize, ws: &mut Workspace, part: &mut Partial) -> bool {
    for &v in &ws.order {
        ws.dist[v] = UNREACHED;
        ws.sigma[v] = 0.0;
        ws.delta[v] = 0.0;
    }
    ws.order.clear();
    ws.queue.clear();

    ws.dist[s] = 0;
    ws.sigma[s] = 1.0;
    ws.queue.push_back(s);
    let mut overflow = false;
    while let Some(u) = ws.queue.pop_front() {
        ws.order.push(u);
        let next = ws.dist[u] + 1;
        for &w in g.neighbors(u) {
            if ws.dist[w] == UNREACHED {
                ws.dist[w] = next;
                ws.queue.push_back(w);
            }
            if ws.dist[w] == next {
                ws.sigma[w] += ws.sigma[u];
                overflow |= ws.sigma[w] >= SIGMA_EXACT_LIMIT;
            }
        }
    }
    if overflow {
        return false;
    }

    for &w in ws.order.iter().rev() {
        let dw = ws.dist[w];
        let coeff = (1.0 + ws.delta[w]) / ws.sigma[w];
        for &u in g.neighbors(w) {
            if ws.dist[u] + 1 == dw {
                ws.delta[u] += ws.sigma[u] * coeff;
            }
        }
    }
    for &v in &ws.order[1..] {
        part.interior[v] += ws.delta[v];
        part.length_total += u64::from(ws.dist[v]);
    }
    let reached = ws.order.len() as u64 - 1;
    part.endpoint[s] += reached;
    part.reached_pairs += reached;
    true
}

/// Exact-arithmetic dependencies of source `s`; the fallback when geodesic
/// counts are too large for the fast path.
fn accumulate_exact(g: &Graph, s: usize, part: &mut Partial) {
    let spd = bfs(g, s).expect("source in range");
    let mut delta = vec![BigRational::zero(); g.n()];
    let one = BigRational::from_integer(BigInt::from(1));
    for &w in spd.order.iter().rev() {
        let coeff =
            (&one + &delta[w]) / BigRational::from_integer(BigInt::from(spd.sigma[w].clone()));
        for &u in &spd.preds[w] {
            let su = BigRational::from_integer(BigInt::from(spd.sigma[u].clone()));
            delta[u] += su * &coeff;
        }
    }
    for &v in &spd.order[1..] {
        part.interior[v] += delta[v].to_f64().unwrap_or(f64::INFINITY);
        part.length_total += u64::from(spd.dist[v].unwrap());
    }
    let reached = spd.order.len() as u64 - 1;
    part.endpoint[s] += reached;
    part.reached_pairs += reached;
    part.exact_sources += 1;
}

/// Sources per work unit: depends only on `n`, so the partials and the
/// order in which they are merged are independent of the thread count.
fn chunk_len(n: usize) -> usize {
    paths::SOURCE_CHUNK.max(n.div_ceil(256))
}

/// `T(v)` for every vertex with equal splitting over geodesics.
pub fn vertex_congestion(g: &Graph) -> CongestionReport {
    let n = g.n();
    if n == 0 {
        return CongestionReport::from_flows(Vec::new(), 0, 0, 0);
    }
    let sources: Vec<usize> = (0..n).collect();
    let partials: Vec<Partial> = sources
        .par_chunks(chunk_len(n))
        .map_init(
            || Workspace::new(n),
            |ws, chunk| {
                let mut part = Partial {
                    interior: vec![0.0; n],
                    endpoint: vec![0; n],
                    ..Default::default()
                };
                for &s in chunk {
                    if !accumulate_fast(g, s, ws, &mut part) {
                        accumulate_exact(g, s, &mut part);
                    }
                }
                part
            },
        )
        .collect();

    let mut interior = vec![0.0; n];
    let mut endpoint = vec![0u64; n];
    let (mut reached, mut length_total, mut exact) = (0, 0, 0);
    for p in partials {
        for (acc, x) in interior.iter_mut().zip(&p.interior) {
            *acc += x;
        }
        for (acc, x) in endpoint.iter_mut().zip(&p.endpoint) {
            *acc += x;
        }
        reached += p.reached_pairs;
        length_total += p.length_total;
        exact += p.exact_sources;
    }
    // every unordered pair was seen from both of its ends
    let flows = interior
        .iter()
        .zip(&endpoint)
        .map(|(&i, &e)| i / 2.0 + e as f64)
        .collect();
    CongestionReport::from_flows(flows, reached / 2, length_total / 2, exact)
}

/// Exact per-vertex flows by explicit enumeration of every geodesic of
/// every connected pair. Exponential in the worst case; for tests only.
pub fn brute_force_flows_exact(g: &Graph) -> Result<(Vec<BigRational>, u64, u64)> {
    let n = g.n();
    if n > BRUTE_FORCE_CAP {
        return Err(Error::TooLarge {
            n,
            cap: BRUTE_FORCE_CAP,
        });
    }
    let mut flows = vec![BigRational::zero(); n];
    let mut demand = 0u64;
    let mut lengths = 0u64;
    let mut through = vec![0u64; n];
    for s in 0..n {
        let spd = bfs(g, s)?;
        for t in s + 1..n {
            let Some(len) = spd.dist[t] else { continue };
            demand += 1;
            lengths += u64::from(len);
            through.iter_mut().for_each(|c| *c = 0);
            let mut count = 0u64;
            let mut path = vec![t];
            enumerate_geodesics(&spd.preds, s, &mut path, &mut |p| {
                count += 1;
                for &v in p {
                    through[v] += 1;
                }
            });
            let total = BigInt::from(count);
            for v in 0..n {
                if through[v] > 0 {
                    flows[v] += BigRational::new(BigInt::from(through[v]), total.clone());
                }
            }
        }
    }
    Ok((flows, demand, lengths))
}

fn enumerate_geodesics(
    preds: &[Vec<usize>],
    source: usize,
    path: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    let v = *path.last().unwrap();
    if v == source {
        visit(path);
        return;
    }
    for &u in &preds[v] {
        path.push(u);
        enumerate_geodesics(preds, source, path, visit);
        path.pop();
    }
}

/// Same contract as [`vertex_congestion`], computed by [`brute_force_flows_exact`].
pub fn brute_force_congestion(g: &Graph) -> Result<CongestionReport> {
    let (exact, demand, lengths) = brute_force_flows_exact(g)?;
    let flows = exact
        .iter()
        .map(|r| r.to_f64().unwrap_or(f64::INFINITY))
        .collect();
    Ok(CongestionReport::from_flows(flows, demand, lengths, 0))
}

/// Maximum congestion of a complete `k`-regular tree with `n` vertices,
/// attained at the root: `(k-1)/(2k)·(n-1)² + n - 1`.
pub fn tree_max_congestion(k: usize, n: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "tree degree must be >= 2, got {k}"
        )));
    }
    let valid = (1..)
        .map(|depth| crate::generate::regular_tree_size(k, depth))
        .take_while(|&size| size <= n)
        .any(|size| size == n);
    if !valid {
        return Err(Error::InvalidParameter(format!(
            "{n} is not the size of a complete {k}-regular tree"
        )));
    }
    let m = (n - 1) as f64;
    Ok((k - 1) as f64 / (2 * k) as f64 * m * m + m)
}

/// Per-vertex flow bound for maximum degree `Δ` and diameter `D`:
/// `Δ²·(Δ-1)^(D-2)·D²`.
pub fn lemma_bound(max_degree: usize, diameter: u32) -> Result<f64> {
    if max_degree < 2 || diameter < 2 {
        return Err(Error::InvalidParameter(format!(
            "bound needs max degree >= 2 and diameter >= 2, got {max_degree} and {diameter}"
        )));
    }
    let delta = max_degree as f64;
    let d = f64::from(diameter);
    Ok(delta * delta * (delta - 1.0).powi(diameter as i32 - 2) * d * d)
}

/// Leading term `d^c · n · log_{d-1}(n)³` of the scaling bound for random
/// `d`-regular graphs.
pub fn theorem_scaling_bound(n: usize, d: usize, c_offset: f64) -> Result<f64> {
    if n < 3 || d < 3 {
        return Err(Error::InvalidParameter(format!(
            "scaling bound needs n >= 3 and d >= 3, got n={n} d={d}"
        )));
    }
    let log = (n as f64).ln() / ((d - 1) as f64).ln();
    Ok((d as f64).powf(c_offset) * n as f64 * log.powi(3))
}

/// Flow bound check at one vertex, with the sphere decomposition
/// `S_k = {x : d(v,x) = k}` used to derive it.
#[derive(Debug, Clone, PartialEq)]
pub struct LemmaCheck {
    pub vertex: usize,
    pub flow: f64,
    /// `|S_k|` for `k = 0..=eccentricity(v)`.
    pub sphere_sizes: Vec<u64>,
    /// Balls grow no faster than `|S_k| <= Δ(Δ-1)^(k-1)`.
    pub spheres_within_growth: bool,
    /// `Σ_{k+l<=D} |S_k|·|S_l|` over ordered `(k, l) != (0, 0)`.
    pub sphere_pair_sum: f64,
    pub bound: f64,
}

impl LemmaCheck {
    pub fn holds(&self) -> bool {
        self.flow <= self.bound
    }
}

/// Checks the closed-form bound at `report.argmax`.
pub fn lemma_check(g: &Graph, report: &CongestionReport) -> Result<LemmaCheck> {
    let diam = paths::diameter(g)?;
    let max_deg = g.max_degree();
    let bound = lemma_bound(max_deg, diam)?;
    let v = report.argmax;
    let dist = paths::bfs_hops(g, v);
    let ecc = dist.iter().copied().max().unwrap_or(0) as usize;
    let mut sphere_sizes = vec![0u64; ecc + 1];
    for &d in &dist {
        sphere_sizes[d as usize] += 1;
    }
    let spheres_within_growth = sphere_sizes.iter().enumerate().skip(1).all(|(k, &s)| {
        let cap = max_deg as f64 * (max_deg as f64 - 1.0).powi(k as i32 - 1);
        s as f64 <= cap
    });
    let mut sphere_pair_sum = 0.0;
    for (k, &sk) in sphere_sizes.iter().enumerate() {
        for (l, &sl) in sphere_sizes.iter().enumerate() {
            if k + l <= diam as usize && k + l > 0 {
                sphere_pair_sum += (sk * sl) as f64;
            }
        }
    }
    Ok(LemmaCheck {
        vertex: v,
        flow: report.flows[v],
        sphere_sizes,
        spheres_within_growth,
        sphere_pair_sum,
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{complete_graph, cycle_graph, path_graph, regular_tree};

    fn rat(num: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn assert_flows(r: &CongestionReport, expected: &[f64]) {
        assert_eq!(r.flows.len(), expected.len());
        for (a, b) in r.flows.iter().zip(expected) {
            assert!((a - b).abs() < 1e-9, "{:?} vs {:?}", r.flows, expected);
        }
    }

    #[test]
    fn path_of_three() {
        // pairs {0,1}, {1,2}, {0,2}; only {0,2} relays through 1
        let g = path_graph(3).unwrap();
        let r = vertex_congestion(&g);
        assert_flows(&r, &[2.0, 3.0, 2.0]);
        assert_eq!((r.max_flow, r.argmax), (3.0, 1));
        assert_eq!(r.total_demand, 3);
        assert_eq!(brute_force_congestion(&g).unwrap().flows, r.flows);
    }

    #[test]
    fn four_cycle_splits_antipodal_pairs() {
        let g = cycle_graph(4).unwrap();
        let r = vertex_congestion(&g);
        assert_flows(&r, &[3.5; 4]);
        assert_eq!(r.argmax, 0);
        let (exact, _, _) = brute_force_flows_exact(&g).unwrap();
        assert!(exact.iter().all(|t| *t == rat(7, 2)));
    }

    #[test]
    fn five_cycle() {
        let r = vertex_congestion(&cycle_graph(5).unwrap());
        assert_flows(&r, &[5.0; 5]);
        assert_eq!(r.max_flow, 5.0);
    }

    #[test]
    fn complete_graph_has_no_relay_traffic() {
        let g = complete_graph(4).unwrap();
        let (exact, _, _) = brute_force_flows_exact(&g).unwrap();
        assert!(exact.iter().all(|t| *t == rat(3, 1)));
        assert_flows(&vertex_congestion(&g), &[3.0; 4]);
    }

    #[test]
    fn ten_vertex_tree_peaks_at_root() {
        let g = regular_tree(3, 2).unwrap();
        let fast = vertex_congestion(&g);
        let slow = brute_force_congestion(&g).unwrap();
        assert_eq!(fast.argmax, 0);
        assert!((fast.max_flow - 36.0).abs() < 1e-9);
        assert_eq!(slow.max_flow, 36.0);
        assert_eq!(tree_max_congestion(3, 10).unwrap(), 36.0);
    }

    #[test]
    fn tree_formula_values() {
        for (k, n, expected) in [(3, 4, 6.0), (3, 10, 36.0), (4, 5, 10.0), (2, 7, 15.0)] {
            assert_eq!(tree_max_congestion(k, n).unwrap(), expected);
            let depth = (1..)
                .find(|&d| crate::generate::regular_tree_size(k, d) == n)
                .unwrap();
            let brute = brute_force_congestion(&regular_tree(k, depth).unwrap()).unwrap();
            assert_eq!(brute.max_flow, expected);
            assert_eq!(brute.argmax, 0);
        }
        // stars: everything touches the hub
        assert_eq!(tree_max_congestion(3, 4).unwrap(), 4.0 * 3.0 / 2.0);
        assert!(tree_max_congestion(3, 5).is_err());
        assert!(tree_max_congestion(1, 3).is_err());
    }

    #[test]
    fn lemma_bound_values() {
        assert_eq!(lemma_bound(3, 5).unwrap(), 1800.0);
        assert_eq!(lemma_bound(2, 4).unwrap(), 64.0);
        assert_eq!(lemma_bound(3, 2).unwrap(), 36.0);
        assert!(lemma_bound(1, 4).is_err());
        assert!(lemma_bound(3, 1).is_err());
    }

    #[test]
    fn scaling_bound_values() {
        assert!((theorem_scaling_bound(3, 4, 0.0).unwrap() - 3.0).abs() < 1e-12);
        assert!((theorem_scaling_bound(1024, 3, 0.0).unwrap() - 1_024_000.0).abs() < 1e-6);
        let mut prev = 0.0;
        for n in 3..500 {
            let b = theorem_scaling_bound(n, 6, 1.5).unwrap();
            assert!(b > prev);
            prev = b;
        }
        assert!(theorem_scaling_bound(2, 3, 0.0).is_err());
        assert!(theorem_scaling_bound(10, 2, 0.0).is_err());
    }

    #[test]
    fn disconnected_pairs_carry_nothing() {
        let g = Graph::build(5, &[(0, 1), (1, 2), (3, 4)]).unwrap();
        let r = vertex_congestion(&g);
        assert_flows(&r, &[2.0, 3.0, 2.0, 1.0, 1.0]);
        assert_eq!(r.total_demand, 4);
        assert_eq!(r.unrouted_pairs, 6);
        assert_eq!(brute_force_congestion(&g).unwrap().flows, r.flows);
        assert_eq!(vertex_congestion(&Graph::empty(3)).max_flow, 0.0);
    }

    #[test]
    fn brute_force_guard() {
        assert!(matches!(
            brute_force_congestion(&path_graph(201).unwrap()),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn huge_geodesic_counts_fall_back_to_exact() {
        // chain of 60 diamonds: 2^60 geodesics end to end
        let k = 60;
        let mut edges = Vec::new();
        for i in 0..k {
            let (a, b, c, d) = (3 * i, 3 * i + 1, 3 * i + 2, 3 * i + 3);
            edges.extend([(a, b), (a, c), (b, d), (c, d)]);
        }
        let g = Graph::build(3 * k + 1, &edges).unwrap();
        let r = vertex_congestion(&g);
        assert!(r.exact_sources > 0);
        let expected = (r.pair_length_total + r.total_demand) as f64;
        assert!((r.total_flow() - expected).abs() / expected < 1e-9);
        // every junction relays all traffic between the two sides
        let junction = 3 * 30;
        let left = junction as f64;
        let right = (g.n() - junction - 1) as f64;
        assert!(r.flows[junction] >= left * right + (g.n() - 1) as f64 - 1e-6);
    }

    #[test]
    fn csv_layout() {
        let csv = vertex_congestion(&path_graph(3).unwrap()).to_csv();
        assert_eq!(
            csv,
            "vertex,flow\n0,2\n1,3\n2,2\n# max_flow=3\n# argmax=1\n# total_demand=3\n# unrouted_pairs=0\n"
        );
    }

    #[test]
    fn lemma_check_on_cycle() {
        let g = cycle_graph(8).unwrap();
        let r = vertex_congestion(&g);
        let c = lemma_check(&g, &r).unwrap();
        assert_eq!(c.sphere_sizes, vec![1, 2, 2, 2, 1]);
        assert!(c.spheres_within_growth);
        assert!(c.holds());
        assert!(c.flow <= c.sphere_pair_sum);
    }
}
