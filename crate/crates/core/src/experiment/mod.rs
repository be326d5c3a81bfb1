//! Scaling sweeps over `n` with replicated random graphs, CSV output and
//! SVG plots against reference curves.
//!
//! Replicate `r` at size `n` always uses the graph seed
//! [`replicate_seed`]`(master, n, r)`, so any single row can be reproduced
//! on its own. Replicates of one `n` run concurrently; rows are written in
//! `(n, replicate)` order once the whole block is done.

mod config;
pub mod plot;

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;

pub use config::{DeltaMode, ExperimentConfig, Family, Kind};

use crate::congestion::vertex_congestion;
use crate::cycle_probe::{self, median_sorted, probe_statistics, witness_and_sampled_delta};
use crate::error::{Error, Result};
use crate::generate::{cycle_graph, random_regular, random_tree, GenSpec};
use crate::graph::Graph;
use crate::hyperbolicity::{exact_delta, HyperbolicityReport, DEFAULT_EXACT_CAP};
use crate::paths::diameter;
use crate::seed;

/// Graph seed of replicate `replicate` at size `n`.
pub fn replicate_seed(master: u64, n: usize, replicate: usize) -> u64 {
    seed::derive(master, n as u64, replicate as u64)
}

/// `log_{d-1} n + log_{d-1} log_{d-1} n`, the `n`-dependent part of the
/// random regular diameter bound.
pub fn diameter_reference(n: usize, d: usize) -> Option<f64> {
    cycle_probe::reference_scales(n, d).map(|(l, ll)| l + ll)
}

/// Condensed cycle-probe statistics for one graph.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeDigest {
    pub found_fraction: f64,
    pub median_length: Option<f64>,
    pub median_defect: Option<f64>,
    pub median_quadruple_defect: Option<f64>,
    pub max_quadruple_defect: Option<f64>,
    pub chain_holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateRow {
    pub n: usize,
    pub replicate: usize,
    pub seed: u64,
    pub max_flow: Option<f64>,
    pub diameter: Option<u32>,
    pub delta: Option<HyperbolicityReport>,
    pub probe: Option<ProbeDigest>,
    pub runtime_ms: Option<u128>,
}

impl ReplicateRow {
    /// The quantity aggregated and plotted for `kind`.
    pub fn metric(&self, kind: Kind) -> Option<f64> {
        match kind {
            Kind::CongestionScaling => self.max_flow,
            Kind::DeltaScaling => self.delta.as_ref().map(|r| r.delta()),
            Kind::DiameterScaling => self.diameter.map(f64::from),
            Kind::CycleStats => self.probe.as_ref().and_then(|p| p.median_length),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub n: usize,
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation, 0 for a single replicate.
    pub std: f64,
    pub median: f64,
}

impl Aggregate {
    pub fn of(n: usize, values: &[f64]) -> Option<Aggregate> {
        if values.is_empty() {
            return None;
        }
        let count = values.len();
        let mean = values.iter().sum::<f64>() / count as f64;
        let std = if count > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64).sqrt()
        } else {
            0.0
        };
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Some(Aggregate {
            n,
            count,
            mean,
            std,
            median: median_sorted(&sorted),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub rows: Vec<ReplicateRow>,
    pub aggregates: Vec<Aggregate>,
    /// Fitted diameter offset: the largest `D - log_{d-1} n - log_{d-1}
    /// log_{d-1} n` over all runs where a diameter was measured.
    pub fitted_offset: Option<f64>,
    /// Parity adjustments and skipped replicates.
    pub warnings: Vec<String>,
    /// CSV body without the timestamp line.
    pub csv: String,
    pub csv_path: Option<PathBuf>,
    pub plot_path: Option<PathBuf>,
}

impl ExperimentResult {
    pub fn aggregate(&self, n: usize) -> Option<&Aggregate> {
        self.aggregates.iter().find(|a| a.n == n)
    }
}

fn csv_header(kind: Kind) -> &'static str {
    match kind {
        Kind::CongestionScaling => "n,replicate,seed,M,diameter,runtime_ms",
        Kind::DeltaScaling => "n,replicate,seed,delta,mode,x1,x2,x3,x4,samples_used,runtime_ms",
        Kind::DiameterScaling => "n,replicate,seed,diameter,reference,offset,runtime_ms",
        Kind::CycleStats => {
            "n,replicate,seed,found_fraction,median_length,median_defect,median_quadruple_defect,max_quadruple_defect,runtime_ms"
        }
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_row(kind: Kind, d: usize, r: &ReplicateRow) -> String {
    let head = format!("{},{},{}", r.n, r.replicate, r.seed);
    let runtime = opt(r.runtime_ms);
    match kind {
        Kind::CongestionScaling => {
            format!("{head},{},{},{runtime}", opt(r.max_flow), opt(r.diameter))
        }
        Kind::DeltaScaling => {
            let h = r.delta.as_ref().expect("delta row");
            let [a, b, c, e] = h.witness;
            format!(
                "{head},{},{},{a},{b},{c},{e},{},{runtime}",
                h.delta(),
                h.mode,
                h.samples_used
            )
        }
        Kind::DiameterScaling => {
            let reference = diameter_reference(r.n, d);
            let offset = r.diameter.zip(reference).map(|(dm, rf)| f64::from(dm) - rf);
            format!(
                "{head},{},{},{},{runtime}",
                opt(r.diameter),
                opt(reference),
                opt(offset)
            )
        }
        Kind::CycleStats => {
            let p = r.probe.as_ref().expect("probe row");
            format!(
                "{head},{},{},{},{},{},{runtime}",
                p.found_fraction,
                opt(p.median_length),
                opt(p.median_defect),
                opt(p.median_quadruple_defect),
                opt(p.max_quadruple_defect)
            )
        }
    }
}

fn aggregate_row(a: &Aggregate) -> String {
    format!("{},,,\"mean\",{},{}", a.n, a.mean, a.std)
}

fn build_graph(cfg: &ExperimentConfig, n: usize, graph_seed: u64) -> Result<Graph> {
    match cfg.family {
        Family::Regular => random_regular(&GenSpec {
            max_retries: cfg.max_retries,
            ..GenSpec::new(n, cfg.d, graph_seed)
        }),
        Family::Tree => random_tree(n, graph_seed),
        Family::Cycle => cycle_graph(n),
    }
}

fn run_replicate(cfg: &ExperimentConfig, n: usize, replicate: usize) -> Result<ReplicateRow> {
    let graph_seed = replicate_seed(cfg.seed, n, replicate);
    let start = Instant::now();
    let g = build_graph(cfg, n, graph_seed)?;
    let mut row = ReplicateRow {
        n,
        replicate,
        seed: graph_seed,
        max_flow: None,
        diameter: None,
        delta: None,
        probe: None,
        runtime_ms: None,
    };
    // analysis seeds are kept apart from the graph seed
    let analysis_seed = seed::mix64(graph_seed);
    match cfg.kind {
        Kind::CongestionScaling => {
            row.max_flow = Some(vertex_congestion(&g).max_flow);
            row.diameter = Some(diameter(&g)?);
        }
        Kind::DiameterScaling => row.diameter = Some(diameter(&g)?),
        Kind::DeltaScaling => {
            let exact = match cfg.delta_mode {
                DeltaMode::Exact => true,
                DeltaMode::Sampled => false,
                DeltaMode::Auto => n <= DEFAULT_EXACT_CAP,
            };
            row.delta = Some(if exact {
                exact_delta(&g)?
            } else {
                witness_and_sampled_delta(&g, cfg.probe_pairs, cfg.samples, analysis_seed)?
            });
        }
        Kind::CycleStats => {
            let s = probe_statistics(&g, cfg.probe_pairs, analysis_seed)?;
            row.probe = Some(ProbeDigest {
                found_fraction: s.found_fraction,
                median_length: s.length.map(|x| x.median),
                median_defect: s.defect.map(|x| x.median),
                median_quadruple_defect: s.quadruple_defect.map(|x| x.median),
                max_quadruple_defect: s.quadruple_defect.map(|x| x.max),
                chain_holds: s.chain_holds,
            });
        }
    }
    if cfg.timing {
        row.runtime_ms = Some(start.elapsed().as_millis());
    }
    Ok(row)
}

struct Sink {
    file: Option<BufWriter<File>>,
    path: Option<PathBuf>,
    body: String,
}

impl Sink {
    fn open(dir: Option<&Path>, kind: Kind) -> Result<Sink> {
        let (file, path) = match dir {
            Some(dir) => {
                fs::create_dir_all(dir).map_err(io_err)?;
                let path = dir.join(format!("{kind}.csv"));
                let mut f = BufWriter::new(File::create(&path).map_err(io_err)?);
                let stamp = SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0);
                writeln!(f, "# generated_at_unix={stamp}").map_err(io_err)?;
                (Some(f), Some(path))
            }
            None => (None, None),
        };
        Ok(Sink {
            file,
            path,
            body: String::new(),
        })
    }

    fn line(&mut self, line: &str) -> Result<()> {
        self.body.push_str(line);
        self.body.push('\n');
        if let Some(f) = self.file.as_mut() {
            writeln!(f, "{line}").map_err(io_err)?;
        }
        Ok(())
    }

    fn flush(&mut self) -> Result<()> {
        if let Some(f) = self.file.as_mut() {
            f.flush().map_err(io_err)?;
        }
        Ok(())
    }

    fn mark_incomplete(&mut self, err: &Error) {
        let _ = self.line(&format!("# INCOMPLETE: {err}"));
        let _ = self.flush();
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

/// Runs the sweep described by `cfg`. With an `output_dir`, writes
/// `<kind>.csv` incrementally and `<kind>.svg` at the end. Replicates whose
/// graph cannot be generated are skipped with a warning.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let mut sink = Sink::open(cfg.output_dir.as_deref(), cfg.kind)?;
    match sweep(cfg, &mut sink) {
        Ok(mut result) => {
            sink.flush()?;
            if let Some(dir) = &cfg.output_dir {
                let path = dir.join(format!("{}.svg", cfg.kind));
                fs::write(&path, build_plot(&result).to_svg()).map_err(io_err)?;
                result.plot_path = Some(path);
            }
            result.csv_path = sink.path.clone();
            result.csv = sink.body;
            Ok(result)
        }
        Err(e) => {
            sink.mark_incomplete(&e);
            Err(e)
        }
    }
}

fn sweep(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<ExperimentResult> {
    let mut warnings = Vec::new();
    sink.line(&format!(
        "# kind={} d={} replications={} seed={} family={:?}",
        cfg.kind, cfg.d, cfg.replications, cfg.seed, cfg.family
    ))?;
    for (n, requested) in cfg.adjusted_n_values() {
        if n != requested {
            let w = format!("n={requested} has odd n*d with d={}; using n={n}", cfg.d);
            sink.line(&format!("# adjusted: {w}"))?;
            warnings.push(w);
        }
    }
    sink.line(csv_header(cfg.kind))?;

    let mut rows = Vec::new();
    let mut aggregates = Vec::new();
    for (n, _) in cfg.adjusted_n_values() {
        let block: Vec<Result<ReplicateRow>> = (0..cfg.replications)
            .into_par_iter()
            .map(|r| run_replicate(cfg, n, r))
            .collect();
        let mut values = Vec::new();
        for (r, outcome) in block.into_iter().enumerate() {
            match outcome {
                Ok(row) => {
                    sink.line(&csv_row(cfg.kind, cfg.d, &row))?;
                    if let Some(v) = row.metric(cfg.kind) {
                        values.push(v);
                    }
                    rows.push(row);
                }
                Err(e @ Error::RetriesExhausted(_)) => {
                    let w = format!("skipped n={n} replicate={r}: {e}");
                    sink.line(&format!("# {w}"))?;
                    warnings.push(w);
                }
                Err(e) => return Err(e),
            }
        }
        if let Some(a) = Aggregate::of(n, &values) {
            sink.line(&aggregate_row(&a))?;
            aggregates.push(a);
        }
        sink.flush()?;
    }

    let fitted_offset = rows
        .iter()
        .filter_map(|r| Some(f64::from(r.diameter?) - diameter_reference(r.n, cfg.d)?))
        .reduce(f64::max);
    Ok(ExperimentResult {
        config: cfg.clone(),
        rows,
        aggregates,
        fitted_offset,
        warnings,
        csv: String::new(),
        csv_path: None,
        plot_path: None,
    })
}

type ReferenceFn = Box<dyn Fn(f64) -> f64>;

/// Reference curve scaled so that it passes through `anchor`.
fn anchored_curve(
    label: &str,
    xs: &[f64],
    anchor: (f64, f64),
    f: impl Fn(f64) -> f64,
) -> Option<plot::Curve> {
    let at = f(anchor.0);
    if !(at.is_finite() && at > 0.0) {
        return None;
    }
    let scale = anchor.1 / at;
    Some(plot::Curve {
        label: label.to_string(),
        points: xs.iter().map(|&x| (x, scale * f(x))).collect(),
    })
}

pub fn build_plot(result: &ExperimentResult) -> plot::Plot {
    let cfg = &result.config;
    let points: Vec<(f64, f64)> = result
        .aggregates
        .iter()
        .map(|a| (a.n as f64, a.mean))
        .collect();
    let errors = result.aggregates.iter().map(|a| a.std).collect();
    let mut curves = Vec::new();
    if let (Some(&(x_lo, _)), Some(&anchor)) = (points.first(), points.last()) {
        let xs: Vec<f64> = (0..=60)
            .map(|i| x_lo + (anchor.0 - x_lo) * i as f64 / 60.0)
            .collect();
        let base = ((cfg.d.max(3) - 1) as f64).ln();
        let logd = move |x: f64| x.ln() / base;
        let specs: Vec<(&str, ReferenceFn)> = match cfg.kind {
            Kind::CongestionScaling => vec![
                ("n^2", Box::new(|x| x * x)),
                ("n log_{d-1}^3 n", Box::new(move |x| x * logd(x).powi(3))),
                ("n log n", Box::new(|x| x * x.ln())),
            ],
            Kind::DeltaScaling => vec![(
                "log_{d-1} n - 2 log_{d-1} log_{d-1} n",
                Box::new(move |x| logd(x) - 2.0 * logd(logd(x))),
            )],
            Kind::DiameterScaling => vec![(
                "log_{d-1} n + log_{d-1} log_{d-1} n",
                Box::new(move |x| logd(x) + logd(logd(x))),
            )],
            Kind::CycleStats => vec![("2 log_{d-1} n", Box::new(move |x| 2.0 * logd(x)))],
        };
        curves = specs
            .iter()
            .filter_map(|(label, f)| anchored_curve(label, &xs, anchor, f))
            .collect();
    }
    let (title, y_label) = match cfg.kind {
        Kind::CongestionScaling => ("Maximum vertex flow", "mean M_n"),
        Kind::DeltaScaling => ("Four-point hyperbolicity", "mean delta"),
        Kind::DiameterScaling => ("Diameter", "mean D"),
        Kind::CycleStats => ("Probe cycle length", "mean median |C|"),
    };
    plot::Plot {
        title: format!("{title}, d = {}", cfg.d),
        x_label: "n".into(),
        y_label: y_label.into(),
        points,
        errors,
        curves,
    }
}
