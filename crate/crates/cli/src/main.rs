use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use regraph_core::congestion::{brute_force_congestion, vertex_congestion};
use regraph_core::cycle_probe::{probe_statistics, reference_scales};
use regraph_core::experiment::{run_experiment, ExperimentConfig};
use regraph_core::generate::{random_regular, GenSpec};
use regraph_core::hyperbolicity::{
    exact_delta, sampled_delta, HyperbolicityReport, DEFAULT_EXACT_CAP,
};
use regraph_core::paths::diameter;
use regraph_core::{read_edge_list, write_edge_list, Graph};

const DEFAULT_SAMPLES: u64 = 100_000;

#[derive(Parser)]
#[command(
    name = "regraph",
    version,
    about = "Random regular graphs: congestion, hyperbolicity and diameter"
)]
struct Cli {
    /// Worker threads (overrides REGRAPH_THREADS; default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a uniform random d-regular graph and write it as an edge list.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Accept a disconnected sample instead of retrying.
        #[arg(long)]
        allow_disconnected: bool,
    },
    /// Per-vertex flow under geodesic routing with equal splitting.
    Congestion {
        #[arg(long = "in")]
        input: PathBuf,
        /// Use the exact rational brute-force enumeration (n <= 200).
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Four-point hyperbolicity constant.
    Delta {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, conflicts_with = "samples")]
        exact: bool,
        /// Number of uniformly sampled quadruples.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Graph diameter.
    Diameter {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Almost-geodesic cycles through random vertex pairs.
    CycleProbe {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 100)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a scaling sweep described by a key = value config file.
    Experiment {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn load(path: &Path) -> anyhow::Result<Graph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    read_edge_list(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Generate {
            n,
            d,
            seed,
            out,
            allow_disconnected,
        } => {
            let spec = GenSpec {
                require_connected: !allow_disconnected,
                ..GenSpec::new(n, d, seed)
            };
            let g = random_regular(&spec)?;
            emit(out.as_deref(), &write_edge_list(&g))
        }
        Command::Congestion { input, oracle, out } => {
            let g = load(&input)?;
            let report = if oracle {
                brute_force_congestion(&g)?
            } else {
                vertex_congestion(&g)
            };
            if report.unrouted_pairs > 0 {
                eprintln!(
                    "warning: {} vertex pairs are disconnected and carry no flow",
                    report.unrouted_pairs
                );
            }
            emit(out.as_deref(), &report.to_csv())
        }
        Command::Delta {
            input,
            exact,
            samples,
            seed,
            format,
        } => {
            let g = load(&input)?;
            let report: HyperbolicityReport = match samples {
                Some(k) => sampled_delta(&g, k, seed)?,
                None if exact || g.n() <= DEFAULT_EXACT_CAP => exact_delta(&g)?,
                None => sampled_delta(&g, DEFAULT_SAMPLES, seed)?,
            };
            match format {
                Format::Csv => {
                    println!("{}", HyperbolicityReport::CSV_HEADER);
                    println!("{}", report.to_csv_row());
                }
                Format::Json => println!("{}", report.to_json_line()),
            }
            Ok(())
        }
        Command::Diameter { input } => {
            let g = load(&input)?;
            let dm = diameter(&g)?;
            println!("{dm}");
            if let Some((l, ll)) = g.regular_degree().and_then(|d| reference_scales(g.n(), d)) {
                println!(
                    "# log_{{d-1}}(n) + log_{{d-1}}(log_{{d-1}}(n)) = {}",
                    l + ll
                );
            }
            Ok(())
        }
        Command::CycleProbe {
            input,
            pairs,
            seed,
            out,
        } => {
            let g = load(&input)?;
            if g.n() < 2 {
                bail!("cycle probes need at least 2 vertices");
            }
            let summary = probe_statistics(&g, pairs, seed)?;
            emit(out.as_deref(), &summary.to_csv())
        }
        Command::Experiment { config } => {
            let text = fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            let cfg = ExperimentConfig::parse(&text)
                .with_context(|| format!("in {}", config.display()))?;
            let result = run_experiment(&cfg)?;
            for w in &result.warnings {
                eprintln!("warning: {w}");
            }
            match &result.csv_path {
                Some(p) => {
                    eprintln!("wrote {}", p.display());
                    if let Some(svg) = &result.plot_path {
                        eprintln!("wrote {}", svg.display());
                    }
                }
                None => print!("{}", result.csv),
            }
            if let Some(c) = result.fitted_offset {
                eprintln!("fitted diameter offset: {c}");
            }
            Ok(())
        }
    }
}

fn thread_count(flag: Option<usize>) -> anyhow::Result<Option<usize>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("REGRAPH_THREADS") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .with_context(|| format!("REGRAPH_THREADS={v:?} is not a thread count")),
        Err(_) => Ok(None),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let threads = match thread_count(cli.threads) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let outcome = builder
        .build()
        .context("starting worker pool")
        .and_then(|pool| pool.install(|| run(cli.command)));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
