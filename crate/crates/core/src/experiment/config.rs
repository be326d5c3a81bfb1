use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::generate::DEFAULT_MAX_RETRIES;
use crate::hyperbolicity::DEFAULT_EXACT_CAP;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    CongestionScaling,
    DeltaScaling,
    DiameterScaling,
    CycleStats,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::CongestionScaling => "congestion_scaling",
            Kind::DeltaScaling => "delta_scaling",
            Kind::DiameterScaling => "diameter_scaling",
            Kind::CycleStats => "cycle_stats",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Kind::CongestionScaling,
            Kind::DeltaScaling,
            Kind::DiameterScaling,
            Kind::CycleStats,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown experiment kind {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaMode {
    Exact,
    /// Cycle witnesses plus uniformly sampled quadruples.
    Sampled,
    /// Exact up to the exact-scan cap, sampled beyond.
    Auto,
}

impl FromStr for DeltaMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(DeltaMode::Exact),
            "sampled" => Ok(DeltaMode::Sampled),
            "auto" => Ok(DeltaMode::Auto),
            _ => Err(Error::InvalidParameter(format!("unknown delta_mode {s:?}"))),
        }
    }
}

/// Graph family to sweep. Anything but `Regular` is a debugging override.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Regular,
    Tree,
    Cycle,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "regular" => Ok(Family::Regular),
            "tree" => Ok(Family::Tree),
            "cycle" => Ok(Family::Cycle),
            _ => Err(Error::InvalidParameter(format!("unknown family {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub d: usize,
    pub n_values: Vec<usize>,
    pub replications: usize,
    pub seed: u64,
    pub delta_mode: DeltaMode,
    /// Sampled quadruples per graph in sampled mode.
    pub samples: u64,
    /// Cycle probes per graph, used for witnesses and `cycle_stats`.
    pub probe_pairs: usize,
    pub family: Family,
    /// Pairing attempts per regular graph.
    pub max_retries: u32,
    /// Fill the `runtime_ms` column. Off by default since wall-clock times
    /// would make reruns differ.
    pub timing: bool,
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(kind: Kind, d: usize, n_values: Vec<usize>) -> Self {
        ExperimentConfig {
            kind,
            d,
            n_values,
            replications: 20,
            seed: 0,
            delta_mode: DeltaMode::Auto,
            samples: 100_000,
            probe_pairs: 100,
            family: Family::Regular,
            max_retries: DEFAULT_MAX_RETRIES,
            timing: false,
            output_dir: None,
        }
    }

    /// Parses `key = value` lines. `#` starts a comment; lists are
    /// comma-separated.
    pub fn parse(text: &str) -> Result<Self> {
        let mut kind = None;
        let mut d = None;
        let mut n_values = None;
        let mut cfg = ExperimentConfig::new(Kind::CongestionScaling, 0, Vec::new());
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| Error::Parse { line: i + 1, msg };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key = value, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            let num = |v: &str| -> Result<u64> {
                v.parse()
                    .map_err(|_| bad(format!("{key}: expected a non-negative integer, got {v:?}")))
            };
            let wrap = |e: Error| bad(e.to_string());
            match key {
                "kind" => kind = Some(value.parse().map_err(wrap)?),
                "d" => d = Some(num(value)? as usize),
                "n_values" => {
                    n_values = Some(
                        value
                            .split(',')
                            .map(|v| num(v.trim()).map(|x| x as usize))
                            .collect::<Result<Vec<_>>>()?,
                    )
                }
                "replications" => cfg.replications = num(value)? as usize,
                "seed" => cfg.seed = num(value)?,
                "delta_mode" => cfg.delta_mode = value.parse().map_err(wrap)?,
                "samples" => cfg.samples = num(value)?,
                "probe_pairs" => cfg.probe_pairs = num(value)? as usize,
                "family" => cfg.family = value.parse().map_err(wrap)?,
                "max_retries" => cfg.max_retries = num(value)? as u32,
                "timing" => {
                    cfg.timing = match value {
                        "true" | "on" | "1" => true,
                        "false" | "off" | "0" => false,
                        _ => {
                            return Err(bad(format!("timing: expected true/false, got {value:?}")))
                        }
                    }
                }
                "output_dir" => cfg.output_dir = Some(PathBuf::from(value)),
                _ => return Err(bad(format!("unknown key {key:?}"))),
            }
        }
        let missing =
            |k: &str| Error::InvalidParameter(format!("config is missing required key {k:?}"));
        cfg.kind = kind.ok_or_else(|| missing("kind"))?;
        cfg.d = d.ok_or_else(|| missing("d"))?;
        cfg.n_values = n_values.ok_or_else(|| missing("n_values"))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |m: String| Err(Error::InvalidParameter(m));
        if self.n_values.is_empty() {
            return invalid("n_values is empty".into());
        }
        if self.n_values.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("n_values must be strictly increasing".into());
        }
        if self.max_retries < 1 {
            return invalid("max_retries must be at least 1".into());
        }
        if self.replications < 1 {
            return invalid("replications must be at least 1".into());
        }
        if self.family == Family::Regular && self.d < 1 {
            return invalid("d must be at least 1".into());
        }
        if self.kind == Kind::DeltaScaling
            && self.delta_mode == DeltaMode::Sampled
            && self.samples < 1
        {
            return invalid("sampled delta_mode needs samples >= 1".into());
        }
        let adjusted = self.adjusted_n_values();
        if adjusted.windows(2).any(|w| w[0].0 >= w[1].0) {
            return invalid("n_values collide after parity adjustment".into());
        }
        if self.kind == Kind::DeltaScaling && self.delta_mode == DeltaMode::Exact {
            if let Some(&(n, _)) = adjusted.iter().find(|(n, _)| *n > DEFAULT_EXACT_CAP) {
                return invalid(format!(
                    "exact delta_mode is limited to n <= {DEFAULT_EXACT_CAP}, got {n}"
                ));
            }
        }
        Ok(())
    }

    /// `(n, requested)` pairs: for regular graphs with `n·d` odd the sweep
    /// uses `n + 1`.
    pub fn adjusted_n_values(&self) -> Vec<(usize, usize)> {
        self.n_values
            .iter()
            .map(|&n| {
                if self.family == Family::Regular && (n * self.d) % 2 == 1 {
                    (n + 1, n)
                } else {
                    (n, n)
                }
            })
            .collect()
    }

    /// The config back in file form, one key per line.
    pub fn to_text(&self) -> String {
        let list: Vec<String> = self.n_values.iter().map(|n| n.to_string()).collect();
        let mut s = format!(
            "kind = {}\nd = {}\nn_values = {}\nreplications = {}\nseed = {}\ndelta_mode = {}\nsamples = {}\nprobe_pairs = {}\nfamily = {}\nmax_retries = {}\ntiming = {}\n",
            self.kind,
            self.d,
            list.join(","),
            self.replications,
            self.seed,
            match self.delta_mode {
                DeltaMode::Exact => "exact",
                DeltaMode::Sampled => "sampled",
                DeltaMode::Auto => "auto",
            },
            self.samples,
            self.probe_pairs,
            match self.family {
                Family::Regular => "regular",
                Family::Tree => "tree",
                Family::Cycle => "cycle",
            },
            self.max_retries,
            self.timing,
        );
        if let Some(dir) = &self.output_dir {
            s.push_str(&format!("output_dir = {}\n", dir.display()));
        }
        s
    }
}
