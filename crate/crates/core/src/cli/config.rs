//! Run configuration: command-line flags layered over an optional flat
//! `key = value` file.
//!
//! File syntax, one setting per line:
//!
//! ```text
//! # comment
//! m = 1000
//! n = [10, 100]
//! g_max = 800
//! decomposition = general-d1
//! out = "series.csv"
//! log_y = true
//! ```
//!
//! Keys may use `-` or `_`. Unknown keys and ill-typed values are rejected
//! with the offending line number. Flags always win over the file.

use std::path::{Path, PathBuf};

use clap::{Args, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::experiments::{Decomposition, DEFAULT_BASE_EXPONENT};
use crate::model::{CouplingMode, TimeGrid};

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_G: f64 = 400.0;
pub const DEFAULT_SEEDS: usize = 5;
pub const DEFAULT_ORACLE_TIMES: usize = 20;
pub const SEED_ENV: &str = "SPINBATH_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DecompositionArg {
    OriginalD1,
    OriginalD2,
    GeneralD1,
    GeneralD2,
}

impl From<DecompositionArg> for Decomposition {
    fn from(d: DecompositionArg) -> Self {
        match d {
            DecompositionArg::OriginalD1 => Decomposition::OriginalD1,
            DecompositionArg::OriginalD2 => Decomposition::OriginalD2,
            DecompositionArg::GeneralD1 => Decomposition::GeneralD1,
            DecompositionArg::GeneralD2 => Decomposition::GeneralD2,
        }
    }
}

/// Flags shared by every subcommand. All are optional so that a config file
/// can supply them.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Config file with `key = value` lines
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// System size M (comma-separated list for sweep)
    #[arg(long, value_delimiter = ',')]
    pub m: Vec<usize>,
    /// Environment size N (comma-separated list for sweep)
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    /// Constant coupling g for every environment particle
    #[arg(long, conflicts_with = "g_max")]
    pub g: Option<f64>,
    /// Couplings drawn uniformly from [0, g_max]
    #[arg(long)]
    pub g_max: Option<f64>,
    /// End of the time window in seconds
    #[arg(long)]
    pub t0: Option<f64>,
    /// Number of grid intervals (samples = points + 1)
    #[arg(long)]
    pub points: Option<usize>,
    /// Random seed
    #[arg(long, env = SEED_ENV)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub decomposition: Option<DecompositionArg>,
    /// Raise |r|² to the power 10^a
    #[arg(long, allow_hyphen_values = true)]
    pub power_exponent: Option<i32>,
    /// CSV output path (stdout when absent)
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Also write an SVG plot
    #[arg(long, value_name = "PATH")]
    pub svg: Option<PathBuf>,
    /// Logarithmic value axis in the SVG
    #[arg(long)]
    pub log_y: bool,
    /// Figure number
    #[arg(long)]
    pub id: Option<u32>,
    /// CSV series to fit
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Largest system size for oracle-check
    #[arg(long)]
    pub max_m: Option<usize>,
    /// Largest environment size for oracle-check
    #[arg(long)]
    pub max_n: Option<usize>,
    /// Number of seeds for oracle-check
    #[arg(long)]
    pub seeds: Option<usize>,
    /// Random times per oracle-check case
    #[arg(long)]
    pub times: Option<usize>,
    /// Simulate |r|² directly up to N = 10^k, power-scale beyond
    #[arg(long)]
    pub base_exponent: Option<u32>,
    /// Worker threads (results do not depend on it)
    #[arg(long, hide = true)]
    pub threads: Option<usize>,
    /// Progress and summary on stderr
    #[arg(long, short)]
    pub verbose: bool,
}

#[derive(Debug, Clone, Subcommand)]
pub enum CommandArgs {
    /// Time series for one configuration
    Simulate(CommonArgs),
    /// Regenerate the curves of a figure
    Figure(CommonArgs),
    /// Fit exponential decay times to CSV curves
    Fit(CommonArgs),
    /// Compare closed forms against brute-force evolution
    OracleCheck(CommonArgs),
    /// Decoherence verdicts over an (M, N) grid
    Sweep(CommonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Figure,
    Fit,
    OracleCheck,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Figure => "figure",
            Command::Fit => "fit",
            Command::OracleCheck => "oracle-check",
            Command::Sweep => "sweep",
        }
    }
}

/// Fully resolved settings of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub m: Vec<usize>,
    pub n: Vec<usize>,
    pub coupling: CouplingMode,
    pub seed: u64,
    pub t0: Option<f64>,
    pub points: usize,
    pub decomposition: Decomposition,
    pub power_exponent: i32,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub log_y: bool,
    pub id: Option<u32>,
    pub input: Option<PathBuf>,
    pub max_m: usize,
    pub max_n: usize,
    pub seeds: usize,
    pub times: usize,
    pub base_exponent: u32,
    pub threads: Option<usize>,
    pub verbose: bool,
}

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Int(i64),
    Float(f64),
    Bool(bool),
    Str(String),
    List(Vec<Value>),
}

impl Value {
    fn parse_scalar(raw: &str) -> Value {
        let raw = raw.trim();
        if raw.len() >= 2 && raw.starts_with('"') && raw.ends_with('"') {
            return Value::Str(raw[1..raw.len() - 1].to_string());
        }
        match raw {
            "true" => return Value::Bool(true),
            "false" => return Value::Bool(false),
            _ => {}
        }
        if let Ok(i) = raw.parse::<i64>() {
            return Value::Int(i);
        }
        if let Ok(f) = raw.parse::<f64>() {
            return Value::Float(f);
        }
        Value::Str(raw.to_string())
    }

    fn parse(raw: &str) -> std::result::Result<Value, String> {
        let raw = raw.trim();
        if raw.is_empty() {
            return Err("missing value".into());
        }
        if let Some(inner) = raw.strip_prefix('[') {
            let inner = inner.strip_suffix(']').ok_or("unterminated list")?;
            if inner.trim().is_empty() {
                return Ok(Value::List(Vec::new()));
            }
            return Ok(Value::List(inner.split(',').map(Value::parse_scalar).collect()));
        }
        if raw.contains(',') && !raw.starts_with('"') {
            return Ok(Value::List(raw.split(',').map(Value::parse_scalar).collect()));
        }
        Ok(Value::parse_scalar(raw))
    }

    fn as_f64(&self) -> std::result::Result<f64, String> {
        match self {
            Value::Int(i) => Ok(*i as f64),
            Value::Float(f) => Ok(*f),
            other => Err(format!("expected a number, found {other:?}")),
        }
    }

    fn as_int<T: TryFrom<i64>>(&self) -> std::result::Result<T, String> {
        match self {
            Value::Int(i) => T::try_from(*i).map_err(|_| format!("integer {i} out of range")),
            other => Err(format!("expected an integer, found {other:?}")),
        }
    }

    fn as_usize_list(&self) -> std::result::Result<Vec<usize>, String> {
        match self {
            Value::List(items) => items.iter().map(|v| v.as_int()).collect(),
            scalar => Ok(vec![scalar.as_int()?]),
        }
    }

    fn as_bool(&self) -> std::result::Result<bool, String> {
        match self {
            Value::Bool(b) => Ok(*b),
            other => Err(format!("expected true or false, found {other:?}")),
        }
    }

    fn as_str(&self) -> std::result::Result<String, String> {
        match self {
            Value::Str(s) => Ok(s.clone()),
            Value::Int(i) => Ok(i.to_string()),
            Value::Float(f) => Ok(f.to_string()),
            other => Err(format!("expected a string, found {other:?}")),
        }
    }
}

/// Settings read from a config file; `None` means not set there.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileConfig {
    pub m: Option<Vec<usize>>,
    pub n: Option<Vec<usize>>,
    pub g: Option<f64>,
    pub g_max: Option<f64>,
    pub t0: Option<f64>,
    pub points: Option<usize>,
    pub seed: Option<u64>,
    pub decomposition: Option<Decomposition>,
    pub power_exponent: Option<i32>,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub log_y: Option<bool>,
    pub id: Option<u32>,
    pub input: Option<PathBuf>,
    pub max_m: Option<usize>,
    pub max_n: Option<usize>,
    pub seeds: Option<usize>,
    pub times: Option<usize>,
    pub base_exponent: Option<u32>,
    pub verbose: Option<bool>,
}

/// Parses config-file text. `path` only labels errors.
pub fn parse_config_text(text: &str, path: &Path) -> Result<FileConfig> {
    let mut cfg = FileConfig::default();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line: line_no,
            message,
        };
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, raw) = line
            .split_once('=')
            .ok_or_else(|| err("expected `key = value`".into()))?;
        let key = key.trim().replace('-', "_");
        let value = Value::parse(raw).map_err(&err)?;
        let res: std::result::Result<(), String> = (|| {
            match key.as_str() {
                "m" => cfg.m = Some(value.as_usize_list()?),
                "n" => cfg.n = Some(value.as_usize_list()?),
                "g" => cfg.g = Some(value.as_f64()?),
                "g_max" => cfg.g_max = Some(value.as_f64()?),
                "t0" => cfg.t0 = Some(value.as_f64()?),
                "points" => cfg.points = Some(value.as_int()?),
                "seed" => cfg.seed = Some(value.as_int()?),
                "decomposition" => {
                    let s = value.as_str()?;
                    cfg.decomposition =
                        Some(Decomposition::parse(&s).ok_or_else(|| format!("unknown decomposition '{s}'"))?)
                }
                "power_exponent" => cfg.power_exponent = Some(value.as_int()?),
                "out" => cfg.out = Some(value.as_str()?.into()),
                "svg" => cfg.svg = Some(value.as_str()?.into()),
                "log_y" => cfg.log_y = Some(value.as_bool()?),
                "id" => cfg.id = Some(value.as_int()?),
                "input" => cfg.input = Some(value.as_str()?.into()),
                "max_m" => cfg.max_m = Some(value.as_int()?),
                "max_n" => cfg.max_n = Some(value.as_int()?),
                "seeds" => cfg.seeds = Some(value.as_int()?),
                "times" => cfg.times = Some(value.as_int()?),
                "base_exponent" => cfg.base_exponent = Some(value.as_int()?),
                "verbose" => cfg.verbose = Some(value.as_bool()?),
                other => return Err(format!("unknown key '{other}'")),
            }
            Ok(())
        })();
        res.map_err(err)?;
    }
    if cfg.g.is_some() && cfg.g_max.is_some() {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            message: "both g and g_max set".into(),
        });
    }
    Ok(cfg)
}

pub fn read_config_file(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_text(&text, path)
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")))
    }
}

impl RunConfig {
    /// Layers `flags` over `file` and fills defaults.
    pub fn resolve(command: Command, flags: &CommonArgs, file: FileConfig) -> Result<RunConfig> {
        let coupling = match (flags.g, flags.g_max, file.g, file.g_max) {
            (Some(g), _, _, _) => CouplingMode::Constant(positive("g", g)?),
            (None, Some(g), _, _) => CouplingMode::UniformRandom(positive("g_max", g)?),
            (None, None, Some(g), _) => CouplingMode::Constant(positive("g", g)?),
            (None, None, None, Some(g)) => CouplingMode::UniformRandom(positive("g_max", g)?),
            _ => CouplingMode::Constant(DEFAULT_G),
        };
        let pick_list = |flag: &Vec<usize>, file: Option<Vec<usize>>| {
            if flag.is_empty() {
                file.unwrap_or_default()
            } else {
                flag.clone()
            }
        };
        let cfg = RunConfig {
            command,
            m: pick_list(&flags.m, file.m),
            n: pick_list(&flags.n, file.n),
            coupling,
            seed: flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            t0: flags.t0.or(file.t0),
            points: flags.points.or(file.points).unwrap_or(TimeGrid::DEFAULT_INTERVALS),
            decomposition: flags
                .decomposition
                .map(Decomposition::from)
                .or(file.decomposition)
                .unwrap_or(match command {
                    Command::Sweep => Decomposition::GeneralD1,
                    _ => Decomposition::OriginalD1,
                }),
            power_exponent: flags.power_exponent.or(file.power_exponent).unwrap_or(0),
            out: flags.out.clone().or(file.out),
            svg: flags.svg.clone().or(file.svg),
            log_y: flags.log_y || file.log_y.unwrap_or(false),
            id: flags.id.or(file.id),
            input: flags.input.clone().or(file.input),
            max_m: flags.max_m.or(file.max_m).unwrap_or(2),
            max_n: flags.max_n.or(file.max_n).unwrap_or(3),
            seeds: flags.seeds.or(file.seeds).unwrap_or(DEFAULT_SEEDS),
            times: flags.times.or(file.times).unwrap_or(DEFAULT_ORACLE_TIMES),
            base_exponent: flags.base_exponent.or(file.base_exponent).unwrap_or(DEFAULT_BASE_EXPONENT),
            threads: flags.threads,
            verbose: flags.verbose || file.verbose.unwrap_or(false),
        };
        if let Some(t0) = cfg.t0 {
            positive("t0", t0)?;
        }
        if cfg.points < 2 {
            return Err(Error::InvalidArgument(format!("points must be at least 2, got {}", cfg.points)));
        }
        if cfg.m.contains(&0) || cfg.n.contains(&0) {
            return Err(Error::InvalidArgument("m and n must be positive".into()));
        }
        if cfg.seeds == 0 || cfg.times == 0 {
            return Err(Error::InvalidArgument("seeds and times must be positive".into()));
        }
        if cfg.threads == Some(0) {
            return Err(Error::InvalidArgument("threads must be positive".into()));
        }
        Ok(cfg)
    }

    /// Settings that determine the output of this command, as
    /// `(key, value)` pairs in config-file syntax.
    pub fn effective(&self) -> Vec<(String, String)> {
        let list = |v: &[usize]| {
            let items: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            format!("[{}]", items.join(", "))
        };
        let coupling = match self.coupling {
            CouplingMode::Constant(g) => ("g".to_string(), g.to_string()),
            CouplingMode::UniformRandom(g) => ("g_max".to_string(), g.to_string()),
        };
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| format!("\"{}\"", p.display()));
        let mut out: Vec<(String, Option<String>)> = Vec::new();
        match self.command {
            Command::Simulate => {
                out.push(("m".into(), Some(list(&self.m))));
                out.push(("n".into(), Some(list(&self.n))));
                out.push((coupling.0, Some(coupling.1)));
                out.push(("seed".into(), Some(self.seed.to_string())));
                out.push(("t0".into(), self.t0.map(|t| t.to_string())));
                out.push(("points".into(), Some(self.points.to_string())));
                out.push(("decomposition".into(), Some(self.decomposition.name().into())));
                out.push(("power_exponent".into(), Some(self.power_exponent.to_string())));
            }
            Command::Figure => {
                out.push(("id".into(), self.id.map(|i| i.to_string())));
                out.push(("seed".into(), Some(self.seed.to_string())));
                out.push(("t0".into(), self.t0.map(|t| t.to_string())));
                out.push(("points".into(), Some(self.points.to_string())));
                out.push(("base_exponent".into(), Some(self.base_exponent.to_string())));
            }
            Command::Fit => out.push(("input".into(), path(&self.input))),
            Command::OracleCheck => {
                out.push(("max_m".into(), Some(self.max_m.to_string())));
                out.push(("max_n".into(), Some(self.max_n.to_string())));
                out.push(("seeds".into(), Some(self.seeds.to_string())));
                out.push(("times".into(), Some(self.times.to_string())));
            }
            Command::Sweep => {
                out.push(("m".into(), Some(list(&self.m))));
                out.push(("n".into(), Some(list(&self.n))));
                out.push(("seed".into(), Some(self.seed.to_string())));
                out.push(("t0".into(), self.t0.map(|t| t.to_string())));
                out.push(("points".into(), Some(self.points.to_string())));
                out.push(("decomposition".into(), Some(self.decomposition.name().into())));
            }
        }
        out.into_iter().filter_map(|(k, v)| v.map(|v| (k, v))).collect()
    }
}
