//! Command-line front end: `simulate`, `figure`, `fit`, `oracle-check` and
//! `sweep`.

mod config;
mod output;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use config::{
    parse_config_text, read_config_file, Command, CommandArgs, CommonArgs, DecompositionArg, FileConfig,
    RunConfig, DEFAULT_SEED, SEED_ENV,
};
pub use output::{emit_csv, emit_svg, parse_csv, read_csv, render_csv, render_svg};

use crate::error::{Error, Result};
use crate::experiments::{
    fit_decoherence_time, oracle_agreement, power_scale, run_figure_with, series_r2_streaming, series_sigma_nd,
    sweep_verdicts, Decomposition, FigureOptions, SigmaConfig, TimeSeries, AGREEMENT_TOL,
};
use crate::model::TimeGrid;

#[derive(Debug, Parser)]
#[command(name = "spinbath", version, about = "Spin-bath decoherence simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArgs,
}

impl Cli {
    /// Resolves flags and the optional config file into a [`RunConfig`].
    pub fn into_config(self) -> Result<RunConfig> {
        let (command, flags) = match self.command {
            CommandArgs::Simulate(a) => (Command::Simulate, a),
            CommandArgs::Figure(a) => (Command::Figure, a),
            CommandArgs::Fit(a) => (Command::Fit, a),
            CommandArgs::OracleCheck(a) => (Command::OracleCheck, a),
            CommandArgs::Sweep(a) => (Command::Sweep, a),
        };
        let file = match &flags.config {
            Some(p) => read_config_file(p)?,
            None => FileConfig::default(),
        };
        let mut cfg = RunConfig::resolve(command, &flags, file)?;
        match command {
            Command::Simulate => {
                if cfg.m.is_empty() {
                    cfg.m = vec![1];
                }
                if cfg.n.is_empty() {
                    cfg.n = vec![1000];
                }
            }
            Command::Sweep => {
                if cfg.m.is_empty() {
                    cfg.m = vec![10, 1000];
                }
                if cfg.n.is_empty() {
                    cfg.n = vec![10, 1000];
                }
                cfg.t0.get_or_insert(1e-3);
            }
            _ => {}
        }
        Ok(cfg)
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match cli.into_config().and_then(|cfg| execute(&cfg)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs a resolved configuration; returns the exit status.
pub fn execute(cfg: &RunConfig) -> Result<i32> {
    match cfg.threads {
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::Usage(format!("cannot start {k} threads: {e}")))?;
            pool.install(|| dispatch(cfg))
        }
        None => dispatch(cfg),
    }
}

fn dispatch(cfg: &RunConfig) -> Result<i32> {
    match cfg.command {
        Command::Simulate => simulate(cfg),
        Command::Figure => figure(cfg),
        Command::Fit => fit(cfg),
        Command::OracleCheck => oracle_check(cfg),
        Command::Sweep => sweep(cfg),
    }
}

fn header(cfg: &RunConfig) -> Vec<String> {
    let mut lines = vec![format!("spinbath {}", cfg.command.name())];
    lines.extend(cfg.effective().into_iter().map(|(k, v)| format!("{k} = {v}")));
    lines
}

fn write_output(cfg: &RunConfig, text: &str) -> Result<()> {
    match &cfg.out {
        Some(p) => output::write_file(p, text),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

fn single(name: &str, v: &[usize]) -> Result<usize> {
    match v {
        [x] => Ok(*x),
        _ => Err(Error::Usage(format!("{name} takes a single value here, got {v:?}"))),
    }
}

fn emit_series(cfg: &RunConfig, title: &str, comments: &[String], series: &[TimeSeries]) -> Result<()> {
    write_output(cfg, &render_csv(comments, series)?)?;
    if let Some(svg) = &cfg.svg {
        emit_svg(svg, title, series, cfg.log_y)?;
    }
    Ok(())
}

fn simulate(cfg: &RunConfig) -> Result<i32> {
    let t0 = cfg.t0.ok_or_else(|| Error::Usage("simulate needs --t0".into()))?;
    let grid = TimeGrid::new(t0, cfg.points)?;
    let m = single("m", &cfg.m)?;
    let n = single("n", &cfg.n)?;
    let original = matches!(cfg.decomposition, Decomposition::OriginalD1 | Decomposition::OriginalD2);
    if original && m != 1 {
        return Err(Error::Usage(format!(
            "{} has a single system particle; got m = {m}",
            cfg.decomposition.name()
        )));
    }
    if cfg.power_exponent != 0 && cfg.decomposition != Decomposition::OriginalD1 {
        return Err(Error::Usage("power exponent only applies to original-d1".into()));
    }
    let mut series = if cfg.decomposition == Decomposition::OriginalD1 {
        let base = series_r2_streaming(n, cfg.seed, cfg.coupling, &grid)?;
        let mut s = power_scale(&base, cfg.power_exponent)?;
        s.label = "r2".into();
        s
    } else {
        let sc = SigmaConfig {
            decomposition: cfg.decomposition,
            m,
            n,
            seed: cfg.seed,
            coupling: cfg.coupling,
        };
        series_sigma_nd(&sc, &grid)?
    };
    if cfg.decomposition == Decomposition::OriginalD2 {
        series.label = "oscillation".into();
    } else if cfg.decomposition != Decomposition::OriginalD1 {
        series.label = "sigma_nd".into();
    }
    let title = format!("{} M={m} N={n}", cfg.decomposition.name());
    emit_series(cfg, &title, &header(cfg), &[series])?;
    Ok(0)
}

fn figure(cfg: &RunConfig) -> Result<i32> {
    let id = cfg.id.ok_or_else(|| Error::Usage("figure needs --id".into()))?;
    let opts = FigureOptions {
        intervals: cfg.points,
        t0: cfg.t0,
        base_exponent: cfg.base_exponent,
    };
    let bundle = run_figure_with(id, cfg.seed, &opts)?;
    let mut comments = header(cfg);
    comments.extend(bundle.metadata.iter().map(|(k, v)| format!("{k}: {v}")));
    if cfg.verbose {
        for (k, v) in &bundle.metadata {
            eprintln!("{k}: {v}");
        }
    }
    emit_series(cfg, &format!("Figure {id}: {}", bundle.title), &comments, &bundle.series)?;
    Ok(0)
}

fn fit(cfg: &RunConfig) -> Result<i32> {
    let input = cfg.input.as_deref().ok_or_else(|| Error::Usage("fit needs --input".into()))?;
    let series = read_csv(input)?;
    let mut text = String::new();
    for h in header(cfg) {
        text.push_str(&format!("# {h}\n"));
    }
    text.push_str("label,tau,samples,first,last,residual\n");
    for s in &series {
        let f = fit_decoherence_time(s)?;
        text.push_str(&format!(
            "{},{:?},{},{},{},{:?}\n",
            s.label,
            f.tau,
            f.samples,
            f.window.start(),
            f.window.end(),
            f.residual
        ));
    }
    write_output(cfg, &text)?;
    Ok(0)
}

fn oracle_check(cfg: &RunConfig) -> Result<i32> {
    let seeds: Vec<u64> = (1..=cfg.seeds as u64).collect();
    let report = oracle_agreement(cfg.max_m, cfg.max_n, &seeds, cfg.times)?;
    let mut text = String::new();
    for h in header(cfg) {
        text.push_str(&format!("# {h}\n"));
    }
    text.push_str("m,n,seed,decomposition,max_deviation\n");
    for c in &report.cases {
        text.push_str(&format!(
            "{},{},{},{},{:?}\n",
            c.m,
            c.n,
            c.seed,
            c.decomposition.name(),
            c.max_deviation
        ));
    }
    write_output(cfg, &text)?;
    if report.passed() {
        if cfg.verbose {
            eprintln!("{} cases, max deviation {:e}", report.cases.len(), report.max_deviation());
        }
        Ok(0)
    } else {
        eprintln!(
            "oracle mismatch: max deviation {:e} exceeds {AGREEMENT_TOL:e}",
            report.max_deviation()
        );
        Ok(1)
    }
}

fn sweep(cfg: &RunConfig) -> Result<i32> {
    let grid = TimeGrid::new(cfg.t0.unwrap_or(1e-3), cfg.points)?;
    let rows = sweep_verdicts(&cfg.m, &cfg.n, cfg.decomposition, cfg.seed, &grid)?;
    let mut text = String::new();
    for h in header(cfg) {
        text.push_str(&format!("# {h}\n"));
    }
    text.push_str("m,n,verdict_a,verdict_b,final_max_a,final_max_b\n");
    for r in &rows {
        text.push_str(&format!(
            "{},{},{},{},{:?},{:?}\n",
            r.m,
            r.n,
            r.verdict_a.name(),
            r.verdict_b.name(),
            r.final_max_a,
            r.final_max_b
        ));
    }
    write_output(cfg, &text)?;
    Ok(0)
}
