use super::fit::{classify, final_quarter_max, Verdict};
use super::series::{power_scale, series_r2_streaming, series_sigma_nd, Decomposition, SigmaConfig, TimeSeries};
use crate::error::{Error, Result};
use crate::model::{CouplingMode, TimeGrid};

/// Figures that can be regenerated.
pub const FIGURE_IDS: [u32; 11] = [1, 2, 3, 4, 5, 7, 8, 9, 10, 11, 12];
/// Default number of environment particles simulated directly, as a power
/// of ten. Larger environments are reached by [`power_scale`].
pub const DEFAULT_BASE_EXPONENT: u32 = 7;
pub const MAX_BASE_EXPONENT: u32 = 9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureOptions {
    pub intervals: usize,
    /// Overrides the figure's own end time.
    pub t0: Option<f64>,
    /// `|r|²` curves with `N ≤ 10^base_exponent` are simulated directly;
    /// the others are power-scaled from `N = 10^base_exponent`.
    pub base_exponent: u32,
}

impl Default for FigureOptions {
    fn default() -> Self {
        Self {
            intervals: TimeGrid::DEFAULT_INTERVALS,
            t0: None,
            base_exponent: DEFAULT_BASE_EXPONENT,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureBundle {
    pub id: u32,
    pub title: String,
    pub series: Vec<TimeSeries>,
    pub metadata: Vec<(String, String)>,
}

enum Spec {
    /// `|r|²` for `N = 10^e`, `e` in `exponents`.
    R2 {
        mode: CouplingMode,
        t0: f64,
        exponents: &'static [u32],
    },
    Sigma {
        decomposition: Decomposition,
        t0: f64,
        curves: &'static [(usize, usize)],
    },
}

fn spec(id: u32) -> Result<(Spec, &'static str)> {
    use Decomposition::*;
    const SMALL: &[u32] = &[7, 8, 9];
    Ok(match id {
        1 => (Spec::R2 { mode: CouplingMode::Constant(200.0), t0: 6e-6, exponents: SMALL }, "|r(t)|^2, g = 200"),
        2 => (Spec::R2 { mode: CouplingMode::Constant(400.0), t0: 3e-6, exponents: SMALL }, "|r(t)|^2, g = 400"),
        3 => (Spec::R2 { mode: CouplingMode::Constant(800.0), t0: 2e-6, exponents: SMALL }, "|r(t)|^2, g = 800"),
        4 => (
            Spec::R2 { mode: CouplingMode::UniformRandom(800.0), t0: 3e-6, exponents: SMALL },
            "|r(t)|^2, g uniform in [0, 800]",
        ),
        5 => (
            Spec::R2 { mode: CouplingMode::Constant(400.0), t0: 2e-8, exponents: &[10, 11, 12, 13] },
            "|r(t)|^2 power-scaled, g = 400",
        ),
        7 => (Spec::Sigma { decomposition: GeneralD1, t0: 1e-3, curves: &[(1, 1000), (10, 1000)] }, "sigma_nd, N = 1000"),
        8 => (Spec::Sigma { decomposition: GeneralD1, t0: 1e-3, curves: &[(1000, 10), (1000, 100)] }, "sigma_nd, M = 1000"),
        9 => (
            Spec::Sigma { decomposition: GeneralD1, t0: 1.2e-3, curves: &[(100, 1000), (1000, 1000)] },
            "sigma_nd, N = 1000",
        ),
        10 => (Spec::Sigma { decomposition: GeneralD2, t0: 3e-2, curves: &[(1000, 1)] }, "sigma_nd (last particle), M = 1000, N = 1"),
        11 => (Spec::Sigma { decomposition: GeneralD2, t0: 1e-3, curves: &[(1000, 100)] }, "sigma_nd (last particle), M = 1000, N = 100"),
        12 => (Spec::Sigma { decomposition: GeneralD2, t0: 4e-4, curves: &[(1000, 1000)] }, "sigma_nd (last particle), M = 1000, N = 1000"),
        _ => {
            return Err(Error::invalid(format!(
                "unknown figure {id}; available: {FIGURE_IDS:?}"
            )))
        }
    })
}

fn mode_text(mode: CouplingMode) -> String {
    match mode {
        CouplingMode::Constant(g) => format!("constant {g}"),
        CouplingMode::UniformRandom(g) => format!("uniform [0, {g}]"),
    }
}

/// Curves of figure `id` with its published parameters.
pub fn run_figure(id: u32, seed: u64) -> Result<FigureBundle> {
    run_figure_with(id, seed, &FigureOptions::default())
}

pub fn run_figure_with(id: u32, seed: u64, opts: &FigureOptions) -> Result<FigureBundle> {
    let (spec, title) = spec(id)?;
    if opts.base_exponent == 0 || opts.base_exponent > MAX_BASE_EXPONENT {
        return Err(Error::invalid(format!(
            "base exponent must be in 1..={MAX_BASE_EXPONENT}, got {}",
            opts.base_exponent
        )));
    }
    let mut metadata = vec![
        ("figure".to_string(), id.to_string()),
        ("seed".to_string(), seed.to_string()),
        ("intervals".to_string(), opts.intervals.to_string()),
    ];
    let mut series = Vec::new();
    match spec {
        Spec::R2 { mode, t0, exponents } => {
            let t0 = opts.t0.unwrap_or(t0);
            let grid = TimeGrid::new(t0, opts.intervals)?;
            metadata.push(("t0".into(), t0.to_string()));
            metadata.push(("couplings".into(), mode_text(mode)));
            metadata.push(("base_n".into(), format!("1e{}", opts.base_exponent)));
            let mut base: Option<TimeSeries> = None;
            for &e in exponents {
                let mut s = if e <= opts.base_exponent {
                    metadata.push((format!("curve N=1e{e}"), "direct".into()));
                    let s = series_r2_streaming(10usize.pow(e), seed, mode, &grid)?;
                    if e == opts.base_exponent {
                        base = Some(s.clone());
                    }
                    s
                } else {
                    if base.is_none() {
                        base = Some(series_r2_streaming(10usize.pow(opts.base_exponent), seed, mode, &grid)?);
                    }
                    let a = (e - opts.base_exponent) as i32;
                    metadata.push((
                        format!("curve N=1e{e}"),
                        format!("base raised to the power 1e{a}"),
                    ));
                    power_scale(base.as_ref().expect("base series computed above"), a)?
                };
                s.label = format!("N=1e{e}");
                series.push(s);
            }
        }
        Spec::Sigma { decomposition, t0, curves } => {
            let t0 = opts.t0.unwrap_or(t0);
            let grid = TimeGrid::new(t0, opts.intervals)?;
            let mode = CouplingMode::Constant(400.0);
            metadata.push(("t0".into(), t0.to_string()));
            metadata.push(("couplings".into(), mode_text(mode)));
            metadata.push(("decomposition".into(), decomposition.name().into()));
            metadata.push(("amplitudes".into(), "uniform".into()));
            for &(m, n) in curves {
                let cfg = SigmaConfig {
                    decomposition,
                    m,
                    n,
                    seed,
                    coupling: mode,
                };
                let s = series_sigma_nd(&cfg, &grid)?;
                metadata.push((format!("verdict {}", s.label), classify(&s).name().into()));
                series.push(s);
            }
        }
    }
    Ok(FigureBundle {
        id,
        title: title.to_string(),
        series,
        metadata,
    })
}

/// Verdicts for one `(M, N)` pair. Subsystem B's verdict is the verdict of
/// the same observable with the two sizes exchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub m: usize,
    pub n: usize,
    pub verdict_a: Verdict,
    pub verdict_b: Verdict,
    pub final_max_a: f64,
    pub final_max_b: f64,
}

pub fn sweep_verdicts(
    ms: &[usize],
    ns: &[usize],
    decomposition: Decomposition,
    seed: u64,
    grid: &TimeGrid,
) -> Result<Vec<SweepRow>> {
    let one = |m: usize, n: usize| -> Result<TimeSeries> {
        series_sigma_nd(
            &SigmaConfig {
                decomposition,
                m,
                n,
                seed,
                coupling: CouplingMode::Constant(400.0),
            },
            grid,
        )
    };
    let mut rows = Vec::new();
    for &m in ms {
        for &n in ns {
            let a = one(m, n)?;
            let b = one(n, m)?;
            rows.push(SweepRow {
                m,
                n,
                verdict_a: classify(&a),
                verdict_b: classify(&b),
                final_max_a: final_quarter_max(&a),
                final_max_b: final_quarter_max(&b),
            });
        }
    }
    Ok(rows)
}
