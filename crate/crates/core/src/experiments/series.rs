use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernels::{
    kernel_log_abs_series, original_d2_terms, r2_log_series_streaming, sigma_split_general_d1,
    sigma_split_general_d2,
};
use crate::model::{
    block_index, make_random_ensemble, CouplingMode, EnvironmentEnsemble, Hermitian2, SystemSpec, TimeGrid,
};

/// Sampled curve with an optional natural-log companion for values too small
/// to represent linearly.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub label: String,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub log_values: Option<Vec<f64>>,
}

impl TimeSeries {
    pub fn new(label: impl Into<String>, times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::invalid(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        Ok(Self {
            label: label.into(),
            times,
            values,
            log_values: None,
        })
    }

    /// Series defined by its logarithm; linear values are `exp` of it and
    /// underflow to 0.
    pub fn from_log(label: impl Into<String>, times: Vec<f64>, log_values: Vec<f64>) -> Result<Self> {
        let values = log_values.iter().map(|l| l.exp()).collect();
        let mut s = Self::new(label, times, values)?;
        s.log_values = Some(log_values);
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// First sample time at which the value drops below 0.5.
    pub fn half_decay_time(&self) -> Option<f64> {
        self.values
            .iter()
            .position(|&v| v < 0.5)
            .map(|k| self.times[k])
    }
}

/// `|r(t_k)|²` with its log companion.
pub fn series_r2(ens: &EnvironmentEnsemble, grid: &TimeGrid) -> Result<TimeSeries> {
    let times = grid.times();
    let logs = kernel_log_abs_series(1, ens, &times)
        .into_iter()
        .map(|l| 2.0 * l)
        .collect();
    TimeSeries::from_log(format!("N={}", ens.n()), times, logs)
}

/// Same values as [`series_r2`] on `make_random_ensemble(n, seed, mode)`,
/// generated and reduced chunk by chunk.
pub fn series_r2_streaming(n: usize, seed: u64, mode: CouplingMode, grid: &TimeGrid) -> Result<TimeSeries> {
    let times = grid.times();
    let logs = r2_log_series_streaming(n, seed, mode, &times)?;
    TimeSeries::from_log(format!("N={n}"), times, logs)
}

/// Raises a series to the power `10^a` through its log companion. For
/// `|r|²` this models an environment `10^a` times larger with the same
/// statistics.
pub fn power_scale(series: &TimeSeries, a: i32) -> Result<TimeSeries> {
    let logs = series
        .log_values
        .as_ref()
        .ok_or_else(|| Error::invalid(format!("series '{}' has no log companion", series.label)))?;
    let f = 10f64.powi(a);
    let scaled = logs.iter().map(|l| l * f).collect();
    TimeSeries::from_log(series.label.clone(), series.times.clone(), scaled)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Decomposition {
    /// One system particle, observed directly.
    OriginalD1,
    /// One system particle, one environment particle observed.
    OriginalD2,
    /// Whole `M`-particle system observed.
    GeneralD1,
    /// Last particle of the `M`-particle system observed.
    GeneralD2,
}

impl Decomposition {
    pub const ALL: [Decomposition; 4] = [
        Decomposition::OriginalD1,
        Decomposition::OriginalD2,
        Decomposition::GeneralD1,
        Decomposition::GeneralD2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Decomposition::OriginalD1 => "original-d1",
            Decomposition::OriginalD2 => "original-d2",
            Decomposition::GeneralD1 => "general-d1",
            Decomposition::GeneralD2 => "general-d2",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|d| d.name() == s)
    }
}

/// Parameters of a non-diagonal-part simulation with uniform system
/// amplitudes and all-ones observable coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaConfig {
    pub decomposition: Decomposition,
    pub m: usize,
    pub n: usize,
    pub seed: u64,
    pub coupling: CouplingMode,
}

/// Non-diagonal part of the expectation value, normalized to 1 at `t = 0`.
///
/// The original decompositions use `M = 1`, `a = b = 1/√2`. For
/// [`Decomposition::OriginalD2`] the oscillating term of environment
/// particle 1 is divided by its constant envelope instead, since its value
/// at `t = 0` may vanish.
pub fn series_sigma_nd(cfg: &SigmaConfig, grid: &TimeGrid) -> Result<TimeSeries> {
    let ens = make_random_ensemble(cfg.n, cfg.seed, cfg.coupling)?;
    let label = format!("M={} N={}", cfg.m, cfg.n);
    let ones = Hermitian2::new(1.0, 1.0, Complex64::new(1.0, 0.0));
    let values = match cfg.decomposition {
        Decomposition::OriginalD1 | Decomposition::GeneralD1 => {
            let m = if cfg.decomposition == Decomposition::OriginalD1 { 1 } else { cfg.m };
            let sys = SystemSpec::uniform(m)?;
            sigma_split_general_d1(&sys, &block_index(m)?, &ens, grid)?.normalized()?
        }
        Decomposition::GeneralD2 => {
            let sys = SystemSpec::uniform(cfg.m)?;
            sigma_split_general_d2(&sys, &block_index(cfg.m)?, &ens, &ones, grid)?.normalized()?
        }
        Decomposition::OriginalD2 => {
            let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            let terms = original_d2_terms(1, h, h, &ens, &ones)?;
            grid.times()
                .iter()
                .map(|&t| {
                    let env = terms.envelope(t);
                    if env == 0.0 {
                        0.0
                    } else {
                        (terms.value(t) - terms.constant) / env
                    }
                })
                .collect()
        }
    };
    TimeSeries::new(label, grid.times(), values)
}
