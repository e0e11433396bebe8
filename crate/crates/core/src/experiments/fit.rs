use std::ops::RangeInclusive;

use super::series::TimeSeries;
use crate::error::{Error, Result};

/// Samples with values outside `[FIT_FLOOR, FIT_CEILING]` are ignored by
/// [`fit_decoherence_time`].
pub const FIT_FLOOR: f64 = -6.0; // natural log
pub const FIT_CEILING: f64 = 0.9;
/// Verdict threshold on the final quarter of a normalized series.
pub const DECOHERENCE_THRESHOLD: f64 = 0.1;

/// Exponential model `v(t) ≈ e^{b} e^{-t/τ}` fitted in log space.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    pub tau: f64,
    pub intercept: f64,
    /// First and last sample index used.
    pub window: RangeInclusive<usize>,
    pub samples: usize,
    /// RMS of `ln v - (b - t/τ)` over the samples used.
    pub residual: f64,
}

/// Least-squares line through `(t_k, ln v_k)` for samples with
/// `v_k ∈ [e⁻⁶, 0.9]`; `τ = -1/slope`.
pub fn fit_decoherence_time(series: &TimeSeries) -> Result<DecayFit> {
    let logs: Vec<f64> = match &series.log_values {
        Some(l) => l.clone(),
        None => series.values.iter().map(|v| v.ln()).collect(),
    };
    let ceiling = FIT_CEILING.ln();
    let picked: Vec<usize> = logs
        .iter()
        .enumerate()
        .filter(|(_, &l)| (FIT_FLOOR..=ceiling).contains(&l))
        .map(|(k, _)| k)
        .collect();
    if picked.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "{} samples of '{}' inside the fit window, need 4",
            picked.len(),
            series.label
        )));
    }
    // center t for conditioning; grids here can start at 1e-15 s scales
    let n = picked.len() as f64;
    let t_mean = picked.iter().map(|&k| series.times[k]).sum::<f64>() / n;
    let y_mean = picked.iter().map(|&k| logs[k]).sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &k in &picked {
        let dt = series.times[k] - t_mean;
        sxx += dt * dt;
        sxy += dt * (logs[k] - y_mean);
    }
    if sxx == 0.0 {
        return Err(Error::InsufficientData("fit samples share a single time".into()));
    }
    let slope = sxy / sxx;
    if !(slope < 0.0) {
        return Err(Error::InsufficientData(format!(
            "series '{}' does not decay inside the fit window",
            series.label
        )));
    }
    let intercept = y_mean - slope * t_mean;
    let residual = (picked
        .iter()
        .map(|&k| (logs[k] - intercept - slope * series.times[k]).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(DecayFit {
        tau: -1.0 / slope,
        intercept,
        window: picked[0]..=picked[picked.len() - 1],
        samples: picked.len(),
        residual,
    })
}

fn check_g(g: f64) -> Result<()> {
    if g > 0.0 && g.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("coupling must be positive, got {g}")))
    }
}

/// Recurrence time `π/g` of `|r(t)|²` for equal couplings.
pub fn poincare_time(g: f64) -> Result<f64> {
    check_g(g)?;
    Ok(std::f64::consts::PI / g)
}

/// Upper estimate `t_P/2` for the relaxation time.
pub fn relaxation_estimate(g: f64) -> Result<f64> {
    Ok(poincare_time(g)? / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Decoheres,
    Persists,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Decoheres => "decoheres",
            Verdict::Persists => "persists",
        }
    }
}

/// Largest `|v|` over the samples in the last quarter of the time span.
pub fn final_quarter_max(series: &TimeSeries) -> f64 {
    let (Some(&t0), Some(&t1)) = (series.times.first(), series.times.last()) else {
        return 0.0;
    };
    let cut = t0 + 0.75 * (t1 - t0);
    series
        .times
        .iter()
        .zip(&series.values)
        .filter(|(&t, _)| t >= cut)
        .map(|(_, v)| v.abs())
        .fold(0.0, f64::max)
}

/// `Decoheres` iff the normalized series stays below 0.1 in magnitude over
/// the final quarter of its time span. Oscillations count through `|v|`, so
/// a sign-alternating persistent signal is not mistaken for decay.
pub fn classify(series: &TimeSeries) -> Verdict {
    if final_quarter_max(series) < DECOHERENCE_THRESHOLD {
        Verdict::Decoheres
    } else {
        Verdict::Persists
    }
}
