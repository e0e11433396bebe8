//! Numerical protocols built on the kernels: time series, power scaling,
//! decay fits, decoherence verdicts and figure reproduction.

mod agreement;
mod figures;
mod fit;
mod series;

pub use agreement::{oracle_agreement, AgreementCase, AgreementReport, AGREEMENT_G_MAX, AGREEMENT_TOL, AGREEMENT_T_MAX};
pub use figures::{
    run_figure, run_figure_with, sweep_verdicts, FigureBundle, FigureOptions, SweepRow, DEFAULT_BASE_EXPONENT,
    FIGURE_IDS, MAX_BASE_EXPONENT,
};
pub use fit::{
    classify, final_quarter_max, fit_decoherence_time, poincare_time, relaxation_estimate, DecayFit, Verdict,
    DECOHERENCE_THRESHOLD, FIT_CEILING, FIT_FLOOR,
};
pub use series::{
    power_scale, series_r2, series_r2_streaming, series_sigma_nd, Decomposition, SigmaConfig, TimeSeries,
};
