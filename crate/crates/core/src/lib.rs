//! Spin-bath decoherence toolkit.
//!
//! The crate evaluates closed-form expectation values of the spin-bath model
//! and its multi-particle generalization in log space, checks them against a
//! brute-force state-vector simulator at small sizes, and reproduces the
//! decay curves, decoherence-time fits and decoherence verdicts built on top
//! of those kernels.
//!
//! Module map:
//!
//! * [`model`]: ensembles, system specs, observables, block bookkeeping.
//! * [`kernels`]: log-domain products `K_m(t)`, `Γ₀/Γ₁`, block kernels and
//!   the three-term split of the generalized expectation value.
//! * [`oracle`]: dense `2^(M+N)` simulator, partial traces, purity.
//! * [`experiments`]: time series, power scaling, decay fits, figures,
//!   classification.
//! * [`cli`]: configuration, CSV/SVG emission and the `spinbath` commands.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod kernels;
pub mod model;
pub mod oracle;

pub use error::{Error, Result};
pub use num_complex::Complex64;
