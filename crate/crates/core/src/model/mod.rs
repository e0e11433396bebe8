//! Domain types for the spin-bath model and its generalization.

mod block;
mod ensemble;
mod grid;
mod observable;
mod system;

pub use block::{block_index, uniform_block_pair_weight, BlockIndex};
pub use ensemble::{make_random_ensemble, CouplingMode, EnsembleStream, EnvironmentEnsemble};
pub use grid::TimeGrid;
pub use observable::{Hermitian2, ObservableSpec, SystemOperator};
pub use system::{Amplitudes, Arrangement, SystemSpec, EXPLICIT_MAX_M};

/// Tolerance used when checking unit-norm conditions on amplitudes.
pub const NORM_TOL: f64 = 1e-12;
