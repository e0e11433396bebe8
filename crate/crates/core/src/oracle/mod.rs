//! Brute-force state-vector simulation of small instances.
//!
//! Nothing here calls into [`crate::kernels`]; the closed forms are checked
//! against this module, not the other way round.
//!
//! Basis convention: a basis index is `(system_bits << n) | environment_bits`.
//! Within each register particle 1 is the most significant bit, and spin up
//! (`⇑` or `↑`) is bit value 0.

mod matrix;
mod state;

pub use matrix::{offdiag_norm, DenseMatrix, DensityMatrix};
pub use state::{
    basis_energies, build_hamiltonian_dense, build_initial, evolve, expectation, partial_trace, DenseState,
    HAMILTONIAN_MAX_QUBITS, ORACLE_MAX_QUBITS, TRACE_MAX_KEEP,
};
