//! Predicted long-time reduced states.
//!
//! Every kernel `K_d` with `d ≠ 0` averages to zero over long times when the
//! couplings are incommensurate, so only the `l = l'` terms survive: the
//! system state becomes block diagonal in the down-spin count, and a single
//! observed system particle becomes diagonal in `{⇑, ⇓}`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{Amplitudes, SystemSpec};

/// Largest system for which [`BlockDiagonalState::to_dense`] materializes
/// the full matrix.
pub const DENSE_LIMIT_M: usize = 10;

/// `ρ_{A*}` with entries `C_λ C_{λ'}*` when `λ` and `λ'` hold the same
/// number of down spins and zero otherwise. Entries are produced on demand.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDiagonalState {
    m: usize,
    amplitudes: Option<Vec<Complex64>>,
}

impl BlockDiagonalState {
    pub fn m(&self) -> usize {
        self.m
    }

    /// Entry `(i, j)` in binary ordering.
    pub fn entry(&self, i: u64, j: u64) -> Complex64 {
        if i.count_ones() != j.count_ones() {
            return Complex64::new(0.0, 0.0);
        }
        match &self.amplitudes {
            Some(c) => c[i as usize] * c[j as usize].conj(),
            None => Complex64::new((-(self.m as f64)).exp2(), 0.0),
        }
    }

    /// Row-major dense matrix, binary ordering.
    pub fn to_dense(&self) -> Result<Vec<Complex64>> {
        if self.m > DENSE_LIMIT_M {
            return Err(Error::UnsupportedSize(format!(
                "dense block-diagonal state needs M <= {DENSE_LIMIT_M}, got {}",
                self.m
            )));
        }
        let dim = 1u64 << self.m;
        Ok((0..dim)
            .flat_map(|i| (0..dim).map(move |j| (i, j)))
            .map(|(i, j)| self.entry(i, j))
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedStateLimits {
    pub block_diagonal: BlockDiagonalState,
    /// Diagonal `(ρ⇑⇑, ρ⇓⇓)` of the last system particle.
    pub single_particle: [f64; 2],
}

pub fn reduced_state_limits(sys: &SystemSpec) -> Result<ReducedStateLimits> {
    let m = sys.m();
    let (amplitudes, single) = match sys.amplitudes() {
        Amplitudes::Uniform => (None, [0.5, 0.5]),
        Amplitudes::Explicit(_) => {
            let c = sys.binary_amplitudes()?;
            let up: f64 = c.iter().step_by(2).map(|z| z.norm_sqr()).sum();
            let down: f64 = c.iter().skip(1).step_by(2).map(|z| z.norm_sqr()).sum();
            (Some(c), [up, down])
        }
    };
    Ok(ReducedStateLimits {
        block_diagonal: BlockDiagonalState { m, amplitudes },
        single_particle: single,
    })
}
