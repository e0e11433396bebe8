use num_complex::Complex64;

use super::NORM_TOL;
use crate::error::{Error, Result};

/// Largest `M` for which explicit amplitudes may be stored.
pub const EXPLICIT_MAX_M: usize = 20;

/// Ordering of the `2^M` system basis states an explicit amplitude vector
/// refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arrangement {
    /// Grouped by down-spin count `l`, ascending; binary value ascending
    /// inside each block.
    Degeneracy,
    /// Binary counting with particle 1 as most significant bit and `⇓ = 1`,
    /// so the last particle alternates fastest.
    Binary,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Amplitudes {
    Explicit(Vec<Complex64>),
    /// `C_λ = 2^{-M/2}` for all `λ`, never materialized.
    Uniform,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    m: usize,
    amplitudes: Amplitudes,
    arrangement: Arrangement,
}

impl SystemSpec {
    pub fn uniform(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("system size M must be at least 1"));
        }
        Ok(Self {
            m,
            amplitudes: Amplitudes::Uniform,
            arrangement: Arrangement::Binary,
        })
    }

    pub fn explicit(m: usize, amplitudes: Vec<Complex64>, arrangement: Arrangement) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("system size M must be at least 1"));
        }
        if m > EXPLICIT_MAX_M {
            return Err(Error::UnsupportedSize(format!(
                "explicit amplitudes need M <= {EXPLICIT_MAX_M}, got {m}"
            )));
        }
        if amplitudes.len() != 1 << m {
            return Err(Error::invalid(format!(
                "expected {} amplitudes, got {}",
                1usize << m,
                amplitudes.len()
            )));
        }
        let norm: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::invalid(format!("sum |C|^2 = {norm}, expected 1")));
        }
        Ok(Self {
            m,
            amplitudes: Amplitudes::Explicit(amplitudes),
            arrangement,
        })
    }

    /// Product state `⊗_i (a_i|⇑⟩ + b_i|⇓⟩)`, stored in binary order.
    pub fn product(factors: &[(Complex64, Complex64)]) -> Result<Self> {
        let m = factors.len();
        if m == 0 {
            return Err(Error::invalid("system size M must be at least 1"));
        }
        if m > EXPLICIT_MAX_M {
            return Err(Error::UnsupportedSize(format!("product state with M = {m}")));
        }
        for (i, (a, b)) in factors.iter().enumerate() {
            let n = a.norm_sqr() + b.norm_sqr();
            if (n - 1.0).abs() > NORM_TOL {
                return Err(Error::invalid(format!("system particle {}: norm {n}", i + 1)));
            }
        }
        let amps = (0u64..1 << m)
            .map(|s| {
                factors.iter().enumerate().fold(Complex64::new(1.0, 0.0), |acc, (i, (a, b))| {
                    let down = (s >> (m - 1 - i)) & 1 == 1;
                    acc * if down { *b } else { *a }
                })
            })
            .collect();
        Self::explicit(m, amps, Arrangement::Binary)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn amplitudes(&self) -> &Amplitudes {
        &self.amplitudes
    }

    pub fn arrangement(&self) -> Arrangement {
        self.arrangement
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self.amplitudes, Amplitudes::Uniform)
    }

    /// Amplitudes indexed by computational (binary) basis state. Fails for
    /// uniform amplitudes above the explicit cap.
    pub fn binary_amplitudes(&self) -> Result<Vec<Complex64>> {
        match &self.amplitudes {
            Amplitudes::Uniform => {
                if self.m > EXPLICIT_MAX_M {
                    return Err(Error::UnsupportedSize(format!(
                        "cannot materialize 2^{} amplitudes",
                        self.m
                    )));
                }
                let c = Complex64::new((-(self.m as f64) / 2.0).exp2(), 0.0);
                Ok(vec![c; 1 << self.m])
            }
            Amplitudes::Explicit(c) => match self.arrangement {
                Arrangement::Binary => Ok(c.clone()),
                Arrangement::Degeneracy => {
                    let mut out = vec![Complex64::new(0.0, 0.0); c.len()];
                    for (pos, state) in degeneracy_order(self.m).into_iter().enumerate() {
                        out[state as usize] = c[pos];
                    }
                    Ok(out)
                }
            },
        }
    }
}

/// Computational basis states listed in degeneracy order.
pub fn degeneracy_order(m: usize) -> Vec<u64> {
    let mut states: Vec<u64> = (0..1u64 << m).collect();
    states.sort_by_key(|&s| (s.count_ones(), s));
    states
}
