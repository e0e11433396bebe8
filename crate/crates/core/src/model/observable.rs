use num_complex::Complex64;

use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-12;

/// Hermitian operator on one spin in the basis `(↑, ↓)`:
///
/// ```text
/// [ uu        conj(du) ]
/// [ du        dd       ]
/// ```
///
/// `du` is the coefficient of `|↓⟩⟨↑|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hermitian2 {
    pub uu: f64,
    pub dd: f64,
    pub du: Complex64,
}

impl Hermitian2 {
    pub const IDENTITY: Hermitian2 = Hermitian2 {
        uu: 1.0,
        dd: 1.0,
        du: Complex64 { re: 0.0, im: 0.0 },
    };

    pub fn new(uu: f64, dd: f64, du: Complex64) -> Self {
        Self { uu, dd, du }
    }

    /// From a full matrix `[[⟨↑|O|↑⟩, ⟨↑|O|↓⟩], [⟨↓|O|↑⟩, ⟨↓|O|↓⟩]]`.
    pub fn from_matrix(m: [[Complex64; 2]; 2]) -> Result<Self> {
        if m[0][0].im.abs() > HERMITIAN_TOL || m[1][1].im.abs() > HERMITIAN_TOL {
            return Err(Error::invalid("diagonal coefficients must be real"));
        }
        if (m[0][1] - m[1][0].conj()).norm() > HERMITIAN_TOL {
            return Err(Error::invalid("off-diagonal coefficients must be conjugate"));
        }
        Ok(Self::new(m[0][0].re, m[1][1].re, m[1][0]))
    }

    /// `⟨↑|O|↓⟩`.
    pub fn ud(&self) -> Complex64 {
        self.du.conj()
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        [
            [Complex64::new(self.uu, 0.0), self.ud()],
            [self.du, Complex64::new(self.dd, 0.0)],
        ]
    }

    pub fn is_identity(&self) -> bool {
        self.uu == 1.0 && self.dd == 1.0 && self.du == Complex64::new(0.0, 0.0)
    }
}

/// Operator on the `2^M`-dimensional system space.
#[derive(Debug, Clone, PartialEq)]
pub enum SystemOperator {
    /// `s_{λλ'} = 1` for every pair.
    AllOnes,
    /// Row-major `2^M × 2^M` matrix in binary order; entry `(λ, λ')` is the
    /// coefficient of `|λ⟩⟨λ'|`.
    Dense { m: usize, entries: Vec<Complex64> },
}

impl SystemOperator {
    pub fn dense(m: usize, entries: Vec<Complex64>) -> Result<Self> {
        let dim = 1usize << m;
        if entries.len() != dim * dim {
            return Err(Error::invalid(format!(
                "system operator needs {} entries, got {}",
                dim * dim,
                entries.len()
            )));
        }
        for i in 0..dim {
            for j in i..dim {
                if (entries[i * dim + j] - entries[j * dim + i].conj()).norm() > HERMITIAN_TOL {
                    return Err(Error::invalid(format!("entry ({i}, {j}) breaks Hermiticity")));
                }
            }
        }
        Ok(SystemOperator::Dense { m, entries })
    }

    /// Coefficient of `|λ⟩⟨λ'|` (binary indices).
    pub fn entry(&self, lambda: usize, lambda_p: usize) -> Complex64 {
        match self {
            SystemOperator::AllOnes => Complex64::new(1.0, 0.0),
            SystemOperator::Dense { m, entries } => entries[(lambda << m) + lambda_p],
        }
    }

    /// Checks dimensions against a system of `m` particles.
    pub fn check_m(&self, m: usize) -> Result<()> {
        match self {
            SystemOperator::AllOnes => Ok(()),
            SystemOperator::Dense { m: om, .. } if *om == m => Ok(()),
            SystemOperator::Dense { m: om, .. } => Err(Error::invalid(format!(
                "operator acts on {om} particles, system has {m}"
            ))),
        }
    }
}

/// The relevant-observable families.
#[derive(Debug, Clone, PartialEq)]
pub enum ObservableSpec {
    /// Single system particle `P` observed, environment traced out.
    OriginalD1 { s: Hermitian2 },
    /// Environment particle `j` (1-based) observed.
    OriginalD2 { j: usize, eps: Hermitian2 },
    /// Whole `M`-particle system observed.
    GeneralD1 { s: SystemOperator },
    /// Last system particle `A_M` observed.
    GeneralD2 { s_tilde: Hermitian2 },
    /// System operator times one operator per environment particle.
    FullProduct { s: SystemOperator, eps: Vec<Hermitian2> },
}
