use num_complex::Complex64;
use std::f64::consts::TAU;
use std::ops::Mul;

/// A complex number stored as `(ln |z|, arg z)`.
///
/// Products of ~10⁹ factors of modulus below one underflow any float long
/// before they stop being meaningful; in this form they are sums. Zero is
/// `log_mag = -∞` with phase 0. The phase always lies in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogComplex {
    log_mag: f64,
    phase: f64,
}

impl LogComplex {
    pub const ONE: LogComplex = LogComplex {
        log_mag: 0.0,
        phase: 0.0,
    };
    pub const ZERO: LogComplex = LogComplex {
        log_mag: f64::NEG_INFINITY,
        phase: 0.0,
    };

    pub fn new(log_mag: f64, phase: f64) -> Self {
        if log_mag == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        Self {
            log_mag,
            phase: reduce_phase(phase),
        }
    }

    pub fn from_complex(z: Complex64) -> Self {
        let r = z.norm();
        if r == 0.0 {
            return Self::ZERO;
        }
        Self::new(r.ln(), z.im.atan2(z.re))
    }

    /// Positive real number given by its logarithm.
    pub fn from_ln(ln: f64) -> Self {
        Self::new(ln, 0.0)
    }

    pub fn log_mag(&self) -> f64 {
        self.log_mag
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn is_zero(&self) -> bool {
        self.log_mag == f64::NEG_INFINITY
    }

    /// Linear value; magnitudes below the smallest float become 0.
    pub fn to_complex(&self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(self.log_mag.exp(), self.phase)
    }

    /// `z · e^{-shift}` in linear form, for summing terms on a common scale.
    pub fn to_complex_scaled(&self, shift: f64) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar((self.log_mag - shift).exp(), self.phase)
    }

    pub fn conj(&self) -> Self {
        if self.phase == 0.0 {
            *self
        } else {
            Self {
                log_mag: self.log_mag,
                phase: TAU - self.phase,
            }
        }
    }

    /// `ln |z|²`.
    pub fn log_norm_sqr(&self) -> f64 {
        2.0 * self.log_mag
    }

    /// Real power `z^k` on the principal branch of the stored phase.
    pub fn powf(&self, k: f64) -> Self {
        Self::new(self.log_mag * k, self.phase * k)
    }
}

impl Mul for LogComplex {
    type Output = LogComplex;

    fn mul(self, rhs: LogComplex) -> LogComplex {
        LogComplex::new(self.log_mag + rhs.log_mag, self.phase + rhs.phase)
    }
}

/// Reduces an angle into `[0, 2π)`.
#[inline]
pub fn reduce_phase(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Sums `Σ_k w_k` of log-domain terms without overflow.
///
/// Returns `(shift, s)` with the true sum equal to `s · e^{shift}`.
pub fn log_sum(terms: &[LogComplex]) -> (f64, Complex64) {
    let shift = terms
        .iter()
        .map(|t| t.log_mag)
        .fold(f64::NEG_INFINITY, f64::max);
    if shift == f64::NEG_INFINITY {
        return (0.0, Complex64::new(0.0, 0.0));
    }
    let s = terms.iter().map(|t| t.to_complex_scaled(shift)).sum();
    (shift, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_products() {
        let a = Complex64::new(-0.3, 0.4);
        let b = Complex64::new(0.1, -2.0);
        let la = LogComplex::from_complex(a);
        let lb = LogComplex::from_complex(b);
        assert!((la.to_complex() - a).norm() < 1e-15);
        assert!(((la * lb).to_complex() - a * b).norm() < 1e-14);
        assert!((la.conj().to_complex() - a.conj()).norm() < 1e-15);
        assert!((0.0..TAU).contains(&la.phase()));
        assert!((0.0..TAU).contains(&lb.conj().phase()));
    }

    #[test]
    fn zero_sentinel() {
        let z = LogComplex::from_complex(Complex64::new(0.0, 0.0));
        assert!(z.is_zero());
        assert_eq!(z.to_complex(), Complex64::new(0.0, 0.0));
        assert!((z * LogComplex::ONE).is_zero());
    }

    #[test]
    fn underflow_clamps() {
        let tiny = LogComplex::from_ln(-1e6);
        assert_eq!(tiny.to_complex(), Complex64::new(0.0, 0.0));
        assert_eq!(tiny.log_mag(), -1e6);
    }

    #[test]
    fn log_sum_of_huge_terms() {
        let terms = [LogComplex::from_ln(1000.0), LogComplex::from_ln(1000.0 + 2f64.ln())];
        let (shift, s) = log_sum(&terms);
        assert!((shift + s.norm().ln() - (1000.0 + 3f64.ln())).abs() < 1e-12);
        assert_eq!(log_sum(&[]).1, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn phase_reduction() {
        assert_eq!(reduce_phase(-1e-300), 0.0);
        assert!((reduce_phase(-0.5) - (TAU - 0.5)).abs() < 1e-15);
        assert!((reduce_phase(7.0) - (7.0 - TAU)).abs() < 1e-15);
    }
}
