//! Expectation values for the original model: one system particle `P`
//! (state `a|⇑⟩ + b|⇓⟩`) coupled to `N` environment spins.

use num_complex::Complex64;

use super::product::{gamma0, gamma1, kernel_k};
use crate::error::{Error, Result};
use crate::model::{EnvironmentEnsemble, Hermitian2, NORM_TOL};

fn check_ab(a: Complex64, b: Complex64) -> Result<()> {
    let norm = a.norm_sqr() + b.norm_sqr();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::invalid(format!("|a|² + |b|² = {norm}, expected 1")));
    }
    Ok(())
}

/// `⟨O_R⟩` for an observable acting on `P` only:
/// `|a|² s⇑⇑ + |b|² s⇓⇓ + 2 Re[a b* s⇓⇑ r(t)]`.
pub fn expectation_original_d1(
    a: Complex64,
    b: Complex64,
    s: &Hermitian2,
    ens: &EnvironmentEnsemble,
    t: f64,
) -> Result<f64> {
    check_ab(a, b)?;
    let r = kernel_k(-1, ens, t).to_complex();
    Ok(a.norm_sqr() * s.uu + b.norm_sqr() * s.dd + 2.0 * (a * b.conj() * s.du * r).re)
}

/// `⟨O⟩` for a product observable `s ⊗ ε₁ ⊗ … ⊗ ε_N`:
/// `|a|² s⇑⇑ Γ₀(-t) + |b|² s⇓⇓ Γ₀(t) + 2 Re[a b* s⇓⇑ Γ₁(t)]`.
pub fn expectation_original_product(
    a: Complex64,
    b: Complex64,
    s: &Hermitian2,
    eps: &[Hermitian2],
    ens: &EnvironmentEnsemble,
    t: f64,
) -> Result<f64> {
    check_ab(a, b)?;
    let up = gamma0(ens, eps, -t)?;
    let down = gamma0(ens, eps, t)?;
    let cross = gamma1(ens, eps, t)?;
    Ok((a.norm_sqr() * s.uu * up + b.norm_sqr() * s.dd * down).re + 2.0 * (a * b.conj() * s.du * cross).re)
}

/// Closed form of `⟨O_j⟩` when only environment particle `j` is observed.
///
/// The value is `c + 2 Re[z (|a|² e^{-i g_j t} + |b|² e^{i g_j t})]` with
/// `c = |α_j|² ε↑↑ + |β_j|² ε↓↓` and `z = α_j β_j* ε↓↑`: two counter-rotating
/// phasors of fixed length, nothing that decays.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OriginalD2Terms {
    pub constant: f64,
    pub z: Complex64,
    pub weight_up: f64,
    pub weight_down: f64,
    pub g: f64,
}

impl OriginalD2Terms {
    fn phasors(&self, t: f64) -> (Complex64, Complex64) {
        let th = self.g * t;
        (
            2.0 * self.weight_up * self.z * Complex64::cis(-th),
            2.0 * self.weight_down * self.z * Complex64::cis(th),
        )
    }

    pub fn value(&self, t: f64) -> f64 {
        let (u, d) = self.phasors(t);
        self.constant + (u + d).re
    }

    /// Oscillation envelope at `t`: the summed lengths of the two phasors.
    /// Equals `2|z|` for a normalized system state.
    pub fn envelope(&self, t: f64) -> f64 {
        let (u, d) = self.phasors(t);
        u.norm() + d.norm()
    }
}

/// Terms of `⟨O_j⟩` for 1-based environment index `j`.
pub fn original_d2_terms(
    j: usize,
    a: Complex64,
    b: Complex64,
    ens: &EnvironmentEnsemble,
    eps: &Hermitian2,
) -> Result<OriginalD2Terms> {
    check_ab(a, b)?;
    if j == 0 || j > ens.n() {
        return Err(Error::invalid(format!(
            "environment index {j} outside 1..={}",
            ens.n()
        )));
    }
    let k = j - 1;
    let alpha = ens.alpha()[k];
    let beta = ens.beta()[k];
    Ok(OriginalD2Terms {
        constant: alpha.norm_sqr() * eps.uu + beta.norm_sqr() * eps.dd,
        z: alpha * beta.conj() * eps.du,
        weight_up: a.norm_sqr(),
        weight_down: b.norm_sqr(),
        g: ens.g()[k],
    })
}

/// `⟨O_j⟩(t)`; see [`OriginalD2Terms`].
pub fn expectation_original_d2(
    j: usize,
    a: Complex64,
    b: Complex64,
    ens: &EnvironmentEnsemble,
    eps: &Hermitian2,
    t: f64,
) -> Result<f64> {
    Ok(original_d2_terms(j, a, b, ens, eps)?.value(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_random_ensemble, CouplingMode};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn d1_trivial_cases() {
        let ens = make_random_ensemble(30, 2, CouplingMode::Constant(400.0)).unwrap();
        let s = Hermitian2::new(0.7, -0.2, c(0.3, 0.5));
        for t in [0.0, 1e-3, 4e-3] {
            let v = expectation_original_d1(c(1.0, 0.0), c(0.0, 0.0), &s, &ens, t).unwrap();
            assert_eq!(v, 0.7);
        }
        let flip = Hermitian2::new(0.0, 0.0, c(1.0, 0.0));
        let h = c(FRAC_1_SQRT_2, 0.0);
        let v = expectation_original_d1(h, h, &flip, &ens, 0.0).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        assert!(expectation_original_d1(c(1.0, 0.0), c(0.1, 0.0), &s, &ens, 0.0).is_err());
    }

    #[test]
    fn identity_environment_product_matches_d1() {
        let ens = make_random_ensemble(12, 8, CouplingMode::UniformRandom(800.0)).unwrap();
        let s = Hermitian2::new(0.1, 1.3, c(-0.4, 0.9));
        let (a, b) = (c(0.6, 0.0), c(0.0, 0.8));
        let id = vec![Hermitian2::IDENTITY; 12];
        for t in [0.0, 2e-4, 3e-3] {
            let x = expectation_original_d1(a, b, &s, &ens, t).unwrap();
            let y = expectation_original_product(a, b, &s, &id, &ens, t).unwrap();
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn d2_trivial_cases() {
        let ens = make_random_ensemble(4, 11, CouplingMode::UniformRandom(800.0)).unwrap();
        let (a, b) = (c(0.6, 0.0), c(0.0, 0.8));
        let diag = Hermitian2::new(0.4, 2.0, c(0.0, 0.0));
        let p = ens.p_up(1);
        let want = p * 0.4 + (1.0 - p) * 2.0;
        for t in [0.0, 0.01, 0.3] {
            let v = expectation_original_d2(2, a, b, &ens, &diag, t).unwrap();
            assert!((v - want).abs() < 1e-12);
        }

        let pure_up = EnvironmentEnsemble::from_parts(vec![c(1.0, 0.0)], vec![c(0.0, 0.0)], vec![400.0]).unwrap();
        let eps = Hermitian2::new(0.3, -1.0, c(0.5, 0.5));
        for t in [0.0, 0.01, 0.3] {
            assert_eq!(expectation_original_d2(1, a, b, &pure_up, &eps, t).unwrap(), 0.3);
        }
        assert!(expectation_original_d2(0, a, b, &ens, &eps, 0.0).is_err());
        assert!(expectation_original_d2(5, a, b, &ens, &eps, 0.0).is_err());
    }

    #[test]
    fn d2_is_periodic_with_constant_envelope() {
        let ens = make_random_ensemble(6, 13, CouplingMode::UniformRandom(800.0)).unwrap();
        let eps = Hermitian2::new(0.3, -1.0, c(0.5, -0.2));
        let (a, b) = (c(0.6, 0.0), c(0.0, 0.8));
        let terms = original_d2_terms(3, a, b, &ens, &eps).unwrap();
        let period = 2.0 * PI / terms.g;
        let env: Vec<f64> = (0..201).map(|k| terms.envelope(k as f64 * 1e-3)).collect();
        let (lo, hi) = env.iter().fold((f64::MAX, f64::MIN), |(l, h), &e| (l.min(e), h.max(e)));
        assert!(hi - lo < 1e-12);
        assert!((hi - 2.0 * terms.z.norm()).abs() < 1e-12);
        for t in [0.0, 0.0123, 0.2] {
            assert!((terms.value(t) - terms.value(t + period)).abs() < 1e-12);
        }
    }
}
