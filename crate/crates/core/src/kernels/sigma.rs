//! The three-way split `⟨O⟩ = Σ⁽¹⁾ + Σ⁽²⁾(t) + Σ⁽³⁾(t)` of expectation values
//! in the generalized model.
//!
//! With system amplitudes `C_λ` and system operator `s`, the weight of block
//! pair `(l, l')` is `W(l, l') = Σ_{λ ∈ l, λ' ∈ l'} C_λ C_{λ'}* s_{λ'λ}` and
//! its environment factor is the kernel `K_{l-l'}(t)`. Pairs are assigned as
//! follows:
//!
//! * `l = l'` (including `l = l' = M/2`): `Σ⁽¹⁾`, constant in time;
//! * `l' = M - l`, `l ≠ l'`: `Σ⁽²⁾`, kernels `K_{2l-M}`;
//! * everything else: `Σ⁽³⁾`.
//!
//! Because the kernel only depends on `d = l - l'`, `Σ⁽³⁾` collapses to
//! `Σ_{d≠0} V(d) K_d(t)` with `V(d)` accumulated in log space, so `M = 10³`
//! needs `M` kernel evaluations instead of `4^M` pair terms.

use std::collections::BTreeMap;

use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use super::logcomplex::{log_sum, LogComplex};
use super::product::{block_kernel, kernel_k_series};
use crate::error::{Error, Result};
use crate::model::{
    Amplitudes, BlockIndex, EnvironmentEnsemble, Hermitian2, SystemOperator, SystemSpec, TimeGrid,
};

/// Time-resolved split of an expectation value.
///
/// All stored values are the true values multiplied by `e^{-log_scale}`,
/// which keeps them finite when the weights grow like `2^M`. Ratios such as
/// [`SigmaSplit::normalized`] are unaffected by the scale.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaSplit {
    pub times: Vec<f64>,
    pub log_scale: f64,
    pub sigma1: f64,
    pub sigma2: Vec<f64>,
    pub sigma3: Vec<f64>,
    /// `Σ⁽²⁾ + Σ⁽³⁾`.
    pub sigma_nd: Vec<f64>,
    /// `sigma_nd` at `t = 0`.
    pub normalization: f64,
}

impl SigmaSplit {
    fn assemble(times: Vec<f64>, log_scale: f64, sigma1: f64, sigma2: Vec<f64>, sigma3: Vec<f64>) -> Self {
        let sigma_nd: Vec<f64> = sigma2.iter().zip(&sigma3).map(|(a, b)| a + b).collect();
        // all kernels equal 1 at t = 0, so assemble the normalization from
        // the same weights rather than relying on times[0] being zero
        let normalization = sigma_nd.first().copied().unwrap_or(0.0);
        Self {
            times,
            log_scale,
            sigma1,
            sigma2,
            sigma3,
            sigma_nd,
            normalization,
        }
    }

    /// `sigma_nd(t) / sigma_nd(0)`.
    pub fn normalized(&self) -> Result<Vec<f64>> {
        if self.normalization == 0.0 || !self.normalization.is_finite() {
            return Err(Error::invalid(
                "non-diagonal part vanishes at t = 0; no normalized series",
            ));
        }
        Ok(self.sigma_nd.iter().map(|v| v / self.normalization).collect())
    }

    /// Unscaled `sigma_nd`; overflows to infinity for very large systems.
    pub fn raw_sigma_nd(&self) -> Vec<f64> {
        let f = self.log_scale.exp();
        self.sigma_nd.iter().map(|v| v * f).collect()
    }

    /// Unscaled `Σ⁽¹⁾ + Σ⁽²⁾ + Σ⁽³⁾` at sample `k`.
    pub fn expectation(&self, k: usize) -> f64 {
        (self.sigma1 + self.sigma_nd[k]) * self.log_scale.exp()
    }
}

fn ln_binom(n: usize, k: usize) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

fn log_total(terms: &[LogComplex]) -> LogComplex {
    let (shift, s) = log_sum(terms);
    LogComplex::from_complex(s) * LogComplex::from_ln(shift)
}

/// Row-major `(M+1)²` table of `W(l, l')`.
fn block_weights(sys: &SystemSpec, idx: &BlockIndex, s: &SystemOperator) -> Result<Vec<LogComplex>> {
    let m = sys.m();
    if idx.m() != m {
        return Err(Error::invalid(format!(
            "block index built for M = {}, system has M = {m}",
            idx.m()
        )));
    }
    s.check_m(m)?;
    let w = m + 1;
    if let (Amplitudes::Uniform, SystemOperator::AllOnes) = (sys.amplitudes(), s) {
        let ln2m = m as f64 * std::f64::consts::LN_2;
        let mut out = Vec::with_capacity(w * w);
        for l in 0..=m {
            for lp in 0..=m {
                out.push(LogComplex::from_ln(idx.log_multiplicity(l) + idx.log_multiplicity(lp) - ln2m));
            }
        }
        return Ok(out);
    }
    let c = sys.binary_amplitudes()?;
    let mut lin = vec![Complex64::new(0.0, 0.0); w * w];
    match s {
        SystemOperator::AllOnes => {
            let mut sums = vec![Complex64::new(0.0, 0.0); w];
            for (state, amp) in c.iter().enumerate() {
                sums[state.count_ones() as usize] += amp;
            }
            for l in 0..=m {
                for lp in 0..=m {
                    lin[l * w + lp] = sums[l] * sums[lp].conj();
                }
            }
        }
        SystemOperator::Dense { .. } => {
            for (lam, cl) in c.iter().enumerate() {
                let l = lam.count_ones() as usize;
                for (lamp, clp) in c.iter().enumerate() {
                    let lp = lamp.count_ones() as usize;
                    lin[l * w + lp] += cl * clp.conj() * s.entry(lamp, lam);
                }
            }
        }
    }
    Ok(lin.into_iter().map(LogComplex::from_complex).collect())
}

/// Decomposition-1 split for the uniform observable `s_{λλ'} = 1` on a
/// time grid.
pub fn sigma_split_general_d1(
    sys: &SystemSpec,
    idx: &BlockIndex,
    ens: &EnvironmentEnsemble,
    grid: &TimeGrid,
) -> Result<SigmaSplit> {
    sigma_split_general_d1_at(sys, idx, ens, &SystemOperator::AllOnes, &grid.times())
}

/// Decomposition-1 split for an arbitrary Hermitian system operator at the
/// given times.
pub fn sigma_split_general_d1_at(
    sys: &SystemSpec,
    idx: &BlockIndex,
    ens: &EnvironmentEnsemble,
    s: &SystemOperator,
    times: &[f64],
) -> Result<SigmaSplit> {
    let m = sys.m();
    let w = m + 1;
    let weights = block_weights(sys, idx, s)?;
    let at = |l: usize, lp: usize| weights[l * w + lp];

    let log_scale = {
        let (shift, s) = log_sum(&weights.iter().map(|x| LogComplex::from_ln(x.log_mag())).collect::<Vec<_>>());
        let v = shift + s.re.ln();
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let diag: Vec<LogComplex> = (0..=m).map(|l| at(l, l)).collect();
    let (shift, s1) = log_sum(&diag);
    let sigma1 = (s1 * (shift - log_scale).exp()).re;

    // V(d) for d = 1..=M; the d < 0 half is its conjugate.
    let mut v = vec![LogComplex::ZERO; w];
    for d in 1..=m {
        let terms: Vec<LogComplex> = (0..=m - d)
            .filter(|&lp| 2 * lp + d != m)
            .map(|lp| at(lp + d, lp))
            .filter(|x| !x.is_zero())
            .collect();
        v[d] = log_total(&terms);
    }
    // Σ⁽²⁾ pairs: l < M - l, weight W(l, M-l), kernel conj(K_{M-2l}).
    let mirror: Vec<(usize, LogComplex)> = (0..=m)
        .filter(|&l| 2 * l < m)
        .map(|l| (m - 2 * l, at(l, m - l)))
        .filter(|(_, x)| !x.is_zero())
        .collect();

    let mut needed: BTreeMap<usize, Vec<LogComplex>> = BTreeMap::new();
    for d in 1..=m {
        if !v[d].is_zero() {
            needed.insert(d, Vec::new());
        }
    }
    for (d, _) in &mirror {
        needed.insert(*d, Vec::new());
    }
    for (d, series) in needed.iter_mut() {
        *series = kernel_k_series(*d as i64, ens, times);
    }

    let n_t = times.len();
    let mut sigma2 = vec![0.0; n_t];
    for (d, wgt) in &mirror {
        let k = &needed[d];
        for (out, kd) in sigma2.iter_mut().zip(k) {
            *out += 2.0 * (*wgt * kd.conj()).to_complex_scaled(log_scale).re;
        }
    }
    let mut sigma3 = vec![0.0; n_t];
    for d in 1..=m {
        if v[d].is_zero() {
            continue;
        }
        let k = &needed[&d];
        for (out, kd) in sigma3.iter_mut().zip(k) {
            *out += 2.0 * (v[d] * *kd).to_complex_scaled(log_scale).re;
        }
    }
    Ok(SigmaSplit::assemble(times.to_vec(), log_scale, sigma1, sigma2, sigma3))
}

/// Decomposition-2 split: the last system particle is observed through
/// `s̃`, everything else traced out.
///
/// Only basis pairs differing in the last particle contribute. A pair
/// `(u, u+1)` with `k` down spins among the first `M-1` particles joins
/// blocks `(k, k+1)`, which is a mirror pair exactly when `2k + 1 = M`.
pub fn sigma_split_general_d2(
    sys: &SystemSpec,
    idx: &BlockIndex,
    ens: &EnvironmentEnsemble,
    s_tilde: &Hermitian2,
    grid: &TimeGrid,
) -> Result<SigmaSplit> {
    if idx.m() != sys.m() {
        return Err(Error::invalid(format!(
            "block index built for M = {}, system has M = {}",
            idx.m(),
            sys.m()
        )));
    }
    sigma_split_general_d2_at(sys, ens, s_tilde, &grid.times())
}

pub fn sigma_split_general_d2_at(
    sys: &SystemSpec,
    ens: &EnvironmentEnsemble,
    s_tilde: &Hermitian2,
    times: &[f64],
) -> Result<SigmaSplit> {
    let m = sys.m();
    let (sigma1, p2, p3) = match sys.amplitudes() {
        Amplitudes::Uniform => {
            let sigma1 = 0.5 * (s_tilde.uu + s_tilde.dd);
            let p2 = if m % 2 == 1 {
                (ln_binom(m - 1, (m - 1) / 2) - m as f64 * std::f64::consts::LN_2).exp()
            } else {
                0.0
            };
            (sigma1, Complex64::new(p2, 0.0), Complex64::new(0.5 - p2, 0.0))
        }
        Amplitudes::Explicit(_) => {
            let c = sys.binary_amplitudes()?;
            let mut sigma1 = 0.0;
            let mut p2 = Complex64::new(0.0, 0.0);
            let mut p3 = Complex64::new(0.0, 0.0);
            for u in (0..c.len()).step_by(2) {
                let (cu, cd) = (c[u], c[u + 1]);
                sigma1 += cu.norm_sqr() * s_tilde.uu + cd.norm_sqr() * s_tilde.dd;
                let pair = cu * cd.conj();
                if 2 * u.count_ones() as usize + 1 == m {
                    p2 += pair;
                } else {
                    p3 += pair;
                }
            }
            (sigma1, p2, p3)
        }
    };
    let s_plus = s_tilde.du * p3;
    let two = s_tilde.du * p2;
    let r = kernel_k_series(-1, ens, times);
    let sigma2: Vec<f64> = r.iter().map(|r| 2.0 * (two * r.to_complex()).re).collect();
    let sigma3: Vec<f64> = r.iter().map(|r| 2.0 * (s_plus * r.to_complex()).re).collect();
    Ok(SigmaSplit::assemble(times.to_vec(), 0.0, sigma1, sigma2, sigma3))
}

/// `⟨O⟩` for a product observable `s ⊗ ε₁ ⊗ … ⊗ ε_N` on the generalized
/// model: `Σ_{l,l'} W(l, l') T_{l,l'}(t)` with ε-decorated block kernels.
/// Costs `(M+1)²` environment products, so it is meant for small systems.
pub fn expectation_full_product(
    sys: &SystemSpec,
    idx: &BlockIndex,
    s: &SystemOperator,
    eps: &[Hermitian2],
    ens: &EnvironmentEnsemble,
    t: f64,
) -> Result<f64> {
    let m = sys.m();
    let weights = block_weights(sys, idx, s)?;
    let mut terms = Vec::with_capacity(weights.len());
    for l in 0..=m {
        for lp in 0..=m {
            let w = weights[l * (m + 1) + lp];
            if w.is_zero() {
                continue;
            }
            terms.push(w * block_kernel(l, lp, m, ens, eps, &[t])?[0]);
        }
    }
    let (shift, total) = log_sum(&terms);
    Ok(total.re * shift.exp())
}
