//! Degeneracy bookkeeping for the `M`-particle system.
//!
//! Basis states of the system are grouped by the number `l` of down spins.
//! Block `l` holds `binom(M, l)` states, all with eigenvalue `(M - 2l)/2` of
//! the system factor of the Hamiltonian. `f(l)` is the cumulative block size,
//! so block `l` occupies 1-based positions `f(l-1)+1 ..= f(l)`.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Largest system size accepted by [`block_index`].
pub const BLOCK_MAX_M: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct BlockIndex {
    m: usize,
    log_multiplicity: Vec<f64>,
}

impl BlockIndex {
    pub fn m(&self) -> usize {
        self.m
    }

    /// `ln binom(M, l)` for `l = 0..=M`.
    pub fn log_multiplicities(&self) -> &[f64] {
        &self.log_multiplicity
    }

    pub fn log_multiplicity(&self, l: usize) -> f64 {
        self.log_multiplicity[l]
    }

    /// Exact block size; only meaningful while it fits a `u128`.
    pub fn multiplicity(&self, l: usize) -> Option<u128> {
        exact_binomial(self.m as u64, l as u64)
    }

    /// `Λ_l = (M - 2l)/2`.
    pub fn eigenvalue(&self, l: usize) -> f64 {
        (self.m as f64 - 2.0 * l as f64) / 2.0
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        (0..=self.m).map(|l| self.eigenvalue(l)).collect()
    }

    /// `f(l)` for `l ∈ -1..=M`, exact. `None` once `2^M` overflows `u128`.
    pub fn f(&self, l: isize) -> Option<u128> {
        if l < 0 {
            return Some(0);
        }
        let l = (l as usize).min(self.m);
        let mut acc: u128 = 0;
        for p in 0..=l {
            acc = acc.checked_add(self.multiplicity(p)?)?;
        }
        Some(acc)
    }

    /// The table `f(-1), f(0), ..., f(M)`; requires `M < 128`.
    pub fn f_table(&self) -> Option<Vec<u128>> {
        (-1..=self.m as isize).map(|l| self.f(l)).collect()
    }

    /// `M̃`: last `l` paired with its mirror block `M - l` (`l < M - l`).
    /// `None` when no such block exists (`M = 0`).
    pub fn m_tilde(&self) -> Option<usize> {
        if self.m == 0 {
            None
        } else if self.m % 2 == 0 {
            Some((self.m - 2) / 2)
        } else {
            Some((self.m - 1) / 2)
        }
    }

    /// Block of a computational basis state (its down-spin count).
    pub fn block_of(state: u64) -> usize {
        state.count_ones() as usize
    }
}

pub fn block_index(m: usize) -> Result<BlockIndex> {
    if m == 0 {
        return Err(Error::invalid("system size M must be at least 1"));
    }
    if m > BLOCK_MAX_M {
        return Err(Error::invalid(format!("system size {m} exceeds {BLOCK_MAX_M}")));
    }
    let ln_m1 = ln_gamma(m as f64 + 1.0);
    let log_multiplicity = (0..=m)
        .map(|l| {
            if l == 0 || l == m {
                0.0
            } else {
                ln_m1 - ln_gamma(l as f64 + 1.0) - ln_gamma((m - l) as f64 + 1.0)
            }
        })
        .collect();
    Ok(BlockIndex {
        m,
        log_multiplicity,
    })
}

/// `ln W(l, l')` with `W = binom(M,l) binom(M,l') 2^{-M}`: total weight of
/// block pair `(l, l')` for uniform amplitudes and an all-ones observable.
pub fn uniform_block_pair_weight(idx: &BlockIndex, l: usize, lp: usize) -> Result<f64> {
    if l > idx.m || lp > idx.m {
        return Err(Error::invalid(format!(
            "block pair ({l}, {lp}) outside 0..={}",
            idx.m
        )));
    }
    Ok(idx.log_multiplicity(l) + idx.log_multiplicity(lp) - idx.m as f64 * std::f64::consts::LN_2)
}

fn exact_binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) after the multiplication
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ln_binom_by_sum(n: usize, k: usize) -> f64 {
        // independent oracle: ln n! - ln k! - ln (n-k)! by direct log sums
        let lnfact = |x: usize| (1..=x).map(|i| (i as f64).ln()).sum::<f64>();
        lnfact(n) - lnfact(k) - lnfact(n - k)
    }

    #[test]
    fn single_particle() {
        let idx = block_index(1).unwrap();
        assert_eq!(idx.f_table().unwrap(), vec![0, 1, 2]);
        assert_eq!(idx.eigenvalues(), vec![0.5, -0.5]);
    }

    #[test]
    fn four_particles_block_two() {
        let idx = block_index(4).unwrap();
        assert_eq!(idx.multiplicity(2), Some(6));
        assert_eq!(idx.f(2), Some(11));
    }

    #[test]
    fn large_m_log_multiplicity() {
        let idx = block_index(1000).unwrap();
        let oracle = ln_binom_by_sum(1000, 500);
        assert!((oracle - 689.467).abs() < 1e-3, "oracle {oracle}");
        let rel = (idx.log_multiplicity(500) - oracle).abs() / oracle;
        assert!(rel < 1e-10, "rel {rel}");
        for l in [1, 17, 250, 999] {
            let o = ln_binom_by_sum(1000, l);
            assert!((idx.log_multiplicity(l) - o).abs() / o < 1e-10);
        }
    }

    #[test]
    fn rejects_zero() {
        assert!(matches!(block_index(0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn pair_weights() {
        let idx1 = block_index(1).unwrap();
        let w = uniform_block_pair_weight(&idx1, 0, 1).unwrap().exp();
        assert!((w - 0.5).abs() < 1e-15);

        // brute force over all 16 (λ, λ') pairs of M = 2
        let idx2 = block_index(2).unwrap();
        let mut brute = [[0.0f64; 3]; 3];
        for a in 0u64..4 {
            for b in 0u64..4 {
                brute[BlockIndex::block_of(a)][BlockIndex::block_of(b)] += 0.25;
            }
        }
        let mut total = 0.0;
        for l in 0..=2 {
            for lp in 0..=2 {
                let w = uniform_block_pair_weight(&idx2, l, lp).unwrap().exp();
                assert!((w - brute[l][lp]).abs() < 1e-14);
                total += w;
            }
        }
        assert!((total - 4.0).abs() < 1e-12);

        let idx10 = block_index(10).unwrap();
        let w = uniform_block_pair_weight(&idx10, 5, 5).unwrap().exp();
        assert!((w - 252.0 * 252.0 / 1024.0).abs() < 1e-9);
        assert!((w - 62.015625).abs() < 1e-9);

        assert!(uniform_block_pair_weight(&idx10, 11, 0).is_err());
    }

    #[test]
    fn multiplicities_sum_to_dimension() {
        for m in 1..=16usize {
            let idx = block_index(m).unwrap();
            let sum: f64 = idx.log_multiplicities().iter().map(|x| x.exp()).sum();
            let dim = (1u64 << m) as f64;
            assert!((sum - dim).abs() / dim < 1e-9);
            let f = idx.f_table().unwrap();
            assert_eq!(f[0], 0);
            assert_eq!(*f.last().unwrap(), 1u128 << m);
            assert!(f.windows(2).all(|w| w[0] <= w[1]));
            for l in 0..=m {
                assert_eq!(f[l + 1] - f[l], idx.multiplicity(l).unwrap());
            }
        }
    }

    #[test]
    fn degeneracy_matches_popcount_grouping() {
        for m in 1..=12usize {
            let idx = block_index(m).unwrap();
            let mut counts = vec![0u128; m + 1];
            for s in 0u64..(1 << m) {
                counts[BlockIndex::block_of(s)] += 1;
            }
            for l in 0..=m {
                assert_eq!(counts[l], idx.multiplicity(l).unwrap());
            }
            let lam = idx.eigenvalues();
            assert_eq!(lam[0], m as f64 / 2.0);
            assert_eq!(lam[m], -(m as f64) / 2.0);
            assert!(lam.windows(2).all(|w| w[0] > w[1]));
        }
    }

    #[test]
    fn m_tilde_values() {
        assert_eq!(block_index(1).unwrap().m_tilde(), Some(0));
        assert_eq!(block_index(4).unwrap().m_tilde(), Some(1));
        assert_eq!(block_index(5).unwrap().m_tilde(), Some(2));
    }
}
