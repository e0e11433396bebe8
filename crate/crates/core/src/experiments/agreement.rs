//! Cross-check of every closed form against the dense oracle.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::series::Decomposition;
use crate::error::{Error, Result};
use crate::kernels::{
    expectation_original_d1, expectation_original_d2, sigma_split_general_d1_at, sigma_split_general_d2_at,
};
use crate::model::{
    block_index, make_random_ensemble, Arrangement, CouplingMode, Hermitian2, ObservableSpec, SystemOperator,
    SystemSpec,
};
use crate::oracle::{build_initial, evolve, expectation, ORACLE_MAX_QUBITS};

/// Largest deviation accepted between closed form and oracle.
pub const AGREEMENT_TOL: f64 = 1e-10;
/// Coupling range of the random test environments.
pub const AGREEMENT_G_MAX: f64 = 800.0;
/// Random times are drawn from `[0, 10/g]` with `g` the mean coupling.
pub const AGREEMENT_T_MAX: f64 = 10.0 / (AGREEMENT_G_MAX / 2.0);
/// Random system operators are dense up to this size, all-ones beyond.
const DENSE_OPERATOR_MAX_M: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct AgreementCase {
    pub m: usize,
    pub n: usize,
    pub seed: u64,
    pub decomposition: Decomposition,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AgreementReport {
    pub cases: Vec<AgreementCase>,
}

impl AgreementReport {
    pub fn max_deviation(&self) -> f64 {
        self.cases.iter().map(|c| c.max_deviation).fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.max_deviation <= AGREEMENT_TOL)
    }
}

fn random_complex_unit(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
    let raw: Vec<Complex64> = (0..len)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    raw.into_iter().map(|z| z / norm).collect()
}

fn random_hermitian2(rng: &mut ChaCha8Rng) -> Hermitian2 {
    Hermitian2::new(
        rng.gen_range(-2.0..2.0),
        rng.gen_range(-2.0..2.0),
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
    )
}

fn random_operator(rng: &mut ChaCha8Rng, m: usize) -> Result<SystemOperator> {
    if m > DENSE_OPERATOR_MAX_M {
        return Ok(SystemOperator::AllOnes);
    }
    let dim = 1 << m;
    let mut e = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        e[i * dim + i] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
        for j in i + 1..dim {
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            e[i * dim + j] = z;
            e[j * dim + i] = z.conj();
        }
    }
    SystemOperator::dense(m, e)
}

/// Runs every applicable decomposition for each `M ≤ max_m`, `N ≤ max_n`
/// and seed at `times_per_case` random times in `[0, AGREEMENT_T_MAX)`.
/// The original-model decompositions only apply to `M = 1`.
pub fn oracle_agreement(max_m: usize, max_n: usize, seeds: &[u64], times_per_case: usize) -> Result<AgreementReport> {
    if max_m == 0 || max_n == 0 {
        return Err(Error::invalid("max_m and max_n must be at least 1"));
    }
    if max_m + max_n > ORACLE_MAX_QUBITS {
        return Err(Error::invalid(format!(
            "max_m + max_n = {} exceeds {ORACLE_MAX_QUBITS}",
            max_m + max_n
        )));
    }
    let mut report = AgreementReport::default();
    for m in 1..=max_m {
        for n in 1..=max_n {
            for &seed in seeds {
                let ens = make_random_ensemble(n, seed, CouplingMode::UniformRandom(AGREEMENT_G_MAX))?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(((m as u64) << 32) | n as u64);
                let amps = random_complex_unit(&mut rng, 1 << m);
                let sys = SystemSpec::explicit(m, amps.clone(), Arrangement::Binary)?;
                let idx = block_index(m)?;
                let times: Vec<f64> = (0..times_per_case).map(|_| rng.gen_range(0.0..AGREEMENT_T_MAX)).collect();
                let initial = build_initial(&sys, &ens)?;
                let states = times
                    .iter()
                    .map(|&t| evolve(&initial, ens.g(), t))
                    .collect::<Result<Vec<_>>>()?;

                let mut push = |decomposition, max_deviation| {
                    report.cases.push(AgreementCase {
                        m,
                        n,
                        seed,
                        decomposition,
                        max_deviation,
                    })
                };

                if m == 1 {
                    let s = random_hermitian2(&mut rng);
                    let (a, b) = (amps[0], amps[1]);
                    let mut worst = 0.0f64;
                    for (st, &t) in states.iter().zip(&times) {
                        let k = expectation_original_d1(a, b, &s, &ens, t)?;
                        let o = expectation(st, &ObservableSpec::OriginalD1 { s })?;
                        worst = worst.max((k - o).abs());
                    }
                    push(Decomposition::OriginalD1, worst);

                    let mut worst = 0.0f64;
                    for j in 1..=n {
                        let eps = random_hermitian2(&mut rng);
                        for (st, &t) in states.iter().zip(&times) {
                            let k = expectation_original_d2(j, a, b, &ens, &eps, t)?;
                            let o = expectation(st, &ObservableSpec::OriginalD2 { j, eps })?;
                            worst = worst.max((k - o).abs());
                        }
                    }
                    push(Decomposition::OriginalD2, worst);
                }

                let s = random_operator(&mut rng, m)?;
                let split = sigma_split_general_d1_at(&sys, &idx, &ens, &s, &times)?;
                let mut worst = 0.0f64;
                for (k, st) in states.iter().enumerate() {
                    let o = expectation(st, &ObservableSpec::GeneralD1 { s: s.clone() })?;
                    worst = worst.max((split.expectation(k) - o).abs());
                }
                push(Decomposition::GeneralD1, worst);

                let s_tilde = random_hermitian2(&mut rng);
                let split = sigma_split_general_d2_at(&sys, &ens, &s_tilde, &times)?;
                let mut worst = 0.0f64;
                for (k, st) in states.iter().enumerate() {
                    let o = expectation(st, &ObservableSpec::GeneralD2 { s_tilde })?;
                    worst = worst.max((split.expectation(k) - o).abs());
                }
                push(Decomposition::GeneralD2, worst);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_case_runs_all_four() {
        let r = oracle_agreement(1, 1, &[1], 5).unwrap();
        assert_eq!(r.cases.len(), 4);
        assert!(r.passed(), "{:?}", r.cases);
    }

    #[test]
    fn caps() {
        assert!(oracle_agreement(20, 20, &[1], 1).is_err());
        assert!(oracle_agreement(0, 2, &[1], 1).is_err());
    }
}
