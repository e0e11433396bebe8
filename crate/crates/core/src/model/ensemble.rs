use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

use super::NORM_TOL;
use crate::error::{Error, Result};

/// How couplings `g_j` are assigned to environment particles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CouplingMode {
    /// Every particle couples with the same `g`.
    Constant(f64),
    /// `g_j` drawn uniformly from `[0, g_max]`.
    UniformRandom(f64),
}

impl CouplingMode {
    fn validate(&self) -> Result<()> {
        let g = match *self {
            CouplingMode::Constant(g) | CouplingMode::UniformRandom(g) => g,
        };
        if !(g.is_finite() && g > 0.0) {
            return Err(Error::invalid(format!("coupling must be positive, got {g}")));
        }
        Ok(())
    }
}

/// The environment: per-particle amplitudes `(α_j, β_j)` and couplings `g_j`.
///
/// Couplings are in s⁻¹ and enter phases as `e^{i g t}` with no factor of 2π.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentEnsemble {
    alpha: Vec<Complex64>,
    beta: Vec<Complex64>,
    g: Vec<f64>,
    seed: Option<u64>,
}

impl EnvironmentEnsemble {
    /// Builds an ensemble from explicit data, checking normalization and
    /// non-negative couplings. An empty environment is allowed here.
    pub fn from_parts(alpha: Vec<Complex64>, beta: Vec<Complex64>, g: Vec<f64>) -> Result<Self> {
        if alpha.len() != beta.len() || alpha.len() != g.len() {
            return Err(Error::invalid(format!(
                "length mismatch: alpha {}, beta {}, g {}",
                alpha.len(),
                beta.len(),
                g.len()
            )));
        }
        for (j, (a, b)) in alpha.iter().zip(&beta).enumerate() {
            let norm = a.norm_sqr() + b.norm_sqr();
            if (norm - 1.0).abs() > NORM_TOL {
                return Err(Error::invalid(format!(
                    "particle {j}: |alpha|^2 + |beta|^2 = {norm}"
                )));
            }
        }
        if let Some(j) = g.iter().position(|&x| !(x >= 0.0 && x.is_finite())) {
            return Err(Error::invalid(format!("particle {j}: coupling {} is negative", g[j])));
        }
        Ok(Self {
            alpha,
            beta,
            g,
            seed: None,
        })
    }

    /// Ensemble with real amplitudes `α_j = √p_j`, `β_j = √(1-p_j)`.
    pub fn from_probabilities(p_up: &[f64], g: Vec<f64>) -> Result<Self> {
        if let Some(p) = p_up.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::invalid(format!("probability {p} outside [0, 1]")));
        }
        let alpha = p_up.iter().map(|p| Complex64::new(p.sqrt(), 0.0)).collect();
        let beta = p_up.iter().map(|p| Complex64::new((1.0 - p).sqrt(), 0.0)).collect();
        Self::from_parts(alpha, beta, g)
    }

    pub fn n(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &[Complex64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[Complex64] {
        &self.beta
    }

    pub fn g(&self) -> &[f64] {
        &self.g
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// `|α_j|²`.
    #[inline]
    pub fn p_up(&self, j: usize) -> f64 {
        self.alpha[j].norm_sqr()
    }

    /// Same amplitudes with all couplings replaced.
    pub fn with_couplings(&self, g: Vec<f64>) -> Result<Self> {
        let mut out = Self::from_parts(self.alpha.clone(), self.beta.clone(), g)?;
        out.seed = self.seed;
        Ok(out)
    }

    /// Concatenation of two ensembles (particles of `self` first).
    pub fn concat(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.alpha.extend_from_slice(&other.alpha);
        out.beta.extend_from_slice(&other.beta);
        out.g.extend_from_slice(&other.g);
        out.seed = None;
        out
    }
}

/// Sequential particle generator behind [`make_random_ensemble`].
///
/// Stream order per particle: `|α_j|²`, `arg α_j`, `arg β_j`, then `g_j`
/// when couplings are random. All draws come from one `ChaCha8` stream seeded
/// with `seed` (stream 0), so a prefix of length `k` of an `n`-particle
/// ensemble equals the `k`-particle ensemble with the same seed.
#[derive(Debug, Clone)]
pub struct EnsembleStream {
    rng: ChaCha8Rng,
    mode: CouplingMode,
    remaining: usize,
}

impl EnsembleStream {
    pub fn new(n: usize, seed: u64, mode: CouplingMode) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("environment size must be at least 1"));
        }
        mode.validate()?;
        Ok(Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            mode,
            remaining: n,
        })
    }

    pub fn remaining(&self) -> usize {
        self.remaining
    }

    /// Next particle as `(α, β, g)`.
    pub fn next_particle(&mut self) -> Option<(Complex64, Complex64, f64)> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let p: f64 = self.rng.gen();
        let phase_a: f64 = self.rng.gen::<f64>() * TAU;
        let phase_b: f64 = self.rng.gen::<f64>() * TAU;
        let g = match self.mode {
            CouplingMode::Constant(g) => g,
            CouplingMode::UniformRandom(g_max) => self.rng.gen::<f64>() * g_max,
        };
        let alpha = Complex64::from_polar(p.sqrt(), phase_a);
        let beta = Complex64::from_polar((1.0 - p).sqrt(), phase_b);
        Some((alpha, beta, g))
    }

    /// Fills the buffers with up to `max` particles; returns how many.
    pub fn fill(
        &mut self,
        max: usize,
        alpha: &mut Vec<Complex64>,
        beta: &mut Vec<Complex64>,
        g: &mut Vec<f64>,
    ) -> usize {
        alpha.clear();
        beta.clear();
        g.clear();
        while alpha.len() < max {
            match self.next_particle() {
                Some((a, b, c)) => {
                    alpha.push(a);
                    beta.push(b);
                    g.push(c);
                }
                None => break,
            }
        }
        alpha.len()
    }
}

/// Seeded random environment: `|α_j|²` uniform on `[0,1]`, independent
/// uniform phases for `α_j` and `β_j`, couplings per `mode`.
pub fn make_random_ensemble(n: usize, seed: u64, mode: CouplingMode) -> Result<EnvironmentEnsemble> {
    let mut stream = EnsembleStream::new(n, seed, mode)?;
    let mut alpha = Vec::with_capacity(n);
    let mut beta = Vec::with_capacity(n);
    let mut g = Vec::with_capacity(n);
    stream.fill(n, &mut alpha, &mut beta, &mut g);
    Ok(EnvironmentEnsemble {
        alpha,
        beta,
        g,
        seed: Some(seed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;

    #[test]
    fn constant_couplings_and_normalization() {
        let ens = make_random_ensemble(3, 7, CouplingMode::Constant(400.0)).unwrap();
        assert_eq!(ens.n(), 3);
        assert!(ens.g().iter().all(|&g| g == 400.0));
        for j in 0..3 {
            let norm = ens.alpha()[j].norm_sqr() + ens.beta()[j].norm_sqr();
            assert!((norm - 1.0).abs() < 1e-12);
        }
        assert_eq!(ens.seed(), Some(7));
    }

    #[test]
    fn mean_of_up_probability() {
        let ens = make_random_ensemble(100_000, 1, CouplingMode::Constant(400.0)).unwrap();
        let mean = (0..ens.n()).map(|j| ens.p_up(j)).sum::<f64>() / ens.n() as f64;
        assert!((mean - 0.5).abs() < 0.01, "mean {mean}");

        // independent generator, same law
        let mut rng = StdRng::seed_from_u64(99);
        let other = (0..100_000).map(|_| rng.gen::<f64>()).sum::<f64>() / 100_000.0;
        assert!((mean - other).abs() < 0.01);
    }

    #[test]
    fn mean_of_random_couplings() {
        let ens = make_random_ensemble(100_000, 1, CouplingMode::UniformRandom(800.0)).unwrap();
        let mean = ens.g().iter().sum::<f64>() / ens.n() as f64;
        assert!((mean - 400.0).abs() < 5.0, "mean {mean}");
        assert!(ens.g().iter().all(|&g| (0.0..=800.0).contains(&g)));
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(
            make_random_ensemble(0, 1, CouplingMode::Constant(1.0)),
            Err(Error::InvalidArgument(_))
        ));
        assert!(make_random_ensemble(4, 1, CouplingMode::Constant(0.0)).is_err());
        assert!(make_random_ensemble(4, 1, CouplingMode::UniformRandom(-3.0)).is_err());
    }

    #[test]
    fn reproducible_and_prefix_stable() {
        let a = make_random_ensemble(500, 11, CouplingMode::UniformRandom(800.0)).unwrap();
        let b = make_random_ensemble(500, 11, CouplingMode::UniformRandom(800.0)).unwrap();
        assert_eq!(a, b);
        let c = make_random_ensemble(200, 11, CouplingMode::UniformRandom(800.0)).unwrap();
        assert_eq!(&a.alpha()[..200], c.alpha());
        assert_eq!(&a.g()[..200], c.g());
        let d = make_random_ensemble(500, 12, CouplingMode::UniformRandom(800.0)).unwrap();
        assert_ne!(a, d);
    }

    #[test]
    fn from_parts_validation() {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        assert!(EnvironmentEnsemble::from_parts(vec![one], vec![zero], vec![1.0]).is_ok());
        assert!(EnvironmentEnsemble::from_parts(vec![one], vec![one], vec![1.0]).is_err());
        assert!(EnvironmentEnsemble::from_parts(vec![one], vec![zero], vec![-1.0]).is_err());
        assert!(EnvironmentEnsemble::from_parts(vec![one], vec![zero], vec![]).is_err());
        assert_eq!(EnvironmentEnsemble::from_parts(vec![], vec![], vec![]).unwrap().n(), 0);
    }
}
