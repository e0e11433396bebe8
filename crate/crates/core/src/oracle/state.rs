use num_complex::Complex64;

use super::matrix::{DenseMatrix, DensityMatrix};
use crate::error::{Error, Result};
use crate::model::{EnvironmentEnsemble, Hermitian2, ObservableSpec, SystemOperator, SystemSpec};

/// Cap on `M + N` for state vectors.
pub const ORACLE_MAX_QUBITS: usize = 24;
/// Cap on `M + N` for the explicit Hamiltonian matrix.
pub const HAMILTONIAN_MAX_QUBITS: usize = 12;
/// Cap on the number of particles kept by [`partial_trace`].
pub const TRACE_MAX_KEEP: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    m: usize,
    n: usize,
    amp: Vec<Complex64>,
}

impl DenseState {
    pub fn from_amplitudes(m: usize, n: usize, amp: Vec<Complex64>) -> Result<Self> {
        check_size(m, n, ORACLE_MAX_QUBITS)?;
        if amp.len() != 1 << (m + n) {
            return Err(Error::invalid(format!(
                "expected {} amplitudes, got {}",
                1usize << (m + n),
                amp.len()
            )));
        }
        Ok(Self { m, n, amp })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amp
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Environment amplitudes paired with one system basis state (binary
    /// index), i.e. the unnormalized branch `⟨A_λ|ψ⟩`.
    pub fn system_branch(&self, lambda: usize) -> &[Complex64] {
        let w = 1 << self.n;
        &self.amp[lambda * w..(lambda + 1) * w]
    }
}

fn check_size(m: usize, n: usize, cap: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::invalid("system size M must be at least 1"));
    }
    if m + n > cap {
        return Err(Error::UnsupportedSize(format!(
            "M + N = {} exceeds the limit of {cap}",
            m + n
        )));
    }
    Ok(())
}

/// `|ψ_A⟩ ⊗ ⊗_j (α_j|↑⟩ + β_j|↓⟩)`.
pub fn build_initial(sys: &SystemSpec, ens: &EnvironmentEnsemble) -> Result<DenseState> {
    let (m, n) = (sys.m(), ens.n());
    check_size(m, n, ORACLE_MAX_QUBITS)?;
    let c = sys.binary_amplitudes()?;
    let mut env = vec![Complex64::new(1.0, 0.0)];
    for j in 0..n {
        let mut next = Vec::with_capacity(env.len() * 2);
        for &e in &env {
            next.push(e * ens.alpha()[j]);
            next.push(e * ens.beta()[j]);
        }
        env = next;
    }
    let mut amp = Vec::with_capacity(c.len() * env.len());
    for &cs in &c {
        amp.extend(env.iter().map(|&e| cs * e));
    }
    Ok(DenseState { m, n, amp })
}

/// Diagonal of `H = H_A ⊗ H_B` with `H_A` the total spin-z of the system
/// (eigenvalue `(M - 2·downs)/2`) and `H_B = Σ_j g_j σ_z^{(j)}`.
pub fn basis_energies(m: usize, n: usize, g: &[f64]) -> Result<Vec<f64>> {
    check_size(m, n, ORACLE_MAX_QUBITS)?;
    if g.len() != n {
        return Err(Error::invalid(format!("{} couplings for {n} particles", g.len())));
    }
    let env: Vec<f64> = (0..1usize << n)
        .map(|e| {
            (0..n)
                .map(|j| {
                    let down = (e >> (n - 1 - j)) & 1 == 1;
                    if down {
                        -g[j]
                    } else {
                        g[j]
                    }
                })
                .sum()
        })
        .collect();
    let mut out = Vec::with_capacity(1 << (m + n));
    for s in 0..1usize << m {
        let lambda = (m as f64 - 2.0 * s.count_ones() as f64) / 2.0;
        out.extend(env.iter().map(|&e| lambda * e));
    }
    Ok(out)
}

/// `e^{-iHt}|ψ⟩`; the Hamiltonian is diagonal in the computational basis.
pub fn evolve(state: &DenseState, g: &[f64], t: f64) -> Result<DenseState> {
    let energies = basis_energies(state.m, state.n, g)?;
    let amp = state
        .amp
        .iter()
        .zip(&energies)
        .map(|(&a, &e)| if t == 0.0 { a } else { a * Complex64::cis(-e * t) })
        .collect();
    Ok(DenseState {
        m: state.m,
        n: state.n,
        amp,
    })
}

fn pauli_z() -> DenseMatrix {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    DenseMatrix::from_entries(2, vec![one, zero, zero, -one]).expect("2×2")
}

/// `Σ_k w_k · (I ⊗ … ⊗ σ_z ⊗ … ⊗ I)` with `σ_z` on factor `k`.
fn weighted_z_sum(weights: &[f64]) -> DenseMatrix {
    let k = weights.len();
    let mut acc = DenseMatrix::zeros(1 << k);
    for (pos, &w) in weights.iter().enumerate() {
        let mut term = DenseMatrix::identity(1);
        for q in 0..k {
            let factor = if q == pos { pauli_z() } else { DenseMatrix::identity(2) };
            term = term.kron(&factor);
        }
        acc = acc.add(&term.scale(w));
    }
    acc
}

/// `H = H_A ⊗ H_B` as an explicit `2^{M+N}` square matrix, assembled from
/// Kronecker products of Pauli matrices.
pub fn build_hamiltonian_dense(m: usize, n: usize, g: &[f64]) -> Result<DenseMatrix> {
    check_size(m, n, HAMILTONIAN_MAX_QUBITS)?;
    if g.len() != n {
        return Err(Error::invalid(format!("{} couplings for {n} particles", g.len())));
    }
    let h_a = weighted_z_sum(&vec![0.5; m]);
    let h_b = weighted_z_sum(g);
    Ok(h_a.kron(&h_b))
}

/// Applies a one-spin operator to the qubit at bit position `bit`.
fn apply_single(amp: &mut [Complex64], bit: usize, op: &Hermitian2) {
    let mat = op.matrix();
    let mask = 1usize << bit;
    for i in 0..amp.len() {
        if i & mask == 0 {
            let (u, d) = (amp[i], amp[i | mask]);
            amp[i] = mat[0][0] * u + mat[0][1] * d;
            amp[i | mask] = mat[1][0] * u + mat[1][1] * d;
        }
    }
}

fn apply_system(amp: &mut [Complex64], m: usize, n: usize, s: &SystemOperator) -> Result<()> {
    s.check_m(m)?;
    let dim = 1usize << m;
    let w = 1usize << n;
    let mut col = vec![Complex64::new(0.0, 0.0); dim];
    for e in 0..w {
        for (lam, slot) in col.iter_mut().enumerate() {
            *slot = amp[lam * w + e];
        }
        match s {
            SystemOperator::AllOnes => {
                let total: Complex64 = col.iter().sum();
                for lam in 0..dim {
                    amp[lam * w + e] = total;
                }
            }
            SystemOperator::Dense { .. } => {
                for lam in 0..dim {
                    amp[lam * w + e] = (0..dim).map(|lp| s.entry(lam, lp) * col[lp]).sum();
                }
            }
        }
    }
    Ok(())
}

/// `⟨ψ|O|ψ⟩` for any observable family.
pub fn expectation(state: &DenseState, obs: &ObservableSpec) -> Result<f64> {
    let (m, n) = (state.m, state.n);
    let mut phi = state.amp.clone();
    match obs {
        ObservableSpec::OriginalD1 { s } => {
            if m != 1 {
                return Err(Error::invalid("original-model observable needs M = 1"));
            }
            apply_single(&mut phi, n, s);
        }
        ObservableSpec::OriginalD2 { j, eps } => {
            if *j == 0 || *j > n {
                return Err(Error::invalid(format!("environment index {j} outside 1..={n}")));
            }
            apply_single(&mut phi, n - j, eps);
        }
        ObservableSpec::GeneralD1 { s } => apply_system(&mut phi, m, n, s)?,
        ObservableSpec::GeneralD2 { s_tilde } => apply_single(&mut phi, n, s_tilde),
        ObservableSpec::FullProduct { s, eps } => {
            if eps.len() != n {
                return Err(Error::invalid(format!(
                    "{} environment factors for {n} particles",
                    eps.len()
                )));
            }
            for (j, e) in eps.iter().enumerate() {
                apply_single(&mut phi, n - 1 - j, e);
            }
            apply_system(&mut phi, m, n, s)?;
        }
    }
    let v: Complex64 = state.amp.iter().zip(&phi).map(|(a, b)| a.conj() * b).sum();
    Ok(v.re)
}

/// Reduced state of the particles in `keep`, numbered `0..M` for the system
/// particles and `M..M+N` for the environment particles. The first listed
/// particle becomes the most significant bit of the reduced index.
pub fn partial_trace(state: &DenseState, keep: &[usize]) -> Result<DensityMatrix> {
    let total = state.m + state.n;
    if keep.is_empty() || keep.len() > TRACE_MAX_KEEP {
        return Err(Error::invalid(format!(
            "can keep between 1 and {TRACE_MAX_KEEP} particles, got {}",
            keep.len()
        )));
    }
    let mut seen = vec![false; total];
    for &p in keep {
        if p >= total || seen[p] {
            return Err(Error::invalid(format!("bad particle index {p} in subset")));
        }
        seen[p] = true;
    }
    let bit_of = |p: usize| total - 1 - p;
    let kept_bits: Vec<usize> = keep.iter().map(|&p| bit_of(p)).collect();
    let rest_bits: Vec<usize> = (0..total).filter(|p| !seen[*p]).map(bit_of).collect();
    let k = keep.len();
    let dim = 1usize << k;
    let mut rho = DenseMatrix::zeros(dim);
    let mut branch = vec![Complex64::new(0.0, 0.0); dim];
    for r in 0..1usize << rest_bits.len() {
        let mut base = 0usize;
        for (pos, &b) in rest_bits.iter().enumerate() {
            if (r >> (rest_bits.len() - 1 - pos)) & 1 == 1 {
                base |= 1 << b;
            }
        }
        for (i, slot) in branch.iter_mut().enumerate() {
            let mut idx = base;
            for (pos, &b) in kept_bits.iter().enumerate() {
                if (i >> (k - 1 - pos)) & 1 == 1 {
                    idx |= 1 << b;
                }
            }
            *slot = state.amp[idx];
        }
        for i in 0..dim {
            for j in 0..dim {
                rho.add_at(i, j, branch[i] * branch[j].conj());
            }
        }
    }
    DensityMatrix::new(rho)
}
