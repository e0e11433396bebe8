use num_complex::Complex64;

use crate::error::{Error, Result};

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut out = Self::zeros(dim);
        for i in 0..dim {
            out.entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        out
    }

    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::invalid(format!(
                "{} entries do not form a {dim}×{dim} matrix",
                entries.len()
            )));
        }
        Ok(Self { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    pub(crate) fn add_at(&mut self, i: usize, j: usize, v: Complex64) {
        self.entries[i * self.dim + j] += v;
    }

    pub fn kron(&self, other: &DenseMatrix) -> DenseMatrix {
        let d = self.dim * other.dim;
        let mut out = Self::zeros(d);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let a = self.get(i, j);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..other.dim {
                    for l in 0..other.dim {
                        out.entries[(i * other.dim + k) * d + j * other.dim + l] = a * other.get(k, l);
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &DenseMatrix) -> DenseMatrix {
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        DenseMatrix { dim: self.dim, entries }
    }

    pub fn scale(&self, s: f64) -> DenseMatrix {
        DenseMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|a| a * s).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    /// `max |A_ij - conj(A_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Largest off-diagonal modulus.
    pub fn max_offdiag(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j {
                    worst = worst.max(self.get(i, j).norm());
                }
            }
        }
        worst
    }

    /// Cholesky factorization of `A + shift·I`; succeeds iff that matrix is
    /// positive definite (up to rounding).
    fn cholesky_ok(&self, shift: f64) -> bool {
        let n = self.dim;
        let mut l = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            let mut d = self.get(j, j).re + shift;
            for k in 0..j {
                d -= l[j * n + k].norm_sqr();
            }
            if !(d > 0.0) {
                return false;
            }
            let d = d.sqrt();
            l[j * n + j] = Complex64::new(d, 0.0);
            for i in j + 1..n {
                let mut v = self.get(i, j);
                for k in 0..j {
                    v -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = v / d;
            }
        }
        true
    }
}

/// Density operator: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(DenseMatrix);

impl DensityMatrix {
    /// Wraps `m` after checking the density-matrix invariants.
    pub fn new(m: DenseMatrix) -> Result<Self> {
        let tr = m.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::invalid(format!("trace {tr} differs from 1")));
        }
        if m.hermiticity_error() > 1e-12 {
            return Err(Error::invalid("matrix is not Hermitian"));
        }
        if !m.cholesky_ok(1e-10) {
            return Err(Error::invalid("matrix has a negative eigenvalue below -1e-10"));
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0.get(i, j)
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.0.entries().iter().map(|z| z.norm_sqr()).sum()
    }

    /// Entrywise mean of several density matrices of equal dimension.
    pub fn average(items: &[DensityMatrix]) -> Result<DensityMatrix> {
        let first = items.first().ok_or_else(|| Error::invalid("nothing to average"))?;
        let mut acc = DenseMatrix::zeros(first.dim());
        for m in items {
            if m.dim() != first.dim() {
                return Err(Error::invalid("density matrices differ in dimension"));
            }
            acc = acc.add(&m.0);
        }
        DensityMatrix::new(acc.scale(1.0 / items.len() as f64))
    }
}

/// `Σ_{i≠j} |ρ_ij|²` in the computational basis.
pub fn offdiag_norm(rho: &DensityMatrix) -> f64 {
    let n = rho.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += rho.get(i, j).norm_sqr();
            }
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kron_of_paulis() {
        let z = DenseMatrix::from_entries(2, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]).unwrap();
        let zz = z.kron(&z);
        assert_eq!(zz.diagonal(), vec![c(1.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(zz.max_offdiag(), 0.0);
        let x = DenseMatrix::from_entries(2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let zx = z.kron(&x);
        assert_eq!(zx.get(0, 1), c(1.0, 0.0));
        assert_eq!(zx.get(2, 3), c(-1.0, 0.0));
    }

    #[test]
    fn density_checks() {
        let plus = DenseMatrix::from_entries(2, vec![c(0.5, 0.0); 4]).unwrap();
        let rho = DensityMatrix::new(plus).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-15);
        assert!((offdiag_norm(&rho) - 0.5).abs() < 1e-15);

        let diag = DenseMatrix::from_entries(2, vec![c(0.3, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.7, 0.0)]).unwrap();
        assert_eq!(offdiag_norm(&DensityMatrix::new(diag).unwrap()), 0.0);

        let neg = DenseMatrix::from_entries(2, vec![c(1.2, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.2, 0.0)]).unwrap();
        assert!(DensityMatrix::new(neg).is_err());
        let skew = DenseMatrix::from_entries(2, vec![c(0.5, 0.0), c(0.1, 0.0), c(0.2, 0.0), c(0.5, 0.0)]).unwrap();
        assert!(DensityMatrix::new(skew).is_err());
        assert!(DensityMatrix::new(DenseMatrix::identity(2)).is_err());
    }
}
