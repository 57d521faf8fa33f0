use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result, MAX_DENSE_QUBITS, MAX_QUBITS};

/// A pure statevector or a density matrix over `n` qubits.
///
/// Basis index bit `k` is the occupation of qubit `k`. Density matrices are
/// stored row-major, so entry `(row, col)` sits at `row * 2^n + col`.
#[derive(Clone, Debug, PartialEq)]
pub enum QuantumState {
    Pure { n: usize, amplitudes: Vec<Complex64> },
    Mixed { n: usize, rho: Vec<Complex64> },
}

fn check_n(n: usize, limit: usize) -> Result<()> {
    if n == 0 || n > limit {
        return Err(Error::TooManyQubits { n, limit });
    }
    Ok(())
}

impl QuantumState {
    /// `|0...0>`
    pub fn zero(n: usize) -> Self {
        QuantumState::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        QuantumState::Pure { n, amplitudes }
    }

    pub fn maximally_mixed(n: usize) -> Self {
        let dim = 1usize << n;
        let mut rho = vec![Complex64::new(0.0, 0.0); dim * dim];
        let w = 1.0 / dim as f64;
        for i in 0..dim {
            rho[i * dim + i] = Complex64::new(w, 0.0);
        }
        QuantumState::Mixed { n, rho }
    }

    /// Normalizes the given amplitudes.
    pub fn from_amplitudes(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if !dim.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("statevector length {dim} is not a power of two")));
        }
        let n = dim.trailing_zeros() as usize;
        check_n(n, MAX_QUBITS)?;
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidArgument("zero statevector".into()));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(QuantumState::Pure { n, amplitudes })
    }

    pub fn from_density(m: &DMatrix<Complex64>) -> Result<Self> {
        let dim = m.nrows();
        if m.ncols() != dim || !dim.is_power_of_two() {
            return Err(Error::InvalidArgument("density matrix must be square with power-of-two size".into()));
        }
        let n = dim.trailing_zeros() as usize;
        check_n(n, MAX_DENSE_QUBITS)?;
        let mut rho = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                rho.push(m[(r, c)]);
            }
        }
        Ok(QuantumState::Mixed { n, rho })
    }

    pub fn num_qubits(&self) -> usize {
        match self {
            QuantumState::Pure { n, .. } | QuantumState::Mixed { n, .. } => *n,
        }
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits()
    }

    pub fn is_pure(&self) -> bool {
        matches!(self, QuantumState::Pure { .. })
    }

    pub fn amplitudes(&self) -> Option<&[Complex64]> {
        match self {
            QuantumState::Pure { amplitudes, .. } => Some(amplitudes),
            QuantumState::Mixed { .. } => None,
        }
    }

    /// Promotes to a density matrix (no-op for mixed states).
    pub fn to_density(&self) -> QuantumState {
        match self {
            QuantumState::Mixed { .. } => self.clone(),
            QuantumState::Pure { n, amplitudes } => {
                let dim = amplitudes.len();
                let mut rho = vec![Complex64::new(0.0, 0.0); dim * dim];
                for r in 0..dim {
                    for c in 0..dim {
                        rho[r * dim + c] = amplitudes[r] * amplitudes[c].conj();
                    }
                }
                QuantumState::Mixed { n: *n, rho }
            }
        }
    }

    pub fn density_matrix(&self) -> DMatrix<Complex64> {
        let dim = self.dim();
        match self.to_density() {
            QuantumState::Mixed { rho, .. } => DMatrix::from_row_slice(dim, dim, &rho),
            QuantumState::Pure { .. } => unreachable!(),
        }
    }

    pub fn statevector(&self) -> Option<DVector<Complex64>> {
        self.amplitudes().map(DVector::from_column_slice)
    }

    pub fn trace(&self) -> Complex64 {
        match self {
            QuantumState::Pure { amplitudes, .. } => {
                Complex64::new(amplitudes.iter().map(|a| a.norm_sqr()).sum(), 0.0)
            }
            QuantumState::Mixed { rho, .. } => {
                let dim = self.dim();
                (0..dim).map(|i| rho[i * dim + i]).sum()
            }
        }
    }

    /// Largest deviation from a valid state: norm / trace, Hermiticity and
    /// the most negative eigenvalue, whichever is worst.
    pub fn validity_defect(&self) -> f64 {
        match self {
            QuantumState::Pure { .. } => (self.trace().re - 1.0).abs(),
            QuantumState::Mixed { .. } => {
                let m = self.density_matrix();
                let herm = (&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
                let tr = (self.trace() - Complex64::new(1.0, 0.0)).norm();
                let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
                let min_eig = h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
                herm.max(tr).max((-min_eig).max(0.0))
            }
        }
    }

    /// `|<a|b>|^2` for pure states, `Tr(rho sigma)` otherwise.
    pub fn overlap(&self, other: &QuantumState) -> f64 {
        match (self, other) {
            (QuantumState::Pure { amplitudes: a, .. }, QuantumState::Pure { amplitudes: b, .. }) => {
                a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>().norm_sqr()
            }
            _ => {
                let a = self.density_matrix();
                let b = other.density_matrix();
                (a * b).trace().re
            }
        }
    }
}
