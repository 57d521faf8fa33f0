//! Slow reference implementations.
//!
//! Everything here acts with ladder operators directly on occupation-number
//! bitstrings and never goes through the Pauli machinery, so agreement with
//! the optimized paths is independent evidence.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::hamiltonian::MolecularSystem;
use crate::qsim::QuantumState;
use crate::rdm::{Rdm1, Rdm2};
use crate::{Error, Result, MAX_DENSE_QUBITS};

const DEGENERACY_TOL: f64 = 1e-8;

/// Applies `ops` (right to left, `(orbital, dagger)`) to basis state `j`.
pub fn apply_ladders(ops: &[(usize, bool)], mut j: usize) -> Option<(usize, f64)> {
    let mut sign = 1.0;
    for &(p, dagger) in ops.iter().rev() {
        let occupied = j >> p & 1 == 1;
        if occupied == dagger {
            return None;
        }
        if (j & ((1usize << p) - 1)).count_ones() % 2 == 1 {
            sign = -sign;
        }
        j ^= 1 << p;
    }
    Some((j, sign))
}

fn check_r(r: usize) -> Result<()> {
    if r > MAX_DENSE_QUBITS {
        return Err(Error::TooManyQubits {
            n: r,
            limit: MAX_DENSE_QUBITS,
        });
    }
    Ok(())
}

/// Hamiltonian matrix element contributions of one basis column.
fn hamiltonian_column(sys: &MolecularSystem, j: usize, mut emit: impl FnMut(usize, f64)) {
    let r = sys.r;
    emit(j, sys.h_nuc);
    for p in 0..r {
        for q in 0..r {
            let c = sys.h[(p, q)];
            if c != 0.0 {
                if let Some((k, s)) = apply_ladders(&[(p, true), (q, false)], j) {
                    emit(k, c * s);
                }
            }
        }
    }
    for p in 0..r {
        for q in 0..r {
            for a in 0..r {
                for b in 0..r {
                    let c = sys.v[(p * r + q, a * r + b)];
                    if c != 0.0 {
                        if let Some((k, s)) = apply_ladders(&[(p, true), (q, true), (b, false), (a, false)], j) {
                            emit(k, c * s);
                        }
                    }
                }
            }
        }
    }
}

/// Full `2^r x 2^r` Hamiltonian.
pub fn dense_hamiltonian(sys: &MolecularSystem) -> Result<DMatrix<f64>> {
    check_r(sys.r)?;
    let dim = 1usize << sys.r;
    let mut h = DMatrix::zeros(dim, dim);
    for j in 0..dim {
        hamiltonian_column(sys, j, |k, v| h[(k, j)] += v);
    }
    Ok(h)
}

/// Eigenpairs of the `N`-electron sector, ascending, with vectors embedded in
/// the full register.
pub fn sector_eigenpairs(sys: &MolecularSystem) -> Result<Vec<(f64, DVector<Complex64>)>> {
    check_r(sys.r)?;
    let dim = 1usize << sys.r;
    let basis: Vec<usize> = (0..dim).filter(|j| j.count_ones() as usize == sys.n_electrons).collect();
    let mut pos = vec![usize::MAX; dim];
    for (i, &j) in basis.iter().enumerate() {
        pos[j] = i;
    }
    let m = basis.len();
    let mut h = DMatrix::zeros(m, m);
    for (col, &j) in basis.iter().enumerate() {
        hamiltonian_column(sys, j, |k, v| h[(pos[k], col)] += v);
    }
    let h = (&h + h.transpose()) * 0.5;
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    Ok(order
        .into_iter()
        .map(|k| {
            let mut v = DVector::zeros(dim);
            for (i, &j) in basis.iter().enumerate() {
                v[j] = Complex64::new(eig.eigenvectors[(i, k)], 0.0);
            }
            (eig.eigenvalues[k], v)
        })
        .collect())
}

/// Lowest eigenpair in the `N`-electron sector.
///
/// Within a degenerate ground space the returned vector is the normalized
/// projection of the lowest-index basis state with nonzero overlap, with the
/// phase fixed so its largest component is real and positive.
pub fn fci_ground(sys: &MolecularSystem) -> Result<(f64, DVector<Complex64>)> {
    let pairs = sector_eigenpairs(sys)?;
    let (e0, _) = pairs.first().cloned().ok_or_else(|| Error::InvalidArgument("empty electron sector".into()))?;
    let space: Vec<&DVector<Complex64>> =
        pairs.iter().take_while(|(e, _)| (e - e0).abs() < DEGENERACY_TOL).map(|(_, v)| v).collect();
    let dim = space[0].len();
    for j in 0..dim {
        let mut v = DVector::<Complex64>::zeros(dim);
        for u in &space {
            v += *u * u[j].conj();
        }
        let norm = v.norm();
        if norm > 1e-6 {
            v /= Complex64::new(norm, 0.0);
            let (imax, _) = v.iter().enumerate().fold((0, -1.0), |best, (i, z)| {
                if z.norm() > best.1 + 1e-12 {
                    (i, z.norm())
                } else {
                    best
                }
            });
            let phase = v[imax] / v[imax].norm();
            v /= phase;
            return Ok((e0, v));
        }
    }
    unreachable!("a nonempty eigenspace overlaps some basis state")
}

/// `Tr(rho O)` or `<psi|O|psi>` for a ladder product `O`.
fn ladder_expectation(state: &QuantumState, ops: &[(usize, bool)]) -> Complex64 {
    let dim = state.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    match state {
        QuantumState::Pure { amplitudes, .. } => {
            for j in 0..dim {
                if let Some((k, s)) = apply_ladders(ops, j) {
                    acc += amplitudes[k].conj() * amplitudes[j] * s;
                }
            }
        }
        QuantumState::Mixed { rho, .. } => {
            for j in 0..dim {
                if let Some((k, s)) = apply_ladders(ops, j) {
                    acc += rho[j * dim + k] * s;
                }
            }
        }
    }
    acc
}

/// RDMs with every element evaluated as a separate operator expectation.
pub fn exact_rdms(state: &QuantumState, r: usize) -> Result<(Rdm1, Rdm2)> {
    check_r(r)?;
    if state.num_qubits() != r {
        return Err(Error::DimensionMismatch {
            expected: r,
            found: state.num_qubits(),
            context: "state qubits vs spin-orbitals",
        });
    }
    let d1 = DMatrix::from_fn(r, r, |i, j| ladder_expectation(state, &[(i, true), (j, false)]));
    let d2 = DMatrix::from_fn(r * r, r * r, |row, col| {
        let (p, q) = (row / r, row % r);
        let (a, b) = (col / r, col % r);
        ladder_expectation(state, &[(p, true), (q, true), (b, false), (a, false)])
    });
    Ok((Rdm1::from_matrix(d1)?, Rdm2::from_matrix(r, d2)?))
}

/// Elastic and inelastic intensities by literal summation.
pub fn naive_intensity(d1: &Rdm1, d2: &Rdm2, s: &DMatrix<Complex64>, c_n: f64, n_e: f64) -> (f64, f64) {
    let r = d1.r();
    let mut lin = Complex64::new(0.0, 0.0);
    for i in 0..r {
        for j in 0..r {
            lin += d1.get(i, j) * s[(i, j)];
        }
    }
    let mut quad1 = Complex64::new(0.0, 0.0);
    let mut quad2 = Complex64::new(0.0, 0.0);
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                for l in 0..r {
                    let ss = s[(i, j)] * s[(k, l)].conj();
                    quad1 += d1.get(i, j) * d1.get(k, l) * ss;
                    quad2 += d2.get(i, j, k, l) * ss;
                }
            }
        }
    }
    let elastic = c_n * c_n - 2.0 * c_n * lin.re + quad1.re;
    let inelastic = n_e + quad2.re - quad1.re;
    (elastic, inelastic)
}
