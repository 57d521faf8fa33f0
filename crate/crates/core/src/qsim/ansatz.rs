//! Parameterized circuit families.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::circuit::Circuit;
use super::gate::Gate;
use crate::fermion::{jordan_wigner, FermionTerm, Ladder, Pauli, PauliString};
use crate::hamiltonian::MolecularSystem;
use crate::{Error, Result};

/// A spin-preserving excitation from occupied to virtual spin-orbitals of the
/// Hartree-Fock reference (occupied = `0..N`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Excitation {
    Single { from: usize, to: usize },
    Double { from: [usize; 2], to: [usize; 2] },
}

impl Excitation {
    /// Excitation operator `T` (the ansatz uses `exp(theta (T - T^+))`).
    pub fn operator(&self) -> FermionTerm {
        match *self {
            Excitation::Single { from, to } => FermionTerm::one_body(to, from),
            Excitation::Double { from: [i, j], to: [a, b] } => FermionTerm::new(
                1.0,
                vec![Ladder::create(a), Ladder::create(b), Ladder::annihilate(j), Ladder::annihilate(i)],
            ),
        }
    }
}

/// Singles first, then doubles, each in lexicographic order.
pub fn uccsd_excitations(r: usize, n_electrons: usize) -> Vec<Excitation> {
    let occ: Vec<usize> = (0..n_electrons.min(r)).collect();
    let virt: Vec<usize> = (n_electrons.min(r)..r).collect();
    let mut out = Vec::new();
    for &i in &occ {
        for &a in &virt {
            if i % 2 == a % 2 {
                out.push(Excitation::Single { from: i, to: a });
            }
        }
    }
    for (x, &i) in occ.iter().enumerate() {
        for &j in &occ[x + 1..] {
            for (y, &a) in virt.iter().enumerate() {
                for &b in &virt[y + 1..] {
                    let mut s_from = [i % 2, j % 2];
                    let mut s_to = [a % 2, b % 2];
                    s_from.sort_unstable();
                    s_to.sort_unstable();
                    if s_from == s_to {
                        out.push(Excitation::Double { from: [i, j], to: [a, b] });
                    }
                }
            }
        }
    }
    out
}

/// X gates on qubits `0..n_electrons`.
pub fn hartree_fock_circuit(n: usize, n_electrons: usize) -> Result<Circuit> {
    if n_electrons > n {
        return Err(Error::InvalidArgument(format!("{n_electrons} electrons do not fit in {n} spin-orbitals")));
    }
    let mut c = Circuit::new(n)?;
    c.push_layer((0..n_electrons).map(Gate::x).collect())?;
    Ok(c)
}

/// Appends `exp(i * scale * theta * P)` with `theta = params[index]`.
fn push_pauli_exponential(c: &mut Circuit, string: &PauliString, index: usize, scale: f64) -> Result<()> {
    let n = c.num_qubits();
    let support: Vec<usize> = (0..n).filter(|&q| string.letter(q) != Pauli::I).collect();
    let Some(&last) = support.last() else {
        // Global phase only.
        return Ok(());
    };
    for &q in &support {
        match string.letter(q) {
            Pauli::X => c.push(Gate::h(q))?,
            Pauli::Y => {
                c.push(Gate::sdg(q))?;
                c.push(Gate::h(q))?;
            }
            _ => {}
        }
    }
    for w in support.windows(2) {
        c.push(Gate::cx(w[0], w[1]))?;
    }
    // RZ(phi) = exp(-i phi Z / 2)
    c.push(Gate::rz(last, 0.0).with_param(index, -2.0 * scale))?;
    for w in support.windows(2).rev() {
        c.push(Gate::cx(w[0], w[1]))?;
    }
    for &q in &support {
        match string.letter(q) {
            Pauli::X => c.push(Gate::h(q))?,
            Pauli::Y => {
                c.push(Gate::h(q))?;
                c.push(Gate::s(q))?;
            }
            _ => {}
        }
    }
    Ok(())
}

/// `(string, c)` pairs with `T - T^+ = sum_k i c_k P_k`.
pub fn excitation_generator(ex: &Excitation, n: usize) -> Result<Vec<(PauliString, f64)>> {
    let t = ex.operator();
    let gen = jordan_wigner(&t, n)? + jordan_wigner(&t.adjoint(), n)?.scale(Complex64::new(-1.0, 0.0));
    let gen = gen.simplify(1e-14);
    let mut out = Vec::with_capacity(gen.len());
    for (s, c) in gen.iter() {
        debug_assert!(c.re.abs() < 1e-12, "anti-Hermitian generator has real part");
        out.push((*s, c.im));
    }
    Ok(out)
}

/// Hartree-Fock preparation followed by one Trotter step of
/// `exp(sum_k theta_k (T_k - T_k^+))` over `uccsd_excitations`.
pub fn build_uccsd_circuit(r: usize, n_electrons: usize, params: &[f64]) -> Result<Circuit> {
    let excitations = uccsd_excitations(r, n_electrons);
    if params.len() != excitations.len() {
        return Err(Error::DimensionMismatch {
            expected: excitations.len(),
            found: params.len(),
            context: "UCCSD parameters",
        });
    }
    let mut c = hartree_fock_circuit(r, n_electrons)?;
    for (k, ex) in excitations.iter().enumerate() {
        for (string, coeff) in excitation_generator(ex, r)? {
            push_pauli_exponential(&mut c, &string, k, coeff)?;
        }
    }
    c.bind(params)?;
    Ok(c)
}

pub fn build_uccsd(sys: &MolecularSystem, params: &[f64]) -> Result<Circuit> {
    build_uccsd_circuit(sys.r, sys.n_electrons, params)
}

pub fn hea_param_count(n: usize, layers: usize) -> usize {
    2 * n * (layers + 1)
}

/// `layers + 1` walls of RY/RZ on every qubit with a linear CX ladder
/// (`i -> i+1`) between consecutive walls.
pub fn build_hea(n: usize, layers: usize, params: &[f64]) -> Result<Circuit> {
    let expected = hea_param_count(n, layers);
    if params.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: params.len(),
            context: "HEA parameters",
        });
    }
    let mut c = Circuit::new(n)?;
    for w in 0..=layers {
        if w > 0 {
            for q in 0..n.saturating_sub(1) {
                c.push(Gate::cx(q, q + 1))?;
            }
        }
        let base = 2 * n * w;
        c.push_layer((0..n).map(|q| Gate::ry(q, 0.0).with_param(base + 2 * q, 1.0)).collect())?;
        c.push_layer((0..n).map(|q| Gate::rz(q, 0.0).with_param(base + 2 * q + 1, 1.0)).collect())?;
    }
    c.bind(params)?;
    Ok(c)
}

/// Seeded uniform(-0.1, 0.1) starting point for HEA.
pub fn hea_initial_params(n: usize, layers: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..hea_param_count(n, layers)).map(|_| rng.random_range(-0.1..0.1)).collect()
}
