//! Noise-aware purification of two-electron reduced density matrices.
//!
//! The crate covers the whole desk-scale pipeline: molecular integrals in,
//! a Jordan–Wigner qubit Hamiltonian, gate-level simulation of (noisy) VQE,
//! RDM extraction, nearest-Clifford calibration of a trust radius, and a
//! trust-region constrained semidefinite program that restores the DQG
//! N-representability conditions. UED intensities are evaluated from the
//! resulting RDMs.
//!
//! Conventions shared by every module:
//!
//! * qubit `i` is spin-orbital `i`; spin-orbitals are interleaved
//!   (`2k` is alpha, `2k+1` is beta of spatial orbital `k`);
//! * qubit 0 is the least-significant bit of a basis-state index;
//! * `D[(p,q),(r,s)] = <a_p^+ a_q^+ a_s a_r>` with composite
//!   row index `p*n + q` for `n` spin-orbitals.

pub mod calibrate;
pub mod error;
pub mod fermion;
pub mod hamiltonian;
pub mod oracle;
pub mod qsim;
pub mod rdm;
pub mod sdp;
pub mod ued;
pub mod vqe;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Largest qubit count accepted anywhere in the crate.
pub const MAX_QUBITS: usize = 10;
/// Largest qubit count for density-matrix simulation and dense oracles.
pub const MAX_DENSE_QUBITS: usize = 8;
