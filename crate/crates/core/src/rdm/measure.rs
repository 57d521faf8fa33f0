use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{Rdm1, Rdm2};
use crate::fermion::{jordan_wigner, string_expectation, FermionTerm, PauliString};
use crate::qsim::QuantumState;
use crate::{Error, Result};

type Expansion = Vec<(usize, Complex64)>;

/// Pauli decomposition of every RDM element over a shared list of strings.
///
/// Each distinct string is "measured" once; elements are recombined from the
/// string expectations, so shot noise is correlated across elements exactly
/// as in term-by-term estimation.
#[derive(Clone, Debug)]
pub struct RdmPlan {
    r: usize,
    strings: Vec<PauliString>,
    d1: Vec<((usize, usize), Expansion)>,
    d2: Vec<((usize, usize), Expansion)>,
}

impl RdmPlan {
    pub fn new(r: usize) -> Result<Self> {
        let mut index: BTreeMap<PauliString, usize> = BTreeMap::new();
        let mut raw1 = Vec::new();
        let mut raw2 = Vec::new();
        for i in 0..r {
            for j in 0..r {
                raw1.push(((i, j), jordan_wigner(&FermionTerm::one_body(i, j), r)?));
            }
        }
        for p in 0..r {
            for q in 0..r {
                if p == q {
                    continue;
                }
                for a in 0..r {
                    for b in 0..r {
                        if a == b {
                            continue;
                        }
                        let sum = jordan_wigner(&FermionTerm::two_body(p, q, a, b), r)?;
                        raw2.push(((p * r + q, a * r + b), sum));
                    }
                }
            }
        }
        for (_, sum) in raw1.iter().chain(&raw2) {
            for (s, _) in sum.iter() {
                index.entry(*s).or_insert(0);
            }
        }
        let strings: Vec<PauliString> = index.keys().copied().collect();
        for (k, s) in strings.iter().enumerate() {
            index.insert(*s, k);
        }
        let expand = |raw: Vec<((usize, usize), crate::fermion::PauliSum)>| {
            raw.into_iter()
                .map(|(at, sum)| (at, sum.iter().map(|(s, c)| (index[s], *c)).collect()))
                .collect()
        };
        Ok(RdmPlan {
            r,
            strings,
            d1: expand(raw1),
            d2: expand(raw2),
        })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn strings(&self) -> &[PauliString] {
        &self.strings
    }

    /// Exact string expectations, optionally with Gaussian shot noise of
    /// standard deviation `1/sqrt(shots)` on every non-identity string.
    pub fn string_values(&self, state: &QuantumState, shots: Option<u64>, seed: u64) -> Result<Vec<f64>> {
        if state.num_qubits() != self.r {
            return Err(Error::DimensionMismatch {
                expected: self.r,
                found: state.num_qubits(),
                context: "state qubits vs spin-orbitals",
            });
        }
        let mut values: Vec<f64> = self.strings.iter().map(|s| string_expectation(state, s).re).collect();
        if let Some(shots) = shots {
            if shots == 0 {
                return Err(Error::InvalidArgument("shots must be positive".into()));
            }
            let normal = Normal::new(0.0, 1.0 / (shots as f64).sqrt()).expect("finite std");
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for (v, s) in values.iter_mut().zip(&self.strings) {
                if !s.is_identity() {
                    *v += normal.sample(&mut rng);
                }
            }
        }
        Ok(values)
    }

    pub fn assemble(&self, values: &[f64]) -> (Rdm1, Rdm2) {
        let r = self.r;
        let combine = |e: &Expansion| e.iter().map(|(k, c)| c * values[*k]).sum::<Complex64>();
        let mut d1 = DMatrix::zeros(r, r);
        for ((i, j), e) in &self.d1 {
            d1[(*i, *j)] = combine(e);
        }
        let mut d2 = DMatrix::zeros(r * r, r * r);
        for ((a, b), e) in &self.d2 {
            d2[(*a, *b)] = combine(e);
        }
        (Rdm1::from_matrix(d1).expect("square"), Rdm2::from_matrix(r, d2).expect("sized"))
    }

    pub fn measure(&self, state: &QuantumState, shots: Option<u64>, seed: u64) -> Result<(Rdm1, Rdm2)> {
        Ok(self.assemble(&self.string_values(state, shots, seed)?))
    }
}

/// Measures both RDMs of `state`. Without `shots` the result is exact.
pub fn measure_rdms(state: &QuantumState, r: usize, shots: Option<u64>, seed: Option<u64>) -> Result<(Rdm1, Rdm2)> {
    if state.num_qubits() != r {
        return Err(Error::DimensionMismatch {
            expected: r,
            found: state.num_qubits(),
            context: "state qubits vs spin-orbitals",
        });
    }
    RdmPlan::new(r)?.measure(state, shots, seed.unwrap_or(0))
}
