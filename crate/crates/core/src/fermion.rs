//! Fermionic operators and the Jordan–Wigner map onto Pauli strings.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::qsim::QuantumState;
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// One ladder operator: `a_orbital^+` when `dagger`, else `a_orbital`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ladder {
    pub orbital: usize,
    pub dagger: bool,
}

impl Ladder {
    pub fn create(orbital: usize) -> Self {
        Ladder {
            orbital,
            dagger: true,
        }
    }

    pub fn annihilate(orbital: usize) -> Self {
        Ladder {
            orbital,
            dagger: false,
        }
    }
}

/// A product of ladder operators with a scalar prefactor.
///
/// Factors are applied right to left, as written: `[a_0^+, a_1]` is `a_0^+ a_1`.
/// An empty factor list is a scalar multiple of the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct FermionTerm {
    pub coefficient: Complex64,
    pub factors: Vec<Ladder>,
}

impl FermionTerm {
    pub fn new(coefficient: impl Into<Complex64>, factors: Vec<Ladder>) -> Self {
        FermionTerm {
            coefficient: coefficient.into(),
            factors,
        }
    }

    pub fn scalar(coefficient: impl Into<Complex64>) -> Self {
        FermionTerm::new(coefficient, Vec::new())
    }

    /// `a_p^+ a_q`
    pub fn one_body(p: usize, q: usize) -> Self {
        FermionTerm::new(ONE, vec![Ladder::create(p), Ladder::annihilate(q)])
    }

    /// `a_p^+ a_q^+ a_s a_r`, the operator whose expectation is `D[(p,q),(r,s)]`.
    pub fn two_body(p: usize, q: usize, r: usize, s: usize) -> Self {
        FermionTerm::new(
            ONE,
            vec![
                Ladder::create(p),
                Ladder::create(q),
                Ladder::annihilate(s),
                Ladder::annihilate(r),
            ],
        )
    }

    pub fn scaled(mut self, factor: impl Into<Complex64>) -> Self {
        self.coefficient *= factor.into();
        self
    }

    /// Hermitian conjugate: reversed order, flipped daggers, conjugated coefficient.
    pub fn adjoint(&self) -> Self {
        FermionTerm {
            coefficient: self.coefficient.conj(),
            factors: self
                .factors
                .iter()
                .rev()
                .map(|f| Ladder {
                    orbital: f.orbital,
                    dagger: !f.dagger,
                })
                .collect(),
        }
    }
}

/// Single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        };
        write!(f, "{c}")
    }
}

/// A tensor product of Pauli letters, stored as symplectic bit masks.
///
/// The operator is `prod_k P_k` with `X` where only the x-bit is set, `Z` where
/// only the z-bit is set and `Y` where both are set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    pub x: u64,
    pub z: u64,
}

impl PauliString {
    pub const IDENTITY: PauliString = PauliString { x: 0, z: 0 };

    pub fn single(qubit: usize, letter: Pauli) -> Self {
        let bit = 1u64 << qubit;
        match letter {
            Pauli::I => PauliString::IDENTITY,
            Pauli::X => PauliString { x: bit, z: 0 },
            Pauli::Y => PauliString { x: bit, z: bit },
            Pauli::Z => PauliString { x: 0, z: bit },
        }
    }

    pub fn from_letters(letters: &[Pauli]) -> Self {
        letters
            .iter()
            .enumerate()
            .fold(PauliString::IDENTITY, |acc, (q, &l)| {
                let s = PauliString::single(q, l);
                PauliString {
                    x: acc.x | s.x,
                    z: acc.z | s.z,
                }
            })
    }

    pub fn letter(&self, qubit: usize) -> Pauli {
        let bit = 1u64 << qubit;
        match (self.x & bit != 0, self.z & bit != 0) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn letters(&self, n: usize) -> Vec<Pauli> {
        (0..n).map(|q| self.letter(q)).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Number of Y letters.
    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Highest qubit touched, if any.
    pub fn support_max(&self) -> Option<usize> {
        let m = self.x | self.z;
        (m != 0).then(|| 63 - m.leading_zeros() as usize)
    }

    /// `self * other = phase * result`.
    pub fn multiply(&self, other: &PauliString) -> (Complex64, PauliString) {
        // P = i^{|x&z|} X^x Z^z, and Z^a X^b = (-1)^{|a&b|} X^b Z^a.
        let out = PauliString {
            x: self.x ^ other.x,
            z: self.z ^ other.z,
        };
        let exponent = self.y_count() as i64 + other.y_count() as i64
            + 2 * (self.z & other.x).count_ones() as i64
            - out.y_count() as i64;
        (i_power(exponent), out)
    }

    /// `P|j> = phase(j) |j ^ x>`.
    #[inline]
    pub fn phase_on(&self, basis: usize) -> Complex64 {
        let base = i_power(self.y_count() as i64);
        if ((basis as u64) & self.z).count_ones() % 2 == 1 {
            -base
        } else {
            base
        }
    }

    pub fn to_dense(&self, n: usize) -> DMatrix<Complex64> {
        let dim = 1usize << n;
        let mut m = DMatrix::from_element(dim, dim, ZERO);
        for j in 0..dim {
            m[(j ^ self.x as usize, j)] = self.phase_on(j);
        }
        m
    }

    pub fn display(&self, n: usize) -> String {
        self.letters(n).iter().map(|l| l.to_string()).collect()
    }
}

fn i_power(e: i64) -> Complex64 {
    match e.rem_euclid(4) {
        0 => ONE,
        1 => I,
        2 => -ONE,
        _ => -I,
    }
}

/// A coefficient times a Pauli string, for callers that prefer explicit letters.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliTerm {
    pub coefficient: Complex64,
    pub letters: Vec<Pauli>,
}

/// A linear combination of Pauli strings on `n` qubits, one entry per string.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n: usize,
    terms: BTreeMap<PauliString, Complex64>,
}

impl PauliSum {
    pub fn zero(n: usize) -> Self {
        PauliSum {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize, coefficient: impl Into<Complex64>) -> Self {
        let mut s = PauliSum::zero(n);
        s.add_term(PauliString::IDENTITY, coefficient.into());
        s
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = PauliTerm>) -> Result<Self> {
        let mut s = PauliSum::zero(n);
        for t in terms {
            if t.letters.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: t.letters.len(),
                    context: "Pauli term length",
                });
            }
            s.add_term(PauliString::from_letters(&t.letters), t.coefficient);
        }
        Ok(s)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, string: PauliString, coefficient: Complex64) {
        *self.terms.entry(string).or_insert(ZERO) += coefficient;
    }

    pub fn coefficient(&self, string: &PauliString) -> Complex64 {
        self.terms.get(string).copied().unwrap_or(ZERO)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, &Complex64)> {
        self.terms.iter()
    }

    pub fn terms(&self) -> Vec<PauliTerm> {
        self.terms
            .iter()
            .map(|(s, c)| PauliTerm {
                coefficient: *c,
                letters: s.letters(self.n),
            })
            .collect()
    }

    /// Drops terms with `|c| <= tol`.
    pub fn simplify(mut self, tol: f64) -> Self {
        self.terms.retain(|_, c| c.norm() > tol);
        self
    }

    pub fn scale(mut self, factor: Complex64) -> Self {
        for c in self.terms.values_mut() {
            *c *= factor;
        }
        self
    }

    pub fn adjoint(&self) -> Self {
        // Pauli strings are Hermitian.
        PauliSum {
            n: self.n,
            terms: self.terms.iter().map(|(s, c)| (*s, c.conj())).collect(),
        }
    }

    /// Largest imaginary part among the coefficients.
    pub fn max_imag(&self) -> f64 {
        self.terms.values().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n;
        let mut m = DMatrix::from_element(dim, dim, ZERO);
        for (s, c) in &self.terms {
            for j in 0..dim {
                m[(j ^ s.x as usize, j)] += c * s.phase_on(j);
            }
        }
        m
    }
}

impl Add for PauliSum {
    type Output = PauliSum;

    fn add(mut self, rhs: PauliSum) -> PauliSum {
        assert_eq!(self.n, rhs.n, "adding Pauli sums on different registers");
        for (s, c) in rhs.terms {
            self.add_term(s, c);
        }
        self
    }
}

impl Mul for &PauliSum {
    type Output = PauliSum;

    fn mul(self, rhs: &PauliSum) -> PauliSum {
        assert_eq!(self.n, rhs.n, "multiplying Pauli sums on different registers");
        let mut out = PauliSum::zero(self.n);
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                let (phase, s) = a.multiply(b);
                out.add_term(s, phase * ca * cb);
            }
        }
        out
    }
}

fn ladder_to_pauli(f: Ladder, n: usize) -> PauliSum {
    // a^+ = (X - iY)/2, a = (X + iY)/2, each with a Z string on lower qubits.
    let zs = (1u64 << f.orbital) - 1;
    let x = PauliString {
        x: 1 << f.orbital,
        z: zs,
    };
    let y = PauliString {
        x: 1 << f.orbital,
        z: zs | (1 << f.orbital),
    };
    let ycoef = if f.dagger {
        Complex64::new(0.0, -0.5)
    } else {
        Complex64::new(0.0, 0.5)
    };
    let mut s = PauliSum::zero(n);
    s.add_term(x, Complex64::new(0.5, 0.0));
    s.add_term(y, ycoef);
    s
}

/// Maps a fermionic product onto qubits (qubit `i` = spin-orbital `i`).
pub fn jordan_wigner(term: &FermionTerm, n: usize) -> Result<PauliSum> {
    if n > 64 {
        return Err(Error::TooManyQubits { n, limit: 64 });
    }
    let mut acc = PauliSum::identity(n, term.coefficient);
    for f in &term.factors {
        if f.orbital >= n {
            return Err(Error::IndexOutOfRange {
                index: f.orbital,
                bound: n,
                what: "qubits",
            });
        }
        acc = &acc * &ladder_to_pauli(*f, n);
    }
    Ok(acc.simplify(0.0))
}

/// Maps a sum of fermionic products.
pub fn jordan_wigner_sum(terms: &[FermionTerm], n: usize) -> Result<PauliSum> {
    terms.iter().try_fold(PauliSum::zero(n), |acc, t| {
        Ok(acc + jordan_wigner(t, n)?)
    })
}

/// Expectation of a single Pauli string.
pub fn string_expectation(state: &QuantumState, s: &PauliString) -> Complex64 {
    let mask = s.x as usize;
    match state {
        QuantumState::Pure { amplitudes, .. } => amplitudes
            .iter()
            .enumerate()
            .map(|(j, a)| amplitudes[j ^ mask].conj() * s.phase_on(j) * a)
            .sum(),
        QuantumState::Mixed { n, rho } => {
            let dim = 1usize << n;
            // Tr(rho P) = sum_j <j|rho P|j> = sum_j rho[j, j^x] phase(j)
            (0..dim)
                .map(|j| rho[j * dim + (j ^ mask)] * s.phase_on(j))
                .sum()
        }
    }
}

/// `<psi|P|psi>` or `Tr(rho P)`.
pub fn pauli_expectation(state: &QuantumState, op: &PauliSum) -> Result<Complex64> {
    if state.num_qubits() != op.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: op.num_qubits(),
            found: state.num_qubits(),
            context: "state vs operator qubits",
        });
    }
    Ok(op
        .iter()
        .map(|(s, c)| c * string_expectation(state, s))
        .sum())
}
