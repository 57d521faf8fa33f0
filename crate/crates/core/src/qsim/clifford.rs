use num_complex::Complex64;
use serde::Serialize;

use super::circuit::Circuit;
use super::gate::{single_qubit_matrix, Gate, GateKind, Mat2};
use crate::{Error, Result};

/// Candidate order doubles as the tie-break order.
pub const CLIFFORD_CANDIDATES: [GateKind; 6] =
    [GateKind::H, GateKind::X, GateKind::Y, GateKind::Z, GateKind::S, GateKind::Sdg];

const TIE_TOL: f64 = 1e-12;

/// `|Tr(U^+ V)|^2 / 4`
pub fn process_fidelity(u: &Mat2, v: &Mat2) -> f64 {
    let mut tr = Complex64::new(0.0, 0.0);
    for i in 0..2 {
        for k in 0..2 {
            tr += u[k][i].conj() * v[k][i];
        }
    }
    tr.norm_sqr() / 4.0
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Substitution {
    /// Position in the circuit's gate list.
    pub index: usize,
    pub qubit: usize,
    pub original: String,
    pub replacement: String,
    pub fidelity: f64,
}

/// Best candidate and its fidelity for a single-qubit gate.
pub fn nearest_clifford_kind(g: &Gate) -> Result<(GateKind, f64)> {
    if g.arity() != 1 {
        return Err(Error::Gate(format!("nearest Clifford is defined for single-qubit gates, got {}", g.kind)));
    }
    let u = g.matrix1()?;
    let mut best = (CLIFFORD_CANDIDATES[0], f64::NEG_INFINITY);
    for kind in CLIFFORD_CANDIDATES {
        let f = process_fidelity(&u, &single_qubit_matrix(kind, 0.0)?);
        if f > best.1 + TIE_TOL {
            best = (kind, f);
        }
    }
    Ok(best)
}

pub fn nearest_clifford(g: &Gate) -> Result<Gate> {
    let (kind, _) = nearest_clifford_kind(g)?;
    Ok(Gate::single(kind, g.qubits[0]))
}

pub fn cliffordize(c: &Circuit) -> Result<Circuit> {
    cliffordize_with_report(c).map(|(c, _)| c)
}

/// Replaces every single-qubit non-Clifford gate in place; layer structure and
/// two-qubit gates are untouched.
pub fn cliffordize_with_report(c: &Circuit) -> Result<(Circuit, Vec<Substitution>)> {
    if let Some(g) = c.gates().iter().find(|g| g.arity() == 2 && !g.kind.is_clifford()) {
        return Err(Error::Gate(format!(
            "{} on qubits {:?} is not Clifford; compile it into CX and RZ gates before cliffordizing",
            g.kind, g.qubits
        )));
    }
    let mut out = c.clone();
    let mut subs = Vec::new();
    for (index, g) in out.gates_mut().iter_mut().enumerate() {
        if g.kind.is_clifford() {
            continue;
        }
        let (kind, fidelity) = nearest_clifford_kind(g)?;
        subs.push(Substitution {
            index,
            qubit: g.qubits[0],
            original: g.to_string(),
            replacement: kind.name().to_string(),
            fidelity,
        });
        *g = Gate::single(kind, g.qubits[0]);
    }
    Ok((out, subs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::ansatz::build_uccsd_circuit;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn fixed_examples() {
        assert_eq!(nearest_clifford(&Gate::s(0)).unwrap().kind, GateKind::S);
        assert_eq!(nearest_clifford(&Gate::rz(0, FRAC_PI_2)).unwrap().kind, GateKind::S);
        assert_eq!(nearest_clifford(&Gate::rz(0, -FRAC_PI_2)).unwrap().kind, GateKind::Sdg);
        assert_eq!(nearest_clifford(&Gate::rx(0, PI)).unwrap().kind, GateKind::X);
        assert_eq!(nearest_clifford(&Gate::ry(0, PI)).unwrap().kind, GateKind::Y);
        assert_eq!(nearest_clifford(&Gate::rz(0, PI)).unwrap().kind, GateKind::Z);
        assert!(nearest_clifford(&Gate::cx(0, 1)).is_err());
    }

    #[test]
    fn every_candidate_maps_to_itself() {
        for k in CLIFFORD_CANDIDATES {
            let (got, f) = nearest_clifford_kind(&Gate::single(k, 0)).unwrap();
            assert_eq!(got, k);
            assert!((f - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn rz_fidelities_by_enumeration() {
        // RZ(t) = diag(e^{-it/2}, e^{it/2}); F with S is (1 + sin t)/2 and with Z is sin^2(t/2).
        for t in [0.1, 0.7, 1.3, 2.9] {
            let u = Gate::rz(0, t).matrix1().unwrap();
            let s = single_qubit_matrix(GateKind::S, 0.0).unwrap();
            let z = single_qubit_matrix(GateKind::Z, 0.0).unwrap();
            assert!((process_fidelity(&u, &s) - (1.0 + f64::sin(t)) / 2.0).abs() < 1e-14);
            assert!((process_fidelity(&u, &z) - (t / 2.0).sin().powi(2)).abs() < 1e-14);
        }
        // Near-identity rotations land on S: the identity is not a candidate.
        assert_eq!(nearest_clifford(&Gate::rz(0, 1e-3)).unwrap().kind, GateKind::S);
        // Exact tie between S and Sdg at zero goes to the earlier candidate.
        assert_eq!(nearest_clifford(&Gate::rz(0, 0.0)).unwrap().kind, GateKind::S);
    }

    #[test]
    fn clifford_circuit_unchanged() {
        let mut c = Circuit::new(2).unwrap();
        c.extend([Gate::h(0), Gate::cx(0, 1), Gate::sdg(1), Gate::cz(0, 1)]).unwrap();
        let (out, subs) = cliffordize_with_report(&c).unwrap();
        assert_eq!(out, c);
        assert!(subs.is_empty());
    }

    #[test]
    fn rejects_rzz() {
        let mut c = Circuit::new(2).unwrap();
        c.push(Gate::rzz(0, 1, 0.2)).unwrap();
        assert!(cliffordize(&c).is_err());
    }

    #[test]
    fn uccsd_structure_is_preserved() {
        let c = build_uccsd_circuit(4, 2, &[0.3; 3]).unwrap();
        let (cc, subs) = cliffordize_with_report(&c).unwrap();
        assert_eq!(cc.layers(), c.layers());
        assert_eq!(cc.gates().len(), c.gates().len());
        for (a, b) in c.gates().iter().zip(cc.gates()) {
            assert_eq!(a.qubits, b.qubits);
            if a.arity() == 2 {
                assert_eq!(a, b);
            }
            assert!(b.kind.is_clifford());
        }
        let rz = c.gates().iter().filter(|g| g.kind == GateKind::RZ).count();
        assert_eq!(subs.len(), rz);
    }

    fn arb_gate(n: usize) -> impl Strategy<Value = Gate> {
        (0..10usize, 0..n, 1..n, -4.0..4.0f64).prop_map(move |(k, q, d, t)| {
            let r = (q + d) % n;
            match k {
                0 => Gate::h(q),
                1 => Gate::s(q),
                2 => Gate::single(GateKind::Y, q),
                3 => Gate::rx(q, t),
                4 => Gate::ry(q, t),
                5 | 6 => Gate::rz(q, t),
                7 => Gate::cz(q, r),
                _ => Gate::cx(q, r),
            }
        })
    }

    proptest! {
        #[test]
        fn cliffordize_is_idempotent(gates in proptest::collection::vec(arb_gate(3), 1..30)) {
            let mut c = Circuit::new(3).unwrap();
            c.extend(gates).unwrap();
            let once = cliffordize(&c).unwrap();
            let twice = cliffordize(&once).unwrap();
            prop_assert_eq!(&once, &twice);
            prop_assert_eq!(once.layers(), c.layers());
        }
    }
}
