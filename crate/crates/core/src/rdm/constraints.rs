use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::{Rdm1, Rdm2};
use crate::{Error, Result};

fn check(d2: &Rdm2, d1: &Rdm1) -> Result<usize> {
    if d1.r() != d2.r() {
        return Err(Error::DimensionMismatch {
            expected: d2.r(),
            found: d1.r(),
            context: "1-RDM vs 2-RDM size",
        });
    }
    Ok(d2.r())
}

fn delta(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

/// Two-hole matrix `Q[(p,q),(r,s)] = <a_p a_q a_s^+ a_r^+>`, a Gram matrix and
/// hence positive semidefinite for any state.
pub fn build_q(d2: &Rdm2, d1: &Rdm1, r: usize, _n: usize) -> Result<DMatrix<Complex64>> {
    if check(d2, d1)? != r {
        return Err(Error::DimensionMismatch {
            expected: r,
            found: d2.r(),
            context: "RDM size vs r",
        });
    }
    let g1 = |i, j| d1.get(i, j);
    Ok(DMatrix::from_fn(r * r, r * r, |row, col| {
        let (p, q) = (row / r, row % r);
        let (a, b) = (col / r, col % r);
        Complex64::new(delta(p, a) * delta(q, b) - delta(p, b) * delta(q, a), 0.0)
            - g1(a, p) * delta(q, b)
            + g1(b, p) * delta(q, a)
            + g1(a, q) * delta(p, b)
            - g1(b, q) * delta(p, a)
            + d2.get(a, b, p, q)
    }))
}

/// Particle-hole matrix `G[(p,q),(r,s)] = <a_p^+ a_q a_s^+ a_r>`.
pub fn build_g(d2: &Rdm2, d1: &Rdm1, r: usize) -> Result<DMatrix<Complex64>> {
    if check(d2, d1)? != r {
        return Err(Error::DimensionMismatch {
            expected: r,
            found: d2.r(),
            context: "RDM size vs r",
        });
    }
    Ok(DMatrix::from_fn(r * r, r * r, |row, col| {
        let (p, q) = (row / r, row % r);
        let (a, b) = (col / r, col % r);
        d1.get(p, a) * delta(q, b) - d2.get(p, b, a, q)
    }))
}

/// `D1[i][j] = sum_k D2[(i,k),(j,k)] / (N-1)`
pub fn contract_to_rdm1(d2: &Rdm2, n: usize) -> Result<Rdm1> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("contraction needs N >= 2, got {n}")));
    }
    let r = d2.r();
    let f = 1.0 / (n as f64 - 1.0);
    let m = DMatrix::from_fn(r, r, |i, j| (0..r).map(|k| d2.get(i, k, j, k)).sum::<Complex64>() * f);
    Rdm1::from_matrix(m)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstraintReport {
    pub hermiticity: f64,
    pub antisymmetry: f64,
    /// `|Tr D1 - N|`
    pub trace_d1: f64,
    /// `|Tr D2 - N(N-1)|`
    pub trace_d2: f64,
    pub contraction: f64,
    pub min_eig_d: f64,
    pub min_eig_q: f64,
    pub min_eig_g: f64,
    pub tol: f64,
    pub pass: bool,
}

impl ConstraintReport {
    /// Every residual, with eigenvalues folded in as `max(0, -lambda_min)`.
    pub fn residuals(&self) -> [(&'static str, f64); 8] {
        [
            ("hermiticity", self.hermiticity),
            ("antisymmetry", self.antisymmetry),
            ("trace_d1", self.trace_d1),
            ("trace_d2", self.trace_d2),
            ("contraction", self.contraction),
            ("psd_d", (-self.min_eig_d).max(0.0)),
            ("psd_q", (-self.min_eig_q).max(0.0)),
            ("psd_g", (-self.min_eig_g).max(0.0)),
        ]
    }

    pub fn worst(&self) -> f64 {
        self.residuals().iter().map(|r| r.1).fold(0.0, f64::max)
    }
}

pub(crate) fn min_hermitian_eigenvalue(m: &DMatrix<Complex64>) -> f64 {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Evaluates Hermiticity, antisymmetry, both traces, the contraction identity
/// and positivity of D, Q and G. Q and G are built from `d1` as given.
pub fn check_nrep(d1: &Rdm1, d2: &Rdm2, n: usize, tol: f64) -> Result<ConstraintReport> {
    let r = check(d2, d1)?;
    let dm = d2.matrix();
    let hermiticity = (dm - dm.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        .max((d1.matrix() - d1.matrix().adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max));
    let mut antisymmetry: f64 = 0.0;
    for p in 0..r {
        for q in 0..r {
            for a in 0..r {
                for b in 0..r {
                    let x = d2.get(p, q, a, b);
                    antisymmetry = antisymmetry.max((x + d2.get(q, p, a, b)).norm());
                    antisymmetry = antisymmetry.max((x + d2.get(p, q, b, a)).norm());
                }
            }
        }
    }
    let nf = n as f64;
    let trace_d1 = (d1.trace() - Complex64::new(nf, 0.0)).norm();
    let trace_d2 = (d2.trace() - Complex64::new(nf * (nf - 1.0), 0.0)).norm();
    let contraction = if n >= 2 {
        (contract_to_rdm1(d2, n)?.matrix() - d1.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    } else {
        0.0
    };
    let min_eig_d = min_hermitian_eigenvalue(dm);
    let min_eig_q = min_hermitian_eigenvalue(&build_q(d2, d1, r, n)?);
    let min_eig_g = min_hermitian_eigenvalue(&build_g(d2, d1, r)?);
    let mut report = ConstraintReport {
        hermiticity,
        antisymmetry,
        trace_d1,
        trace_d2,
        contraction,
        min_eig_d,
        min_eig_q,
        min_eig_g,
        tol,
        pass: false,
    };
    report.pass = report.worst() <= tol;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion::{jordan_wigner, FermionTerm, Ladder};
    use crate::qsim::QuantumState;
    use crate::rdm::measure_rdms;
    use nalgebra::DVector;
    use proptest::prelude::*;

    fn ladder(r: usize, p: usize, dagger: bool) -> DMatrix<Complex64> {
        let f = if dagger { Ladder::create(p) } else { Ladder::annihilate(p) };
        jordan_wigner(&FermionTerm::new(1.0, vec![f]), r).unwrap().to_dense()
    }

    fn amplitudes(r: usize, seed: u64) -> Vec<Complex64> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..1 << r)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect()
    }

    /// Element-wise Q and G from products of dense ladder matrices.
    fn dense_q_g(r: usize, psi: &DVector<Complex64>) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
        let a: Vec<_> = (0..r).map(|p| ladder(r, p, false)).collect();
        let ad: Vec<_> = (0..r).map(|p| ladder(r, p, true)).collect();
        let ev = |m: DMatrix<Complex64>| (psi.adjoint() * m * psi)[(0, 0)];
        let mut q = DMatrix::zeros(r * r, r * r);
        let mut g = DMatrix::zeros(r * r, r * r);
        for p in 0..r {
            for qq in 0..r {
                for x in 0..r {
                    for y in 0..r {
                        q[(p * r + qq, x * r + y)] = ev(&a[p] * &a[qq] * &ad[y] * &ad[x]);
                        g[(p * r + qq, x * r + y)] = ev(&ad[p] * &a[qq] * &ad[y] * &a[x]);
                    }
                }
            }
        }
        (q, g)
    }

    #[test]
    fn vacuum_values() {
        let r = 4;
        let (d1, d2) = measure_rdms(&QuantumState::zero(r), r, None, None).unwrap();
        let q = build_q(&d2, &d1, r, 0).unwrap();
        let g = build_g(&d2, &d1, r).unwrap();
        for p in 0..r {
            for x in 0..r {
                let want = if p == x { 0.0 } else { 1.0 };
                assert!((q[(p * r + x, p * r + x)].re - want).abs() < 1e-15);
            }
        }
        assert_eq!(g.camax(), 0.0f64);
    }

    #[test]
    fn q_and_g_match_dense_operators() {
        for (r, seed) in [(4, 1), (4, 2), (5, 3)] {
            let amps = amplitudes(r, seed);
            let psi = QuantumState::from_amplitudes(amps).unwrap();
            let v = DVector::from_column_slice(psi.amplitudes().unwrap());
            let (d1, d2) = measure_rdms(&psi, r, None, None).unwrap();
            let (q, g) = dense_q_g(r, &v);
            assert!((build_q(&d2, &d1, r, 2).unwrap() - q).camax() < 1e-12);
            assert!((build_g(&d2, &d1, r).unwrap() - g).camax() < 1e-12);
        }
    }

    #[test]
    fn contraction_basics() {
        assert!(contract_to_rdm1(&Rdm2::zeros(4), 1).is_err());
        assert_eq!(contract_to_rdm1(&Rdm2::zeros(4), 2).unwrap(), Rdm1::zeros(4));
        let psi = QuantumState::basis(4, 0b0101);
        let (d1, d2) = measure_rdms(&psi, 4, None, None).unwrap();
        let c = contract_to_rdm1(&d2, 2).unwrap();
        assert!((c.matrix() - d1.matrix()).camax() < 1e-14);
        let c2 = contract_to_rdm1(&d2.scale(3.0), 2).unwrap();
        assert!((c2.matrix() - d1.matrix() * Complex64::new(3.0, 0.0)).camax() < 1e-14);
    }

    #[test]
    fn trace_violation_is_reported() {
        let psi = QuantumState::basis(4, 0b0011);
        let (d1, mut d2) = measure_rdms(&psi, 4, None, None).unwrap();
        assert!(check_nrep(&d1, &d2, 2, 1e-10).unwrap().pass);
        // Bump one antisymmetric diagonal pair by 0.05 each: total trace +0.1.
        let bump = Complex64::new(0.05, 0.0);
        let x = d2.get(2, 3, 2, 3) + bump;
        d2.set(2, 3, 2, 3, x);
        d2.set(3, 2, 3, 2, x);
        let rep = check_nrep(&d1, &d2, 2, 1e-8).unwrap();
        assert!(!rep.pass);
        assert!((rep.trace_d2 - 0.1).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn fixed_particle_number_states_are_representable(seed in 0u64..10_000, r in 4usize..=6) {
            // Random state restricted to N = 2 spans every pair occupation.
            let mut amps = amplitudes(r, seed);
            for (i, a) in amps.iter_mut().enumerate() {
                if i.count_ones() != 2 {
                    *a = Complex64::new(0.0, 0.0);
                }
            }
            let psi = QuantumState::from_amplitudes(amps).unwrap();
            let (d1, d2) = measure_rdms(&psi, r, None, None).unwrap();
            let rep = check_nrep(&d1, &d2, 2, 1e-10).unwrap();
            prop_assert!(rep.pass, "{:?}", rep);
        }
    }
}
