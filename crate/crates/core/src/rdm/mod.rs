//! One- and two-electron reduced density matrices.
//!
//! `Rdm1[i][j] = <a_i^+ a_j>`, `Rdm2[(p,q),(r,s)] = <a_p^+ a_q^+ a_s a_r>`,
//! composite row index `p * n + q` for `n` spin-orbitals.

mod constraints;
mod io;
mod measure;

pub use constraints::{build_g, build_q, check_nrep, contract_to_rdm1, ConstraintReport};
#[cfg(test)]
pub(crate) use constraints::min_hermitian_eigenvalue;
pub use io::{load_rdm1, load_rdm2, parse_rdm1, parse_rdm2, rdm1_to_text, rdm2_to_text, save_rdm1, save_rdm2};
pub use measure::{measure_rdms, RdmPlan};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Rdm1 {
    d: DMatrix<Complex64>,
}

impl Rdm1 {
    pub fn zeros(r: usize) -> Self {
        Rdm1 { d: DMatrix::zeros(r, r) }
    }

    pub fn from_matrix(d: DMatrix<Complex64>) -> Result<Self> {
        if d.nrows() != d.ncols() {
            return Err(Error::DimensionMismatch {
                expected: d.nrows(),
                found: d.ncols(),
                context: "1-RDM must be square",
            });
        }
        Ok(Rdm1 { d })
    }

    pub fn from_real(d: &DMatrix<f64>) -> Result<Self> {
        Rdm1::from_matrix(d.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn r(&self) -> usize {
        self.d.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.d
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.d[(i, j)]
    }

    pub fn trace(&self) -> Complex64 {
        self.d.trace()
    }

    pub fn scale(&self, f: f64) -> Rdm1 {
        Rdm1 {
            d: &self.d * Complex64::new(f, 0.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rdm2 {
    r: usize,
    d: DMatrix<Complex64>,
}

impl Rdm2 {
    pub fn zeros(r: usize) -> Self {
        Rdm2 {
            r,
            d: DMatrix::zeros(r * r, r * r),
        }
    }

    pub fn from_matrix(r: usize, d: DMatrix<Complex64>) -> Result<Self> {
        if d.nrows() != r * r || d.ncols() != r * r {
            return Err(Error::DimensionMismatch {
                expected: r * r,
                found: d.nrows(),
                context: "2-RDM matrix size",
            });
        }
        Ok(Rdm2 { r, d })
    }

    pub fn from_real(r: usize, d: &DMatrix<f64>) -> Result<Self> {
        Rdm2::from_matrix(r, d.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.d
    }

    pub fn get(&self, p: usize, q: usize, r: usize, s: usize) -> Complex64 {
        self.d[(p * self.r + q, r * self.r + s)]
    }

    pub fn set(&mut self, p: usize, q: usize, r: usize, s: usize, value: Complex64) {
        let n = self.r;
        self.d[(p * n + q, r * n + s)] = value;
    }

    /// `sum_{pq} D[(p,q),(p,q)]`
    pub fn trace(&self) -> Complex64 {
        self.d.trace()
    }

    pub fn scale(&self, f: f64) -> Rdm2 {
        Rdm2 {
            r: self.r,
            d: &self.d * Complex64::new(f, 0.0),
        }
    }

    /// `(D + D^+) / 2`
    pub fn hermitian_part(&self) -> Rdm2 {
        Rdm2 {
            r: self.r,
            d: (&self.d + self.d.adjoint()) * Complex64::new(0.5, 0.0),
        }
    }
}

/// Frobenius norm of `a - b`.
pub fn frobenius_distance(a: &Rdm2, b: &Rdm2) -> Result<f64> {
    if a.r != b.r {
        return Err(Error::DimensionMismatch {
            expected: a.r,
            found: b.r,
            context: "2-RDM sizes",
        });
    }
    Ok((&a.d - &b.d).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frobenius_examples() {
        let a = Rdm2::zeros(2);
        assert_eq!(frobenius_distance(&a, &a).unwrap(), 0.0);
        let mut b = a.clone();
        b.set(0, 1, 1, 0, Complex64::new(0.0, 1.0));
        assert_eq!(frobenius_distance(&a, &b).unwrap(), 1.0);
        assert!(frobenius_distance(&a, &Rdm2::zeros(3)).is_err());
    }
}
