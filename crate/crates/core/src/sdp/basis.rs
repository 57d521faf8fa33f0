//! Orthonormal coordinates for real symmetric, pair-antisymmetric 2-RDMs.
//!
//! For pairs `P = (p<q)` and `Q = (r<s)` the coordinate `x[P,Q]` (with
//! `P <= Q`) is the inner product of `D` with a unit-norm basis matrix; so the
//! Euclidean norm of `x` equals the full Frobenius norm of `D`.

use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;

use nalgebra::DMatrix;

/// Sparse affine form `constant + sum coef * x[index]`.
#[derive(Clone, Debug, Default, PartialEq)]
pub(crate) struct Affine {
    pub constant: f64,
    pub terms: Vec<(usize, f64)>,
}

/// Accumulates an affine form before freezing it into sorted sparse terms.
#[derive(Default)]
pub(crate) struct AffineBuilder {
    constant: f64,
    terms: BTreeMap<usize, f64>,
}

impl AffineBuilder {
    pub fn add_const(&mut self, c: f64) {
        self.constant += c;
    }

    pub fn add(&mut self, index: usize, c: f64) {
        *self.terms.entry(index).or_insert(0.0) += c;
    }

    pub fn add_form(&mut self, form: &Affine, scale: f64) {
        self.constant += scale * form.constant;
        for &(i, c) in &form.terms {
            self.add(i, scale * c);
        }
    }

    pub fn build(self) -> Affine {
        Affine {
            constant: self.constant,
            terms: self.terms.into_iter().filter(|(_, c)| *c != 0.0).collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct PairBasis {
    pub r: usize,
    pub pairs: Vec<(usize, usize)>,
    /// Full index `p*r+q` -> (pair, sign); `None` on the diagonal `p == q`.
    pair_of: Vec<Option<(usize, f64)>>,
    /// `coord[P][Q]` for the symmetric pair matrix.
    coord: Vec<Vec<usize>>,
    pub nx: usize,
}

const INV_SQRT8: f64 = 1.0 / (2.0 * SQRT_2);

impl PairBasis {
    pub fn new(r: usize) -> Self {
        let mut pairs = Vec::new();
        let mut pair_of = vec![None; r * r];
        for p in 0..r {
            for q in p + 1..r {
                pair_of[p * r + q] = Some((pairs.len(), 1.0));
                pair_of[q * r + p] = Some((pairs.len(), -1.0));
                pairs.push((p, q));
            }
        }
        let m = pairs.len();
        let mut coord = vec![vec![0; m]; m];
        let mut nx = 0;
        for a in 0..m {
            for b in a..m {
                coord[a][b] = nx;
                coord[b][a] = nx;
                nx += 1;
            }
        }
        PairBasis {
            r,
            pairs,
            pair_of,
            coord,
            nx,
        }
    }

    pub fn m(&self) -> usize {
        self.pairs.len()
    }

    /// Coordinates on the diagonal (`P == Q`); their sum is the 2-RDM trace.
    pub fn diagonal_coords(&self) -> Vec<usize> {
        (0..self.m()).map(|a| self.coord[a][a]).collect()
    }

    /// Full element `D[(p,q),(r,s)]` as `coef * x[index]`.
    pub fn d_entry(&self, row: usize, col: usize) -> Option<(usize, f64)> {
        let (a, sa) = self.pair_of[row]?;
        let (b, sb) = self.pair_of[col]?;
        let scale = if a == b { 0.5 } else { INV_SQRT8 };
        Some((self.coord[a][b], sa * sb * scale))
    }

    pub fn d_form(&self, p: usize, q: usize, r_: usize, s: usize) -> Affine {
        let r = self.r;
        match self.d_entry(p * r + q, r_ * r + s) {
            Some((i, c)) => Affine {
                constant: 0.0,
                terms: vec![(i, c)],
            },
            None => Affine::default(),
        }
    }

    pub fn to_full(&self, x: &[f64]) -> DMatrix<f64> {
        let n = self.r * self.r;
        DMatrix::from_fn(n, n, |row, col| self.d_entry(row, col).map_or(0.0, |(i, c)| c * x[i]))
    }

    /// Orthogonal projection of a full real matrix onto the coordinates.
    pub fn from_full(&self, d: &DMatrix<f64>) -> Vec<f64> {
        let n = self.r * self.r;
        let mut x = vec![0.0; self.nx];
        for row in 0..n {
            for col in 0..n {
                if let Some((i, c)) = self.d_entry(row, col) {
                    x[i] += c * d[(row, col)];
                }
            }
        }
        x
    }

    /// Symmetric `m x m` matrix `2 * D[P,Q]`; same nonzero spectrum as `D`.
    pub fn compact(&self, x: &[f64]) -> DMatrix<f64> {
        let m = self.m();
        DMatrix::from_fn(m, m, |a, b| {
            let i = self.coord[a][b];
            if a == b {
                x[i]
            } else {
                x[i] / SQRT_2
            }
        })
    }
}
