//! Elastic and inelastic electron-diffraction intensities from RDMs and
//! tabulated diffraction integrals.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::rdm::{Rdm1, Rdm2};
use crate::{Error, Result};

const IMAG_TOL: f64 = 1e-9;

/// Diffraction integrals `S(s)` in the spin-orbital basis on a grid of `s`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffractionTable {
    pub r: usize,
    pub c_n: f64,
    pub n_e: f64,
    pub s_values: Vec<f64>,
    pub matrices: Vec<DMatrix<Complex64>>,
}

impl DiffractionTable {
    pub fn new(r: usize, c_n: f64, n_e: f64, s_values: Vec<f64>, matrices: Vec<DMatrix<Complex64>>) -> Result<Self> {
        let t = DiffractionTable {
            r,
            c_n,
            n_e,
            s_values,
            matrices,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.s_values.len() != self.matrices.len() {
            return Err(Error::InvalidArgument(format!(
                "{} s-values but {} matrices",
                self.s_values.len(),
                self.matrices.len()
            )));
        }
        if let Some(w) = self.s_values.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument(format!(
                "s-values must be strictly increasing, found {} then {}",
                w[0], w[1]
            )));
        }
        if let Some(m) = self.matrices.iter().find(|m| m.nrows() != self.r || m.ncols() != self.r) {
            return Err(Error::DimensionMismatch {
                expected: self.r,
                found: m.nrows().max(m.ncols()),
                context: "diffraction matrix size",
            });
        }
        if !self.c_n.is_finite() || !self.n_e.is_finite() || self.s_values.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidArgument("non-finite value in diffraction table".into()));
        }
        Ok(())
    }

    /// Header lines `r`, `c_n`, `n_e`, then per point `s <value>` followed by
    /// `r` rows of `r` complex entries written as `re im` pairs.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "r {}", self.r).unwrap();
        writeln!(out, "c_n {:.17e}", self.c_n).unwrap();
        writeln!(out, "n_e {:.17e}", self.n_e).unwrap();
        for (s, m) in self.s_values.iter().zip(&self.matrices) {
            writeln!(out, "s {s:.17e}").unwrap();
            for i in 0..self.r {
                let row: Vec<String> = (0..self.r)
                    .map(|j| format!("{:.17e} {:.17e}", m[(i, j)].re, m[(i, j)].im))
                    .collect();
                writeln!(out, "{}", row.join(" ")).unwrap();
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .peekable();
        let perr = |line: usize, message: String| Error::Parse { line, message };
        let mut header = |key: &str| -> Result<(usize, String)> {
            let (no, l) = lines.next().ok_or_else(|| perr(0, format!("missing `{key}` header")))?;
            let mut it = l.split_whitespace();
            if it.next() != Some(key) {
                return Err(perr(no, format!("expected `{key} <value>`")));
            }
            let v = it.next().ok_or_else(|| perr(no, format!("`{key}` needs a value")))?;
            Ok((no, v.to_string()))
        };
        let num = |no: usize, v: &str| v.parse::<f64>().map_err(|e| perr(no, format!("bad number `{v}`: {e}")));
        let (no, r) = header("r")?;
        let r: usize = r.parse().map_err(|e| perr(no, format!("bad r: {e}")))?;
        if r == 0 {
            return Err(perr(no, "r must be positive".into()));
        }
        let (no, c) = header("c_n")?;
        let c_n = num(no, &c)?;
        let (no, n) = header("n_e")?;
        let n_e = num(no, &n)?;

        let mut s_values = Vec::new();
        let mut matrices = Vec::new();
        while let Some((no, l)) = lines.next() {
            let mut it = l.split_whitespace();
            if it.next() != Some("s") {
                return Err(perr(no, "expected `s <value>` block header".into()));
            }
            let s = num(no, it.next().ok_or_else(|| perr(no, "`s` needs a value".into()))?)?;
            let mut m = DMatrix::zeros(r, r);
            for i in 0..r {
                let (no, row) = lines.next().ok_or_else(|| perr(no, format!("block at s={s} is truncated")))?;
                let vals: Vec<f64> = row.split_whitespace().map(|v| num(no, v)).collect::<Result<_>>()?;
                if vals.len() != 2 * r {
                    return Err(perr(no, format!("expected {} numbers, found {}", 2 * r, vals.len())));
                }
                for j in 0..r {
                    m[(i, j)] = Complex64::new(vals[2 * j], vals[2 * j + 1]);
                }
            }
            s_values.push(s);
            matrices.push(m);
        }
        DiffractionTable::new(r, c_n, n_e, s_values, matrices)
    }
}

pub fn load_diffraction_table(path: impl AsRef<Path>) -> Result<DiffractionTable> {
    DiffractionTable::parse(&std::fs::read_to_string(path)?)
}

pub fn save_diffraction_table(table: &DiffractionTable, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, table.to_text())?;
    Ok(())
}

fn check_s(r: usize, s: &DMatrix<Complex64>) -> Result<()> {
    if s.nrows() != r || s.ncols() != r {
        return Err(Error::DimensionMismatch {
            expected: r,
            found: s.nrows(),
            context: "diffraction matrix vs RDM size",
        });
    }
    Ok(())
}

fn real_part(z: Complex64, what: &str) -> f64 {
    if z.im.abs() > IMAG_TOL * z.re.abs().max(1.0) {
        log::warn!("{what} intensity has imaginary residue {:.3e}", z.im);
    }
    z.re
}

/// `sum_ij D1[i][j] S[i][j]` and `sum_kl D1[k][l] conj(S[k][l])`.
fn linear_terms(d1: &Rdm1, s: &DMatrix<Complex64>) -> (Complex64, Complex64) {
    let d = d1.matrix();
    let a = d.iter().zip(s.iter()).map(|(x, y)| x * y).sum();
    let b = d.iter().zip(s.iter()).map(|(x, y)| x * y.conj()).sum();
    (a, b)
}

/// Complex value of the elastic intensity before taking the real part.
pub fn elastic_intensity_complex(d1: &Rdm1, s: &DMatrix<Complex64>, c_n: f64) -> Result<Complex64> {
    check_s(d1.r(), s)?;
    let (lin, lin_conj) = linear_terms(d1, s);
    Ok(Complex64::new(c_n * c_n, 0.0) - 2.0 * c_n * lin + lin * lin_conj)
}

pub fn elastic_intensity(d1: &Rdm1, s: &DMatrix<Complex64>, c_n: f64) -> Result<f64> {
    Ok(real_part(elastic_intensity_complex(d1, s, c_n)?, "elastic"))
}

pub fn inelastic_intensity_complex(d1: &Rdm1, d2: &Rdm2, s: &DMatrix<Complex64>, n_e: f64) -> Result<Complex64> {
    let r = d1.r();
    check_s(r, s)?;
    if d2.r() != r {
        return Err(Error::DimensionMismatch {
            expected: r,
            found: d2.r(),
            context: "2-RDM vs 1-RDM size",
        });
    }
    // Row-major vec(S) matches the composite index of D2.
    let x = DVector::from_fn(r * r, |k, _| s[(k / r, k % r)]);
    let pair = (x.transpose() * d2.matrix() * x.map(|z| z.conj()))[(0, 0)];
    let (lin, lin_conj) = linear_terms(d1, s);
    Ok(Complex64::new(n_e, 0.0) + pair - lin * lin_conj)
}

pub fn inelastic_intensity(d1: &Rdm1, d2: &Rdm2, s: &DMatrix<Complex64>, n_e: f64) -> Result<f64> {
    Ok(real_part(inelastic_intensity_complex(d1, d2, s, n_e)?, "inelastic"))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IntensityPoint {
    pub s: f64,
    pub elastic: f64,
    pub inelastic: f64,
    pub total: f64,
}

pub fn intensity_curve(d1: &Rdm1, d2: &Rdm2, table: &DiffractionTable) -> Result<Vec<IntensityPoint>> {
    table.validate()?;
    table
        .s_values
        .iter()
        .zip(&table.matrices)
        .map(|(&s, m)| {
            let elastic = elastic_intensity(d1, m, table.c_n)?;
            let inelastic = inelastic_intensity(d1, d2, m, table.n_e)?;
            Ok(IntensityPoint {
                s,
                elastic,
                inelastic,
                total: elastic + inelastic,
            })
        })
        .collect()
}
