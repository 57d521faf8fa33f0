//! Molecular integrals, the qubit Hamiltonian and the reduced Hamiltonian.
//!
//! Spin-orbital two-electron integrals are stored antisymmetrized so that
//!
//! `H = sum h[p][q] a_p^+ a_q + sum V[(p,q),(r,s)] a_p^+ a_q^+ a_s a_r + H_n`
//!
//! holds without a prefactor. From chemist-notation spin-orbital integrals
//! `(pr|qs)` this means `V[(p,q),(r,s)] = ((pr|qs) - (ps|qr)) / 4`.

use std::io::Read;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::fermion::{jordan_wigner, FermionTerm, PauliSum};
use crate::rdm::{Rdm1, Rdm2};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct MolecularSystem {
    pub label: String,
    /// Spin-orbital count.
    pub r: usize,
    pub n_electrons: usize,
    /// `r x r` one-electron integrals.
    pub h: DMatrix<f64>,
    /// `r^2 x r^2` antisymmetrized two-electron integrals, composite row index `p*r + q`.
    pub v: DMatrix<f64>,
    /// Nuclear repulsion (plus any frozen-core constant).
    pub h_nuc: f64,
}

impl MolecularSystem {
    /// Expands spatial integrals into interleaved spin-orbitals.
    ///
    /// `eri` holds chemist-notation `(ij|kl)` at `((i*m + j)*m + k)*m + l` for
    /// `m = norb` spatial orbitals.
    pub fn from_spatial(
        label: impl Into<String>,
        norb: usize,
        n_electrons: usize,
        h1: &DMatrix<f64>,
        eri: &[f64],
        h_nuc: f64,
    ) -> Result<Self> {
        if h1.nrows() != norb || h1.ncols() != norb {
            return Err(Error::DimensionMismatch {
                expected: norb,
                found: h1.nrows(),
                context: "one-electron integral size",
            });
        }
        if eri.len() != norb.pow(4) {
            return Err(Error::DimensionMismatch {
                expected: norb.pow(4),
                found: eri.len(),
                context: "two-electron integral count",
            });
        }
        let r = 2 * norb;
        if n_electrons > r {
            return Err(Error::InvalidArgument(format!("{n_electrons} electrons exceed {r} spin-orbitals")));
        }
        let m = norb;
        let chem = |p: usize, q: usize, s: usize, t: usize| -> f64 {
            // spin-orbital (pq|st): spins must match within each charge distribution
            if p % 2 != q % 2 || s % 2 != t % 2 {
                return 0.0;
            }
            eri[(((p / 2) * m + q / 2) * m + s / 2) * m + t / 2]
        };
        let h = DMatrix::from_fn(r, r, |p, q| if p % 2 == q % 2 { h1[(p / 2, q / 2)] } else { 0.0 });
        let mut v = DMatrix::zeros(r * r, r * r);
        for p in 0..r {
            for q in 0..r {
                for a in 0..r {
                    for b in 0..r {
                        v[(p * r + q, a * r + b)] = 0.25 * (chem(p, a, q, b) - chem(p, b, q, a));
                    }
                }
            }
        }
        Ok(MolecularSystem {
            label: label.into(),
            r,
            n_electrons,
            h,
            v,
            h_nuc,
        })
    }

    /// Largest violation of `h = h^T`, `V` pair-antisymmetry and `V = V^T`.
    pub fn symmetry_defect(&self) -> f64 {
        let r = self.r;
        let mut d = (&self.h - self.h.transpose()).amax();
        d = d.max((&self.v - self.v.transpose()).amax());
        for p in 0..r {
            for q in 0..r {
                for a in 0..r {
                    for b in 0..r {
                        let x = self.v[(p * r + q, a * r + b)];
                        d = d.max((x + self.v[(q * r + p, a * r + b)]).abs());
                        d = d.max((x + self.v[(p * r + q, b * r + a)]).abs());
                    }
                }
            }
        }
        d
    }
}

fn parse_real(tok: &str, line: usize) -> Result<f64> {
    tok.replace(['D', 'd'], "E")
        .parse::<f64>()
        .map_err(|_| Error::parse(line, format!("bad number `{tok}`")))
}

/// Integer value of `key=` inside a namelist header.
fn header_int(header: &str, key: &str) -> Result<Option<i64>> {
    let upper = header.to_ascii_uppercase();
    let bytes = upper.as_bytes();
    let mut from = 0;
    while let Some(pos) = upper[from..].find(key) {
        let at = from + pos;
        from = at + key.len();
        if at > 0 && (bytes[at - 1].is_ascii_alphanumeric() || bytes[at - 1] == b'_') {
            continue;
        }
        let rest = upper[from..].trim_start();
        let Some(rest) = rest.strip_prefix('=') else {
            continue;
        };
        let rest = rest.trim_start();
        let end = rest
            .find(|c: char| !(c.is_ascii_digit() || c == '-' || c == '+'))
            .unwrap_or(rest.len());
        return rest[..end]
            .parse::<i64>()
            .map(Some)
            .map_err(|_| Error::parse(1, format!("bad value for {key}")));
    }
    Ok(None)
}

/// Reads an FCIDUMP: namelist header with `NORB`, `NELEC`, `MS2`, then
/// `value i j k l` records with 1-based spatial indices in chemist notation.
pub fn parse_fcidump(text: &str) -> Result<MolecularSystem> {
    let mut header = String::new();
    let mut body_start = None;
    for (i, line) in text.lines().enumerate() {
        header.push_str(line);
        header.push('\n');
        let t = line.trim().to_ascii_uppercase();
        if t == "&END" || t == "/" || t.ends_with("&END") || t == "$END" {
            body_start = Some(i + 1);
            break;
        }
    }
    let body_start = body_start.ok_or_else(|| Error::parse(1, "FCIDUMP header is not terminated by &END"))?;
    if !header.to_ascii_uppercase().contains("&FCI") {
        return Err(Error::parse(1, "FCIDUMP header must start with &FCI"));
    }
    let norb = header_int(&header, "NORB")?.ok_or_else(|| Error::parse(1, "header lacks NORB"))?;
    let nelec = header_int(&header, "NELEC")?.ok_or_else(|| Error::parse(1, "header lacks NELEC"))?;
    let ms2 = header_int(&header, "MS2")?.unwrap_or(0);
    if norb <= 0 || nelec < 0 {
        return Err(Error::parse(1, "NORB must be positive and NELEC non-negative"));
    }
    if ms2 != 0 {
        log::warn!("FCIDUMP MS2={ms2}; spin is not restricted by this reader");
    }
    let m = norb as usize;
    let mut h1 = DMatrix::zeros(m, m);
    let mut eri = vec![0.0; m.pow(4)];
    let mut h_nuc = None;
    for (i, line) in text.lines().enumerate().skip(body_start) {
        let lineno = i + 1;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        if toks.len() != 5 {
            return Err(Error::parse(lineno, "expected `value i j k l`"));
        }
        let val = parse_real(toks[0], lineno)?;
        let mut idx = [0usize; 4];
        for (slot, tok) in idx.iter_mut().zip(&toks[1..]) {
            let v: usize = tok.parse().map_err(|_| Error::parse(lineno, format!("bad index `{tok}`")))?;
            if v > m {
                return Err(Error::parse(lineno, format!("index {v} exceeds NORB={m}")));
            }
            *slot = v;
        }
        match idx {
            [0, 0, 0, 0] => h_nuc = Some(val),
            [a, b, 0, 0] if a > 0 && b > 0 => {
                h1[(a - 1, b - 1)] = val;
                h1[(b - 1, a - 1)] = val;
            }
            [_, 0, 0, 0] => {} // orbital energies
            [a, b, c, d] if a > 0 && b > 0 && c > 0 && d > 0 => {
                let (a, b, c, d) = (a - 1, b - 1, c - 1, d - 1);
                for (p, q, s, t) in [
                    (a, b, c, d),
                    (b, a, c, d),
                    (a, b, d, c),
                    (b, a, d, c),
                    (c, d, a, b),
                    (d, c, a, b),
                    (c, d, b, a),
                    (d, c, b, a),
                ] {
                    eri[((p * m + q) * m + s) * m + t] = val;
                }
            }
            _ => return Err(Error::parse(lineno, "unsupported index pattern")),
        }
    }
    let h_nuc = h_nuc.ok_or_else(|| Error::parse(0, "missing nuclear repulsion record `value 0 0 0 0`"))?;
    MolecularSystem::from_spatial("", m, nelec as usize, &h1, &eri, h_nuc)
}

pub fn read_fcidump(path: impl AsRef<std::path::Path>) -> Result<MolecularSystem> {
    let path = path.as_ref();
    let mut text = String::new();
    std::fs::File::open(path)?.read_to_string(&mut text)?;
    let mut sys = parse_fcidump(&text)?;
    sys.label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    Ok(sys)
}

/// Fermionic terms of the Hamiltonian, scalar first.
pub fn fermion_terms(sys: &MolecularSystem) -> Vec<FermionTerm> {
    let r = sys.r;
    let mut terms = Vec::new();
    if sys.h_nuc != 0.0 {
        terms.push(FermionTerm::scalar(sys.h_nuc));
    }
    for p in 0..r {
        for q in 0..r {
            let c = sys.h[(p, q)];
            if c != 0.0 {
                terms.push(FermionTerm::one_body(p, q).scaled(c));
            }
        }
    }
    for p in 0..r {
        for q in 0..r {
            for a in 0..r {
                for b in 0..r {
                    let c = sys.v[(p * r + q, a * r + b)];
                    if c != 0.0 {
                        terms.push(FermionTerm::two_body(p, q, a, b).scaled(c));
                    }
                }
            }
        }
    }
    terms
}

/// Jordan-Wigner image of the Hamiltonian, real coefficients.
pub fn build_qubit_hamiltonian(sys: &MolecularSystem) -> Result<PauliSum> {
    let mut acc = PauliSum::zero(sys.r);
    for t in fermion_terms(sys) {
        for (s, c) in jordan_wigner(&t, sys.r)?.iter() {
            acc.add_term(*s, *c);
        }
    }
    let acc = acc.simplify(1e-14);
    debug_assert!(acc.max_imag() < 1e-10);
    Ok(acc)
}

/// Reduced Hamiltonian `K` acting on the 2-RDM, with the nuclear constant.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedHamiltonian {
    pub r: usize,
    pub n_electrons: usize,
    /// `r^2 x r^2`, real symmetric and antisymmetric under `p<->q`, `r<->s`.
    pub k: DMatrix<f64>,
    pub constant: f64,
}

impl ReducedHamiltonian {
    /// `Tr(K D) + H_n`.
    pub fn energy(&self, d2: &Rdm2) -> Result<f64> {
        check_dim(self.r, d2.r(), "2-RDM size")?;
        let dm = d2.matrix();
        let mut e = 0.0;
        for a in 0..self.k.nrows() {
            for b in 0..self.k.ncols() {
                e += self.k[(a, b)] * dm[(b, a)].re;
            }
        }
        Ok(e + self.constant)
    }
}

/// `K = A[h (x) 1] / (N-1) + V`, where `A` projects onto the pair-antisymmetric
/// subspace. With this `K`, `Tr(K D) + H_n` reproduces the full energy for any
/// N-electron 2-RDM.
pub fn build_reduced_hamiltonian(sys: &MolecularSystem) -> Result<ReducedHamiltonian> {
    let n = sys.n_electrons;
    if n < 2 {
        return Err(Error::InvalidArgument(format!("reduced Hamiltonian needs N >= 2, got {n}")));
    }
    let r = sys.r;
    let h = &sys.h;
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let scale = 0.25 / (n as f64 - 1.0);
    let k = DMatrix::from_fn(r * r, r * r, |row, col| {
        let (p, q) = (row / r, row % r);
        let (a, b) = (col / r, col % r);
        let one = h[(p, a)] * delta(q, b) - h[(q, a)] * delta(p, b) - h[(p, b)] * delta(q, a)
            + h[(q, b)] * delta(p, a);
        scale * one + sys.v[(row, col)]
    });
    Ok(ReducedHamiltonian {
        r,
        n_electrons: n,
        k,
        constant: sys.h_nuc,
    })
}

fn check_dim(expected: usize, found: usize, context: &'static str) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch {
            expected,
            found,
            context,
        });
    }
    Ok(())
}

/// `sum h D1 + sum V D2 + H_n`.
pub fn energy_from_rdms(d1: &Rdm1, d2: &Rdm2, sys: &MolecularSystem) -> Result<f64> {
    check_dim(sys.r, d1.r(), "1-RDM size")?;
    check_dim(sys.r, d2.r(), "2-RDM size")?;
    let mut e = Complex64::new(sys.h_nuc, 0.0);
    for (x, y) in sys.h.iter().zip(d1.matrix().iter()) {
        e += *x * *y;
    }
    for (x, y) in sys.v.iter().zip(d2.matrix().iter()) {
        e += *x * *y;
    }
    if e.im.abs() > 1e-8 {
        log::debug!("energy has imaginary residue {:.3e}", e.im);
    }
    Ok(e.re)
}
