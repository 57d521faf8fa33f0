//! Plain-text RDM files.
//!
//! ```text
//! kind rdm2
//! r 4
//! n 2
//! 0 1 0 1 1.0000000000000000e0 0.0000000000000000e0
//! ```
//!
//! Rows list `p q [r s] re im`; omitted elements are zero.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{Rdm1, Rdm2};
use crate::{Error, Result};

fn header(out: &mut String, kind: &str, r: usize, n: usize) {
    writeln!(out, "kind {kind}\nr {r}\nn {n}").unwrap();
}

fn entry(out: &mut String, idx: &[usize], z: Complex64) {
    for i in idx {
        write!(out, "{i} ").unwrap();
    }
    writeln!(out, "{:.16e} {:.16e}", z.re, z.im).unwrap();
}

pub fn rdm1_to_text(d: &Rdm1, n: usize) -> String {
    let mut out = String::new();
    header(&mut out, "rdm1", d.r(), n);
    for i in 0..d.r() {
        for j in 0..d.r() {
            let z = d.get(i, j);
            if z != Complex64::new(0.0, 0.0) {
                entry(&mut out, &[i, j], z);
            }
        }
    }
    out
}

pub fn rdm2_to_text(d: &Rdm2, n: usize) -> String {
    let mut out = String::new();
    let r = d.r();
    header(&mut out, "rdm2", r, n);
    for p in 0..r {
        for q in 0..r {
            for a in 0..r {
                for b in 0..r {
                    let z = d.get(p, q, a, b);
                    if z != Complex64::new(0.0, 0.0) {
                        entry(&mut out, &[p, q, a, b], z);
                    }
                }
            }
        }
    }
    out
}

struct Parsed {
    r: usize,
    n: usize,
    rows: Vec<(Vec<usize>, Complex64)>,
}

fn parse(text: &str, kind: &str, arity: usize) -> Result<Parsed> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let mut field = |name: &str| -> Result<String> {
        let (i, l) = lines.next().ok_or_else(|| Error::parse(0, format!("missing `{name}` header")))?;
        let mut t = l.split_whitespace();
        if t.next() != Some(name) {
            return Err(Error::parse(i + 1, format!("expected `{name}` header")));
        }
        t.next().map(str::to_string).ok_or_else(|| Error::parse(i + 1, format!("`{name}` has no value")))
    };
    let k = field("kind")?;
    if k != kind {
        return Err(Error::parse(1, format!("expected kind {kind}, found {k}")));
    }
    let r: usize = field("r")?.parse().map_err(|_| Error::parse(2, "bad r"))?;
    let n: usize = field("n")?.parse().map_err(|_| Error::parse(3, "bad n"))?;
    let mut rows = Vec::new();
    for (i, l) in lines {
        let t: Vec<&str> = l.split_whitespace().collect();
        if t.len() != arity + 2 {
            return Err(Error::parse(i + 1, format!("expected {} fields", arity + 2)));
        }
        let mut idx = Vec::with_capacity(arity);
        for tok in &t[..arity] {
            let v: usize = tok.parse().map_err(|_| Error::parse(i + 1, format!("bad index `{tok}`")))?;
            if v >= r {
                return Err(Error::parse(i + 1, format!("index {v} out of range for r={r}")));
            }
            idx.push(v);
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| Error::parse(i + 1, format!("bad number `{s}`")));
        rows.push((idx, Complex64::new(num(t[arity])?, num(t[arity + 1])?)));
    }
    Ok(Parsed { r, n, rows })
}

/// Returns the matrix and the electron count recorded in the header.
pub fn parse_rdm1(text: &str) -> Result<(Rdm1, usize)> {
    let p = parse(text, "rdm1", 2)?;
    let mut m = DMatrix::zeros(p.r, p.r);
    for (idx, z) in p.rows {
        m[(idx[0], idx[1])] = z;
    }
    Ok((Rdm1::from_matrix(m)?, p.n))
}

pub fn parse_rdm2(text: &str) -> Result<(Rdm2, usize)> {
    let p = parse(text, "rdm2", 4)?;
    let mut d = Rdm2::zeros(p.r);
    for (idx, z) in p.rows {
        d.set(idx[0], idx[1], idx[2], idx[3], z);
    }
    Ok((d, p.n))
}

pub fn save_rdm1(path: impl AsRef<Path>, d: &Rdm1, n: usize) -> Result<()> {
    Ok(std::fs::write(path, rdm1_to_text(d, n))?)
}

pub fn save_rdm2(path: impl AsRef<Path>, d: &Rdm2, n: usize) -> Result<()> {
    Ok(std::fs::write(path, rdm2_to_text(d, n))?)
}

pub fn load_rdm1(path: impl AsRef<Path>) -> Result<(Rdm1, usize)> {
    parse_rdm1(&std::fs::read_to_string(path)?)
}

pub fn load_rdm2(path: impl AsRef<Path>) -> Result<(Rdm2, usize)> {
    parse_rdm2(&std::fs::read_to_string(path)?)
}
