#![allow(dead_code)]

use std::path::PathBuf;

use serde::Deserialize;
use v2rdm_core::hamiltonian::{read_fcidump, MolecularSystem};

#[derive(Deserialize)]
pub struct Point {
    pub e_hf: f64,
    pub e_fci: f64,
    pub bond_angstrom: f64,
    pub file: String,
}

#[derive(Deserialize)]
struct Provenance {
    points: Vec<Point>,
}

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// All geometries of one molecule (`h2`, `lih`, `h4`) with reference energies.
pub fn load(molecule: &str) -> Vec<(MolecularSystem, Point)> {
    let dir = fixtures_dir().join(molecule);
    let text = std::fs::read_to_string(dir.join("provenance.json")).unwrap();
    let prov: Provenance = serde_json::from_str(&text).unwrap();
    prov.points
        .into_iter()
        .map(|p| (read_fcidump(dir.join(&p.file)).unwrap(), p))
        .collect()
}

pub fn load_one(molecule: &str, bond: f64) -> (MolecularSystem, Point) {
    load(molecule)
        .into_iter()
        .find(|(_, p)| (p.bond_angstrom - bond).abs() < 1e-9)
        .unwrap_or_else(|| panic!("no {molecule} fixture at {bond}"))
}
