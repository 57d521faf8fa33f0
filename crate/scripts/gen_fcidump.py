"""Generate the committed FCIDUMP fixtures with PySCF (STO-3G).

Run from the repository root:  python3 scripts/gen_fcidump.py
Writes fixtures/<mol>/<mol>_<bond>.fcidump plus fixtures/<mol>/provenance.json.
"""
import json
import os

import numpy as np
from pyscf import ao2mo, fci, gto, mcscf, scf, symm
from pyscf.tools import fcidump

ROOT = os.path.join(os.path.dirname(__file__), "..", "fixtures")

H2_BONDS = [0.3, 0.5, 0.6, 0.7, 0.735, 0.8, 0.9, 1.0, 1.25, 1.5, 2.0, 2.5]
LIH_BONDS = [1.0, 1.2, 1.4, 1.6, 2.0, 2.4, 2.8, 3.2, 3.6]
H4_BONDS = [0.6, 0.8, 1.0, 1.2, 1.5, 2.0]


def write_full(mol, path):
    """All orbitals active."""
    mf = scf.RHF(mol).run(conv_tol=1e-12)
    norb = mf.mo_coeff.shape[1]
    h1 = mf.mo_coeff.T @ mf.get_hcore() @ mf.mo_coeff
    eri = ao2mo.full(mol, mf.mo_coeff)
    fcidump.from_integrals(path, h1, eri, norb, mol.nelectron, nuc=mol.energy_nuc(), ms=0, tol=1e-14)
    e_fci, _ = fci.FCI(mf).kernel()
    return {"e_hf": mf.e_tot, "e_fci": e_fci, "norb": norb, "nelec": mol.nelectron}


def write_lih_active(mol, path):
    """Li 1s frozen; active space = remaining three sigma (A1) orbitals, 2 electrons."""
    mf = scf.RHF(mol).run(conv_tol=1e-12)
    irreps = symm.label_orb_symm(mol, mol.irrep_name, mol.symm_orb, mf.mo_coeff)
    sigma = [i for i, s in enumerate(irreps) if s == "A1"]
    core, active = sigma[0], sigma[1:4]
    mc = mcscf.CASCI(mf, 3, 2)
    mo = mc.sort_mo([i + 1 for i in active])
    h1eff, ecore = mc.get_h1eff(mo)
    eri = ao2mo.restore(1, mc.get_h2eff(mo), 3)
    fcidump.from_integrals(path, h1eff, eri, 3, 2, nuc=ecore, ms=0, tol=1e-14)
    e_cas = mc.kernel(mo)[0]
    return {
        "e_hf": mf.e_tot,
        "e_fci": e_cas,
        "norb": 3,
        "nelec": 2,
        "core_orbital": int(core),
        "active_orbitals": [int(a) for a in active],
    }


def run(name, bonds, geom, writer, note):
    out = os.path.join(ROOT, name)
    os.makedirs(out, exist_ok=True)
    records = []
    for b in bonds:
        mol = gto.M(atom=geom(b), basis="sto-3g", unit="Angstrom", symmetry=(name == "lih"), verbose=0)
        fname = f"{name}_{b:.3f}.fcidump"
        info = writer(mol, os.path.join(out, fname))
        info.update({"bond_angstrom": b, "file": fname})
        records.append(info)
    with open(os.path.join(out, "provenance.json"), "w") as fh:
        json.dump({"generator": "pyscf", "basis": "sto-3g", "note": note, "points": records}, fh, indent=2)


if __name__ == "__main__":
    run("h2", H2_BONDS, lambda b: f"H 0 0 0; H 0 0 {b}", write_full,
        "all orbitals active; 4 spin-orbitals, 2 electrons")
    run("lih", LIH_BONDS, lambda b: f"Li 0 0 0; H 0 0 {b}", write_lih_active,
        "Li 1s frozen (CASCI core); active = next three sigma orbitals; e_fci is the CASCI energy")
    run("h4", H4_BONDS, lambda b: "; ".join(f"H 0 0 {i * b}" for i in range(4)), write_full,
        "linear equally spaced chain; all orbitals active; 8 spin-orbitals, 4 electrons")
