"""Generate the committed synthetic diffraction table for H2 (4 spin-orbitals).

Run from the repository root:  python3 scripts/gen_ued_table.py
Writes fixtures/ued/h2_synthetic.ued.

Each S(s) is a sum of seeded Hermitian spatial matrices with Gaussian decay in
s, expanded to interleaved spin-orbitals (spin-diagonal), so the table is smooth
in s and yields real intensities for Hermitian RDMs.
"""
import os

import numpy as np

ROOT = os.path.join(os.path.dirname(__file__), "..", "fixtures", "ued")
SEED = 20240611
NORB = 2
S_VALUES = np.linspace(0.5, 1.5, 11)
C_N = 2.0
N_E = 2.0


def hermitian(rng, n):
    a = rng.normal(size=(n, n)) + 0.3j * rng.normal(size=(n, n))
    return 0.5 * (a + a.conj().T)


def main():
    rng = np.random.default_rng(SEED)
    terms = [(hermitian(rng, NORB), rng.uniform(0.2, 1.5)) for _ in range(3)]
    r = 2 * NORB
    lines = [
        "# synthetic diffraction integrals, spin-orbital basis",
        f"# generator: scripts/gen_ued_table.py seed {SEED}",
        f"r {r}",
        f"c_n {C_N!r}",
        f"n_e {N_E!r}",
    ]
    for s in S_VALUES:
        spatial = sum(a * np.exp(-b * s * s) for a, b in terms)
        full = np.kron(spatial, np.eye(2))
        lines.append(f"s {float(s)!r}")
        for row in full:
            lines.append(" ".join(f"{z.real:.17e} {z.imag:.17e}" for z in row))
    os.makedirs(ROOT, exist_ok=True)
    with open(os.path.join(ROOT, "h2_synthetic.ued"), "w") as f:
        f.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
