use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::circuit::{Circuit, LayerKind};
use super::gate::{Gate, GateKind, Mat2};
use super::state::QuantumState;
use crate::{Error, Result, MAX_DENSE_QUBITS};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseMode {
    /// Depolarize the acted-on qubits after every gate.
    #[default]
    PerGateLocal,
    /// Depolarize the whole register after every layer.
    PerLayerGlobal,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub p1: f64,
    pub p2: f64,
    #[serde(default)]
    pub mode: NoiseMode,
}

impl NoiseModel {
    pub fn local(p1: f64, p2: f64) -> Self {
        NoiseModel {
            p1,
            p2,
            mode: NoiseMode::PerGateLocal,
        }
    }

    pub fn global(p1: f64, p2: f64) -> Self {
        NoiseModel {
            p1,
            p2,
            mode: NoiseMode::PerLayerGlobal,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for p in [self.p1, self.p2] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidArgument(format!("depolarizing probability {p} outside [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.p1 == 0.0 && self.p2 == 0.0
    }
}

/// Runs `circuit` on `initial`. Any noise model forces density-matrix simulation.
pub fn simulate(circuit: &Circuit, noise: Option<&NoiseModel>, initial: &QuantumState) -> Result<QuantumState> {
    let n = circuit.num_qubits();
    if initial.num_qubits() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: initial.num_qubits(),
            context: "initial state qubits",
        });
    }
    for g in circuit.gates() {
        g.validate(n)?;
    }
    if let Some(nm) = noise {
        nm.validate()?;
    }
    let mut state = match noise {
        Some(_) => initial.to_density(),
        None => initial.clone(),
    };
    if matches!(state, QuantumState::Mixed { .. }) && n > MAX_DENSE_QUBITS {
        return Err(Error::TooManyQubits {
            n,
            limit: MAX_DENSE_QUBITS,
        });
    }
    match noise {
        None => {
            for g in circuit.gates() {
                apply_gate(&mut state, g)?;
            }
        }
        Some(nm) if nm.mode == NoiseMode::PerGateLocal => {
            for g in circuit.gates() {
                apply_gate(&mut state, g)?;
                let p = if g.arity() == 1 { nm.p1 } else { nm.p2 };
                if p > 0.0 {
                    depolarize_local(&mut state, &g.qubits, p);
                }
            }
        }
        Some(nm) => {
            for layer in circuit.layers() {
                for g in circuit.layer_gates(layer) {
                    apply_gate(&mut state, g)?;
                }
                let p = match layer.kind {
                    LayerKind::Single => nm.p1,
                    LayerKind::Two => nm.p2,
                };
                if p > 0.0 {
                    depolarize_global(&mut state, p);
                }
            }
        }
    }
    Ok(state)
}

/// Noiseless run from `|0...0>`.
pub fn run_pure(circuit: &Circuit) -> Result<QuantumState> {
    simulate(circuit, None, &QuantumState::zero(circuit.num_qubits()))
}

fn conj2(m: &Mat2) -> Mat2 {
    [[m[0][0].conj(), m[0][1].conj()], [m[1][0].conj(), m[1][1].conj()]]
}

fn apply_gate(state: &mut QuantumState, g: &Gate) -> Result<()> {
    let k = kernel(g)?;
    match state {
        QuantumState::Pure { amplitudes, .. } => apply_kernel(amplitudes, 0, &g.qubits, &k),
        QuantumState::Mixed { n, rho } => {
            // Row-major rho is a vector on 2n bits: column bits 0..n, row bits n..2n.
            // U rho U^+ applies U on the row bits and U* on the column bits.
            apply_kernel(rho, *n, &g.qubits, &k);
            apply_kernel(rho, 0, &g.qubits, &k.conj());
        }
    }
    Ok(())
}

enum Kernel {
    One(Mat2),
    Cx,
    Cz,
    Rzz(f64),
}

impl Kernel {
    fn conj(&self) -> Kernel {
        match self {
            Kernel::One(m) => Kernel::One(conj2(m)),
            Kernel::Cx => Kernel::Cx,
            Kernel::Cz => Kernel::Cz,
            Kernel::Rzz(t) => Kernel::Rzz(-t),
        }
    }
}

fn kernel(g: &Gate) -> Result<Kernel> {
    Ok(match g.kind {
        GateKind::CX => Kernel::Cx,
        GateKind::CZ => Kernel::Cz,
        GateKind::RZZ => Kernel::Rzz(g.angle.unwrap_or(0.0)),
        _ => Kernel::One(g.matrix1()?),
    })
}

fn apply_kernel(v: &mut [Complex64], offset: usize, qubits: &[usize], k: &Kernel) {
    match k {
        Kernel::One(m) => apply_1q(v, qubits[0] + offset, m),
        Kernel::Cx => apply_cx(v, qubits[0] + offset, qubits[1] + offset),
        Kernel::Cz => apply_cz(v, qubits[0] + offset, qubits[1] + offset),
        Kernel::Rzz(theta) => apply_rzz(v, qubits[0] + offset, qubits[1] + offset, *theta),
    }
}

/// Applies a single gate to a pure or mixed state in place.
pub fn apply(state: &mut QuantumState, g: &Gate) -> Result<()> {
    g.validate(state.num_qubits())?;
    apply_gate(state, g)
}

fn apply_1q(v: &mut [Complex64], bit: usize, m: &Mat2) {
    let stride = 1usize << bit;
    let len = v.len();
    let mut base = 0;
    while base < len {
        for i in base..base + stride {
            let a = v[i];
            let b = v[i + stride];
            v[i] = m[0][0] * a + m[0][1] * b;
            v[i + stride] = m[1][0] * a + m[1][1] * b;
        }
        base += 2 * stride;
    }
}

fn apply_cx(v: &mut [Complex64], control: usize, target: usize) {
    let cm = 1usize << control;
    let tm = 1usize << target;
    for i in 0..v.len() {
        if i & cm != 0 && i & tm == 0 {
            v.swap(i, i | tm);
        }
    }
}

fn apply_cz(v: &mut [Complex64], a: usize, b: usize) {
    let m = (1usize << a) | (1usize << b);
    for (i, x) in v.iter_mut().enumerate() {
        if i & m == m {
            *x = -*x;
        }
    }
}

fn apply_rzz(v: &mut [Complex64], a: usize, b: usize, theta: f64) {
    // exp(-i theta Z_a Z_b / 2)
    let even = Complex64::from_polar(1.0, -theta / 2.0);
    let odd = Complex64::from_polar(1.0, theta / 2.0);
    for (i, x) in v.iter_mut().enumerate() {
        let parity = ((i >> a) ^ (i >> b)) & 1;
        *x *= if parity == 0 { even } else { odd };
    }
}

/// `rho -> (1-p) rho + p Tr_Q(rho) (x) I/2^|Q|` on the gate's qubits.
pub(crate) fn depolarize_local(state: &mut QuantumState, qubits: &[usize], p: f64) {
    let QuantumState::Mixed { n, rho } = state else {
        unreachable!("noise requires a density matrix");
    };
    let n = *n;
    let dim = 1usize << n;
    let qmask: usize = qubits.iter().map(|q| 1usize << q).sum();
    let k = qubits.len();
    let sub = 1usize << k;
    // Offsets of each subsystem basis value within a full index.
    let offsets: Vec<usize> = (0..sub)
        .map(|s| {
            qubits
                .iter()
                .enumerate()
                .filter(|(j, _)| s >> j & 1 == 1)
                .map(|(_, q)| 1usize << q)
                .sum()
        })
        .collect();
    let keep = 1.0 - p;
    let mix = p / sub as f64;
    for row in 0..dim {
        if row & qmask != 0 {
            continue;
        }
        for col in 0..dim {
            if col & qmask != 0 {
                continue;
            }
            let mut tr = Complex64::new(0.0, 0.0);
            for &o in &offsets {
                tr += rho[(row | o) * dim + (col | o)];
            }
            for (a, &oa) in offsets.iter().enumerate() {
                for (b, &ob) in offsets.iter().enumerate() {
                    let idx = (row | oa) * dim + (col | ob);
                    rho[idx] = if a == b { rho[idx] * keep + tr * mix } else { rho[idx] * keep };
                }
            }
        }
    }
}

/// `rho -> (1-p) rho + p I/2^n`.
pub(crate) fn depolarize_global(state: &mut QuantumState, p: f64) {
    let QuantumState::Mixed { n, rho } = state else {
        unreachable!("noise requires a density matrix");
    };
    let dim = 1usize << *n;
    let keep = 1.0 - p;
    rho.iter_mut().for_each(|x| *x *= keep);
    let add = p / dim as f64;
    for i in 0..dim {
        rho[i * dim + i] += add;
    }
}
