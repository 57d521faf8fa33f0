//! Trust-radius calibration from a nearest-Clifford reference circuit, plus
//! the local- and global-depolarizing error bounds on the 2-RDM.

use serde::{Deserialize, Serialize};

use crate::oracle::exact_rdms;
use crate::qsim::{cliffordize_with_report, simulate, Circuit, NoiseModel, QuantumState, Substitution};
use crate::rdm::{frobenius_distance, RdmPlan};
use crate::{Error, Result, MAX_DENSE_QUBITS};

pub const DEFAULT_K: f64 = 2.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationOptions {
    pub k: f64,
    /// Gaussian shot noise per Pauli string; `None` uses exact expectations.
    pub shots: Option<u64>,
    pub seed: u64,
    /// Also evaluate the global-noise closed form on the reference circuit.
    pub theorem2: bool,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        CalibrationOptions {
            k: DEFAULT_K,
            shots: None,
            seed: 0,
            theorem2: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalibrationReport {
    pub num_qubits: usize,
    pub noise: NoiseModel,
    pub shots: Option<u64>,
    pub delta_ref: f64,
    pub k: f64,
    pub delta: f64,
    pub theorem1_bound: f64,
    pub theorem2_delta: Option<f64>,
    /// Single- and two-qubit layer counts of the reference circuit.
    pub layer_depths: (usize, usize),
    pub substitutions: Vec<Substitution>,
}

fn check_noise(noise: &NoiseModel) -> Result<()> {
    noise.validate()
}

/// Frobenius distance between noiseless and noisy 2-RDMs of a circuit run
/// from `|0...0>`; both are measured through the same Pauli recombination.
pub fn measured_delta(circuit: &Circuit, noise: &NoiseModel, r: usize, shots: Option<u64>, seed: u64) -> Result<f64> {
    check_noise(noise)?;
    if circuit.num_qubits() != r {
        return Err(Error::DimensionMismatch {
            expected: r,
            found: circuit.num_qubits(),
            context: "circuit qubits vs spin-orbitals",
        });
    }
    let zero = QuantumState::zero(r);
    let clean = simulate(circuit, None, &zero)?;
    let noisy = if noise.is_noiseless() {
        clean.clone()
    } else {
        simulate(circuit, Some(noise), &zero)?
    };
    let plan = RdmPlan::new(r)?;
    let (_, d_clean) = plan.measure(&clean, shots, seed)?;
    let (_, d_noisy) = plan.measure(&noisy, shots, seed.wrapping_add(1))?;
    frobenius_distance(&d_clean, &d_noisy)
}

/// Noise baseline of the cliffordized `circuit` with exact expectations.
pub fn delta_ref(circuit: &Circuit, noise: &NoiseModel, r: usize) -> Result<f64> {
    let (reference, _) = cliffordize_with_report(circuit)?;
    measured_delta(&reference, noise, r, None, 0)
}

pub fn trust_radius(delta_ref: f64, k: f64) -> Result<f64> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidArgument(format!("scaling factor k must be positive, got {k}")));
    }
    if !(delta_ref >= 0.0) {
        return Err(Error::InvalidArgument(format!("delta_ref must be non-negative, got {delta_ref}")));
    }
    Ok(k * delta_ref)
}

/// `2 n^2 (sum p_singles + sum p_twos)`
pub fn theorem1_bound(n: usize, p_singles: &[f64], p_twos: &[f64]) -> Result<f64> {
    if let Some(p) = p_singles.iter().chain(p_twos).find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::InvalidArgument(format!("gate error probability {p} outside [0, 1]")));
    }
    let sum: f64 = p_singles.iter().sum::<f64>() + p_twos.iter().sum::<f64>();
    Ok(2.0 * (n * n) as f64 * sum)
}

/// Local-noise bound for `circuit` with one error rate per gate arity.
pub fn theorem1_bound_for(circuit: &Circuit, noise: &NoiseModel) -> Result<f64> {
    check_noise(noise)?;
    let singles = vec![noise.p1; circuit.single_qubit_gate_count()];
    let twos = vec![noise.p2; circuit.two_qubit_gate_count()];
    theorem1_bound(circuit.num_qubits(), &singles, &twos)
}

/// Closed-form 2-RDM error under per-layer global depolarizing noise, for the
/// circuit run from `|0...0>`.
pub fn theorem2_delta(circuit: &Circuit, p1: f64, p2: f64) -> Result<f64> {
    theorem2_delta_from(circuit, p1, p2, &QuantumState::zero(circuit.num_qubits()))
}

pub fn theorem2_delta_from(circuit: &Circuit, p1: f64, p2: f64, initial: &QuantumState) -> Result<f64> {
    check_noise(&NoiseModel::global(p1, p2))?;
    let n = circuit.num_qubits();
    if n > MAX_DENSE_QUBITS {
        return Err(Error::TooManyQubits {
            n,
            limit: MAX_DENSE_QUBITS,
        });
    }
    let (d1, d2) = circuit.layer_depths();
    let survive = (1.0 - p1).powi(d1 as i32) * (1.0 - p2).powi(d2 as i32);
    let rho = simulate(circuit, None, initial)?;
    let (_, d_rho) = exact_rdms(&rho, n)?;
    // Trace terms by direct evaluation on the maximally mixed state.
    let (_, d_mix) = exact_rdms(&QuantumState::maximally_mixed(n), n)?;
    Ok((1.0 - survive) * frobenius_distance(&d_rho, &d_mix)?)
}

/// Full protocol: cliffordize, measure the noise baseline, scale by `k`.
pub fn calibrate(circuit: &Circuit, noise: &NoiseModel, r: usize, opts: &CalibrationOptions) -> Result<CalibrationReport> {
    check_noise(noise)?;
    let (reference, substitutions) = cliffordize_with_report(circuit)?;
    let delta_ref = measured_delta(&reference, noise, r, opts.shots, opts.seed)?;
    let theorem2_delta = if opts.theorem2 {
        Some(theorem2_delta(&reference, noise.p1, noise.p2)?)
    } else {
        None
    };
    Ok(CalibrationReport {
        num_qubits: r,
        noise: *noise,
        shots: opts.shots,
        delta_ref,
        k: opts.k,
        delta: trust_radius(delta_ref, opts.k)?,
        theorem1_bound: theorem1_bound_for(&reference, noise)?,
        theorem2_delta,
        layer_depths: reference.layer_depths(),
        substitutions,
    })
}
