//! Stages shared by the subcommands: VQE, calibration, purification and
//! reference energies.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use v2rdm_core::calibrate::{calibrate, CalibrationOptions, CalibrationReport};
use v2rdm_core::hamiltonian::{build_reduced_hamiltonian, energy_from_rdms, read_fcidump, MolecularSystem, ReducedHamiltonian};
use v2rdm_core::oracle::{exact_rdms, fci_ground};
use v2rdm_core::qsim::{Circuit, QuantumState};
use v2rdm_core::rdm::{contract_to_rdm1, load_rdm1, load_rdm2, Rdm1, Rdm2, RdmPlan};
use v2rdm_core::sdp::{purify, v2rdm_ground, SdpProblem, SdpResult};
use v2rdm_core::vqe::{build_ansatz, run_vqe, EnergyModel, Optimizer, VqeConfig, VqeResult};

use crate::config::PipelineConfig;

pub fn load_system(path: &Path) -> Result<MolecularSystem> {
    read_fcidump(path).with_context(|| format!("reading FCIDUMP {}", path.display()))
}

#[derive(Clone, Debug)]
pub struct Measured {
    pub d1: Rdm1,
    pub d2: Rdm2,
}

impl Measured {
    /// `<H>` from the RDMs (exact for exact expectations).
    pub fn energy(&self, sys: &MolecularSystem) -> Result<f64> {
        Ok(energy_from_rdms(&self.d1, &self.d2, sys)?)
    }
}

pub struct VqeStage {
    pub noiseless_config: VqeConfig,
    pub noiseless: VqeResult,
    pub noisy_config: Option<VqeConfig>,
    pub noisy: Option<VqeResult>,
    /// Circuit at the parameters that produced `noisy_rdms`.
    pub circuit: Circuit,
    pub noiseless_rdms: Measured,
    pub noisy_rdms: Measured,
}

impl VqeStage {
    pub fn noisy_energy(&self) -> f64 {
        self.noisy.as_ref().map_or(self.noiseless.energy, |r| r.energy)
    }
}

pub fn vqe_configs(cfg: &PipelineConfig) -> (VqeConfig, Option<VqeConfig>) {
    let v = &cfg.vqe;
    let clean = VqeConfig {
        ansatz: v.ansatz,
        optimizer: Optimizer::Auto,
        max_iters: v.max_iters,
        energy_tol: v.energy_tol,
        seed: cfg.measurement.seed,
        noise: None,
        initial_params: None,
        simplex_step: v.simplex_step,
    };
    let noise = cfg.noise.model();
    let noisy = (!noise.is_noiseless()).then(|| VqeConfig {
        noise: Some(noise),
        max_iters: v.noisy_max_iters,
        ..clean.clone()
    });
    (clean, noisy)
}

/// Noiseless VQE, then a warm-started noisy re-optimization, and RDMs of both.
pub fn run_vqe_stage(sys: &MolecularSystem, cfg: &PipelineConfig) -> Result<VqeStage> {
    let (clean_cfg, noisy_cfg) = vqe_configs(cfg);
    let noiseless = run_vqe(sys, &clean_cfg)?;
    let plan = RdmPlan::new(sys.r)?;
    let shots = cfg.measurement.shots;
    let seed = cfg.measurement.seed;

    let clean_model = EnergyModel::new(sys, clean_cfg.ansatz, None)?;
    let (d1, d2) = plan.measure(&clean_model.state(&noiseless.params)?, None, seed)?;
    let noiseless_rdms = Measured { d1, d2 };

    let (noisy, noisy_cfg, params) = match noisy_cfg {
        Some(mut c) => {
            c.initial_params = Some(noiseless.params.clone());
            let res = run_vqe(sys, &c)?;
            let p = res.params.clone();
            (Some(res), Some(c), p)
        }
        None => (None, None, noiseless.params.clone()),
    };
    let model = EnergyModel::new(sys, clean_cfg.ansatz, noisy_cfg.as_ref().and_then(|c| c.noise))?;
    let (d1, d2) = plan.measure(&model.state(&params)?, shots, seed)?;
    Ok(VqeStage {
        circuit: build_ansatz(sys, clean_cfg.ansatz, &params)?,
        noiseless_config: clean_cfg,
        noiseless,
        noisy_config: noisy_cfg,
        noisy,
        noiseless_rdms,
        noisy_rdms: Measured { d1, d2 },
    })
}

/// Noisy RDMs from files, checked against the system.
pub fn load_noisy(sys: &MolecularSystem, rdm2: &Path, rdm1: Option<&Path>) -> Result<Measured> {
    let (d2, n2) = load_rdm2(rdm2).with_context(|| format!("reading {}", rdm2.display()))?;
    if d2.r() != sys.r || n2 != sys.n_electrons {
        bail!(
            "noisy 2-RDM has r={}, N={} but the system has r={}, N={}",
            d2.r(),
            n2,
            sys.r,
            sys.n_electrons
        );
    }
    let d1 = match rdm1 {
        Some(p) => {
            let (d1, n1) = load_rdm1(p).with_context(|| format!("reading {}", p.display()))?;
            if d1.r() != sys.r || n1 != sys.n_electrons {
                bail!("noisy 1-RDM does not match the system");
            }
            d1
        }
        None => contract_to_rdm1(&d2, sys.n_electrons)?,
    };
    Ok(Measured { d1, d2 })
}

pub fn run_calibration(circuit: &Circuit, sys: &MolecularSystem, cfg: &PipelineConfig) -> Result<CalibrationReport> {
    let opts = CalibrationOptions {
        k: cfg.calibration.k,
        shots: cfg.measurement.shots,
        seed: cfg.measurement.seed,
        theorem2: true,
    };
    Ok(calibrate(circuit, &cfg.noise.model(), sys.r, &opts)?)
}

pub fn run_purify(k: &ReducedHamiltonian, sys: &MolecularSystem, noisy: &Rdm2, delta: f64, cfg: &PipelineConfig) -> Result<SdpResult> {
    Ok(purify(&SdpProblem {
        k: k.clone(),
        d_noisy: Some(noisy.clone()),
        n_electrons: sys.n_electrons,
        delta,
        options: cfg.sdp.clone(),
    })?)
}

#[derive(Clone, Debug)]
pub struct References {
    pub k: ReducedHamiltonian,
    pub fci: f64,
    pub fci_rdms: Measured,
    pub v2rdm: SdpResult,
}

pub fn references(sys: &MolecularSystem, cfg: &PipelineConfig) -> Result<References> {
    let k = build_reduced_hamiltonian(sys)?;
    let (fci, psi) = fci_ground(sys)?;
    let (d1, d2) = exact_rdms(&QuantumState::from_amplitudes(psi.as_slice().to_vec())?, sys.r)?;
    let v2rdm = v2rdm_ground(&k, sys.n_electrons, &cfg.sdp)?;
    Ok(References {
        k,
        fci,
        fci_rdms: Measured { d1, d2 },
        v2rdm,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct EnergyRow {
    pub method: &'static str,
    pub energy: f64,
}

/// Noisy VQE, calibration, purification and references for one geometry.
pub struct PointResult {
    pub stage: VqeStage,
    pub calibration: Option<CalibrationReport>,
    pub delta: f64,
    pub sdp: SdpResult,
    pub refs: References,
}

pub fn run_point(sys: &MolecularSystem, cfg: &PipelineConfig) -> Result<PointResult> {
    let stage = run_vqe_stage(sys, cfg)?;
    let (calibration, delta) = match cfg.calibration.delta {
        Some(d) => (None, d),
        None => {
            let c = run_calibration(&stage.circuit, sys, cfg)?;
            let d = c.delta;
            (Some(c), d)
        }
    };
    let refs = references(sys, cfg)?;
    let sdp = run_purify(&refs.k, sys, &stage.noisy_rdms.d2, delta, cfg)?;
    Ok(PointResult {
        stage,
        calibration,
        delta,
        sdp,
        refs,
    })
}
