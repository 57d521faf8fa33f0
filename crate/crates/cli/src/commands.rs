//! One function per subcommand. Each writes its artifacts into the output
//! directory and returns it.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use v2rdm_core::calibrate::{delta_ref, measured_delta, theorem1_bound_for, theorem2_delta, CalibrationReport};
use v2rdm_core::hamiltonian::MolecularSystem;
use v2rdm_core::qsim::{Circuit, NoiseModel};
use v2rdm_core::rdm::{rdm1_to_text, rdm2_to_text, Rdm1, Rdm2};
use v2rdm_core::sdp::{SdpReport, SdpStatus};
use v2rdm_core::ued::{intensity_curve, load_diffraction_table};
use v2rdm_core::vqe::{build_ansatz, run_vqe, VqeConfig, VqeResult};

use crate::config::{Command, PipelineConfig};
use crate::output::Outputs;
use crate::pipeline::{self, EnergyRow, Measured};

pub fn run(cmd: Command, cfg: &PipelineConfig, out_dir: &Path) -> Result<PathBuf> {
    cfg.validate_for(cmd)?;
    match cmd {
        Command::Vqe => cmd_vqe(cfg, out_dir),
        Command::Purify => cmd_purify(cfg, out_dir),
        Command::Sweep => cmd_sweep(cfg, out_dir),
        Command::Dissociate => cmd_dissociate(cfg, out_dir),
        Command::Ued => cmd_ued(cfg, out_dir),
        Command::Bounds => cmd_bounds(cfg, out_dir),
    }
}

fn system(cfg: &PipelineConfig, out: &mut Outputs) -> Result<MolecularSystem> {
    let path = &cfg.system.as_ref().context("missing [system]")?.fcidump;
    out.input(path)?;
    pipeline::load_system(path)
}

fn write_rdms(out: &mut Outputs, stem: &str, d1: &Rdm1, d2: &Rdm2, n: usize) -> Result<()> {
    out.text(&format!("{stem}.rdm1"), &rdm1_to_text(d1, n))?;
    out.text(&format!("{stem}.rdm2"), &rdm2_to_text(d2, n))
}

#[derive(Serialize)]
struct VqeRun<'a> {
    config: &'a VqeConfig,
    result: &'a VqeResult,
    rdm_energy: f64,
}

#[derive(Serialize)]
struct VqeJson<'a> {
    system: &'a str,
    r: usize,
    n_electrons: usize,
    fci_oracle: f64,
    noiseless: VqeRun<'a>,
    noisy: Option<VqeRun<'a>>,
}

pub fn cmd_vqe(cfg: &PipelineConfig, out_dir: &Path) -> Result<PathBuf> {
    let mut out = Outputs::create(out_dir)?;
    let sys = system(cfg, &mut out)?;
    let t = Instant::now();
    let stage = pipeline::run_vqe_stage(&sys, cfg)?;
    out.time("vqe", t.elapsed());
    let t = Instant::now();
    let (fci, _) = v2rdm_core::oracle::fci_ground(&sys)?;
    out.time("fci_oracle", t.elapsed());

    let noisy = match (&stage.noisy_config, &stage.noisy) {
        (Some(config), Some(result)) => Some(VqeRun {
            config,
            result,
            rdm_energy: stage.noisy_rdms.energy(&sys)?,
        }),
        _ => None,
    };
    out.json(
        "vqe.json",
        &VqeJson {
            system: &sys.label,
            r: sys.r,
            n_electrons: sys.n_electrons,
            fci_oracle: fci,
            noiseless: VqeRun {
                config: &stage.noiseless_config,
                result: &stage.noiseless,
                rdm_energy: stage.noiseless_rdms.energy(&sys)?,
            },
            noisy,
        },
    )?;
    let n = sys.n_electrons;
    write_rdms(&mut out, "noiseless", &stage.noiseless_rdms.d1, &stage.noiseless_rdms.d2, n)?;
    write_rdms(&mut out, "noisy", &stage.noisy_rdms.d1, &stage.noisy_rdms.d2, n)?;
    out.text("circuit.txt", &stage.circuit.to_text())?;
    out.finish("vqe", cfg)
}

fn write_calibration(out: &mut Outputs, cal: &CalibrationReport) -> Result<()> {
    out.json("calibration.json", cal)?;
    out.csv("substitutions.csv", &cal.substitutions)
}

pub fn cmd_purify(cfg: &PipelineConfig, out_dir: &Path) -> Result<PathBuf> {
    let mut out = Outputs::create(out_dir)?;
    let sys = system(cfg, &mut out)?;
    let t = Instant::now();
    let (noisy, circuit, noisy_energy) = match &cfg.purify {
        Some(p) => {
            out.input(&p.noisy_rdm2)?;
            if let Some(p1) = &p.noisy_rdm1 {
                out.input(p1)?;
            }
            let m = pipeline::load_noisy(&sys, &p.noisy_rdm2, p.noisy_rdm1.as_deref())?;
            let circuit = match &p.circuit {
                Some(c) => {
                    out.input(c)?;
                    Some(read_circuit(c)?)
                }
                None => None,
            };
            let e = m.energy(&sys)?;
            (m, circuit, e)
        }
        None => {
            let stage = pipeline::run_vqe_stage(&sys, cfg)?;
            let e = stage.noisy_rdms.energy(&sys)?;
            (stage.noisy_rdms, Some(stage.circuit), e)
        }
    };
    out.time("noisy_rdm", t.elapsed());

    let delta = match cfg.calibration.delta {
        Some(d) => d,
        None => {
            let t = Instant::now();
            let c = circuit.as_ref().context("calibration needs a circuit")?;
            let cal = pipeline::run_calibration(c, &sys, cfg)?;
            out.time("calibrate", t.elapsed());
            write_calibration(&mut out, &cal)?;
            cal.delta
        }
    };

    let t = Instant::now();
    let refs = pipeline::references(&sys, cfg)?;
    out.time("references", t.elapsed());
    let t = Instant::now();
    let sdp = pipeline::run_purify(&refs.k, &sys, &noisy.d2, delta, cfg)?;
    out.time("purify", t.elapsed());
    if sdp.status == SdpStatus::Infeasible {
        log::warn!("purification infeasible at delta = {delta}");
    }

    out.json("sdp.json", &sdp.report(&cfg.sdp))?;
    write_rdms(&mut out, "corrected", &sdp.d1_corrected, &sdp.d_corrected, sys.n_electrons)?;
    out.csv(
        "energies.csv",
        &[
            EnergyRow {
                method: "noisy-vqe",
                energy: noisy_energy,
            },
            EnergyRow {
                method: "corrected",
                energy: sdp.energy,
            },
            EnergyRow {
                method: "v2rdm",
                energy: refs.v2rdm.energy,
            },
            EnergyRow {
                method: "fci-oracle",
                energy: refs.fci,
            },
        ],
    )?;
    out.finish("purify", cfg)
}

fn read_circuit(path: &Path) -> Result<Circuit> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading circuit {}", path.display()))?;
    Circuit::from_text(&text).with_context(|| format!("parsing circuit {}", path.display()))
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub delta: f64,
    /// Empty when the trust region misses the feasible set.
    pub energy: Option<f64>,
    pub status: SdpStatus,
    pub distance_to_noisy: Option<f64>,
    pub iterations: usize,
    pub noisy_vqe: f64,
    pub v2rdm: f64,
    pub fci_oracle: f64,
}

#[derive(Serialize)]
struct SweepJson {
    noisy_vqe: f64,
    v2rdm: f64,
    fci_oracle: f64,
    calibrated_delta: Option<f64>,
    v2rdm_report: SdpReport,
    points: Vec<SdpReport>,
}

pub fn cmd_sweep(cfg: &PipelineConfig, out_dir: &Path) -> Result<PathBuf> {
    let mut out = Outputs::create(out_dir)?;
    let sys = system(cfg, &mut out)?;
    let grid = cfg.sweep.clone().unwrap_or_default().grid()?;

    let t = Instant::now();
    let stage = pipeline::run_vqe_stage(&sys, cfg)?;
    out.time("vqe", t.elapsed());
    let noisy_energy = stage.noisy_rdms.energy(&sys)?;
    let calibrated = match cfg.calibration.delta {
        Some(d) => Some(d),
        None => {
            let t = Instant::now();
            let cal = pipeline::run_calibration(&stage.circuit, &sys, cfg)?;
            out.time("calibrate", t.elapsed());
            write_calibration(&mut out, &cal)?;
            Some(cal.delta)
        }
    };
    let t = Instant::now();
    let refs = pipeline::references(&sys, cfg)?;
    out.time("references", t.elapsed());

    let t = Instant::now();
    let results = grid
        .par_iter()
        .map(|&d| pipeline::run_purify(&refs.k, &sys, &stage.noisy_rdms.d2, d, cfg))
        .collect::<Result<Vec<_>>>()?;
    out.time("sweep", t.elapsed());

    let rows: Vec<SweepRow> = grid
        .iter()
        .zip(&results)
        .map(|(&delta, r)| SweepRow {
            delta,
            energy: (r.status != SdpStatus::Infeasible).then_some(r.energy),
            status: r.status,
            distance_to_noisy: r.distance_to_noisy,
            iterations: r.iterations,
            noisy_vqe: noisy_energy,
            v2rdm: refs.v2rdm.energy,
            fci_oracle: refs.fci,
        })
        .collect();
    out.csv("sweep.csv", &rows)?;
    out.json(
        "sweep.json",
        &SweepJson {
            noisy_vqe: noisy_energy,
            v2rdm: refs.v2rdm.energy,
            fci_oracle: refs.fci,
            calibrated_delta: calibrated,
            v2rdm_report: refs.v2rdm.report(&cfg.sdp),
            points: results.iter().map(|r| r.report(&cfg.sdp)).collect(),
        },
    )?;
    out.finish("sweep", cfg)
}

#[derive(Clone, Debug, Serialize)]
pub struct DissociationRow {
    pub bond: f64,
    pub fci: f64,
    pub noiseless_vqe: f64,
    pub noisy_vqe: f64,
    pub corrected: f64,
    pub v2rdm: f64,
    pub noiseless_vqe_error: f64,
    pub noisy_vqe_error: f64,
    pub corrected_error: f64,
    pub delta: f64,
    pub status: SdpStatus,
}

pub fn cmd_dissociate(cfg: &PipelineConfig, out_dir: &Path) -> Result<PathBuf> {
    let mut out = Outputs::create(out_dir)?;
    let points = cfg.bond_points()?;
    if let Some(p) = cfg.dissociate.as_ref().and_then(|d| d.provenance.as_ref()) {
        out.input(p)?;
    }
    for p in &points {
        out.input(&p.fcidump)?;
    }

    let t = Instant::now();
    let rows = points
        .par_iter()
        .map(|p| -> Result<DissociationRow> {
            let sys = pipeline::load_system(&p.fcidump)?;
            let res = pipeline::run_point(&sys, cfg).with_context(|| format!("bond length {}", p.bond))?;
            let noisy = res.stage.noisy_rdms.energy(&sys)?;
            let fci = res.refs.fci;
            Ok(DissociationRow {
                bond: p.bond,
                fci,
                noiseless_vqe: res.stage.noiseless.energy,
                noisy_vqe: noisy,
                corrected: res.sdp.energy,
                v2rdm: res.refs.v2rdm.energy,
                noiseless_vqe_error: (res.stage.noiseless.energy - fci).abs(),
                noisy_vqe_error: (noisy - fci).abs(),
                corrected_error: (res.sdp.energy - fci).abs(),
                delta: res.delta,
                status: res.sdp.status,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    out.time("dissociate", t.elapsed());
    out.csv("dissociation.csv", &rows)?;
    out.finish("dissociate", cfg)
}

#[derive(Clone, Debug, Serialize)]
pub struct UedRow {
    pub s: f64,
    pub exact_elastic: f64,
    pub exact_inelastic: f64,
    pub exact_total: f64,
    pub noisy_elastic: f64,
    pub noisy_inelastic: f64,
    pub noisy_total: f64,
    pub purified_elastic: f64,
    pub purified_inelastic: f64,
    pub purified_total: f64,
    pub noisy_error: f64,
    pub purified_error: f64,
}

pub fn cmd_ued(cfg: &PipelineConfig, out_dir: &Path) -> Result<PathBuf> {
    let mut out = Outputs::create(out_dir)?;
    let sys = system(cfg, &mut out)?;
    let table_path = &cfg.ued.as_ref().context("missing [ued]")?.table;
    out.input(table_path)?;
    let table = load_diffraction_table(table_path)?;
    if table.r != sys.r {
        bail!("diffraction table has r = {} but the system has r = {}", table.r, sys.r);
    }

    let t = Instant::now();
    let res = pipeline::run_point(&sys, cfg)?;
    out.time("pipeline", t.elapsed());
    if let Some(cal) = &res.calibration {
        write_calibration(&mut out, cal)?;
    }
    out.json("sdp.json", &res.sdp.report(&cfg.sdp))?;

    let t = Instant::now();
    let curve = |m: &Measured| intensity_curve(&m.d1, &m.d2, &table);
    let exact = curve(&res.refs.fci_rdms)?;
    let noisy = curve(&res.stage.noisy_rdms)?;
    let purified = intensity_curve(&res.sdp.d1_corrected, &res.sdp.d_corrected, &table)?;
    out.time("intensities", t.elapsed());
    let rows: Vec<UedRow> = exact
        .iter()
        .zip(&noisy)
        .zip(&purified)
        .map(|((e, n), p)| UedRow {
            s: e.s,
            exact_elastic: e.elastic,
            exact_inelastic: e.inelastic,
            exact_total: e.total,
            noisy_elastic: n.elastic,
            noisy_inelastic: n.inelastic,
            noisy_total: n.total,
            purified_elastic: p.elastic,
            purified_inelastic: p.inelastic,
            purified_total: p.total,
            noisy_error: (n.total - e.total).abs(),
            purified_error: (p.total - e.total).abs(),
        })
        .collect();
    out.csv("ued.csv", &rows)?;
    out.finish("ued", cfg)
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundsReport {
    pub num_qubits: usize,
    pub single_qubit_gates: usize,
    pub two_qubit_gates: usize,
    pub layer_depths: (usize, usize),
    pub p1: f64,
    pub p2: f64,
    pub theorem1_bound: f64,
    /// Measured 2-RDM error under per-gate local depolarizing noise.
    pub measured_local_delta: f64,
    pub theorem2_delta: f64,
    /// Measured 2-RDM error under per-layer global depolarizing noise.
    pub measured_global_delta: f64,
    pub delta_ref: f64,
}

pub fn bounds_report(circuit: &Circuit, p1: f64, p2: f64) -> Result<BoundsReport> {
    let n = circuit.num_qubits();
    let local = NoiseModel::local(p1, p2);
    let global = NoiseModel::global(p1, p2);
    Ok(BoundsReport {
        num_qubits: n,
        single_qubit_gates: circuit.single_qubit_gate_count(),
        two_qubit_gates: circuit.two_qubit_gate_count(),
        layer_depths: circuit.layer_depths(),
        p1,
        p2,
        theorem1_bound: theorem1_bound_for(circuit, &local)?,
        measured_local_delta: measured_delta(circuit, &local, n, None, 0)?,
        theorem2_delta: theorem2_delta(circuit, p1, p2)?,
        measured_global_delta: measured_delta(circuit, &global, n, None, 0)?,
        delta_ref: delta_ref(circuit, &local, n)?,
    })
}

pub fn cmd_bounds(cfg: &PipelineConfig, out_dir: &Path) -> Result<PathBuf> {
    let mut out = Outputs::create(out_dir)?;
    let t = Instant::now();
    let circuit = match cfg.bounds.as_ref().and_then(|b| b.circuit.as_ref()) {
        Some(path) => {
            out.input(path)?;
            read_circuit(path)?
        }
        None => {
            let sys = system(cfg, &mut out)?;
            let (clean, _) = pipeline::vqe_configs(cfg);
            let res = run_vqe(&sys, &clean)?;
            build_ansatz(&sys, clean.ansatz, &res.params)?
        }
    };
    out.time("circuit", t.elapsed());
    let t = Instant::now();
    let report = bounds_report(&circuit, cfg.noise.p1, cfg.noise.p2)?;
    out.time("bounds", t.elapsed());
    out.json("bounds.json", &report)?;
    out.text("circuit.txt", &circuit.to_text())?;
    out.finish("bounds", cfg)
}
