//! End-to-end acceptance suite. Runs every criterion in order, prints one
//! PASS/FAIL line each and exits nonzero if any failed.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use v2rdm_cli::config::{DissociateSection, SweepSection, SystemSection, UedSection};
use v2rdm_cli::{commands, Command, PipelineConfig};
use v2rdm_core::calibrate::{calibrate, delta_ref, measured_delta, theorem1_bound_for, theorem2_delta, CalibrationOptions};
use v2rdm_core::hamiltonian::{build_reduced_hamiltonian, energy_from_rdms, read_fcidump, MolecularSystem};
use v2rdm_core::oracle::{apply_ladders, dense_hamiltonian, exact_rdms, fci_ground, naive_intensity};
use v2rdm_core::qsim::{build_uccsd, Circuit, Gate, NoiseModel, QuantumState};
use v2rdm_core::rdm::{build_g, build_q, check_nrep, RdmPlan};
use v2rdm_core::sdp::{v2rdm_ground, SdpOptions};
use v2rdm_core::ued::{elastic_intensity, inelastic_intensity, load_diffraction_table};
use v2rdm_core::vqe::{initial_params, Ansatz};
use v2rdm_core::Complex64;

type Outcome = Result<String, String>;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

#[derive(Deserialize)]
struct Point {
    bond_angstrom: f64,
    file: String,
}

#[derive(Deserialize)]
struct Provenance {
    points: Vec<Point>,
}

fn geometries(molecule: &str) -> Vec<(f64, PathBuf)> {
    let dir = fixtures().join(molecule);
    let text = std::fs::read_to_string(dir.join("provenance.json")).unwrap();
    let prov: Provenance = serde_json::from_str(&text).unwrap();
    prov.points.into_iter().map(|p| (p.bond_angstrom, dir.join(p.file))).collect()
}

fn fcidump(molecule: &str, bond: &str) -> PathBuf {
    fixtures().join(molecule).join(format!("{molecule}_{bond}.fcidump"))
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    format!("{e:#}")
}

fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, String> {
    let mut r = csv::Reader::from_path(path).map_err(err)?;
    r.deserialize().collect::<Result<Vec<T>, _>>().map_err(err)
}

/// Random Hamiltonian on `norb` spatial orbitals with full 8-fold symmetry.
fn random_system(norb: usize, n: usize, rng: &mut ChaCha8Rng) -> MolecularSystem {
    let mut h1 = DMatrix::zeros(norb, norb);
    for i in 0..norb {
        for j in 0..=i {
            let v = rng.random_range(-1.0..1.0);
            h1[(i, j)] = v;
            h1[(j, i)] = v;
        }
    }
    let mut eri = vec![0.0; norb.pow(4)];
    let idx = |a: usize, b: usize, c: usize, d: usize| ((a * norb + b) * norb + c) * norb + d;
    for i in 0..norb {
        for j in 0..norb {
            for k in 0..norb {
                for l in 0..norb {
                    if eri[idx(i, j, k, l)] != 0.0 {
                        continue;
                    }
                    let v = rng.random_range(-0.5..0.5);
                    for (a, b, c, d) in [(i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k), (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i)] {
                        eri[idx(a, b, c, d)] = v;
                    }
                }
            }
        }
    }
    MolecularSystem::from_spatial("random", norb, n, &h1, &eri, rng.random_range(0.0..2.0)).unwrap()
}

/// Normalized random amplitudes supported on `n`-electron determinants.
fn random_sector_state(r: usize, n: usize, rng: &mut ChaCha8Rng) -> QuantumState {
    let amps = (0..1usize << r)
        .map(|j| {
            if j.count_ones() as usize == n {
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    QuantumState::from_amplitudes(amps).unwrap()
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst_rdm: f64 = 0.0;
    let mut worst_k: f64 = 0.0;
    for i in 0..200 {
        let norb = if i % 2 == 0 { 2 } else { 3 };
        let r = 2 * norb;
        let n = rng.random_range(2..r);
        let sys = random_system(norb, n, &mut rng);
        let psi = random_sector_state(r, n, &mut rng);
        let h = dense_hamiltonian(&sys).map_err(err)?.map(|x| Complex64::new(x, 0.0));
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes().unwrap());
        let dense = (v.adjoint() * &h * &v)[(0, 0)].re;
        let (d1, d2) = RdmPlan::new(r).map_err(err)?.measure(&psi, None, 0).map_err(err)?;
        let e_rdm = energy_from_rdms(&d1, &d2, &sys).map_err(err)?;
        let e_k = build_reduced_hamiltonian(&sys).map_err(err)?.energy(&d2).map_err(err)?;
        worst_rdm = worst_rdm.max((e_rdm - dense).abs());
        worst_k = worst_k.max((e_k - dense).abs());
    }
    ensure(worst_rdm <= 1e-9, format!("RDM energy off by {worst_rdm:.2e}"))?;
    ensure(worst_k <= 1e-9, format!("Tr(K D) + H_n off by {worst_k:.2e}"))?;
    Ok(format!("200 states, max |dE| {worst_rdm:.1e} (RDM), {worst_k:.1e} (K)"))
}

fn criterion_2() -> Outcome {
    let mut count = 0;
    let mut worst_eig = f64::INFINITY;
    let mut worst_res: f64 = 0.0;
    for mol in ["h2", "lih", "h4"] {
        for (bond, path) in geometries(mol) {
            let sys = read_fcidump(&path).map_err(err)?;
            let (_, psi) = fci_ground(&sys).map_err(err)?;
            let state = QuantumState::from_amplitudes(psi.as_slice().to_vec()).map_err(err)?;
            let (d1, d2) = exact_rdms(&state, sys.r).map_err(err)?;
            let rep = check_nrep(&d1, &d2, sys.n_electrons, 1e-8).map_err(err)?;
            let min_eig = rep.min_eig_d.min(rep.min_eig_q).min(rep.min_eig_g);
            ensure(rep.pass, format!("{mol} {bond}: check_nrep failed, worst {:.2e}", rep.worst()))?;
            ensure(min_eig >= -1e-9, format!("{mol} {bond}: min eigenvalue {min_eig:.2e}"))?;
            worst_eig = worst_eig.min(min_eig);
            worst_res = worst_res.max(rep.worst());
            count += 1;
        }
    }
    Ok(format!("{count} geometries, worst residual {worst_res:.1e}, min eigenvalue {worst_eig:.1e}"))
}

/// `<psi| ops |psi>` by explicit ladder action on bitstrings.
fn ladder_expectation(amps: &[Complex64], ops: &[(usize, bool)]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, aj) in amps.iter().enumerate() {
        if let Some((k, s)) = apply_ladders(ops, j) {
            acc += amps[k].conj() * aj * s;
        }
    }
    acc
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let r = [4, 5, 6][i % 3];
        let amps: Vec<Complex64> = (0..1usize << r)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let psi = QuantumState::from_amplitudes(amps).map_err(err)?;
        let a = psi.amplitudes().unwrap();
        let (d1, d2) = RdmPlan::new(r).map_err(err)?.measure(&psi, None, 0).map_err(err)?;
        let q = build_q(&d2, &d1, r, 0).map_err(err)?;
        let g = build_g(&d2, &d1, r).map_err(err)?;
        for p in 0..r {
            for s in 0..r {
                for x in 0..r {
                    for y in 0..r {
                        let (row, col) = (p * r + s, x * r + y);
                        let q_direct = ladder_expectation(a, &[(p, false), (s, false), (y, true), (x, true)]);
                        let g_direct = ladder_expectation(a, &[(p, true), (s, false), (y, true), (x, false)]);
                        worst = worst.max((q[(row, col)] - q_direct).norm());
                        worst = worst.max((g[(row, col)] - g_direct).norm());
                    }
                }
            }
        }
    }
    ensure(worst <= 1e-10, format!("max deviation {worst:.2e}"))?;
    Ok(format!("100 states, max |dQ|,|dG| {worst:.1e}"))
}

fn criterion_4() -> Outcome {
    let opts = SdpOptions::default();
    let mut count = 0;
    let mut worst_above = f64::NEG_INFINITY;
    let mut worst_h2_below: f64 = 0.0;
    for mol in ["h2", "lih", "h4"] {
        for (bond, path) in geometries(mol) {
            let sys = read_fcidump(&path).map_err(err)?;
            let (fci, _) = fci_ground(&sys).map_err(err)?;
            let k = build_reduced_hamiltonian(&sys).map_err(err)?;
            let res = v2rdm_ground(&k, sys.n_electrons, &opts).map_err(err)?;
            let gap = res.energy - fci;
            ensure(gap <= 1e-6, format!("{mol} {bond}: v2RDM {:.8} above FCI {fci:.8}", res.energy))?;
            if mol == "h2" {
                ensure(gap >= -0.05, format!("h2 {bond}: v2RDM {gap:.3e} below FCI"))?;
                worst_h2_below = worst_h2_below.min(gap);
            }
            worst_above = worst_above.max(gap);
            count += 1;
        }
    }
    Ok(format!("{count} geometries, max E - FCI {worst_above:.1e}, H2 min {worst_h2_below:.1e}"))
}

fn base_config() -> PipelineConfig {
    PipelineConfig::default()
}

#[derive(Deserialize)]
struct SweepCsv {
    delta: f64,
    energy: Option<f64>,
    status: String,
    fci_oracle: f64,
    v2rdm: f64,
}

fn criterion_5(tmp: &Path) -> Outcome {
    let cfg = PipelineConfig {
        system: Some(SystemSection {
            fcidump: fcidump("lih", "2.800"),
        }),
        sweep: Some(SweepSection::default()),
        ..base_config()
    };
    let dir = commands::run(Command::Sweep, &cfg, &tmp.join("c5")).map_err(err)?;
    let rows: Vec<SweepCsv> = read_csv(&dir.join("sweep.csv"))?;
    ensure(rows.len() == 25, format!("expected 25 grid rows, got {}", rows.len()))?;
    ensure(
        (rows[0].delta - 1e-2).abs() < 1e-12 && (rows[24].delta - 1e4).abs() < 1e-8,
        "grid does not span [1e-2, 1e4]",
    )?;
    let feasible: Vec<&SweepCsv> = rows.iter().filter(|r| r.status != "infeasible").collect();
    ensure(!feasible.is_empty(), "no feasible rows")?;
    ensure(feasible.iter().all(|r| r.status == "optimal"), "a feasible row did not converge")?;
    let flagged = rows.len() - feasible.len();
    let energies: Vec<f64> = feasible.iter().map(|r| r.energy.unwrap()).collect();
    for w in energies.windows(2) {
        ensure(w[1] <= w[0] + 1e-6, format!("energy rose from {:.8} to {:.8}", w[0], w[1]))?;
    }
    let fci = rows[0].fci_oracle;
    let first = energies[0];
    let last = *energies.last().unwrap();
    ensure(first > fci, format!("first feasible energy {first:.6} not above FCI {fci:.6}"))?;
    let v2 = rows[0].v2rdm;
    ensure((last - v2).abs() <= 1e-4, format!("final energy {last:.8} vs unconstrained {v2:.8}"))?;
    Ok(format!(
        "{} feasible rows monotone, {flagged} flagged infeasible, first {:+.2e} above FCI, end - unconstrained {:.1e}",
        feasible.len(),
        first - fci,
        last - v2
    ))
}

#[derive(Deserialize)]
struct DissociationCsv {
    bond: f64,
    noisy_vqe_error: f64,
    corrected_error: f64,
}

fn dissociate(molecule: &str, tmp: &Path) -> Result<Vec<DissociationCsv>, String> {
    let cfg = PipelineConfig {
        dissociate: Some(DissociateSection {
            points: Vec::new(),
            provenance: Some(fixtures().join(molecule).join("provenance.json")),
        }),
        ..base_config()
    };
    let dir = commands::run(Command::Dissociate, &cfg, &tmp.join(format!("c6_{molecule}"))).map_err(err)?;
    read_csv(&dir.join("dissociation.csv"))
}

fn criterion_6(tmp: &Path) -> Outcome {
    let h2 = dissociate("h2", tmp)?;
    ensure(h2.len() == 12, format!("expected 12 H2 points, got {}", h2.len()))?;
    let good = h2.iter().filter(|r| r.corrected_error <= 1.6e-3).count();
    ensure(
        good as f64 >= 0.9 * h2.len() as f64,
        format!("H2 chemical accuracy at {good}/{} points", h2.len()),
    )?;
    let mut summary = vec![format!("H2 {good}/12 within 1.6e-3")];
    for mol in ["lih", "h4"] {
        let rows = dissociate(mol, tmp)?;
        for r in &rows {
            ensure(
                r.corrected_error <= r.noisy_vqe_error,
                format!("{mol} {}: corrected {:.3e} > noisy {:.3e}", r.bond, r.corrected_error, r.noisy_vqe_error),
            )?;
        }
        let worst = rows.iter().map(|r| r.corrected_error).fold(0.0, f64::max);
        summary.push(format!("{mol} {} points improved (max err {worst:.1e})", rows.len()));
    }
    Ok(summary.join(", "))
}

fn random_layered_circuit(rng: &mut ChaCha8Rng) -> Circuit {
    let n = rng.random_range(2..=6);
    let mut c = Circuit::new(n).unwrap();
    let layers = rng.random_range(2..=8);
    for _ in 0..layers {
        if rng.random_bool(0.5) {
            let gates = (0..n)
                .map(|q| match rng.random_range(0..5) {
                    0 => Gate::h(q),
                    1 => Gate::s(q),
                    2 => Gate::rx(q, rng.random_range(-3.0..3.0)),
                    3 => Gate::ry(q, rng.random_range(-3.0..3.0)),
                    _ => Gate::rz(q, rng.random_range(-3.0..3.0)),
                })
                .collect();
            c.push_layer(gates).unwrap();
        } else {
            let mut qubits: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                qubits.swap(i, rng.random_range(0..=i));
            }
            let gates = qubits
                .chunks_exact(2)
                .map(|p| match rng.random_range(0..3) {
                    0 => Gate::cx(p[0], p[1]),
                    1 => Gate::cz(p[0], p[1]),
                    _ => Gate::rzz(p[0], p[1], rng.random_range(-3.0..3.0)),
                })
                .collect();
            c.push_layer(gates).unwrap();
        }
    }
    c
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut worst_eq: f64 = 0.0;
    let mut min_slack = f64::INFINITY;
    for i in 0..50 {
        let c = random_layered_circuit(&mut rng);
        let n = c.num_qubits();
        let (p1, p2) = (rng.random_range(0.0..0.05), rng.random_range(0.0..0.1));
        let closed = theorem2_delta(&c, p1, p2).map_err(err)?;
        let simulated = measured_delta(&c, &NoiseModel::global(p1, p2), n, None, 0).map_err(err)?;
        worst_eq = worst_eq.max((closed - simulated).abs());
        ensure((closed - simulated).abs() <= 1e-10, format!("circuit {i}: closed form {closed} vs simulation {simulated}"))?;
        let local = NoiseModel::local(p1, p2);
        let bound = theorem1_bound_for(&c, &local).map_err(err)?;
        let measured = measured_delta(&c, &local, n, None, 0).map_err(err)?;
        ensure(bound >= measured, format!("circuit {i}: local bound {bound} < measured {measured}"))?;
        min_slack = min_slack.min(bound - measured);
    }
    Ok(format!("50 circuits, max |closed - simulated| {worst_eq:.1e}, min bound slack {min_slack:.2e}"))
}

fn criterion_8() -> Outcome {
    let mut checked = 0;
    for (mol, bond) in [("h2", "0.735"), ("h2", "2.000"), ("lih", "2.800")] {
        let sys = read_fcidump(fcidump(mol, bond)).map_err(err)?;
        let params = initial_params(&sys, Ansatz::Uccsd, 0);
        let params: Vec<f64> = params.iter().enumerate().map(|(i, p)| p + 0.1 * (i as f64 + 1.0)).collect();
        let circuit = build_uccsd(&sys, &params).map_err(err)?;
        let zero = delta_ref(&circuit, &NoiseModel::local(0.0, 0.0), sys.r).map_err(err)?;
        ensure(zero == 0.0, format!("{mol} {bond}: zero-noise baseline {zero}"))?;
        let mut prev = zero;
        for p2 in [0.001, 0.005, 0.01, 0.02, 0.05] {
            let d = delta_ref(&circuit, &NoiseModel::local(0.001, p2), sys.r).map_err(err)?;
            ensure(d > prev, format!("{mol} {bond}: baseline {d} at p2 = {p2} not above {prev}"))?;
            prev = d;
        }
        let opts = CalibrationOptions::default();
        let noise = NoiseModel::local(0.001, 0.01);
        let a = serde_json::to_string(&calibrate(&circuit, &noise, sys.r, &opts).map_err(err)?).map_err(err)?;
        let b = serde_json::to_string(&calibrate(&circuit, &noise, sys.r, &opts).map_err(err)?).map_err(err)?;
        ensure(a == b, format!("{mol} {bond}: calibration reports differ"))?;
        checked += 1;
    }
    Ok(format!("{checked} circuits: zero at p = 0, increasing over 5 p2 values, reports identical"))
}

#[derive(Deserialize)]
struct UedCsv {
    noisy_error: f64,
    purified_error: f64,
}

fn criterion_9(tmp: &Path) -> Outcome {
    let table_path = fixtures().join("ued/h2_synthetic.ued");
    let cfg = PipelineConfig {
        system: Some(SystemSection {
            fcidump: fcidump("h2", "0.735"),
        }),
        ued: Some(UedSection {
            table: table_path.clone(),
        }),
        ..base_config()
    };
    let dir = commands::run(Command::Ued, &cfg, &tmp.join("c9")).map_err(err)?;
    let rows: Vec<UedCsv> = read_csv(&dir.join("ued.csv"))?;
    let better = rows.iter().filter(|r| r.purified_error <= r.noisy_error).count();
    ensure(
        better as f64 >= 0.8 * rows.len() as f64,
        format!("purified no worse at only {better}/{} s-points", rows.len()),
    )?;

    // Intensity kernels against literal summation, on random and physical RDMs.
    let table = load_diffraction_table(&table_path).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mut worst: f64 = 0.0;
    for i in 0..10 {
        let psi = if i == 0 {
            let sys = read_fcidump(fcidump("h2", "0.735")).map_err(err)?;
            QuantumState::from_amplitudes(fci_ground(&sys).map_err(err)?.1.as_slice().to_vec()).map_err(err)?
        } else {
            random_sector_state(4, 2, &mut rng)
        };
        let (d1, d2) = exact_rdms(&psi, 4).map_err(err)?;
        for s in &table.matrices {
            let (el, inel) = naive_intensity(&d1, &d2, s, table.c_n, table.n_e);
            let e = elastic_intensity(&d1, s, table.c_n).map_err(err)?;
            let ie = inelastic_intensity(&d1, &d2, s, table.n_e).map_err(err)?;
            worst = worst.max((e - el).abs()).max((ie - inel).abs());
        }
    }
    ensure(worst <= 1e-10, format!("intensity kernels deviate from literal sums by {worst:.2e}"))?;
    Ok(format!("purified no worse at {better}/{} s-points, kernel deviation {worst:.1e}", rows.len()))
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

/// Bytes of every CSV and JSON file in `dir`, sorted by name.
fn artifacts(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| matches!(p.extension().and_then(|e| e.to_str()), Some("csv" | "json")))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    out.sort();
    out
}

fn criterion_10(tmp: &Path) -> Outcome {
    let fx = fixtures();
    let h2 = fx.join("h2/h2_0.735.fcidump");
    let system = format!("[system]\nfcidump = {:?}\n", h2.display().to_string());
    let configs = [
        ("vqe", format!("{system}[measurement]\nshots = 10000\nseed = 7\n")),
        ("purify", system.clone()),
        ("sweep", format!("{system}[sweep]\ndeltas = [0.01, 0.5, 1.0, 10.0]\n")),
        (
            "dissociate",
            format!("[dissociate]\nprovenance = {:?}\n", fx.join("h2/provenance.json").display().to_string()),
        ),
        (
            "ued",
            format!("{system}[ued]\ntable = {:?}\n", fx.join("ued/h2_synthetic.ued").display().to_string()),
        ),
        ("bounds", format!("{system}[bounds]\n")),
    ];
    let bin = env!("CARGO_BIN_EXE_v2rdm");
    let mut files = 0;
    for (cmd, body) in &configs {
        let cfg = write_config(tmp, &format!("c10_{cmd}.toml"), body);
        let mut runs = Vec::new();
        for run in 0..2 {
            let out = tmp.join(format!("c10_{cmd}_{run}"));
            let status = std::process::Command::new(bin)
                .args(["--config", cfg.to_str().unwrap(), "--out-dir", out.to_str().unwrap(), "--threads", "1", cmd])
                .output()
                .map_err(err)?;
            ensure(
                status.status.success(),
                format!("{cmd} exited with {}: {}", status.status, String::from_utf8_lossy(&status.stderr)),
            )?;
            runs.push(artifacts(&out));
        }
        ensure(!runs[0].is_empty(), format!("{cmd} wrote no CSV/JSON"))?;
        ensure(runs[0] == runs[1], format!("{cmd}: outputs differ between runs"))?;
        files += runs[0].len();
    }
    Ok(format!("6 subcommands, {files} CSV/JSON files byte-identical across runs"))
}

fn main() -> ExitCode {
    let tmp = tempfile::tempdir().expect("temp dir");
    let t = tmp.path();
    let criteria: Vec<(&str, Duration, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("energy identity", Duration::from_secs(60), Box::new(criterion_1)),
        ("exact-state N-representability", Duration::from_secs(60), Box::new(criterion_2)),
        ("Q/G oracle equivalence", Duration::from_secs(120), Box::new(criterion_3)),
        ("v2RDM lower bound", Duration::from_secs(600), Box::new(criterion_4)),
        ("trust-radius sweep monotonicity", Duration::from_secs(900), Box::new(|| criterion_5(t))),
        ("dissociation accuracy", Duration::from_secs(1800), Box::new(|| criterion_6(t))),
        ("noise bounds", Duration::from_secs(300), Box::new(criterion_7)),
        ("calibration sanity", Duration::from_secs(600), Box::new(criterion_8)),
        ("diffraction denoising", Duration::from_secs(120), Box::new(|| criterion_9(t))),
        ("determinism", Duration::from_secs(1800), Box::new(|| criterion_10(t))),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let result = result.and_then(|msg| {
            if elapsed <= *budget {
                Ok(msg)
            } else {
                Err(format!("{msg}; took {elapsed:.1?}, budget {budget:?}"))
            }
        });
        match result {
            Ok(msg) => println!("criterion {:>2} PASS  {name}: {msg} [{:.1?}]", i + 1, elapsed),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {msg} [{:.1?}]", i + 1, elapsed);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
