use std::path::{Path, PathBuf};
use std::process::Output;

use serde_json::Value;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn h2() -> String {
    fixtures().join("h2/h2_0.735.fcidump").display().to_string()
}

fn run(dir: &Path, cmd: &str, config: &str) -> (Output, PathBuf) {
    let cfg = dir.join(format!("{cmd}.toml"));
    std::fs::write(&cfg, config).unwrap();
    let out = dir.join(format!("out_{cmd}"));
    let output = std::process::Command::new(env!("CARGO_BIN_EXE_v2rdm"))
        .args(["--config", cfg.to_str().unwrap(), "--out-dir", out.to_str().unwrap(), cmd])
        .output()
        .unwrap();
    (output, out)
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn energies(dir: &Path) -> Vec<(String, f64)> {
    let mut r = csv::Reader::from_path(dir.join("energies.csv")).unwrap();
    r.deserialize().map(|row| row.unwrap()).collect()
}

#[test]
fn vqe_reaches_fci_and_writes_rdms() {
    let tmp = tempfile::tempdir().unwrap();
    let (o, out) = run(tmp.path(), "vqe", &format!("[system]\nfcidump = {:?}\n", h2()));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rec = json(&out.join("vqe.json"));
    let fci = rec["fci_oracle"].as_f64().unwrap();
    let clean = rec["noiseless"]["result"]["energy"].as_f64().unwrap();
    let noisy = rec["noisy"]["result"]["energy"].as_f64().unwrap();
    assert!((clean - fci).abs() < 1e-6);
    assert!(noisy > clean);
    for f in ["noiseless.rdm1", "noiseless.rdm2", "noisy.rdm1", "noisy.rdm2", "circuit.txt", "manifest.json", "timing.txt"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let manifest = json(&out.join("manifest.json"));
    assert_eq!(manifest["subcommand"], "vqe");
    assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn missing_fcidump_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let (o, _) = run(tmp.path(), "vqe", "[system]\nfcidump = \"nope.fcidump\"\n");
    assert!(!o.status.success());
    let (o, _) = run(tmp.path(), "purify", "[noise]\np1 = 0.0\n");
    assert!(!o.status.success());
}

#[test]
fn purify_from_files_reports_infeasible_and_exits_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let (o, vqe) = run(tmp.path(), "vqe", &format!("[system]\nfcidump = {:?}\n", h2()));
    assert!(o.status.success());
    let cfg = format!(
        "[system]\nfcidump = {:?}\n[calibration]\ndelta = 1e-8\n[purify]\nnoisy_rdm2 = {:?}\n",
        h2(),
        vqe.join("noisy.rdm2").display().to_string()
    );
    let (o, out) = run(tmp.path(), "purify", &cfg);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&out.join("sdp.json"))["status"], "infeasible");
    assert!(!out.join("calibration.json").exists());
}

#[test]
fn huge_radius_matches_unconstrained_solve() {
    let tmp = tempfile::tempdir().unwrap();
    let (o, out) = run(tmp.path(), "purify", &format!("[system]\nfcidump = {:?}\n[calibration]\ndelta = 1e6\n", h2()));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let e = energies(&out);
    let methods: Vec<&str> = e.iter().map(|(m, _)| m.as_str()).collect();
    assert_eq!(methods, ["noisy-vqe", "corrected", "v2rdm", "fci-oracle"]);
    assert!((e[1].1 - e[2].1).abs() < 1e-4);
}

#[test]
fn default_purify_reaches_chemical_accuracy() {
    let tmp = tempfile::tempdir().unwrap();
    let (o, out) = run(tmp.path(), "purify", &format!("[system]\nfcidump = {:?}\n", h2()));
    assert!(o.status.success());
    let e = energies(&out);
    assert!((e[1].1 - e[3].1).abs() <= 1.6e-3);
    let cal = json(&out.join("calibration.json"));
    assert_eq!(cal["delta"].as_f64().unwrap(), 2.0 * cal["delta_ref"].as_f64().unwrap());
    assert!(out.join("substitutions.csv").exists());
}

#[test]
fn single_point_sweep_has_one_row() {
    let tmp = tempfile::tempdir().unwrap();
    let (o, out) = run(tmp.path(), "sweep", &format!("[system]\nfcidump = {:?}\n[sweep]\ndeltas = [0.5]\n", h2()));
    assert!(o.status.success());
    let text = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.starts_with("delta,energy,status,"));
}

#[test]
fn infeasible_sweep_rows_are_flagged() {
    let tmp = tempfile::tempdir().unwrap();
    let (o, out) = run(
        tmp.path(),
        "sweep",
        &format!("[system]\nfcidump = {:?}\n[sweep]\ndeltas = [1e-4, 10.0]\n", h2()),
    );
    assert!(o.status.success());
    let mut r = csv::Reader::from_path(out.join("sweep.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = r.records().map(|x| x.unwrap()).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(&rows[0][2], "infeasible");
    assert_eq!(&rows[0][1], "");
    assert_eq!(&rows[1][2], "optimal");
}

#[test]
fn empty_bond_list_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let (o, _) = run(tmp.path(), "dissociate", "[dissociate]\npoints = []\n");
    assert!(!o.status.success());
}

#[test]
fn explicit_bond_points_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = format!(
        "[[dissociate.points]]\nbond = 0.735\nfcidump = {:?}\n[[dissociate.points]]\nbond = 2.0\nfcidump = {:?}\n",
        h2(),
        fixtures().join("h2/h2_2.000.fcidump").display().to_string()
    );
    let (o, out) = run(tmp.path(), "dissociate", &cfg);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(out.join("dissociation.csv")).unwrap();
    let bonds: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(bonds, ["0.735", "2.0"]);
}

#[test]
fn ued_rejects_mismatched_table() {
    let tmp = tempfile::tempdir().unwrap();
    let lih = fixtures().join("lih/lih_2.800.fcidump").display().to_string();
    let table = fixtures().join("ued/h2_synthetic.ued").display().to_string();
    let (o, _) = run(tmp.path(), "ued", &format!("[system]\nfcidump = {lih:?}\n[ued]\ntable = {table:?}\n"));
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("r = 4"));
}

#[test]
fn noiseless_ued_has_negligible_error() {
    let tmp = tempfile::tempdir().unwrap();
    let table = fixtures().join("ued/h2_synthetic.ued").display().to_string();
    let cfg = format!("[system]\nfcidump = {:?}\n[noise]\np1 = 0.0\np2 = 0.0\n[calibration]\ndelta = 0.0\n[ued]\ntable = {table:?}\n", h2());
    let (o, out) = run(tmp.path(), "ued", &cfg);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut r = csv::Reader::from_path(out.join("ued.csv")).unwrap();
    let headers = r.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let (ne, pe) = (col("noisy_error"), col("purified_error"));
    for row in r.records() {
        let row = row.unwrap();
        assert!(row[ne].parse::<f64>().unwrap() < 1e-5);
        assert!(row[pe].parse::<f64>().unwrap() < 1e-5);
    }
}

#[test]
fn bounds_vanish_without_noise_and_dominate_with_it() {
    let tmp = tempfile::tempdir().unwrap();
    let (o, out) = run(tmp.path(), "bounds", &format!("[system]\nfcidump = {:?}\n[noise]\np1 = 0.0\np2 = 0.0\n[bounds]\n", h2()));
    assert!(o.status.success());
    let b = json(&out.join("bounds.json"));
    for k in ["theorem1_bound", "measured_local_delta", "theorem2_delta", "measured_global_delta", "delta_ref"] {
        assert_eq!(b[k].as_f64().unwrap(), 0.0, "{k}");
    }
    let tmp = tempfile::tempdir().unwrap();
    let (o, out) = run(tmp.path(), "bounds", &format!("[system]\nfcidump = {:?}\n[bounds]\n", h2()));
    assert!(o.status.success());
    let b = json(&out.join("bounds.json"));
    assert!(b["theorem1_bound"].as_f64().unwrap() >= b["measured_local_delta"].as_f64().unwrap());
    assert!((b["theorem2_delta"].as_f64().unwrap() - b["measured_global_delta"].as_f64().unwrap()).abs() < 1e-10);
}

#[test]
fn bounds_from_circuit_file() {
    let tmp = tempfile::tempdir().unwrap();
    let circ = tmp.path().join("c.txt");
    std::fs::write(&circ, "# qubits 3\nH 0\n---\nCX 0 1\n---\nRZ 2 0.4\nRX 1 0.3\n").unwrap();
    let (o, out) = run(tmp.path(), "bounds", &format!("[bounds]\ncircuit = {:?}\n", circ.display().to_string()));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&out.join("bounds.json"))["num_qubits"], 3);
}

#[test]
fn foreign_sections_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let table = fixtures().join("ued/h2_synthetic.ued").display().to_string();
    let (o, _) = run(tmp.path(), "vqe", &format!("[system]\nfcidump = {:?}\n[ued]\ntable = {table:?}\n", h2()));
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("[ued]"));
}

#[test]
fn defaults_print_a_loadable_config() {
    let o = std::process::Command::new(env!("CARGO_BIN_EXE_v2rdm")).arg("defaults").output().unwrap();
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let committed = std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/reference.toml")).unwrap();
    assert_eq!(text, committed, "configs/reference.toml is stale; regenerate with `v2rdm defaults`");
}
