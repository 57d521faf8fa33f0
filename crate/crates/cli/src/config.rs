//! TOML pipeline configuration. Relative paths resolve against the directory
//! holding the config file.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use v2rdm_core::calibrate::DEFAULT_K;
use v2rdm_core::qsim::{NoiseMode, NoiseModel};
use v2rdm_core::sdp::SdpOptions;
use v2rdm_core::vqe::Ansatz;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub system: Option<SystemSection>,
    #[serde(default)]
    pub vqe: VqeSection,
    #[serde(default)]
    pub noise: NoiseSection,
    #[serde(default)]
    pub measurement: MeasurementSection,
    #[serde(default)]
    pub calibration: CalibrationSection,
    #[serde(default)]
    pub sdp: SdpOptions,
    pub purify: Option<PurifySection>,
    pub sweep: Option<SweepSection>,
    pub dissociate: Option<DissociateSection>,
    pub ued: Option<UedSection>,
    pub bounds: Option<BoundsSection>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub fcidump: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VqeSection {
    pub ansatz: Ansatz,
    pub max_iters: usize,
    pub energy_tol: f64,
    /// Nelder-Mead budget for the noisy re-optimization, started from the
    /// noiseless optimum. Zero evaluates the noiseless optimum under noise.
    pub noisy_max_iters: usize,
    pub simplex_step: f64,
}

impl Default for VqeSection {
    fn default() -> Self {
        VqeSection {
            ansatz: Ansatz::Uccsd,
            max_iters: 500,
            energy_tol: 1e-9,
            noisy_max_iters: 20,
            simplex_step: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSection {
    pub p1: f64,
    pub p2: f64,
    pub mode: NoiseMode,
}

impl Default for NoiseSection {
    fn default() -> Self {
        NoiseSection {
            p1: 0.001,
            p2: 0.01,
            mode: NoiseMode::PerGateLocal,
        }
    }
}

impl NoiseSection {
    pub fn model(&self) -> NoiseModel {
        NoiseModel {
            p1: self.p1,
            p2: self.p2,
            mode: self.mode,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeasurementSection {
    /// Shots per Pauli string; absent means exact expectations.
    pub shots: Option<u64>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationSection {
    pub k: f64,
    /// Skips calibration and uses this trust radius (`inf` allowed).
    pub delta: Option<f64>,
}

impl Default for CalibrationSection {
    fn default() -> Self {
        CalibrationSection { k: DEFAULT_K, delta: None }
    }
}

/// Purify a previously measured RDM instead of running VQE.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PurifySection {
    pub noisy_rdm2: PathBuf,
    /// Contracted from the 2-RDM when absent.
    pub noisy_rdm1: Option<PathBuf>,
    /// Circuit to calibrate against; needed unless a delta override is set.
    pub circuit: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    /// Explicit grid; overrides the log grid below.
    pub deltas: Option<Vec<f64>>,
    pub min: f64,
    pub max: f64,
    pub per_decade: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            deltas: None,
            min: 1e-2,
            max: 1e4,
            per_decade: 4,
        }
    }
}

impl SweepSection {
    pub fn grid(&self) -> Result<Vec<f64>> {
        if let Some(d) = &self.deltas {
            if d.is_empty() {
                bail!("sweep.deltas is empty");
            }
            if d.iter().any(|x| !(*x >= 0.0)) {
                bail!("sweep.deltas must be non-negative");
            }
            return Ok(d.clone());
        }
        if !(self.min > 0.0 && self.max >= self.min && self.per_decade > 0) {
            bail!("sweep grid needs 0 < min <= max and per_decade >= 1");
        }
        let (lo, hi) = (self.min.log10(), self.max.log10());
        let steps = ((hi - lo) * self.per_decade as f64).round() as usize;
        Ok((0..=steps)
            .map(|i| if i == steps { self.max } else { 10f64.powf(lo + i as f64 / self.per_decade as f64) })
            .collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BondPoint {
    pub bond: f64,
    pub fcidump: PathBuf,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DissociateSection {
    pub points: Vec<BondPoint>,
    /// Fixture `provenance.json` listing `bond_angstrom` and `file` per point.
    pub provenance: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UedSection {
    pub table: PathBuf,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundsSection {
    /// Circuit text file; defaults to the noiseless VQE circuit of `system`.
    pub circuit: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Vqe,
    Purify,
    Sweep,
    Dissociate,
    Ued,
    Bounds,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Vqe => "vqe",
            Command::Purify => "purify",
            Command::Sweep => "sweep",
            Command::Dissociate => "dissociate",
            Command::Ued => "ued",
            Command::Bounds => "bounds",
        }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: PipelineConfig =
            toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(s) = &mut self.system {
            fix(&mut s.fcidump);
        }
        if let Some(p) = &mut self.purify {
            fix(&mut p.noisy_rdm2);
            p.noisy_rdm1.as_mut().map(fix);
            p.circuit.as_mut().map(fix);
        }
        if let Some(d) = &mut self.dissociate {
            d.points.iter_mut().for_each(|pt| fix(&mut pt.fcidump));
            d.provenance.as_mut().map(fix);
        }
        if let Some(u) = &mut self.ued {
            fix(&mut u.table);
        }
        if let Some(b) = &mut self.bounds {
            b.circuit.as_mut().map(fix);
        }
    }

    /// Checks that the fields `cmd` needs are present and that no other
    /// subcommand's section is.
    pub fn validate_for(&self, cmd: Command) -> Result<()> {
        let sections = [
            (Command::Sweep, self.sweep.is_some()),
            (Command::Dissociate, self.dissociate.is_some()),
            (Command::Ued, self.ued.is_some()),
            (Command::Bounds, self.bounds.is_some()),
        ];
        for (other, present) in sections {
            if present && other != cmd {
                bail!("config has a [{}] section but the subcommand is `{}`", other.name(), cmd.name());
            }
        }
        let needs_system = match cmd {
            Command::Vqe | Command::Sweep | Command::Ued | Command::Purify => true,
            Command::Dissociate => false,
            Command::Bounds => self.bounds.as_ref().and_then(|b| b.circuit.as_ref()).is_none(),
        };
        if needs_system && self.system.is_none() {
            bail!("`{}` needs [system] fcidump = \"...\"", cmd.name());
        }
        if cmd == Command::Ued && self.ued.is_none() {
            bail!("`ued` needs [ued] table = \"...\"");
        }
        if cmd == Command::Dissociate {
            let d = self.dissociate.as_ref().context("`dissociate` needs a [dissociate] section")?;
            if d.points.is_empty() && d.provenance.is_none() {
                bail!("[dissociate] lists no bond lengths");
            }
        }
        if let Some(p) = &self.purify {
            if p.circuit.is_none() && self.calibration.delta.is_none() {
                bail!("[purify] with a noisy RDM file needs either `circuit` or calibration.delta");
            }
        }
        self.noise.model().validate()?;
        self.sdp.validate()?;
        if !(self.calibration.k > 0.0) {
            bail!("calibration.k must be positive");
        }
        if let Some(d) = self.calibration.delta {
            if !(d >= 0.0) {
                bail!("calibration.delta must be >= 0 or inf");
            }
        }
        Ok(())
    }

    /// Bond points from the explicit list followed by the provenance file.
    pub fn bond_points(&self) -> Result<Vec<BondPoint>> {
        let d = self.dissociate.as_ref().context("missing [dissociate]")?;
        let mut out = d.points.clone();
        if let Some(prov) = &d.provenance {
            #[derive(Deserialize)]
            struct P {
                bond_angstrom: f64,
                file: PathBuf,
            }
            #[derive(Deserialize)]
            struct F {
                points: Vec<P>,
            }
            let text = std::fs::read_to_string(prov).with_context(|| format!("reading {}", prov.display()))?;
            let f: F = serde_json::from_str(&text).with_context(|| format!("parsing {}", prov.display()))?;
            let base = prov.parent().unwrap_or(Path::new("."));
            out.extend(f.points.into_iter().map(|p| BondPoint {
                bond: p.bond_angstrom,
                fcidump: base.join(p.file),
            }));
        }
        if out.is_empty() {
            bail!("[dissociate] lists no bond lengths");
        }
        Ok(out)
    }

    /// Fully populated defaults, used as the reference config.
    pub fn reference() -> Self {
        PipelineConfig {
            system: Some(SystemSection {
                fcidump: PathBuf::from("../fixtures/h2/h2_0.735.fcidump"),
            }),
            ..Default::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_has_four_points_per_decade() {
        let g = SweepSection::default().grid().unwrap();
        assert_eq!(g.len(), 25);
        assert_eq!(g[0], 1e-2);
        assert_eq!(*g.last().unwrap(), 1e4);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        let one = SweepSection {
            deltas: Some(vec![0.5]),
            ..Default::default()
        };
        assert_eq!(one.grid().unwrap(), vec![0.5]);
    }

    #[test]
    fn parses_and_validates() {
        let text = r#"
            [system]
            fcidump = "h2.fcidump"
            [vqe]
            ansatz = { kind = "hea", layers = 2 }
            [calibration]
            delta = inf
            [sweep]
            per_decade = 2
        "#;
        let mut cfg: PipelineConfig = toml::from_str(text).unwrap();
        cfg.resolve_paths(Path::new("/base"));
        assert_eq!(cfg.system.as_ref().unwrap().fcidump, PathBuf::from("/base/h2.fcidump"));
        assert_eq!(cfg.vqe.ansatz, Ansatz::Hea { layers: 2 });
        assert_eq!(cfg.calibration.delta, Some(f64::INFINITY));
        cfg.validate_for(Command::Sweep).unwrap();
        assert!(cfg.validate_for(Command::Purify).is_err());
        assert!(toml::from_str::<PipelineConfig>("[nope]\nx = 1").is_err());
    }

    #[test]
    fn reference_round_trips() {
        let r = PipelineConfig::reference();
        let text = toml::to_string(&r).unwrap();
        assert_eq!(toml::from_str::<PipelineConfig>(&text).unwrap(), r);
    }
}
