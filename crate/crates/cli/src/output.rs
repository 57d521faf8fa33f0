//! Output directory writer. Everything except `timing.txt` is a pure
//! function of the config, seeds and input files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::PipelineConfig;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub struct Outputs {
    dir: PathBuf,
    files: Vec<String>,
    inputs: BTreeMap<String, String>,
    timings: Vec<(String, Duration)>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    subcommand: &'a str,
    config_sha256: String,
    seed: u64,
    inputs: &'a BTreeMap<String, String>,
    outputs: &'a [String],
    config: &'a PipelineConfig,
}

impl Outputs {
    pub fn create(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Outputs {
            dir: dir.to_path_buf(),
            files: Vec::new(),
            inputs: BTreeMap::new(),
            timings: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Records an input file's hash for the manifest.
    pub fn input(&mut self, path: &Path) -> Result<()> {
        let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.inputs.insert(path.display().to_string(), sha256_hex(&bytes));
        Ok(())
    }

    pub fn text(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.text(name, &s)
    }

    /// Writes rows of serializable records with a header from the field names.
    pub fn csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("csv buffer: {e}"))?;
        self.text(name, &String::from_utf8(bytes)?)
    }

    pub fn time(&mut self, stage: &str, elapsed: Duration) {
        self.timings.push((stage.to_string(), elapsed));
    }

    /// Writes `manifest.json` and `timing.txt`.
    pub fn finish(mut self, subcommand: &str, cfg: &PipelineConfig) -> Result<PathBuf> {
        let config_text = toml::to_string(cfg)?;
        self.files.sort();
        let manifest = Manifest {
            tool: "v2rdm",
            version: env!("CARGO_PKG_VERSION"),
            subcommand,
            config_sha256: sha256_hex(config_text.as_bytes()),
            seed: cfg.measurement.seed,
            inputs: &self.inputs,
            outputs: &self.files,
            config: cfg,
        };
        let mut s = serde_json::to_string_pretty(&manifest)?;
        s.push('\n');
        std::fs::write(self.dir.join("manifest.json"), s)?;
        let timing: String = self
            .timings
            .iter()
            .map(|(k, d)| format!("{k}\t{:.3}\n", d.as_secs_f64()))
            .collect();
        std::fs::write(self.dir.join("timing.txt"), timing)?;
        Ok(self.dir)
    }
}
