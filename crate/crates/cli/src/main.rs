use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use v2rdm_cli::{commands, Command, PipelineConfig};

#[derive(Parser)]
#[command(name = "v2rdm", version, about = "Noise-aware 2-RDM purification pipelines")]
struct Cli {
    /// TOML pipeline config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Overrides `measurement.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for sweep and dissociation points (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Noiseless and noisy VQE with RDM files.
    Vqe,
    /// Calibrate the trust radius and purify the noisy 2-RDM.
    Purify,
    /// Corrected energy over a grid of trust radii.
    Sweep,
    /// Potential energy curve over a list of FCIDUMP files.
    Dissociate,
    /// Diffraction intensities from exact, noisy and purified RDMs.
    Ued,
    /// Local and global noise bounds next to measured RDM errors.
    Bounds,
    /// Print the reference config with every default filled in.
    Defaults,
}

fn run(cli: Cli) -> Result<()> {
    let cmd = match cli.command {
        Sub::Defaults => {
            print!("{}", toml::to_string(&PipelineConfig::reference())?);
            return Ok(());
        }
        Sub::Vqe => Command::Vqe,
        Sub::Purify => Command::Purify,
        Sub::Sweep => Command::Sweep,
        Sub::Dissociate => Command::Dissociate,
        Sub::Ued => Command::Ued,
        Sub::Bounds => Command::Bounds,
    };
    let path = cli.config.context("--config is required")?;
    let mut cfg = PipelineConfig::load(&path)?;
    if let Some(seed) = cli.seed {
        cfg.measurement.seed = seed;
    }
    rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global()?;
    let dir = commands::run(cmd, &cfg, &cli.out_dir)?;
    println!("{}", dir.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
