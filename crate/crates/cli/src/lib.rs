//! Config-driven pipelines around `v2rdm-core`: VQE, calibrated purification,
//! trust-radius sweeps, dissociation curves, diffraction signals and error
//! bounds.

pub mod commands;
pub mod config;
pub mod output;
pub mod pipeline;

pub use config::{Command, PipelineConfig};
