//! Experiment drivers behind the `tmsim` command line.
//!
//! Each command computes its outputs in memory ([`CommandOutput`]) and
//! [`run`] writes them, together with a [`RunManifest`], in one pass at the
//! end. [`replay`] re-executes a manifest and compares output digests.

pub mod config;
pub mod dataset;
pub mod latency;
pub mod learn;
pub mod manifest;
pub mod prbg;
pub mod verify;

use std::path::{Path, PathBuf};

use serde::Serialize;

pub use config::{Overrides, RunConfig};
pub use dataset::{load_dataset, Dataset, DatasetError};
pub use manifest::{sha256_hex, Artifact, CommandOutput, CommandSpec, RunManifest};

/// Computes a command's outputs without touching the output directory.
pub fn execute(spec: &CommandSpec, cfg: &RunConfig) -> anyhow::Result<CommandOutput> {
    Ok(match spec {
        CommandSpec::Train => learn::train(cfg)?.0,
        CommandSpec::Eval { model } => learn::eval(cfg, model)?.0,
        CommandSpec::Latency { model } => latency::latency(cfg, model)?.0,
        CommandSpec::Prbg => prbg::prbg(cfg)?.0,
        CommandSpec::Verify => verify::verify(cfg)?.0,
    })
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub manifest_path: PathBuf,
    pub manifest: RunManifest,
    pub output: CommandOutput,
}

/// Executes `spec` and writes its outputs and manifest into `cfg.out_dir`.
pub fn run(spec: &CommandSpec, cfg: &RunConfig) -> anyhow::Result<RunRecord> {
    let output = execute(spec, cfg)?;
    let manifest = RunManifest::new(spec.clone(), cfg.clone(), &output);
    let manifest_path = manifest::write_run(&cfg.out_dir, &manifest, &output)?;
    Ok(RunRecord { manifest_path, manifest, output })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileCheck {
    pub name: String,
    pub expected: String,
    pub actual: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReplayReport {
    pub identical: bool,
    pub out_dir: PathBuf,
    pub files: Vec<FileCheck>,
}

/// Re-runs the command recorded in `manifest_path`, writing into `out_dir`
/// (the recorded directory when `None`), and compares every output digest.
pub fn replay(manifest_path: &Path, out_dir: Option<&Path>) -> anyhow::Result<ReplayReport> {
    let recorded = RunManifest::load(manifest_path)?;
    let mut cfg = recorded.config.clone();
    if let Some(dir) = out_dir {
        cfg.out_dir = dir.to_path_buf();
    }
    let output = execute(&recorded.command, &cfg)?;
    let manifest = RunManifest::new(recorded.command.clone(), cfg.clone(), &output);
    manifest::write_run(&cfg.out_dir, &manifest, &output)?;
    let files: Vec<FileCheck> = recorded
        .outputs
        .iter()
        .map(|(name, expected)| FileCheck {
            name: name.clone(),
            expected: expected.clone(),
            actual: manifest.outputs.get(name).cloned(),
        })
        .collect();
    let identical = manifest.outputs.len() == recorded.outputs.len()
        && files.iter().all(|f| f.actual.as_deref() == Some(f.expected.as_str()));
    Ok(ReplayReport { identical, out_dir: cfg.out_dir, files })
}
