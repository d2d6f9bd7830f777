use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

/// Schema version of every JSON document the tool writes.
pub const SCHEMA_VERSION: u32 = 1;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum CommandSpec {
    Train,
    Eval { model: PathBuf },
    Latency { model: PathBuf },
    Prbg,
    Verify,
}

impl CommandSpec {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Train => "train",
            Self::Eval { .. } => "eval",
            Self::Latency { .. } => "latency",
            Self::Prbg => "prbg",
            Self::Verify => "verify",
        }
    }

    pub fn manifest_file(&self) -> String {
        format!("{}.manifest.json", self.name())
    }
}

/// A named output file, held in memory until the run is written out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn text(name: impl Into<String>, text: String) -> Self {
        Self { name: name.into(), bytes: text.into_bytes() }
    }

    pub fn json<T: Serialize>(name: impl Into<String>, value: &T) -> Self {
        let mut text = serde_json::to_string_pretty(value).expect("serializable");
        text.push('\n');
        Self::text(name, text)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub artifacts: Vec<Artifact>,
    /// Digests of files read, keyed by role.
    pub inputs: BTreeMap<String, String>,
    /// False when a check failed; the outputs are still written.
    pub success: bool,
    pub summary: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: u32,
    pub tool_version: String,
    pub command: CommandSpec,
    pub seed: u64,
    pub config: RunConfig,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(command: CommandSpec, config: RunConfig, output: &CommandOutput) -> Self {
        Self {
            version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command,
            seed: config.seed,
            config,
            inputs: output.inputs.clone(),
            outputs: output.artifacts.iter().map(|a| (a.name.clone(), sha256_hex(&a.bytes))).collect(),
        }
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("reading manifest {}: {e}", path.display()))?;
        let m: Self = serde_json::from_str(&text)?;
        anyhow::ensure!(m.version == SCHEMA_VERSION, "unsupported manifest version {}", m.version);
        Ok(m)
    }
}

/// Writes every artifact and the manifest into `dir`.
pub fn write_run(dir: &Path, manifest: &RunManifest, output: &CommandOutput) -> anyhow::Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| anyhow::anyhow!("creating {}: {e}", dir.display()))?;
    for a in &output.artifacts {
        let path = dir.join(&a.name);
        std::fs::write(&path, &a.bytes).map_err(|e| anyhow::anyhow!("writing {}: {e}", path.display()))?;
    }
    let path = dir.join(manifest.command.manifest_file());
    std::fs::write(&path, Artifact::json("", manifest).bytes)
        .map_err(|e| anyhow::anyhow!("writing {}: {e}", path.display()))?;
    Ok(path)
}
