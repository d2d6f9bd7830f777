//! Run configuration: built-in defaults, overlaid by a TOML file, overlaid
//! by command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tmsim_core::{EmptyClauseMode, Fb2Polarity, SkipPolicy, TmConfig};
use tmsim_drsim::{Combiner, DelayModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Drives the split, the sample order and the random bit source.
    pub seed: u64,
    pub out_dir: PathBuf,
    pub dataset: DatasetConfig,
    pub machine: MachineConfig,
    pub train: TrainConfig,
    pub latency: LatencyConfig,
    pub prbg: PrbgConfig,
    pub verify: VerifyConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            out_dir: PathBuf::from("out"),
            dataset: DatasetConfig::default(),
            machine: MachineConfig::default(),
            train: TrainConfig::default(),
            latency: LatencyConfig::default(),
            prbg: PrbgConfig::default(),
            verify: VerifyConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetConfig {
    pub path: PathBuf,
    /// Zero-based; the last column when absent.
    pub label_column: Option<usize>,
    pub target_class: i64,
    pub test_fraction: f64,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        Self { path: PathBuf::from("data/iris_binary.txt"), label_column: None, target_class: 0, test_fraction: 0.2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RngSource {
    #[default]
    Ideal,
    /// Ring-oscillator model with the default tap set for the threshold.
    Prbg,
}

impl std::str::FromStr for RngSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ideal" => Ok(Self::Ideal),
            "prbg" => Ok(Self::Prbg),
            other => Err(format!("unknown rng source `{other}` (expected ideal|prbg)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MachineConfig {
    pub num_clauses: usize,
    pub threshold: u32,
    pub specificity: f64,
    pub state_depth: usize,
    pub d_period: u64,
    pub skip_policy: SkipPolicy,
    pub fb2_polarity: Fb2Polarity,
    pub empty_clause_mode: EmptyClauseMode,
    pub shuffle: bool,
    pub rng_source: RngSource,
}

impl Default for MachineConfig {
    fn default() -> Self {
        let tm = TmConfig::default();
        Self {
            num_clauses: tm.num_clauses,
            threshold: tm.threshold,
            specificity: tm.specificity,
            state_depth: tm.state_depth,
            d_period: tm.d_period,
            skip_policy: tm.skip_policy,
            fb2_polarity: tm.fb2_polarity,
            empty_clause_mode: tm.empty_clause_mode,
            shuffle: tm.shuffle,
            rng_source: RngSource::Ideal,
        }
    }
}

impl MachineConfig {
    pub fn tm_config(&self, num_features: usize, seed: u64) -> TmConfig {
        TmConfig {
            num_features,
            num_clauses: self.num_clauses,
            threshold: self.threshold,
            specificity: self.specificity,
            state_depth: self.state_depth,
            d_period: self.d_period,
            skip_policy: self.skip_policy,
            seed,
            empty_clause_mode: self.empty_clause_mode,
            fb2_polarity: self.fb2_polarity,
            shuffle: self.shuffle,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: u64,
    pub snapshot_epochs: Vec<u64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { epochs: 50, snapshot_epochs: vec![0, 4, 50] }
    }
}

/// Which samples the latency experiment simulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleSet {
    #[default]
    All,
    Train,
    Test,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatencyConfig {
    /// TOML or JSON file with gate delays; loaded into `delays` at resolve time.
    pub delay_table: Option<PathBuf>,
    pub delays: DelayModel,
    pub combiner: Combiner,
    pub bins: usize,
    pub samples: SampleSet,
}

impl Default for LatencyConfig {
    fn default() -> Self {
        Self {
            delay_table: None,
            delays: DelayModel::unit(),
            combiner: Combiner::default(),
            bins: 20,
            samples: SampleSet::All,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PrbgConfig {
    pub duties: Vec<f64>,
    pub samples: usize,
    pub period: f64,
    /// Request spacing of the power-gating experiment, in periods.
    pub gated_request_step: f64,
    pub gated_cycles: usize,
    pub lfsr_seed: u8,
}

impl Default for PrbgConfig {
    fn default() -> Self {
        Self {
            duties: vec![0.25, 0.5, 0.75],
            samples: 100_000,
            period: 1.0,
            gated_request_step: 3.0,
            gated_cycles: 20_000,
            lfsr_seed: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyTarget {
    FbTables,
    TaEquivalence,
    Stg,
}

impl VerifyTarget {
    pub const ALL: [VerifyTarget; 3] = [Self::FbTables, Self::TaEquivalence, Self::Stg];
}

impl std::str::FromStr for VerifyTarget {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fb-tables" => Ok(Self::FbTables),
            "ta-equivalence" => Ok(Self::TaEquivalence),
            "stg" => Ok(Self::Stg),
            other => Err(format!("unknown verify target `{other}` (expected fb-tables|ta-equivalence|stg)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub targets: Vec<VerifyTarget>,
    pub states_per_action: usize,
    pub max_sequence_len: usize,
    pub reachability_bound: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { targets: VerifyTarget::ALL.to_vec(), states_per_action: 3, max_sequence_len: 12, reachability_bound: 1_000_000 }
    }
}

/// Flag values that override the file; `None` leaves the setting alone.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub epochs: Option<u64>,
    pub snapshot_epochs: Option<Vec<u64>>,
    pub d_period: Option<u64>,
    pub fb2_polarity: Option<Fb2Polarity>,
    pub delay_table: Option<PathBuf>,
    pub target_class: Option<i64>,
    pub out_dir: Option<PathBuf>,
    pub dataset: Option<PathBuf>,
    pub rng_source: Option<RngSource>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Defaults, then `file`, then `overrides`; a delay table is loaded last.
    pub fn resolve(file: Option<&Path>, overrides: &Overrides) -> anyhow::Result<Self> {
        let mut cfg = match file {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| anyhow::anyhow!("reading config {}: {e}", p.display()))?;
                Self::from_toml(&text).map_err(|e| anyhow::anyhow!("config {}: {e}", p.display()))?
            }
            None => Self::default(),
        };
        cfg.apply(overrides);
        if let Some(path) = cfg.latency.delay_table.clone() {
            cfg.latency.delays = load_delay_table(&path)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.epochs {
            self.train.epochs = v;
        }
        if let Some(v) = &o.snapshot_epochs {
            self.train.snapshot_epochs = v.clone();
        }
        if let Some(v) = o.d_period {
            self.machine.d_period = v;
        }
        if let Some(v) = o.fb2_polarity {
            self.machine.fb2_polarity = v;
        }
        if let Some(v) = &o.delay_table {
            self.latency.delay_table = Some(v.clone());
        }
        if let Some(v) = o.target_class {
            self.dataset.target_class = v;
        }
        if let Some(v) = &o.out_dir {
            self.out_dir = v.clone();
        }
        if let Some(v) = &o.dataset {
            self.dataset.path = v.clone();
        }
        if let Some(v) = o.rng_source {
            self.machine.rng_source = v;
        }
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        self.machine.tm_config(1, self.seed).validate()?;
        self.latency.delays.validate().map_err(anyhow::Error::msg)?;
        anyhow::ensure!(self.latency.bins >= 1, "latency.bins must be at least 1");
        anyhow::ensure!(
            (0.0..1.0).contains(&self.dataset.test_fraction),
            "dataset.test_fraction must lie in [0, 1)"
        );
        anyhow::ensure!(self.prbg.period > 0.0 && self.prbg.period.is_finite(), "prbg.period must be positive");
        anyhow::ensure!(self.prbg.samples >= 1, "prbg.samples must be at least 1");
        anyhow::ensure!(self.prbg.lfsr_seed != 0, "prbg.lfsr_seed must be nonzero");
        anyhow::ensure!(
            self.prbg.duties.iter().all(|d| *d > 0.0 && *d < 1.0),
            "prbg.duties must lie in (0, 1)"
        );
        anyhow::ensure!(self.verify.states_per_action >= 1, "verify.states_per_action must be at least 1");
        Ok(())
    }
}

pub fn load_delay_table(path: &Path) -> anyhow::Result<DelayModel> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("reading delay table {}: {e}", path.display()))?;
    let model: DelayModel = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text)?
    } else {
        toml::from_str(&text)?
    };
    model.validate().map_err(anyhow::Error::msg)?;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_roundtrip_through_toml() {
        let cfg = RunConfig::default();
        assert_eq!(RunConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
        assert_eq!(RunConfig::from_toml("").unwrap(), cfg);
    }

    #[test]
    fn file_then_flags() {
        let mut cfg = RunConfig::from_toml("seed = 9\n[machine]\nd_period = 10\n[train]\nepochs = 7\n").unwrap();
        assert_eq!((cfg.seed, cfg.machine.d_period, cfg.train.epochs), (9, 10, 7));
        assert_eq!(cfg.machine.threshold, 15);
        cfg.apply(&Overrides { seed: Some(3), d_period: Some(100), ..Overrides::default() });
        assert_eq!((cfg.seed, cfg.machine.d_period, cfg.train.epochs), (3, 100, 7));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::from_toml("[machine]\nclauses = 3\n").is_err());
        assert!(RunConfig::from_toml("[machine]\nfb2_polarity = \"sideways\"\n").is_err());
    }

    #[test]
    fn invalid_values_rejected() {
        let mut cfg = RunConfig::default();
        cfg.machine.num_clauses = 3;
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::default();
        cfg.latency.delays.and2 = -1.0;
        assert!(cfg.validate().is_err());
    }
}
