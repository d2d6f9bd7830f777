//! `train` and `eval`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use tmsim_core::{BitSource, IdealSource, MachineSnapshot, Sample, TmConfig, TsetlinMachine};
use tmsim_prbg::PrbgSource;

use crate::config::{RngSource, RunConfig};
use crate::dataset::{load_dataset, Dataset};
use crate::manifest::{sha256_hex, Artifact, CommandOutput, SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetInfo {
    pub path: String,
    pub sha256: String,
    pub samples: usize,
    pub feature_count: usize,
    pub target_class: i64,
    pub train_size: usize,
    pub test_size: usize,
}

/// Trained machine plus the exclude-mask snapshots taken along the way.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub version: u32,
    pub config: TmConfig,
    pub rng_source: RngSource,
    pub dataset: DatasetInfo,
    pub epochs: u64,
    pub test_accuracy: Option<f64>,
    pub majority_baseline: f64,
    pub snapshots: Vec<MachineSnapshot>,
    pub machine: TsetlinMachine,
}

impl ModelFile {
    pub fn load(path: &Path) -> anyhow::Result<(Self, String)> {
        let bytes = std::fs::read(path).map_err(|e| anyhow::anyhow!("reading model {}: {e}", path.display()))?;
        let model: Self = serde_json::from_slice(&bytes)
            .map_err(|e| anyhow::anyhow!("model {}: {e}", path.display()))?;
        anyhow::ensure!(model.version == SCHEMA_VERSION, "unsupported model version {}", model.version);
        Ok((model, sha256_hex(&bytes)))
    }

    pub fn snapshot(&self, epoch: u64) -> Option<&MachineSnapshot> {
        self.snapshots.iter().find(|s| s.epoch == epoch)
    }
}

pub(crate) fn open_dataset(cfg: &RunConfig) -> anyhow::Result<(Dataset, String)> {
    let d = &cfg.dataset;
    let ds = load_dataset(&d.path, d.label_column, d.target_class, d.test_fraction, cfg.seed)?;
    let bytes = std::fs::read(&d.path)?;
    Ok((ds, sha256_hex(&bytes)))
}

fn bit_source(cfg: &RunConfig) -> Box<dyn BitSource> {
    match cfg.machine.rng_source {
        RngSource::Ideal => Box::new(IdealSource::new(cfg.seed)),
        RngSource::Prbg => Box::new(PrbgSource::for_threshold(cfg.machine.threshold, cfg.seed)),
    }
}

pub const EPOCH_CSV_HEADER: &str =
    "epoch,train_accuracy,test_accuracy,penalties,rewards,inactions,state_changes,type1_clauses,type2_clauses";

/// `None` for an empty split.
fn accuracy(tm: &TsetlinMachine, data: &[Sample]) -> anyhow::Result<Option<f64>> {
    Ok(if data.is_empty() { None } else { Some(tm.accuracy(data)?) })
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

pub fn train(cfg: &RunConfig) -> anyhow::Result<(CommandOutput, ModelFile)> {
    let epochs = cfg.train.epochs;
    if let Some(&e) = cfg.train.snapshot_epochs.iter().find(|&&e| e > epochs) {
        anyhow::bail!("snapshot epoch {e} exceeds the {epochs} training epochs");
    }
    let (ds, digest) = open_dataset(cfg)?;
    let train_set = ds.train_samples();
    let test_set = ds.test_samples();
    anyhow::ensure!(!train_set.is_empty(), "training split is empty");

    let mut tm = TsetlinMachine::new(cfg.machine.tm_config(ds.feature_count, cfg.seed))?;
    let mut bits = bit_source(cfg);
    let mut snapshots = Vec::new();
    let mut csv = String::from(EPOCH_CSV_HEADER);
    csv.push('\n');
    let _ = writeln!(
        csv,
        "0,{},{},0,0,0,0,0,0",
        tm.accuracy(&train_set)?,
        cell(accuracy(&tm, &test_set)?)
    );
    for epoch in 0..=epochs {
        if epoch > 0 {
            let stats = tm.train_epoch(&train_set, &mut *bits)?;
            let u = &stats.updates;
            let _ = writeln!(
                csv,
                "{epoch},{},{},{},{},{},{},{},{}",
                stats.train_accuracy,
                cell(accuracy(&tm, &test_set)?),
                u.penalties,
                u.rewards,
                u.inactions,
                u.state_changes,
                u.type1_clauses,
                u.type2_clauses
            );
        }
        if cfg.train.snapshot_epochs.contains(&epoch) {
            snapshots.push(tm.snapshot());
        }
    }

    let test_accuracy = accuracy(&tm, &test_set)?;
    let model = ModelFile {
        version: SCHEMA_VERSION,
        config: tm.config().clone(),
        rng_source: cfg.machine.rng_source,
        dataset: DatasetInfo {
            path: ds.source.display().to_string(),
            sha256: digest.clone(),
            samples: ds.len(),
            feature_count: ds.feature_count,
            target_class: cfg.dataset.target_class,
            train_size: ds.train.len(),
            test_size: ds.test.len(),
        },
        epochs,
        test_accuracy,
        majority_baseline: ds.majority_baseline(),
        snapshots,
        machine: tm,
    };
    let output = CommandOutput {
        artifacts: vec![Artifact::text("train_epochs.csv", csv), Artifact::json("model.json", &model)],
        inputs: BTreeMap::from([("dataset".to_string(), digest)]),
        success: true,
        summary: format!(
            "trained {epochs} epochs: test accuracy {} (majority baseline {:.4})",
            cell(test_accuracy),
            model.majority_baseline
        ),
    };
    Ok((output, model))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotAccuracy {
    pub epoch: u64,
    pub train_accuracy: Option<f64>,
    pub test_accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub version: u32,
    pub epochs: u64,
    pub train_accuracy: Option<f64>,
    pub test_accuracy: Option<f64>,
    pub full_accuracy: f64,
    pub majority_baseline: f64,
    pub test_confusion: Confusion,
    pub snapshots: Vec<SnapshotAccuracy>,
}

fn snapshot_accuracy(snap: &MachineSnapshot, data: &[Sample]) -> anyhow::Result<Option<f64>> {
    if data.is_empty() {
        return Ok(None);
    }
    let mut correct = 0;
    for s in data {
        correct += usize::from(snap.evaluate(&s.features)?.predicted == s.label);
    }
    Ok(Some(correct as f64 / data.len() as f64))
}

pub fn eval(cfg: &RunConfig, model_path: &Path) -> anyhow::Result<(CommandOutput, EvalReport)> {
    let (model, model_digest) = ModelFile::load(model_path)?;
    let (ds, digest) = open_dataset(cfg)?;
    anyhow::ensure!(
        ds.feature_count == model.config.num_features,
        "dataset has {} features, model expects {}",
        ds.feature_count,
        model.config.num_features
    );
    let tm = &model.machine;
    let (train_set, test_set) = (ds.train_samples(), ds.test_samples());
    let mut confusion = Confusion::default();
    for s in &test_set {
        match (tm.predict(&s.features)?, s.label) {
            (true, true) => confusion.tp += 1,
            (true, false) => confusion.fp += 1,
            (false, false) => confusion.tn += 1,
            (false, true) => confusion.fn_ += 1,
        }
    }
    let snapshots = model
        .snapshots
        .iter()
        .map(|snap| {
            Ok(SnapshotAccuracy {
                epoch: snap.epoch,
                train_accuracy: snapshot_accuracy(snap, &train_set)?,
                test_accuracy: snapshot_accuracy(snap, &test_set)?,
            })
        })
        .collect::<anyhow::Result<_>>()?;
    let report = EvalReport {
        version: SCHEMA_VERSION,
        epochs: model.epochs,
        train_accuracy: accuracy(tm, &train_set)?,
        test_accuracy: accuracy(tm, &test_set)?,
        full_accuracy: tm.accuracy(&ds.samples)?,
        majority_baseline: ds.majority_baseline(),
        test_confusion: confusion,
        snapshots,
    };
    let output = CommandOutput {
        artifacts: vec![Artifact::json("eval.json", &report)],
        inputs: BTreeMap::from([("dataset".to_string(), digest), ("model".to_string(), model_digest)]),
        success: true,
        summary: format!("test accuracy {}, full-dataset accuracy {:.4}", cell(report.test_accuracy), report.full_accuracy),
    };
    Ok((output, report))
}
