//! `latency`: dual-rail simulation of the inference datapath per snapshot.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use tmsim_drsim::{datapath_latency, Combiner, Component, DatapathLatency, DatapathOptions, DelayModel, LatencyStats};

use crate::config::{RunConfig, SampleSet};
use crate::learn::{open_dataset, ModelFile};
use crate::manifest::{Artifact, CommandOutput, SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentSummary {
    /// Mean of the raw latencies, in delay units.
    pub raw_mean: f64,
    /// Latency of the known worst-case operand.
    pub worst_case: f64,
    pub stats: LatencyStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotLatency {
    pub epoch: u64,
    /// Samples whose simulated output differs from the behavioural model.
    pub prediction_mismatches: usize,
    pub components: BTreeMap<String, ComponentSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatencySummary {
    pub version: u32,
    pub delays: DelayModel,
    pub combiner: Combiner,
    pub sample_set: SampleSet,
    pub samples: usize,
    /// Normalization divisor per component, shared by every snapshot.
    pub scales: BTreeMap<String, f64>,
    pub snapshots: Vec<SnapshotLatency>,
}

impl LatencySummary {
    pub fn snapshot(&self, epoch: u64) -> Option<&SnapshotLatency> {
        self.snapshots.iter().find(|s| s.epoch == epoch)
    }

    pub fn mean(&self, epoch: u64, component: Component) -> Option<f64> {
        Some(self.snapshot(epoch)?.components.get(component.name())?.stats.mean)
    }
}

pub fn histogram_file(epoch: u64, component: Component) -> String {
    format!("latency_e{epoch}_{}.csv", component.name())
}

pub fn latency(cfg: &RunConfig, model_path: &Path) -> anyhow::Result<(CommandOutput, LatencySummary)> {
    let (model, model_digest) = ModelFile::load(model_path)?;
    let (ds, digest) = open_dataset(cfg)?;
    anyhow::ensure!(
        ds.feature_count == model.config.num_features,
        "dataset has {} features, model expects {}",
        ds.feature_count,
        model.config.num_features
    );
    let indices: Vec<usize> = match cfg.latency.samples {
        SampleSet::All => (0..ds.len()).collect(),
        SampleSet::Train => ds.train.clone(),
        SampleSet::Test => ds.test.clone(),
    };
    anyhow::ensure!(!indices.is_empty(), "no samples selected for latency simulation");
    let features: Vec<Vec<bool>> = indices.iter().map(|&i| ds.samples[i].features.clone()).collect();

    let epochs = &cfg.train.snapshot_epochs;
    anyhow::ensure!(!epochs.is_empty(), "no snapshot epochs selected");
    let opts = DatapathOptions { delays: cfg.latency.delays, combiner: cfg.latency.combiner };
    let mut runs: Vec<(DatapathLatency, usize)> = Vec::with_capacity(epochs.len());
    for &epoch in epochs {
        let snap = model
            .snapshot(epoch)
            .ok_or_else(|| anyhow::anyhow!("model has no snapshot for epoch {epoch}"))?;
        let lat = datapath_latency(snap, &features, &opts)?;
        let mut mismatches = 0;
        for (f, &y) in features.iter().zip(&lat.predictions) {
            mismatches += usize::from(snap.evaluate(f)?.predicted != y);
        }
        runs.push((lat, mismatches));
    }

    let scales: BTreeMap<String, f64> = Component::ALL
        .iter()
        .map(|&c| {
            let scale = runs
                .iter()
                .flat_map(|(l, _)| l.samples(c).iter().copied().chain([l.worst(c)]))
                .fold(0.0, f64::max);
            (c.name().to_string(), scale)
        })
        .collect();

    let mut artifacts = Vec::new();
    let mut snapshots = Vec::new();
    for (lat, mismatches) in &runs {
        let mut components = BTreeMap::new();
        for c in Component::ALL {
            let stats = lat.stats(c, true, Some(scales[c.name()]), cfg.latency.bins)?;
            artifacts.push(Artifact::text(histogram_file(lat.epoch, c), stats.histogram.to_csv()));
            components.insert(
                c.name().to_string(),
                ComponentSummary { raw_mean: lat.mean(c), worst_case: lat.worst(c), stats },
            );
        }
        let mut rows = String::from("sample,prediction,end_to_end,popcount,comparator\n");
        for (k, &i) in indices.iter().enumerate() {
            let _ = writeln!(
                rows,
                "{i},{},{},{},{}",
                u8::from(lat.predictions[k]),
                lat.end_to_end[k],
                lat.popcount[k],
                lat.comparator[k]
            );
        }
        artifacts.push(Artifact::text(format!("latency_e{}_samples.csv", lat.epoch), rows));
        snapshots.push(SnapshotLatency { epoch: lat.epoch, prediction_mismatches: *mismatches, components });
    }

    let summary = LatencySummary {
        version: SCHEMA_VERSION,
        delays: cfg.latency.delays,
        combiner: cfg.latency.combiner,
        sample_set: cfg.latency.samples,
        samples: indices.len(),
        scales,
        snapshots,
    };
    artifacts.push(Artifact::json("latency_summary.json", &summary));
    let means: Vec<String> = summary
        .snapshots
        .iter()
        .map(|s| format!("e{}={:.4}", s.epoch, s.components[Component::EndToEnd.name()].stats.mean))
        .collect();
    let success = summary.snapshots.iter().all(|s| s.prediction_mismatches == 0);
    let output = CommandOutput {
        artifacts,
        inputs: BTreeMap::from([("dataset".to_string(), digest), ("model".to_string(), model_digest)]),
        success,
        summary: format!("mean normalized end-to-end latency: {}", means.join(", ")),
    };
    Ok((output, summary))
}
