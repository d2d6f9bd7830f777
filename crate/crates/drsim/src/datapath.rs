//! End-to-end latency of a trained machine's inference datapath.

use serde::{Deserialize, Serialize};
use tmsim_core::{EvalMode, MachineSnapshot};

use crate::circuits::{
    build_clause_netlist_with, build_comparator_netlist, build_datapath, build_popcount_netlist, clause_codeword,
    clause_worst_case, comparator_codeword, comparator_worst_case, ClauseOptions, Combiner, Datapath,
};
use crate::gate::DelayModel;
use crate::montecarlo::{worst_case_latency, Normalization};
use crate::netlist::DrNetlist;
use crate::sim::Simulator;
use crate::stats::LatencyStats;
use crate::value::{decode_unsigned, encode_unsigned, DrValue};
use crate::DrError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Component {
    EndToEnd,
    Clause,
    Popcount,
    Comparator,
}

impl Component {
    pub const ALL: [Component; 4] = [Self::EndToEnd, Self::Clause, Self::Popcount, Self::Comparator];

    pub fn name(self) -> &'static str {
        match self {
            Self::EndToEnd => "end_to_end",
            Self::Clause => "clause",
            Self::Popcount => "popcount",
            Self::Comparator => "comparator",
        }
    }
}

/// Raw latencies per component; clause latencies are pooled over all clauses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatapathLatency {
    pub epoch: u64,
    pub end_to_end: Vec<f64>,
    pub clause: Vec<f64>,
    pub popcount: Vec<f64>,
    pub comparator: Vec<f64>,
    /// Decoded datapath output per sample.
    pub predictions: Vec<bool>,
    /// Latency of each component's known worst-case input.
    pub worst_case: [f64; 4],
}

impl DatapathLatency {
    pub fn samples(&self, c: Component) -> &[f64] {
        match c {
            Component::EndToEnd => &self.end_to_end,
            Component::Clause => &self.clause,
            Component::Popcount => &self.popcount,
            Component::Comparator => &self.comparator,
        }
    }

    pub fn worst(&self, c: Component) -> f64 {
        self.worst_case[c as usize]
    }

    pub fn mean(&self, c: Component) -> f64 {
        let s = self.samples(c);
        s.iter().sum::<f64>() / s.len() as f64
    }

    /// Summary statistics; `scale` overrides the worst case used for normalization.
    pub fn stats(&self, c: Component, normalize: bool, scale: Option<f64>, bins: usize) -> Result<LatencyStats, DrError> {
        let worst = normalize.then(|| scale.unwrap_or(self.worst(c)));
        LatencyStats::from_samples(self.samples(c), worst, bins)
    }
}

/// Options for [`datapath_latency`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DatapathOptions {
    pub delays: DelayModel,
    pub combiner: Combiner,
}

struct Parts {
    datapath: Datapath,
    clause: DrNetlist,
    popcount: DrNetlist,
    comparator: DrNetlist,
}

fn parts(snapshot: &MachineSnapshot, opts: &DatapathOptions) -> Result<Parts, DrError> {
    let clause_options = ClauseOptions {
        combiner: opts.combiner,
        empty_is_zero: !snapshot.empty_clause_mode.output(EvalMode::Infer),
    };
    let datapath = build_datapath(snapshot.num_features, &snapshot.negative, clause_options)?;
    Ok(Parts {
        clause: build_clause_netlist_with(snapshot.num_features, clause_options)?,
        popcount: build_popcount_netlist(snapshot.num_clauses())?,
        comparator: build_comparator_netlist(datapath.popcount_width)?,
        datapath,
    })
}

/// Simulates every sample through the composed datapath and, separately,
/// through each component with the operands that sample produces.
pub fn datapath_latency(
    snapshot: &MachineSnapshot,
    samples: &[Vec<bool>],
    opts: &DatapathOptions,
) -> Result<DatapathLatency, DrError> {
    if samples.is_empty() {
        return Err(DrError::Config("no samples to simulate".into()));
    }
    opts.delays.validate().map_err(DrError::Config)?;
    let p = parts(snapshot, opts)?;
    let d = &opts.delays;
    let width = p.datapath.popcount_width;
    let mut full = Simulator::new(&p.datapath.netlist, *d);
    let mut clause = Simulator::new(&p.clause, *d);
    let mut popcount = Simulator::new(&p.popcount, *d);
    let mut comparator = Simulator::new(&p.comparator, *d);

    let mut out = DatapathLatency {
        epoch: snapshot.epoch,
        end_to_end: Vec::with_capacity(samples.len()),
        clause: Vec::with_capacity(samples.len() * snapshot.num_clauses()),
        popcount: Vec::with_capacity(samples.len()),
        comparator: Vec::with_capacity(samples.len()),
        predictions: Vec::with_capacity(samples.len()),
        worst_case: [0.0; 4],
    };
    for features in samples {
        let r = full.simulate_cycle(&p.datapath.codeword(features, &snapshot.exclude)?)?;
        out.end_to_end.push(r.latency_s2c);
        out.predictions.push(r.output_values[0].value().expect("complete output"));

        let mut votes = Vec::with_capacity(snapshot.num_clauses());
        for (ex, &neg) in snapshot.exclude.iter().zip(&snapshot.negative) {
            let c = clause.simulate_cycle(&clause_codeword(features, ex))?;
            out.clause.push(c.latency_s2c);
            let v = c.output_values[0];
            votes.push(if neg { v.inverted() } else { v });
        }
        let pc = popcount.simulate_cycle(&votes)?;
        out.popcount.push(pc.latency_s2c);
        let count = decode_unsigned(&pc.output_values).expect("complete popcount");
        let cmp = comparator.simulate_cycle(&comparator_codeword(count, p.datapath.threshold, width))?;
        out.comparator.push(cmp.latency_s2c);
    }

    let n_clauses = snapshot.num_clauses();
    let popcount_norm = if n_clauses <= 16 {
        Normalization::Exhaustive
    } else {
        Normalization::Pattern(encode_unsigned(u64::MAX, n_clauses))
    };
    out.worst_case = [
        full.simulate_cycle(&p.datapath.worst_case())?.latency_s2c,
        clause.simulate_cycle(&clause_worst_case(snapshot.num_features))?.latency_s2c,
        worst_case_latency(&p.popcount, d, &popcount_norm)?.expect("normalized"),
        comparator.simulate_cycle(&comparator_worst_case(width))?.latency_s2c,
    ];
    Ok(out)
}

/// The composed datapath netlist for `snapshot`, for inspection and export.
pub fn datapath_netlist(snapshot: &MachineSnapshot, combiner: Combiner) -> Result<Datapath, DrError> {
    parts(snapshot, &DatapathOptions { combiner, ..DatapathOptions::default() }).map(|p| p.datapath)
}

/// Codeword for a datapath built from `snapshot`.
pub fn datapath_codeword(datapath: &Datapath, snapshot: &MachineSnapshot, features: &[bool]) -> Result<Vec<DrValue>, DrError> {
    datapath.codeword(features, &snapshot.exclude)
}
