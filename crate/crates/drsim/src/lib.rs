//! Dual-rail return-to-zero gate-level simulation of the Tsetlin Machine
//! inference datapath.
//!
//! Signals are [`DrValue`]s, gates evaluate with early propagation, and the
//! [`Simulator`] measures spacer-to-codeword latency per input codeword.

pub mod circuits;
pub mod datapath;
mod error;
pub mod gate;
pub mod montecarlo;
pub mod netlist;
pub mod sim;
pub mod stats;
pub mod value;

pub use circuits::{
    build_clause_netlist, build_clause_netlist_with, build_comparator_netlist, build_datapath, build_popcount_netlist,
    clause_codeword, clause_worst_case, comparator_codeword, comparator_worst_case, ClauseOptions, Combiner, Datapath,
};
pub use datapath::{datapath_latency, Component, DatapathLatency, DatapathOptions};
pub use error::DrError;
pub use gate::{eval as dr_gate_eval, DelayModel, GateKind};
pub use montecarlo::{latency_distribution, run_trials, uniform_codeword, worst_case_latency, Normalization};
pub use netlist::{DrNetlist, Gate, GateId, NetId, NetlistBuilder, Pin};
pub use sim::{simulate_cycle, SimResult, Simulator};
pub use stats::{value_counts, Histogram, LatencyStats};
pub use value::{decode_unsigned, encode_unsigned, DrValue};
