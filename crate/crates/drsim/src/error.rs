use thiserror::Error;

use crate::gate::GateKind;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DrError {
    #[error("net `{0}` has more than one driver")]
    MultipleDrivers(String),
    #[error("net `{0}` is read but never driven")]
    Undriven(String),
    #[error("net id {0} does not exist")]
    UnknownNet(usize),
    #[error("gate {gate} ({kind}) has the wrong number of pins")]
    Arity { gate: usize, kind: GateKind },
    #[error("combinational loop through gate {0}")]
    Cycle(usize),
    #[error("expected {expected} input values, got {got}")]
    InputCount { expected: usize, got: usize },
    #[error("primary input {0} is not a legal codeword")]
    IllegalInput(usize),
    #[error("net `{net}` reached (1,1) at t={time}")]
    IllegalState { net: String, time: f64 },
    #[error("no quiescence within {0} events")]
    NonQuiescent(u64),
    #[error("primary output `{0}` never became valid")]
    Incomplete(String),
    #[error("net `{0}` did not return to spacer")]
    NotReset(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}
