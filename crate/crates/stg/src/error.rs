use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StgError {
    #[error("transition `{0}` is not enabled")]
    NotEnabled(String),
    #[error("transition `{0}` has neither input arcs nor read arcs")]
    Unguarded(String),
    #[error("unknown place `{0}`")]
    UnknownPlace(String),
    #[error("unknown signal `{0}`")]
    UnknownSignal(String),
    #[error("duplicate name `{0}`")]
    Duplicate(String),
    #[error("reachability bound of {bound} states exceeded (witness: {})", witness.join(" "))]
    BoundExceeded { bound: usize, witness: Vec<String> },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
