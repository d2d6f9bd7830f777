use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoreError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("expected {expected} features, got {got}")]
    FeatureCount { expected: usize, got: usize },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("automaton state {state} outside 1..={max}")]
    StateOutOfRange { state: usize, max: usize },
    #[error("penalty and reward asserted together")]
    ProtocolViolation,
    #[error("one-hot state vector has {0} bits set")]
    NotOneHot(usize),
    #[error("STG handshake deadlocked after {fired:?}")]
    Deadlock { fired: Vec<String> },
    #[error("STG action output disagrees with the new state after {fired:?}")]
    OutputMismatch { fired: Vec<String> },
    #[error("STG handshake must start at idle")]
    NotIdle,
    #[error(transparent)]
    Stg(#[from] tmsim_stg::StgError),
}
