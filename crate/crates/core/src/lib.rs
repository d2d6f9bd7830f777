//! Single-class Tsetlin Machine.
//!
//! * [`feedback`]: the FB1/FB2/FB3 pipeline, feedback probabilities and the
//!   random-bit interface ([`BitSource`]) used to draw `q2` and `q3`.
//! * [`automata`]: counter, one-hot and STG-interpreted automata plus a
//!   bounded-exhaustive equivalence checker.
//! * [`tm`]: clauses, voting and the training loop.
//! * [`conformance`]: feedback truth tables as data and an exhaustive checker.

pub mod automata;
pub mod conformance;
mod error;
pub mod feedback;
pub mod tm;

pub use error::CoreError;
pub use feedback::{BitSource, FeedbackType, Fb2Polarity, IdealSource, SkipPolicy, TaCommand};
pub use tm::{
    EmptyClauseMode, EpochStats, EvalMode, MachineSnapshot, Sample, TmConfig, TsetlinMachine,
    UpdateReport, VoteResult,
};
