//! Tsetlin automaton realizations.
//!
//! All realizations share the canonical state numbering `1..=2n`: `1` is the
//! deepest exclude state, `n` and `n + 1` sit either side of the decision
//! boundary and `2n` is the deepest include state. For `n = 3` the one-hot
//! and STG names map as `x13 x12 x11 x21 x22 x23` to `1..=6`.

mod counter;
mod equivalence;
mod onehot;
mod stg_ta;

use serde::{Deserialize, Serialize};

pub use counter::{counter_action, counter_step, CounterTa};
pub use equivalence::{check_equivalence, Equivalence, Mismatch};
pub use onehot::{Input, NextStateEquations, OneHotTa, Term};
pub use stg_ta::{StgTa, StepTrace};

use crate::feedback::TaCommand;
use crate::CoreError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Exclude,
    Include,
}

impl Action {
    pub fn is_include(self) -> bool {
        self == Action::Include
    }
}

/// Common interface of the automaton realizations.
pub trait TsetlinAutomaton {
    fn states_per_action(&self) -> usize;
    /// Canonical state index in `1..=2n`.
    fn state(&self) -> usize;
    fn step(&mut self, cmd: TaCommand) -> Result<(), CoreError>;

    /// Current action, read without disturbing the state.
    fn action(&self) -> Action {
        counter_action(self.state(), self.states_per_action())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Realization {
    Counter,
    OneHot,
    Stg,
}

/// Serializable state of any realization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaSnapshot {
    pub realization: Realization,
    pub states_per_action: usize,
    pub state: usize,
}

impl TaSnapshot {
    pub fn of(realization: Realization, ta: &dyn TsetlinAutomaton) -> Self {
        Self { realization, states_per_action: ta.states_per_action(), state: ta.state() }
    }
}
