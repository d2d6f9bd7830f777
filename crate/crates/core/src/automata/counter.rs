use serde::{Deserialize, Serialize};

use super::{Action, TsetlinAutomaton};
use crate::feedback::TaCommand;
use crate::CoreError;

/// Saturating up/down counter; the reference realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterTa {
    state: usize,
    n: usize,
}

impl CounterTa {
    pub fn new(n: usize, state: usize) -> Result<Self, CoreError> {
        if n == 0 || !(1..=2 * n).contains(&state) {
            return Err(CoreError::StateOutOfRange { state, max: 2 * n });
        }
        Ok(Self { state, n })
    }
}

impl TsetlinAutomaton for CounterTa {
    fn states_per_action(&self) -> usize {
        self.n
    }

    fn state(&self) -> usize {
        self.state
    }

    fn step(&mut self, cmd: TaCommand) -> Result<(), CoreError> {
        self.state = counter_step(self.state, cmd, self.n)?;
        Ok(())
    }
}

/// Rewards deepen the current action and saturate at `1` and `2n`; penalties
/// move toward the boundary and across it from `n` or `n + 1`.
pub fn counter_step(state: usize, cmd: TaCommand, n: usize) -> Result<usize, CoreError> {
    if !(1..=2 * n).contains(&state) {
        return Err(CoreError::StateOutOfRange { state, max: 2 * n });
    }
    let exclude = state <= n;
    Ok(match (cmd, exclude) {
        (TaCommand::Inaction, _) => state,
        (TaCommand::Reward, true) => (state - 1).max(1),
        (TaCommand::Reward, false) => (state + 1).min(2 * n),
        (TaCommand::Penalty, true) => state + 1,
        (TaCommand::Penalty, false) => state - 1,
    })
}

pub fn counter_action(state: usize, n: usize) -> Action {
    if state <= n {
        Action::Exclude
    } else {
        Action::Include
    }
}
