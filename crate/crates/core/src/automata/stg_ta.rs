use std::sync::Arc;

use tmsim_stg::{build_ta_stg_from, Edge, Label, Marking, Stg, TaStgLayout, TransitionId};

use super::{Action, TsetlinAutomaton};
use crate::feedback::TaCommand;
use crate::CoreError;

/// Automaton interpreted by playing the token game of its STG.
///
/// Each non-idle command is one four-phase handshake: the environment raises
/// `p` or `r`, the net runs until it only waits on the environment, the input
/// falls and the net runs back to the idle place.
#[derive(Debug)]
pub struct StgTa {
    stg: Arc<Stg>,
    layout: Arc<TaStgLayout>,
    marking: Marking,
    fired: Vec<TransitionId>,
    scratch: Vec<TransitionId>,
}

impl Clone for StgTa {
    fn clone(&self) -> Self {
        Self {
            stg: Arc::clone(&self.stg),
            layout: Arc::clone(&self.layout),
            marking: self.marking.clone(),
            fired: self.fired.clone(),
            scratch: Vec::new(),
        }
    }

    fn clone_from(&mut self, source: &Self) {
        if !Arc::ptr_eq(&self.stg, &source.stg) {
            self.stg = Arc::clone(&source.stg);
            self.layout = Arc::clone(&source.layout);
        }
        self.marking.0.clone_from(&source.marking.0);
        self.fired.clone_from(&source.fired);
    }
}

/// Transitions fired by the last handshake.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepTrace {
    pub fired: Vec<String>,
    /// Action output raised during the handshake (`a1` or `a2`).
    pub output: Option<String>,
}

impl StgTa {
    pub fn new(states_per_action: usize, start: usize) -> Result<Self, CoreError> {
        if states_per_action == 0 || !(1..=2 * states_per_action).contains(&start) {
            return Err(CoreError::StateOutOfRange { state: start, max: 2 * states_per_action });
        }
        let stg = build_ta_stg_from(states_per_action, start);
        Self::from_stg(Arc::new(stg), states_per_action)
    }

    /// Wraps an existing net, starting at its initial marking.
    pub fn from_stg(stg: Arc<Stg>, states_per_action: usize) -> Result<Self, CoreError> {
        let layout = Arc::new(TaStgLayout::of(&stg, states_per_action)?);
        let marking = stg.initial_marking().clone();
        Ok(Self { stg, layout, marking, fired: Vec::new(), scratch: Vec::new() })
    }

    /// Same net, token moved to `start` (idle phase).
    pub fn with_state(&self, start: usize) -> Result<Self, CoreError> {
        let max = self.layout.state_high.len();
        if !(1..=max).contains(&start) {
            return Err(CoreError::StateOutOfRange { state: start, max });
        }
        let mut next = self.clone();
        for (i, &hi) in self.layout.state_high.iter().enumerate() {
            let lo = self
                .stg
                .places()[hi]
                .strip_suffix("_1")
                .and_then(|base| self.stg.place_id(&format!("{base}_0")))
                .expect("state place pair");
            let on = i + 1 == start;
            next.marking.0[hi] = u32::from(on);
            next.marking.0[lo] = u32::from(!on);
        }
        Ok(next)
    }

    pub fn stg(&self) -> &Stg {
        &self.stg
    }

    pub fn marking(&self) -> &Marking {
        &self.marking
    }

    pub fn is_idle(&self) -> bool {
        self.marking.is_marked(self.layout.idle)
    }

    fn names(&self) -> Vec<String> {
        self.fired.iter().map(|&t| self.stg.transition(t).name.clone()).collect()
    }

    fn fire(&mut self, t: TransitionId) -> Result<(), CoreError> {
        self.stg.fire_in_place(&mut self.marking, t)?;
        self.fired.push(t);
        Ok(())
    }

    fn raised_output(&self) -> Option<TransitionId> {
        self.fired.iter().copied().find(|&t| match self.stg.transition(t).label {
            Label::Signal { signal, edge: Edge::Rise } => {
                signal == self.layout.a1 || signal == self.layout.a2
            }
            _ => false,
        })
    }

    fn run_handshake(&mut self, cmd: TaCommand) -> Result<(), CoreError> {
        self.fired.clear();
        let rise = match cmd {
            TaCommand::Inaction => return Ok(()),
            TaCommand::Penalty => self.layout.penalty_rise,
            TaCommand::Reward => self.layout.reward_rise,
        };
        if !self.is_idle() {
            return Err(CoreError::NotIdle);
        }
        self.fire(rise)?;
        let limit = 2 * self.stg.transitions().len();
        let mut enabled = std::mem::take(&mut self.scratch);
        while !self.is_idle() {
            self.stg.enabled_into(&self.marking, &mut enabled);
            let next = enabled
                .iter()
                .copied()
                .find(|&t| !self.stg.is_input(t))
                .or_else(|| enabled.first().copied());
            match next {
                Some(t) if self.fired.len() < limit => self.fire(t)?,
                _ => {
                    self.scratch = enabled;
                    return Err(CoreError::Deadlock { fired: self.names() });
                }
            }
        }
        self.scratch = enabled;
        Ok(())
    }

    /// Runs one handshake and reports what fired.
    pub fn handshake(&mut self, cmd: TaCommand) -> Result<StepTrace, CoreError> {
        self.run_handshake(cmd)?;
        Ok(StepTrace {
            fired: self.names(),
            output: self.raised_output().map(|t| self.stg.label_text(t).trim_end_matches('+').to_owned()),
        })
    }
}

impl TsetlinAutomaton for StgTa {
    fn states_per_action(&self) -> usize {
        self.layout.states_per_action
    }

    fn state(&self) -> usize {
        self.layout
            .state_high
            .iter()
            .position(|&p| self.marking.is_marked(p))
            .map_or(0, |i| i + 1)
    }

    /// Fails if the handshake deadlocks or the raised action output
    /// disagrees with the resulting state.
    fn step(&mut self, cmd: TaCommand) -> Result<(), CoreError> {
        self.run_handshake(cmd)?;
        if cmd == TaCommand::Inaction {
            return Ok(());
        }
        let expected = match self.action() {
            Action::Exclude => self.layout.a1,
            Action::Include => self.layout.a2,
        };
        match self.raised_output().map(|t| self.stg.transition(t).label) {
            Some(Label::Signal { signal, .. }) if signal == expected => Ok(()),
            _ => Err(CoreError::OutputMismatch { fired: self.names() }),
        }
    }
}
