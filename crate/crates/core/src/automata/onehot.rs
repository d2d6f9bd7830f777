use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::counter::counter_step;
use super::TsetlinAutomaton;
use crate::feedback::TaCommand;
use crate::CoreError;
use tmsim_stg::state_signal_name;

/// Handshake input that clocks a next-state term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Input {
    P,
    R,
}

/// One product `x_from · input` of a next-state equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Term {
    pub from: usize,
    pub input: Input,
}

/// Sum-of-products next-state equations, one per state, over the adjacent states.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NextStateEquations {
    n: usize,
    /// `terms[j - 1]` drives state `j`.
    terms: Vec<Vec<Term>>,
}

impl NextStateEquations {
    /// Derives the equations from the counter transition relation.
    pub fn generate(n: usize) -> Self {
        assert!(n >= 1);
        let mut terms = vec![Vec::new(); 2 * n];
        for from in 1..=2 * n {
            for (input, cmd) in [(Input::P, TaCommand::Penalty), (Input::R, TaCommand::Reward)] {
                let to = counter_step(from, cmd, n).expect("in range");
                terms[to - 1].push(Term { from, input });
            }
        }
        Self { n, terms }
    }

    pub fn from_terms(n: usize, terms: Vec<Vec<Term>>) -> Self {
        assert_eq!(terms.len(), 2 * n);
        Self { n, terms }
    }

    pub fn states_per_action(&self) -> usize {
        self.n
    }

    pub fn equation(&self, state: usize) -> &[Term] {
        &self.terms[state - 1]
    }

    pub fn equation_mut(&mut self, state: usize) -> &mut Vec<Term> {
        &mut self.terms[state - 1]
    }

    /// Applies one handshake; `p = r = 0` holds the state.
    pub fn next(&self, x: &[bool], p: bool, r: bool) -> Result<Vec<bool>, CoreError> {
        if p && r {
            return Err(CoreError::ProtocolViolation);
        }
        if !p && !r {
            return Ok(x.to_vec());
        }
        let next: Vec<bool> = self
            .terms
            .iter()
            .map(|eq| {
                eq.iter().any(|t| {
                    x[t.from - 1]
                        && match t.input {
                            Input::P => p,
                            Input::R => r,
                        }
                })
            })
            .collect();
        let set = next.iter().filter(|&&b| b).count();
        if set != 1 {
            return Err(CoreError::NotOneHot(set));
        }
        Ok(next)
    }
}

impl fmt::Display for NextStateEquations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, eq) in self.terms.iter().enumerate() {
            let rhs: Vec<String> = eq
                .iter()
                .map(|t| {
                    let input = if t.input == Input::P { 'p' } else { 'r' };
                    format!("{}·{input}", state_signal_name(self.n, t.from))
                })
                .collect();
            writeln!(f, "{} = {}", state_signal_name(self.n, j + 1), rhs.join(" + "))?;
        }
        Ok(())
    }
}

/// One-hot FSM realization driven by [`NextStateEquations`].
#[derive(Debug)]
pub struct OneHotTa {
    x: Vec<bool>,
    eqs: Arc<NextStateEquations>,
}

impl Clone for OneHotTa {
    fn clone(&self) -> Self {
        Self { x: self.x.clone(), eqs: Arc::clone(&self.eqs) }
    }

    fn clone_from(&mut self, source: &Self) {
        self.x.clone_from(&source.x);
        if !Arc::ptr_eq(&self.eqs, &source.eqs) {
            self.eqs = Arc::clone(&source.eqs);
        }
    }
}

impl OneHotTa {
    pub fn new(eqs: Arc<NextStateEquations>, state: usize) -> Result<Self, CoreError> {
        let max = 2 * eqs.states_per_action();
        if !(1..=max).contains(&state) {
            return Err(CoreError::StateOutOfRange { state, max });
        }
        let mut x = vec![false; max];
        x[state - 1] = true;
        Ok(Self { x, eqs })
    }

    pub fn bits(&self) -> &[bool] {
        &self.x
    }

    pub fn apply(&mut self, p: bool, r: bool) -> Result<(), CoreError> {
        self.x = self.eqs.next(&self.x, p, r)?;
        Ok(())
    }
}

impl TsetlinAutomaton for OneHotTa {
    fn states_per_action(&self) -> usize {
        self.eqs.states_per_action()
    }

    fn state(&self) -> usize {
        self.x.iter().position(|&b| b).map_or(0, |i| i + 1)
    }

    fn step(&mut self, cmd: TaCommand) -> Result<(), CoreError> {
        let [_, p, _] = cmd.rails();
        self.apply(p, cmd == TaCommand::Reward)
    }
}
