use serde::Serialize;

use super::TsetlinAutomaton;
use crate::feedback::TaCommand;
use crate::CoreError;

/// First point where two realizations disagree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub start: usize,
    pub commands: Vec<TaCommand>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Equivalence {
    pub pass: bool,
    /// Command sequences of length `1..=max_len` checked, over all start states.
    pub sequences: u64,
    /// Shortest disagreeing sequence, if any.
    pub counterexample: Option<Mismatch>,
}

struct Search<'a, A, B> {
    a: Vec<A>,
    b: Vec<B>,
    seq: Vec<TaCommand>,
    start: usize,
    max_len: usize,
    sequences: u64,
    best: &'a mut Option<Mismatch>,
}

fn observe<T: TsetlinAutomaton>(ta: &mut T, cmd: TaCommand) -> Result<(usize, bool), CoreError> {
    ta.step(cmd)?;
    Ok((ta.state(), ta.action().is_include()))
}

impl<A: TsetlinAutomaton + Clone, B: TsetlinAutomaton + Clone> Search<'_, A, B> {
    fn limit(&self) -> usize {
        self.best.as_ref().map_or(self.max_len, |m| m.commands.len() - 1)
    }

    fn dfs(&mut self, depth: usize) {
        for cmd in TaCommand::ALL {
            if depth + 1 > self.limit() {
                return;
            }
            let (lo, hi) = self.a.split_at_mut(depth + 1);
            hi[0].clone_from(&lo[depth]);
            let (lo, hi) = self.b.split_at_mut(depth + 1);
            hi[0].clone_from(&lo[depth]);
            self.seq.push(cmd);
            self.sequences += 1;
            let ra = observe(&mut self.a[depth + 1], cmd);
            let rb = observe(&mut self.b[depth + 1], cmd);
            let agree = matches!((&ra, &rb), (Ok(x), Ok(y)) if x == y);
            if !agree {
                *self.best = Some(Mismatch {
                    start: self.start,
                    commands: self.seq.clone(),
                    detail: format!("a: {}, b: {}", describe(&ra), describe(&rb)),
                });
            } else if depth + 1 < self.max_len {
                self.dfs(depth + 1);
            }
            self.seq.pop();
        }
    }
}

fn describe(r: &Result<(usize, bool), CoreError>) -> String {
    match r {
        Ok((s, inc)) => format!("state {s} ({})", if *inc { "include" } else { "exclude" }),
        Err(e) => format!("error: {e}"),
    }
}

/// Bounded-exhaustive comparison of two realizations.
///
/// Every command sequence of length up to `max_len` is applied from every
/// start state in `1..=2n`; after each step the canonical state and the
/// action must agree and neither realization may fail. The reported
/// counterexample is a shortest failing sequence.
pub fn check_equivalence<A, B>(
    make_a: impl Fn(usize) -> Result<A, CoreError>,
    make_b: impl Fn(usize) -> Result<B, CoreError>,
    n: usize,
    max_len: usize,
) -> Equivalence
where
    A: TsetlinAutomaton + Clone,
    B: TsetlinAutomaton + Clone,
{
    let mut best: Option<Mismatch> = None;
    let mut sequences = 0;
    for start in 1..=2 * n {
        let (a, b) = match (make_a(start), make_b(start)) {
            (Ok(a), Ok(b)) if a.state() == start && b.state() == start => (a, b),
            (ra, rb) => {
                best = Some(Mismatch {
                    start,
                    commands: Vec::new(),
                    detail: format!(
                        "construction: a {}, b {}",
                        ra.map_or_else(|e| e.to_string(), |a| a.state().to_string()),
                        rb.map_or_else(|e| e.to_string(), |b| b.state().to_string())
                    ),
                });
                break;
            }
        };
        let mut search = Search {
            a: vec![a; max_len + 1],
            b: vec![b; max_len + 1],
            seq: Vec::with_capacity(max_len),
            start,
            max_len,
            sequences: 0,
            best: &mut best,
        };
        search.dfs(0);
        sequences += search.sequences;
    }
    Equivalence { pass: best.is_none(), sequences, counterexample: best }
}
