use std::collections::{HashMap, VecDeque};

use crate::net::{Edge, Label, Marking, Stg, TransitionId};
use crate::StgError;

/// A reachable marking together with the signal levels on the path that reached it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReachState {
    pub marking: Marking,
    pub code: Vec<bool>,
}

/// Explicit state graph of an STG. State 0 is the initial state.
#[derive(Debug, Clone)]
pub struct ReachabilityGraph {
    states: Vec<ReachState>,
    succ: Vec<Vec<(TransitionId, usize)>>,
    parent: Vec<Option<(usize, TransitionId)>>,
    /// Firings whose edge did not match the current signal level.
    code_violations: Vec<(usize, TransitionId)>,
}

impl ReachabilityGraph {
    pub fn states(&self) -> &[ReachState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn successors(&self, state: usize) -> &[(TransitionId, usize)] {
        &self.succ[state]
    }

    pub fn code_violations(&self) -> &[(usize, TransitionId)] {
        &self.code_violations
    }

    /// Transitions of a shortest firing sequence from the initial state.
    pub fn path_to(&self, mut state: usize) -> Vec<TransitionId> {
        let mut path = Vec::new();
        while let Some((prev, t)) = self.parent[state] {
            path.push(t);
            state = prev;
        }
        path.reverse();
        path
    }

    pub fn trace_names(&self, stg: &Stg, state: usize) -> Vec<String> {
        self.path_to(state).into_iter().map(|t| stg.transition(t).name.clone()).collect()
    }
}

fn apply_code(stg: &Stg, code: &[bool], t: TransitionId) -> (Vec<bool>, bool) {
    let mut next = code.to_vec();
    match stg.transition(t).label {
        Label::Signal { signal, edge } => {
            let rising = edge == Edge::Rise;
            let consistent = code[signal] != rising;
            next[signal] = rising;
            (next, consistent)
        }
        Label::Dummy => (next, true),
    }
}

/// Breadth-first closure of the token game from the initial marking.
///
/// Fails with a witness path once more than `bound` states are discovered.
pub fn reachability(stg: &Stg, bound: usize) -> Result<ReachabilityGraph, StgError> {
    let root = ReachState {
        marking: stg.initial_marking().clone(),
        code: stg.initial_code().to_vec(),
    };
    let mut graph = ReachabilityGraph {
        states: vec![root.clone()],
        succ: vec![Vec::new()],
        parent: vec![None],
        code_violations: Vec::new(),
    };
    let mut index = HashMap::from([(root, 0usize)]);
    let mut queue = VecDeque::from([0usize]);
    let mut enabled = Vec::new();

    while let Some(s) = queue.pop_front() {
        stg.enabled_into(&graph.states[s].marking, &mut enabled);
        for &t in &enabled {
            let marking = stg.fire(&graph.states[s].marking, t)?;
            let (code, consistent) = apply_code(stg, &graph.states[s].code, t);
            if !consistent {
                graph.code_violations.push((s, t));
            }
            let next = ReachState { marking, code };
            let target = match index.get(&next) {
                Some(&id) => id,
                None => {
                    if graph.states.len() >= bound {
                        let mut witness = graph.trace_names(stg, s);
                        witness.push(stg.transition(t).name.clone());
                        return Err(StgError::BoundExceeded { bound, witness });
                    }
                    let id = graph.states.len();
                    index.insert(next.clone(), id);
                    graph.states.push(next);
                    graph.succ.push(Vec::new());
                    graph.parent.push(Some((s, t)));
                    queue.push_back(id);
                    id
                }
            };
            graph.succ[s].push((t, target));
        }
    }
    Ok(graph)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{SignalKind, StgBuilder};

    #[test]
    fn two_place_cycle_has_two_states() {
        let mut b = StgBuilder::new("cycle");
        let p0 = b.place("p0", 1).unwrap();
        let p1 = b.place("p1", 0).unwrap();
        let s = b.signal("a", SignalKind::Output).unwrap();
        b.edge(s, Edge::Rise, &[p0], &[p1], &[]);
        b.edge(s, Edge::Fall, &[p1], &[p0], &[]);
        let g = reachability(&b.build().unwrap(), 100).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.edge_count(), 2);
        assert!(g.code_violations().is_empty());
    }

    #[test]
    fn unbounded_net_hits_bound_with_witness() {
        let mut b = StgBuilder::new("pump");
        let p0 = b.place("p0", 1).unwrap();
        let acc = b.place("acc", 0).unwrap();
        b.dummy("pump", &[p0], &[p0, acc], &[]);
        let net = b.build().unwrap();
        match reachability(&net, 10) {
            Err(StgError::BoundExceeded { bound, witness }) => {
                assert_eq!(bound, 10);
                assert_eq!(witness.len(), 10);
                assert!(witness.iter().all(|w| w == "pump"));
            }
            other => panic!("expected bound error, got {other:?}"),
        }
    }
}
