use std::collections::HashMap;

use serde::Serialize;

use crate::net::{Label, Stg};
use crate::reach::{reachability, ReachabilityGraph};
use crate::StgError;

/// Outcome of one property check. Failures carry a firing sequence from the
/// initial marking that exhibits the violation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckResult {
    fn ok() -> Self {
        Self { pass: true, witness: None, detail: None }
    }

    fn fail(witness: Vec<String>, detail: String) -> Self {
        Self { pass: false, witness: Some(witness), detail: Some(detail) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub states: usize,
    pub edges: usize,
    /// No reachable marking puts more than one token on a place.
    pub one_safe: CheckResult,
    /// Every reachable state enables something, unless the idle place is marked.
    pub deadlock_free: CheckResult,
    /// Rising and falling edges of every signal alternate, and each marking
    /// carries a single signal code.
    pub consistent: CheckResult,
    /// No enabled output or internal edge is disabled by firing another transition.
    pub output_persistent: CheckResult,
    /// Input edges are only enabled where no output or internal edge is.
    pub input_proper: CheckResult,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.one_safe.pass
            && self.deadlock_free.pass
            && self.consistent.pass
            && self.output_persistent.pass
            && self.input_proper.pass
    }
}

pub fn verify(stg: &Stg, bound: usize) -> Result<VerifyReport, StgError> {
    let graph = reachability(stg, bound)?;
    Ok(VerifyReport {
        states: graph.len(),
        edges: graph.edge_count(),
        one_safe: check_safety(stg, &graph),
        deadlock_free: check_deadlock(stg, &graph),
        consistent: check_consistency(stg, &graph),
        output_persistent: check_persistency(stg, &graph),
        input_proper: check_input_properness(stg, &graph),
    })
}

fn check_safety(stg: &Stg, graph: &ReachabilityGraph) -> CheckResult {
    for (s, state) in graph.states().iter().enumerate() {
        if let Some(p) = state.marking.0.iter().position(|&c| c > 1) {
            return CheckResult::fail(
                graph.trace_names(stg, s),
                format!("place {} holds {} tokens", stg.places()[p], state.marking.0[p]),
            );
        }
    }
    CheckResult::ok()
}

fn check_deadlock(stg: &Stg, graph: &ReachabilityGraph) -> CheckResult {
    for (s, state) in graph.states().iter().enumerate() {
        if !graph.successors(s).is_empty() {
            continue;
        }
        let idle = stg.idle_place().is_some_and(|p| state.marking.is_marked(p));
        if !idle {
            let marked: Vec<&str> =
                state.marking.marked_places().map(|p| stg.places()[p].as_str()).collect();
            return CheckResult::fail(
                graph.trace_names(stg, s),
                format!("dead marking {{{}}}", marked.join(" ")),
            );
        }
    }
    CheckResult::ok()
}

fn check_consistency(stg: &Stg, graph: &ReachabilityGraph) -> CheckResult {
    if let Some(&(s, t)) = graph.code_violations().first() {
        let mut witness = graph.trace_names(stg, s);
        witness.push(stg.transition(t).name.clone());
        return CheckResult::fail(witness, format!("{} fires out of phase", stg.label_text(t)));
    }
    let mut codes: HashMap<&_, usize> = HashMap::new();
    for (s, state) in graph.states().iter().enumerate() {
        if let Some(&first) = codes.get(&state.marking) {
            if graph.states()[first].code != state.code {
                return CheckResult::fail(
                    graph.trace_names(stg, s),
                    "marking reached with two different signal codes".into(),
                );
            }
        } else {
            codes.insert(&state.marking, s);
        }
    }
    CheckResult::ok()
}

fn check_persistency(stg: &Stg, graph: &ReachabilityGraph) -> CheckResult {
    for s in 0..graph.len() {
        let succ = graph.successors(s);
        for &(t, _) in succ {
            if stg.is_input(t) || stg.transition(t).label == Label::Dummy {
                continue;
            }
            for &(u, target) in succ {
                if u == t || stg.transition(u).label == stg.transition(t).label {
                    continue;
                }
                if !stg.is_enabled(&graph.states()[target].marking, t) {
                    let mut witness = graph.trace_names(stg, s);
                    witness.push(stg.transition(u).name.clone());
                    return CheckResult::fail(
                        witness,
                        format!(
                            "{} disables {}",
                            stg.transition(u).name,
                            stg.transition(t).name
                        ),
                    );
                }
            }
        }
    }
    CheckResult::ok()
}

fn check_input_properness(stg: &Stg, graph: &ReachabilityGraph) -> CheckResult {
    for s in 0..graph.len() {
        let succ = graph.successors(s);
        let input = succ.iter().find(|(t, _)| stg.is_input(*t));
        let busy = succ.iter().find(|(t, _)| !stg.is_input(*t));
        if let (Some(&(i, _)), Some(&(o, _))) = (input, busy) {
            return CheckResult::fail(
                graph.trace_names(stg, s),
                format!(
                    "input {} enabled while {} is pending",
                    stg.transition(i).name,
                    stg.transition(o).name
                ),
            );
        }
    }
    CheckResult::ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{Edge, SignalKind, StgBuilder};

    #[test]
    fn two_producers_into_one_place_is_unsafe() {
        let mut b = StgBuilder::new("unsafe");
        let a = b.place("a", 1).unwrap();
        let c = b.place("c", 1).unwrap();
        let sink = b.place("sink", 0).unwrap();
        let x = b.signal("x", SignalKind::Output).unwrap();
        let y = b.signal("y", SignalKind::Output).unwrap();
        b.edge(x, Edge::Rise, &[a], &[sink], &[]);
        b.edge(y, Edge::Rise, &[c], &[sink], &[]);
        let report = verify(&b.build().unwrap(), 100).unwrap();
        assert!(!report.one_safe.pass);
        assert!(report.one_safe.detail.as_deref().unwrap().contains("sink holds 2"));
    }

    #[test]
    fn double_rise_is_inconsistent() {
        let mut b = StgBuilder::new("pp");
        let p0 = b.place("p0", 1).unwrap();
        let p1 = b.place("p1", 0).unwrap();
        let p2 = b.place("p2", 0).unwrap();
        let p = b.signal("p", SignalKind::Input).unwrap();
        b.edge(p, Edge::Rise, &[p0], &[p1], &[]);
        b.edge(p, Edge::Rise, &[p1], &[p2], &[]);
        let report = verify(&b.build().unwrap(), 100).unwrap();
        assert!(!report.consistent.pass);
        assert_eq!(report.consistent.witness.as_ref().unwrap(), &vec!["p+", "p+/1"]);
    }

    #[test]
    fn output_disabled_by_competitor_is_not_persistent() {
        let mut b = StgBuilder::new("race");
        let p = b.place("p", 1).unwrap();
        let q = b.place("q", 0).unwrap();
        let r = b.place("r", 0).unwrap();
        let a = b.signal("a", SignalKind::Output).unwrap();
        let c = b.signal("c", SignalKind::Output).unwrap();
        b.edge(a, Edge::Rise, &[p], &[q], &[]);
        b.edge(c, Edge::Rise, &[p], &[r], &[]);
        let report = verify(&b.build().unwrap(), 100).unwrap();
        assert!(!report.output_persistent.pass);
    }

    #[test]
    fn dead_marking_outside_idle_is_reported() {
        let mut b = StgBuilder::new("stuck");
        let p0 = b.place("p0", 1).unwrap();
        let p1 = b.place("p1", 0).unwrap();
        b.set_idle_place(p0);
        let a = b.signal("a", SignalKind::Output).unwrap();
        b.edge(a, Edge::Rise, &[p0], &[p1], &[]);
        let report = verify(&b.build().unwrap(), 100).unwrap();
        assert!(!report.deadlock_free.pass);
        assert_eq!(report.deadlock_free.witness.as_ref().unwrap(), &vec!["a+"]);
    }
}
