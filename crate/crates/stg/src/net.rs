use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::StgError;

pub type PlaceId = usize;
pub type TransitionId = usize;
pub type SignalId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignalKind {
    Input,
    Output,
    Internal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signal {
    pub name: String,
    pub kind: SignalKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Edge {
    Rise,
    Fall,
}

impl Edge {
    pub fn symbol(self) -> char {
        match self {
            Edge::Rise => '+',
            Edge::Fall => '-',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Signal { signal: SignalId, edge: Edge },
    Dummy,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    /// Unique name, e.g. `p+`, `a1+/3`, or a dummy name.
    pub name: String,
    pub label: Label,
    pub pre: Vec<PlaceId>,
    pub post: Vec<PlaceId>,
    /// Places tested without being consumed.
    pub read: Vec<PlaceId>,
}

/// Token count per place.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Marking(pub Vec<u32>);

impl Marking {
    pub fn tokens(&self, place: PlaceId) -> u32 {
        self.0[place]
    }

    pub fn is_marked(&self, place: PlaceId) -> bool {
        self.0[place] > 0
    }

    pub fn is_safe(&self) -> bool {
        self.0.iter().all(|&c| c <= 1)
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&c| u64::from(c)).sum()
    }

    pub fn marked_places(&self) -> impl Iterator<Item = PlaceId> + '_ {
        self.0.iter().enumerate().filter(|(_, &c)| c > 0).map(|(p, _)| p)
    }
}

/// An immutable signal transition graph.
#[derive(Debug, Clone)]
pub struct Stg {
    name: String,
    places: Vec<String>,
    signals: Vec<Signal>,
    transitions: Vec<Transition>,
    initial: Marking,
    initial_code: Vec<bool>,
    idle_place: Option<PlaceId>,
    /// place -> transitions that consume or read it
    consumers: Vec<Vec<TransitionId>>,
}

impl Stg {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn places(&self) -> &[String] {
        &self.places
    }

    pub fn signals(&self) -> &[Signal] {
        &self.signals
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transition(&self, t: TransitionId) -> &Transition {
        &self.transitions[t]
    }

    pub fn initial_marking(&self) -> &Marking {
        &self.initial
    }

    /// Signal levels at the initial marking.
    pub fn initial_code(&self) -> &[bool] {
        &self.initial_code
    }

    /// Designated quiescent place, exempt from the deadlock check when marked.
    pub fn idle_place(&self) -> Option<PlaceId> {
        self.idle_place
    }

    pub fn place_id(&self, name: &str) -> Option<PlaceId> {
        self.places.iter().position(|p| p == name)
    }

    pub fn signal_id(&self, name: &str) -> Option<SignalId> {
        self.signals.iter().position(|s| s.name == name)
    }

    pub fn transition_id(&self, name: &str) -> Option<TransitionId> {
        self.transitions.iter().position(|t| t.name == name)
    }

    pub fn consumers(&self, place: PlaceId) -> &[TransitionId] {
        &self.consumers[place]
    }

    pub fn signal_of(&self, t: TransitionId) -> Option<&Signal> {
        match self.transitions[t].label {
            Label::Signal { signal, .. } => Some(&self.signals[signal]),
            Label::Dummy => None,
        }
    }

    pub fn is_input(&self, t: TransitionId) -> bool {
        matches!(self.signal_of(t), Some(s) if s.kind == SignalKind::Input)
    }

    /// `p0 -> t` style rendering of a label, e.g. `a1+`.
    pub fn label_text(&self, t: TransitionId) -> String {
        match self.transitions[t].label {
            Label::Signal { signal, edge } => format!("{}{}", self.signals[signal].name, edge.symbol()),
            Label::Dummy => self.transitions[t].name.clone(),
        }
    }

    pub fn is_enabled(&self, marking: &Marking, t: TransitionId) -> bool {
        let tr = &self.transitions[t];
        tr.pre.iter().chain(&tr.read).all(|&p| marking.0[p] > 0) && self.multi_pre_ok(marking, tr)
    }

    // a place listed twice in `pre` needs two tokens
    fn multi_pre_ok(&self, marking: &Marking, tr: &Transition) -> bool {
        if tr.pre.len() < 2 {
            return true;
        }
        tr.pre.iter().all(|&p| {
            let need = tr.pre.iter().filter(|&&q| q == p).count() as u32;
            marking.0[p] >= need
        })
    }

    /// All transitions enabled at `marking`, in ascending id order.
    pub fn enabled(&self, marking: &Marking) -> Vec<TransitionId> {
        let mut out = Vec::new();
        self.enabled_into(marking, &mut out);
        out
    }

    pub fn enabled_into(&self, marking: &Marking, out: &mut Vec<TransitionId>) {
        out.clear();
        for p in marking.marked_places() {
            for &t in &self.consumers[p] {
                if self.is_enabled(marking, t) {
                    out.push(t);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
    }

    pub fn fire(&self, marking: &Marking, t: TransitionId) -> Result<Marking, StgError> {
        let mut next = marking.clone();
        self.fire_in_place(&mut next, t)?;
        Ok(next)
    }

    pub fn fire_in_place(&self, marking: &mut Marking, t: TransitionId) -> Result<(), StgError> {
        if !self.is_enabled(marking, t) {
            return Err(StgError::NotEnabled(self.transitions[t].name.clone()));
        }
        let tr = &self.transitions[t];
        for &p in &tr.pre {
            marking.0[p] -= 1;
        }
        for &p in &tr.post {
            marking.0[p] += 1;
        }
        Ok(())
    }
}

impl fmt::Display for Stg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} places, {} transitions, {} signals",
            self.name,
            self.places.len(),
            self.transitions.len(),
            self.signals.len()
        )
    }
}

/// Incremental constructor for [`Stg`].
#[derive(Debug, Default)]
pub struct StgBuilder {
    name: String,
    places: Vec<String>,
    place_index: HashMap<String, PlaceId>,
    tokens: Vec<u32>,
    signals: Vec<Signal>,
    initial_high: Vec<bool>,
    transitions: Vec<Transition>,
    instance_count: HashMap<(SignalId, Edge), usize>,
    idle_place: Option<PlaceId>,
}

impl StgBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), ..Default::default() }
    }

    pub fn place(&mut self, name: impl Into<String>, tokens: u32) -> Result<PlaceId, StgError> {
        let name = name.into();
        if self.place_index.contains_key(&name) {
            return Err(StgError::Duplicate(name));
        }
        let id = self.places.len();
        self.place_index.insert(name.clone(), id);
        self.places.push(name);
        self.tokens.push(tokens);
        Ok(id)
    }

    pub fn place_id(&self, name: &str) -> Option<PlaceId> {
        self.place_index.get(name).copied()
    }

    pub fn set_tokens(&mut self, place: PlaceId, tokens: u32) {
        self.tokens[place] = tokens;
    }

    pub fn signal(&mut self, name: impl Into<String>, kind: SignalKind) -> Result<SignalId, StgError> {
        let name = name.into();
        if self.signals.iter().any(|s| s.name == name) {
            return Err(StgError::Duplicate(name));
        }
        self.signals.push(Signal { name, kind });
        self.initial_high.push(false);
        Ok(self.signals.len() - 1)
    }

    pub fn signal_id(&self, name: &str) -> Option<SignalId> {
        self.signals.iter().position(|s| s.name == name)
    }

    pub fn set_initial_level(&mut self, signal: SignalId, high: bool) {
        self.initial_high[signal] = high;
    }

    pub fn set_idle_place(&mut self, place: PlaceId) {
        self.idle_place = Some(place);
    }

    /// Adds a signal edge. Repeated edges of one signal get `/k` instance suffixes.
    pub fn edge(
        &mut self,
        signal: SignalId,
        edge: Edge,
        pre: &[PlaceId],
        post: &[PlaceId],
        read: &[PlaceId],
    ) -> TransitionId {
        let count = self.instance_count.entry((signal, edge)).or_insert(0);
        let base = format!("{}{}", self.signals[signal].name, edge.symbol());
        let name = if *count == 0 { base } else { format!("{base}/{count}") };
        *count += 1;
        self.push(name, Label::Signal { signal, edge }, pre, post, read)
    }

    /// Adds a signal edge with an explicit instance name (used by the parser).
    pub fn named_edge(
        &mut self,
        name: impl Into<String>,
        signal: SignalId,
        edge: Edge,
        pre: &[PlaceId],
        post: &[PlaceId],
        read: &[PlaceId],
    ) -> TransitionId {
        *self.instance_count.entry((signal, edge)).or_insert(0) += 1;
        self.push(name.into(), Label::Signal { signal, edge }, pre, post, read)
    }

    pub fn dummy(
        &mut self,
        name: impl Into<String>,
        pre: &[PlaceId],
        post: &[PlaceId],
        read: &[PlaceId],
    ) -> TransitionId {
        self.push(name.into(), Label::Dummy, pre, post, read)
    }

    fn push(
        &mut self,
        name: String,
        label: Label,
        pre: &[PlaceId],
        post: &[PlaceId],
        read: &[PlaceId],
    ) -> TransitionId {
        self.transitions.push(Transition {
            name,
            label,
            pre: pre.to_vec(),
            post: post.to_vec(),
            read: read.to_vec(),
        });
        self.transitions.len() - 1
    }

    pub fn transitions_mut(&mut self) -> &mut [Transition] {
        &mut self.transitions
    }

    pub fn build(self) -> Result<Stg, StgError> {
        let mut consumers = vec![Vec::new(); self.places.len()];
        for (t, tr) in self.transitions.iter().enumerate() {
            if tr.pre.is_empty() && tr.read.is_empty() {
                return Err(StgError::Unguarded(tr.name.clone()));
            }
            for &p in tr.pre.iter().chain(&tr.read) {
                if p >= self.places.len() {
                    return Err(StgError::UnknownPlace(p.to_string()));
                }
                if !consumers[p].contains(&t) {
                    consumers[p].push(t);
                }
            }
            if let Some(&p) = tr.post.iter().find(|&&p| p >= self.places.len()) {
                return Err(StgError::UnknownPlace(p.to_string()));
            }
        }
        Ok(Stg {
            name: self.name,
            places: self.places,
            signals: self.signals,
            transitions: self.transitions,
            initial: Marking(self.tokens),
            initial_code: self.initial_high,
            idle_place: self.idle_place,
            consumers,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_net() -> (Stg, TransitionId) {
        let mut b = StgBuilder::new("line");
        let p0 = b.place("p0", 1).unwrap();
        let p1 = b.place("p1", 0).unwrap();
        let s = b.signal("t", SignalKind::Output).unwrap();
        let t = b.edge(s, Edge::Rise, &[p0], &[p1], &[]);
        (b.build().unwrap(), t)
    }

    #[test]
    fn token_at_source_enables() {
        let (net, t) = line_net();
        assert_eq!(net.enabled(net.initial_marking()), vec![t]);
    }

    #[test]
    fn token_at_sink_enables_nothing() {
        let (net, t) = line_net();
        let m = net.fire(net.initial_marking(), t).unwrap();
        assert_eq!(m.0, vec![0, 1]);
        assert!(net.enabled(&m).is_empty());
    }

    #[test]
    fn firing_disabled_transition_errors() {
        let (net, t) = line_net();
        let m = net.fire(net.initial_marking(), t).unwrap();
        assert_eq!(net.fire(&m, t), Err(StgError::NotEnabled("t+".into())));
    }

    #[test]
    fn read_arc_guards_without_consuming() {
        let mut b = StgBuilder::new("read");
        let p0 = b.place("p0", 1).unwrap();
        let p1 = b.place("p1", 0).unwrap();
        let guard = b.place("g", 0).unwrap();
        let s = b.signal("t", SignalKind::Output).unwrap();
        let t = b.edge(s, Edge::Rise, &[p0], &[p1], &[guard]);
        let net = b.build().unwrap();
        assert!(net.enabled(net.initial_marking()).is_empty());

        let mut m = net.initial_marking().clone();
        m.0[guard] = 1;
        assert_eq!(net.enabled(&m), vec![t]);
        let after = net.fire(&m, t).unwrap();
        assert_eq!(after.tokens(guard), 1);
        assert_eq!(after.tokens(p1), 1);
    }

    #[test]
    fn unguarded_transition_rejected() {
        let mut b = StgBuilder::new("bad");
        let p = b.place("p", 0).unwrap();
        let s = b.signal("t", SignalKind::Output).unwrap();
        b.edge(s, Edge::Rise, &[], &[p], &[]);
        assert!(matches!(b.build(), Err(StgError::Unguarded(_))));
    }

    #[test]
    fn repeated_edges_get_instance_suffixes() {
        let mut b = StgBuilder::new("inst");
        let p = b.place("p", 1).unwrap();
        let s = b.signal("a", SignalKind::Output).unwrap();
        b.edge(s, Edge::Rise, &[p], &[p], &[]);
        b.edge(s, Edge::Rise, &[p], &[p], &[]);
        let net = b.build().unwrap();
        assert_eq!(net.transition(0).name, "a+");
        assert_eq!(net.transition(1).name, "a+/1");
    }
}
