//! Generator for the interpreted STG of a two-action Tsetlin automaton.
//!
//! States are numbered `1..=2k`: `1` is the deepest exclude state and `2k` the
//! deepest include state. State `s` is named `x{a}{d}` where `a` is the action
//! (1 = exclude, 2 = include) and `d` the distance from the decision boundary,
//! so for `k = 3` the order is `x13 x12 x11 x21 x22 x23`.
//!
//! Each state is an internal signal whose level lives in the place pair
//! `x{a}{d}_0` / `x{a}{d}_1`. From the idle place `p0` the environment raises
//! `p` (penalty) or `r` (reward); the branch for the current state is picked by
//! a read arc on its `_1` place. A branch raises the action output of the
//! resulting state (`a1` exclude, `a2` include), pulses a direction signal
//! (`x{a}L{d}` or `x{a}R{d}`), hands the state token over (raise the next state,
//! then lower the current one), raises `ack`, waits for the input to fall,
//! lowers the action output and finally lowers `ack`, returning to `p0`.

use crate::net::{Edge, PlaceId, SignalId, SignalKind, Stg, StgBuilder, TransitionId};
use crate::StgError;

/// `x{a}{d}` name of state `s` in an automaton with `k` states per action.
pub fn state_signal_name(k: usize, s: usize) -> String {
    let (action, distance) = action_distance(k, s);
    format!("x{action}{distance}")
}

fn action_distance(k: usize, s: usize) -> (usize, usize) {
    if s <= k {
        (1, k - s + 1)
    } else {
        (2, s - k)
    }
}

fn next_state(k: usize, s: usize, penalty: bool) -> usize {
    let exclude = s <= k;
    match (penalty, exclude) {
        (true, true) => s + 1,
        (true, false) => s - 1,
        (false, true) => s.saturating_sub(1).max(1),
        (false, false) => (s + 1).min(2 * k),
    }
}

/// Builds the TA STG with the state token initially at `x11` (state `k`).
pub fn build_ta_stg(states_per_action: usize) -> Stg {
    build_ta_stg_from(states_per_action, states_per_action)
}

/// Builds the TA STG with the state token initially at state `start`.
///
/// # Panics
/// If `states_per_action` is zero or `start` is outside `1..=2k`.
pub fn build_ta_stg_from(states_per_action: usize, start: usize) -> Stg {
    let k = states_per_action;
    assert!(k >= 1, "need at least one state per action");
    assert!((1..=2 * k).contains(&start), "start state {start} outside 1..={}", 2 * k);
    build(k, start).expect("generated TA net is well formed")
}

fn build(k: usize, start: usize) -> Result<Stg, StgError> {
    let mut b = StgBuilder::new(format!("ta_{}_states", 2 * k));
    let p0 = b.place("p0", 1)?;
    b.set_idle_place(p0);

    let p = b.signal("p", SignalKind::Input)?;
    let r = b.signal("r", SignalKind::Input)?;
    let a1 = b.signal("a1", SignalKind::Output)?;
    let a2 = b.signal("a2", SignalKind::Output)?;
    let ack = b.signal("ack", SignalKind::Output)?;

    let mut state_sig = vec![usize::MAX; 2 * k + 1];
    let mut low = vec![usize::MAX; 2 * k + 1];
    let mut high = vec![usize::MAX; 2 * k + 1];
    for s in 1..=2 * k {
        let name = state_signal_name(k, s);
        state_sig[s] = b.signal(name.clone(), SignalKind::Internal)?;
        low[s] = b.place(format!("{name}_0"), u32::from(s != start))?;
        high[s] = b.place(format!("{name}_1"), u32::from(s == start))?;
        b.set_initial_level(state_sig[s], s == start);
    }

    for (input, input_name, penalty) in [(p, "p", true), (r, "r", false)] {
        let chosen = b.place(format!("{input_name}_on"), 0)?;
        b.edge(input, Edge::Rise, &[p0], &[chosen], &[]);
        for s in 1..=2 * k {
            let next = next_state(k, s, penalty);
            let (action, distance) = action_distance(k, s);
            let toward_left = next < s || (next == s && s == 1);
            let dir_name = format!("x{action}{}{distance}", if toward_left { 'L' } else { 'R' });
            let dir = b.signal(dir_name, SignalKind::Internal)?;
            let out = if next <= k { a1 } else { a2 };

            let mut branch = Branch { b: &mut b, prefix: format!("{input_name}_{s}"), step: 0 };
            let mut at = branch.place()?;
            branch.b.edge(out, Edge::Rise, &[chosen], &[at], &[high[s]]);
            at = branch.step(dir, Edge::Rise, at, &[], &[])?;
            if next != s {
                at = branch.step(state_sig[next], Edge::Rise, at, &[low[next]], &[high[next]])?;
                at = branch.step(state_sig[s], Edge::Fall, at, &[high[s]], &[low[s]])?;
            }
            at = branch.step(dir, Edge::Fall, at, &[], &[])?;
            at = branch.step(ack, Edge::Rise, at, &[], &[])?;
            at = branch.step(input, Edge::Fall, at, &[], &[])?;
            at = branch.step(out, Edge::Fall, at, &[], &[])?;
            branch.b.edge(ack, Edge::Fall, &[at], &[p0], &[]);
        }
    }
    b.build()
}

struct Branch<'a> {
    b: &'a mut StgBuilder,
    prefix: String,
    step: usize,
}

impl Branch<'_> {
    fn place(&mut self) -> Result<PlaceId, StgError> {
        let id = self.b.place(format!("{}_{}", self.prefix, self.step), 0)?;
        self.step += 1;
        Ok(id)
    }

    /// Fires `signal edge` from `at` (plus `extra_pre`) into a fresh place (plus `extra_post`).
    fn step(
        &mut self,
        signal: SignalId,
        edge: Edge,
        at: PlaceId,
        extra_pre: &[PlaceId],
        extra_post: &[PlaceId],
    ) -> Result<PlaceId, StgError> {
        let next = self.place()?;
        let pre: Vec<_> = std::iter::once(at).chain(extra_pre.iter().copied()).collect();
        let post: Vec<_> = std::iter::once(next).chain(extra_post.iter().copied()).collect();
        self.b.edge(signal, edge, &pre, &post, &[]);
        Ok(next)
    }
}

/// Handles into a TA STG, looked up by name so imported nets work too.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaStgLayout {
    pub states_per_action: usize,
    pub idle: PlaceId,
    /// `state_high[s - 1]` is the `_1` place of state `s`.
    pub state_high: Vec<PlaceId>,
    pub penalty_rise: TransitionId,
    pub reward_rise: TransitionId,
    pub penalty: SignalId,
    pub reward: SignalId,
    pub a1: SignalId,
    pub a2: SignalId,
    pub ack: SignalId,
}

impl TaStgLayout {
    pub fn of(stg: &Stg, states_per_action: usize) -> Result<Self, StgError> {
        let place = |n: &str| stg.place_id(n).ok_or_else(|| StgError::UnknownPlace(n.into()));
        let signal = |n: &str| stg.signal_id(n).ok_or_else(|| StgError::UnknownSignal(n.into()));
        let transition =
            |n: &str| stg.transition_id(n).ok_or_else(|| StgError::UnknownSignal(n.into()));
        let state_high = (1..=2 * states_per_action)
            .map(|s| place(&format!("{}_1", state_signal_name(states_per_action, s))))
            .collect::<Result<_, _>>()?;
        Ok(Self {
            states_per_action,
            idle: place("p0")?,
            state_high,
            penalty_rise: transition("p+")?,
            reward_rise: transition("r+")?,
            penalty: signal("p")?,
            reward: signal("r")?,
            a1: signal("a1")?,
            a2: signal("a2")?,
            ack: signal("ack")?,
        })
    }
}
