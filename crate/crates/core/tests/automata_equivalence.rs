use std::sync::Arc;

use tmsim_core::automata::*;
use tmsim_core::TaCommand::{self, *};

fn onehot(eqs: &Arc<NextStateEquations>) -> impl Fn(usize) -> Result<OneHotTa, tmsim_core::CoreError> + '_ {
    move |s| OneHotTa::new(Arc::clone(eqs), s)
}

/// The six published equations, written out by hand.
fn published_equations() -> NextStateEquations {
    use Input::{P, R};
    let t = |from, input| Term { from, input };
    // x13 x12 x11 x21 x22 x23 -> 1..6
    NextStateEquations::from_terms(
        3,
        vec![
            vec![t(1, R), t(2, R)],
            vec![t(3, R), t(1, P)],
            vec![t(2, P), t(4, P)],
            vec![t(5, P), t(3, P)],
            vec![t(4, R), t(6, P)],
            vec![t(6, R), t(5, R)],
        ],
    )
}

#[test]
fn generated_equations_equal_published_set() {
    let gen = NextStateEquations::generate(3);
    let pubd = published_equations();
    for s in 1..=6 {
        let mut a = gen.equation(s).to_vec();
        let mut b = pubd.equation(s).to_vec();
        a.sort();
        b.sort();
        assert_eq!(a, b, "state {s}");
    }
}

#[test]
fn onehot_single_steps_match_counter() {
    let eqs = published_equations();
    let mut cases = 0;
    for s in 1..=6 {
        let mut x = vec![false; 6];
        x[s - 1] = true;
        for cmd in TaCommand::ALL {
            let [_, p, _] = cmd.rails();
            let next = eqs.next(&x, p, cmd == Reward).unwrap();
            assert_eq!(next.iter().filter(|&&b| b).count(), 1);
            let state = next.iter().position(|&b| b).unwrap() + 1;
            assert_eq!(state, counter_step(s, cmd, 3).unwrap());
            cases += 1;
        }
    }
    assert_eq!(cases, 18);
}

#[test]
fn counter_vs_onehot_length_12() {
    let eqs = Arc::new(published_equations());
    let r = check_equivalence(|s| CounterTa::new(3, s), onehot(&eqs), 3, 12);
    assert!(r.pass, "{:?}", r.counterexample);
}

#[test]
fn counter_vs_stg_length_8() {
    let base = StgTa::new(3, 3).unwrap();
    let r = check_equivalence(|s| CounterTa::new(3, s), |s| base.with_state(s), 3, 8);
    assert!(r.pass, "{:?}", r.counterexample);
}

#[test]
fn stg_built_per_start_state_matches_counter() {
    let r = check_equivalence(|s| CounterTa::new(3, s), |s| StgTa::new(3, s), 3, 4);
    assert!(r.pass, "{:?}", r.counterexample);
}

#[test]
fn parametric_realizations_agree_for_other_depths() {
    for n in [1, 2, 4] {
        let eqs = Arc::new(NextStateEquations::generate(n));
        let r = check_equivalence(|s| CounterTa::new(n, s), onehot(&eqs), n, 7);
        assert!(r.pass, "n={n}");
        let r = check_equivalence(|s| CounterTa::new(n, s), |s| StgTa::new(n, s), n, 5);
        assert!(r.pass, "n={n}: {:?}", r.counterexample);
    }
}

#[test]
fn corrupted_x12_equation_is_caught_with_short_witness() {
    let mut eqs = published_equations();
    // x12 = x11·r + x13·r  (the x13·p term replaced)
    *eqs.equation_mut(2) = vec![Term { from: 3, input: Input::R }, Term { from: 1, input: Input::R }];
    let eqs = Arc::new(eqs);
    let r = check_equivalence(|s| CounterTa::new(3, s), onehot(&eqs), 3, 12);
    assert!(!r.pass);
    let m = r.counterexample.unwrap();
    assert_eq!(m.commands.len(), 1);
    assert!(matches!((m.start, m.commands[0]), (1, Reward) | (1, Penalty)));
}

#[test]
fn reward_then_penalty_cancels_away_from_edges() {
    for s in [2, 5] {
        let mut ta = StgTa::new(3, s).unwrap();
        ta.step(Reward).unwrap();
        ta.step(Penalty).unwrap();
        assert_eq!(ta.state(), s);
        let mut c = CounterTa::new(3, s).unwrap();
        c.step(Reward).unwrap();
        c.step(Penalty).unwrap();
        assert_eq!(c.state(), s);
    }
}

#[test]
fn read_action_per_realization() {
    assert_eq!(CounterTa::new(3, 2).unwrap().action(), Action::Exclude);
    let eqs = Arc::new(NextStateEquations::generate(3));
    assert_eq!(OneHotTa::new(eqs, 5).unwrap().action(), Action::Include);
    let sta = StgTa::new(3, 4).unwrap();
    assert!(sta.marking().is_marked(sta.stg().place_id("x21_1").unwrap()));
    assert_eq!(sta.action(), Action::Include);
}

#[test]
fn handshake_returns_to_idle_within_bound() {
    let bound = tmsim_stg::reachability(&tmsim_stg::build_ta_stg(3), 1_000_000).unwrap().len();
    for s in 1..=6 {
        for cmd in [Penalty, Reward] {
            let mut ta = StgTa::new(3, s).unwrap();
            let trace = ta.handshake(cmd).unwrap();
            assert!(ta.is_idle());
            assert!(trace.fired.len() <= bound);
        }
    }
}

#[test]
fn snapshot_json_roundtrip() {
    let ta = CounterTa::new(3, 5).unwrap();
    let snap = TaSnapshot::of(Realization::Counter, &ta);
    let json = serde_json::to_string(&snap).unwrap();
    assert_eq!(json, r#"{"realization":"counter","states_per_action":3,"state":5}"#);
    assert_eq!(serde_json::from_str::<TaSnapshot>(&json).unwrap(), snap);
}
