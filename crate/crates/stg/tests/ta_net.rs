use proptest::prelude::*;
use tmsim_stg::*;

fn layout(stg: &Stg, k: usize) -> TaStgLayout {
    TaStgLayout::of(stg, k).unwrap()
}

#[test]
fn verify_passes_for_small_automata() {
    for k in 1..=3 {
        for start in 1..=2 * k {
            let report = verify(&build_ta_stg_from(k, start), 1_000_000).unwrap();
            assert!(report.all_pass(), "k={k} start={start}: {report:?}");
        }
    }
}

#[test]
fn six_state_net_has_finite_state_space() {
    let report = verify(&build_ta_stg(3), 1_000_000).unwrap();
    assert!(report.states > 6);
    assert!(report.edges >= report.states);
}

#[test]
fn one_state_place_marked_at_every_idle_state() {
    for k in 1..=3 {
        let stg = build_ta_stg(k);
        let l = layout(&stg, k);
        let g = reachability(&stg, 1_000_000).unwrap();
        let mut idle_states = 0;
        for st in g.states() {
            if st.marking.is_marked(l.idle) {
                idle_states += 1;
                let n = l.state_high.iter().filter(|&&p| st.marking.is_marked(p)).count();
                assert_eq!(n, 1);
            }
        }
        assert_eq!(idle_states, 2 * k);
    }
}

/// Every path from idle through one input choice back to idle emits the same
/// sequence of observable (input/output) labels.
#[test]
fn observable_trace_is_unique_per_input_choice() {
    let k = 3;
    let stg = build_ta_stg(k);
    let l = layout(&stg, k);
    let g = reachability(&stg, 1_000_000).unwrap();
    for (s, st) in g.states().iter().enumerate() {
        if !st.marking.is_marked(l.idle) {
            continue;
        }
        for &(t, next) in g.successors(s) {
            let mut traces = std::collections::BTreeSet::new();
            let mut stack = vec![(next, vec![stg.label_text(t)])];
            while let Some((cur, trace)) = stack.pop() {
                if g.states()[cur].marking.is_marked(l.idle) {
                    traces.insert(trace);
                    continue;
                }
                for &(u, to) in g.successors(cur) {
                    let mut tr = trace.clone();
                    if stg.signal_of(u).is_some_and(|sig| sig.kind != SignalKind::Internal) {
                        tr.push(stg.label_text(u));
                    }
                    stack.push((to, tr));
                }
            }
            assert_eq!(traces.len(), 1, "state {s} via {}: {traces:?}", stg.label_text(t));
        }
    }
}

#[test]
fn missing_ack_fall_output_arc_deadlocks() {
    let good = build_ta_stg(3);
    let text = write_g(&good);
    // drop the arc from the first ack- back to p0
    let ack_fall = good
        .transitions()
        .iter()
        .find(|t| t.name.starts_with("ack-"))
        .unwrap()
        .name
        .clone();
    let mutated: String = text
        .lines()
        .map(|line| {
            if line == format!("{ack_fall} p0") {
                // keep the transition alive through a fresh sink place
                format!("{ack_fall} sink")
            } else {
                line.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join("\n");
    assert_ne!(mutated, text.trim_end());
    let bad = parse_g(&mutated).unwrap();
    let report = verify(&bad, 1_000_000).unwrap();
    assert!(!report.deadlock_free.pass);
    let witness = report.deadlock_free.witness.unwrap();
    assert_eq!(witness.last().unwrap(), &ack_fall);
}

#[test]
fn consecutive_penalty_rises_are_inconsistent() {
    let mut b = StgBuilder::new("pp");
    let p0 = b.place("p0", 1).unwrap();
    let p1 = b.place("p1", 0).unwrap();
    let p2 = b.place("p2", 0).unwrap();
    let p = b.signal("p", SignalKind::Input).unwrap();
    b.edge(p, Edge::Rise, &[p0], &[p1], &[]);
    b.edge(p, Edge::Rise, &[p1], &[p2], &[]);
    let report = verify(&b.build().unwrap(), 100).unwrap();
    assert!(!report.consistent.pass);
}

#[test]
fn report_serializes_to_json() {
    let report = verify(&build_ta_stg(1), 10_000).unwrap();
    let json = serde_json::to_value(&report).unwrap();
    assert_eq!(json["one_safe"]["pass"], true);
    assert!(json["states"].as_u64().unwrap() > 0);
}

#[test]
fn g_roundtrip_is_stable() {
    let stg = build_ta_stg(3);
    let once = write_g(&stg);
    let twice = write_g(&parse_g(&once).unwrap());
    let sorted = |s: &str| {
        let mut v: Vec<String> = s.lines().map(str::to_owned).collect();
        v.sort();
        v
    };
    assert_eq!(sorted(&once), sorted(&twice));
}

proptest! {
    /// Random walks through the token game change the token count exactly by
    /// |post| - |pre| per firing and never touch read-arc places.
    #[test]
    fn firing_conserves_tokens(k in 1usize..=3, choices in prop::collection::vec(0usize..8, 1..200)) {
        let stg = build_ta_stg(k);
        let mut m = stg.initial_marking().clone();
        for c in choices {
            let en = stg.enabled(&m);
            prop_assert!(!en.is_empty());
            let t = en[c % en.len()];
            let tr = stg.transition(t);
            let next = stg.fire(&m, t).unwrap();
            let delta = next.total() as i64 - m.total() as i64;
            prop_assert_eq!(delta, tr.post.len() as i64 - tr.pre.len() as i64);
            for &r in &tr.read {
                prop_assert_eq!(next.tokens(r), m.tokens(r));
            }
            prop_assert!(next.is_safe());
            m = next;
        }
    }

    #[test]
    fn disabled_firing_is_rejected(k in 1usize..=3) {
        let stg = build_ta_stg(k);
        let m = stg.initial_marking();
        let en = stg.enabled(m);
        for t in 0..stg.transitions().len() {
            let ok = stg.fire(m, t).is_ok();
            prop_assert_eq!(ok, en.contains(&t));
        }
    }
}
