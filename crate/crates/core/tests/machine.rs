use proptest::prelude::*;
use tmsim_core::feedback::ConstSource;
use tmsim_core::*;

fn config(features: usize, clauses: usize) -> TmConfig {
    TmConfig {
        num_features: features,
        num_clauses: clauses,
        threshold: 2,
        state_depth: 3,
        fb2_polarity: Fb2Polarity::Published,
        ..TmConfig::default()
    }
}

/// q2 = q3 = 1 on a fresh 2-feature, 2-clause machine (all automata at 3 of 6).
/// Sample f = [1, 0], y = 1: FB1 = Type I; clause 0 (positive) keeps Type I,
/// clause 1 (negative) swaps to Type II. Both empty clauses output 1.
///   clause 0, literals [1, 0, 0, 1]: x=1 -> Penalty (3 -> 4), x=0 -> Reward (3 -> 2)
///   clause 1: x=0 -> Penalty (3 -> 4), x=1 -> Inaction
#[test]
fn hand_trace_with_forced_bits() {
    let mut tm = TsetlinMachine::new(config(2, 2)).unwrap();
    let r = tm
        .train_step(&Sample { features: vec![true, false], label: true }, &mut ConstSource(true))
        .unwrap();
    let states = |j| (0..4).map(|l| tm.ta_state(j, l)).collect::<Vec<_>>();
    assert_eq!(states(0), [4, 2, 2, 4]);
    assert_eq!(states(1), [3, 4, 4, 3]);
    assert_eq!((r.penalties, r.rewards, r.inactions), (4, 2, 2));
    assert_eq!((r.type1_clauses, r.type2_clauses), (1, 1));
}

#[test]
fn type0_clause_gets_only_inaction() {
    // q2 = 0 with Type I input blocks feedback in both clauses
    let mut tm = TsetlinMachine::new(config(2, 2)).unwrap();
    let before = tm.clone();
    let r = tm
        .train_step(&Sample { features: vec![true, true], label: true }, &mut ConstSource(false))
        .unwrap();
    assert_eq!(r.inactions, 8);
    assert_eq!(tm.clauses(), before.clauses());
}

#[test]
fn untrained_machine_predicts_one() {
    let tm = TsetlinMachine::new(TmConfig::default()).unwrap();
    for i in 0..32u32 {
        let f: Vec<bool> = (0..16).map(|b| (i >> (b % 5)) & 1 == 1).collect();
        let v = tm.evaluate(&f, EvalMode::Infer).unwrap();
        assert!(v.clause_outputs.iter().all(|&c| !c));
        assert!(v.predicted);
    }
}

#[test]
fn accuracy_of_single_correct_sample() {
    let tm = TsetlinMachine::new(config(2, 2)).unwrap();
    let s = Sample { features: vec![false, true], label: true };
    assert_eq!(tm.accuracy(&[s]).unwrap(), 1.0);
    assert_eq!(tm.accuracy(&[]), Err(CoreError::EmptyDataset));
}

#[test]
fn epoch_errors_and_no_op() {
    let mut tm = TsetlinMachine::new(config(2, 2)).unwrap();
    let mut src = IdealSource::new(1);
    assert!(tm.train_epoch(&[], &mut src).is_err());
    tm.learn = false;
    let before = tm.clauses().to_vec();
    let stats = tm
        .train_epoch(&[Sample { features: vec![true, false], label: true }], &mut src)
        .unwrap();
    assert_eq!(stats.updates.state_changes, 0);
    assert_eq!(tm.clauses(), &before[..]);
}

fn toy_data() -> Vec<Sample> {
    (0..32u32)
        .map(|i| {
            let f: Vec<bool> = (0..5).map(|b| (i >> b) & 1 == 1).collect();
            let label = f[0] && !f[2];
            Sample { features: f, label }
        })
        .collect()
}

#[test]
fn training_is_deterministic() {
    let run = || {
        let mut tm = TsetlinMachine::new(TmConfig {
            num_features: 5,
            num_clauses: 10,
            threshold: 5,
            seed: 9,
            ..TmConfig::default()
        })
        .unwrap();
        let mut src = IdealSource::new(9);
        let stats: Vec<_> = (0..5).map(|_| tm.train_epoch(&toy_data(), &mut src).unwrap()).collect();
        (tm, stats)
    };
    assert_eq!(run(), run());
}

#[test]
fn learns_a_simple_conjunction() {
    let mut tm = TsetlinMachine::new(TmConfig {
        num_features: 5,
        num_clauses: 10,
        threshold: 5,
        state_depth: 20,
        seed: 3,
        ..TmConfig::default()
    })
    .unwrap();
    let mut src = IdealSource::new(3);
    for _ in 0..60 {
        tm.train_epoch(&toy_data(), &mut src).unwrap();
    }
    assert!(tm.accuracy(&toy_data()).unwrap() >= 0.9);
}

#[test]
fn snapshot_roundtrips_through_json() {
    let mut tm = TsetlinMachine::new(config(3, 4)).unwrap();
    tm.set_ta_state(2, 1, 6).unwrap();
    assert!(tm.set_ta_state(0, 0, 7).is_err());
    let snap = tm.snapshot();
    let back: MachineSnapshot = serde_json::from_str(&serde_json::to_string(&snap).unwrap()).unwrap();
    assert_eq!(back, snap);
    let model: TsetlinMachine = serde_json::from_str(&serde_json::to_string(&tm).unwrap()).unwrap();
    assert_eq!(model, tm);
}

proptest! {
    #[test]
    fn one_command_per_automaton(
        states in prop::collection::vec(1u32..=6, 4 * 6),
        f in prop::collection::vec(any::<bool>(), 3),
        label: bool,
        seed: u64,
    ) {
        let mut tm = TsetlinMachine::new(config(3, 4)).unwrap();
        for (i, &s) in states.iter().enumerate() {
            tm.set_ta_state(i / 6, i % 6, s).unwrap();
        }
        let v = tm.evaluate(&f, EvalMode::Train).unwrap();
        prop_assert_eq!(v.clause_outputs.len(), 4);
        prop_assert!(v.vote_sum.abs() <= 2);
        let frozen = tm.clone();
        let _ = tm.evaluate(&f, EvalMode::Infer).unwrap();
        prop_assert_eq!(&tm, &frozen);
        let r = tm.train_step(&Sample { features: f, label }, &mut IdealSource::new(seed)).unwrap();
        prop_assert_eq!(r.total(), 24);
        for j in 0..4 {
            for l in 0..6 {
                prop_assert!((1..=6).contains(&tm.ta_state(j, l)));
            }
        }
    }

    #[test]
    fn learn_off_never_moves(states in prop::collection::vec(1u32..=6, 4 * 6), f in prop::collection::vec(any::<bool>(), 3), label: bool) {
        let mut tm = TsetlinMachine::new(config(3, 4)).unwrap();
        for (i, &s) in states.iter().enumerate() {
            tm.set_ta_state(i / 6, i % 6, s).unwrap();
        }
        tm.learn = false;
        let before = tm.clone();
        tm.train_step(&Sample { features: f, label }, &mut IdealSource::new(0)).unwrap();
        prop_assert_eq!(tm, before);
    }
}
