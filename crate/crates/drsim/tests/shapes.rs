use rand::Rng;
use tmsim_drsim::*;

const TRIALS: usize = 10_000;

#[test]
fn clause_latency_clusters_low_with_c1_at_the_top() {
    let n = 8;
    let net = build_clause_netlist(n).unwrap();
    let d = DelayModel::unit();
    let runs = run_trials(&net, &d, TRIALS, 11, |rng| uniform_codeword(rng, 3 * n)).unwrap();
    let worst = worst_case_latency(&net, &d, &Normalization::Pattern(clause_worst_case(n))).unwrap().unwrap();
    let (ones, zeros): (Vec<_>, Vec<_>) = runs.iter().partition(|(_, r)| r.output_values[0] == DrValue::ONE);
    let below = runs.iter().filter(|(_, r)| r.latency_s2c / worst < 0.5).count();
    assert!(below as f64 / TRIALS as f64 > 0.5);
    assert!(!ones.is_empty());
    assert!(ones.iter().all(|(_, r)| r.latency_s2c == worst));
    let mut zero_lat: Vec<f64> = zeros.iter().map(|(_, r)| r.latency_s2c).collect();
    zero_lat.sort_by(f64::total_cmp);
    let p95 = zero_lat[zero_lat.len() * 95 / 100];
    assert!(p95 < worst);
}

#[test]
fn comparator_stage_counts_halve_per_bit() {
    let w = 8;
    let net = build_comparator_netlist(w).unwrap();
    let runs = run_trials(&net, &DelayModel::unit(), TRIALS, 12, |rng| {
        comparator_codeword(rng.gen_range(0..256), rng.gen_range(0..256), w)
    })
    .unwrap();
    let mut bins = [0usize; 9];
    for (_, r) in &runs {
        bins[r.activated_count(&net, GateKind::Comp1)] += 1;
    }
    assert_eq!(bins[0], 0);
    assert!(bins[1..8].windows(2).all(|p| p[0] > p[1]), "{bins:?}");
    let mean = (1..=8).map(|k| k * bins[k]).sum::<usize>() as f64 / TRIALS as f64;
    assert!((mean - (2.0 - 2f64.powi(-7))).abs() < 0.02, "{mean}");
}

#[test]
fn popcount_latency_is_unimodal_and_right_skewed() {
    let net = build_popcount_netlist(9).unwrap();
    let stats = latency_distribution(
        &net,
        &DelayModel::unit(),
        |rng| uniform_codeword(rng, 9),
        TRIALS,
        13,
        &Normalization::Exhaustive,
        8,
    )
    .unwrap();
    assert!(stats.skewness > 0.0);
    assert!(stats.mean > stats.median);
    assert!(stats.max <= 1.0 && stats.min > 0.0);
}

#[test]
fn distribution_is_independent_of_thread_count() {
    let net = build_clause_netlist(4).unwrap();
    let sample = |rng: &mut rand_chacha::ChaCha8Rng| uniform_codeword(rng, 12);
    let a = latency_distribution(&net, &DelayModel::unit(), sample, 500, 3, &Normalization::Raw, 5).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = pool
        .install(|| latency_distribution(&net, &DelayModel::unit(), sample, 500, 3, &Normalization::Raw, 5))
        .unwrap();
    assert_eq!(a, b);
    assert!(latency_distribution(&net, &DelayModel::unit(), sample, 0, 3, &Normalization::Raw, 5).is_err());
}
