//! Repeated cycle simulation over sampled codewords, parallel across trials.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::gate::DelayModel;
use crate::netlist::DrNetlist;
use crate::sim::{SimResult, Simulator};
use crate::stats::LatencyStats;
use crate::value::DrValue;
use crate::DrError;

/// Reference latency used to normalize a distribution.
#[derive(Debug, Clone, PartialEq)]
pub enum Normalization {
    Raw,
    /// Simulate this codeword; its latency (or the largest observed one) is 1.
    Pattern(Vec<DrValue>),
    /// Enumerate every boolean codeword (at most 2^20).
    Exhaustive,
}

/// Trial `i` draws from a ChaCha8 stream `i` keyed by `seed`, so results do
/// not depend on how trials are spread over threads.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

pub fn uniform_codeword<R: Rng>(rng: &mut R, len: usize) -> Vec<DrValue> {
    (0..len).map(|_| DrValue::bit(rng.gen())).collect()
}

pub fn run_trials<F>(
    netlist: &DrNetlist,
    delays: &DelayModel,
    trials: usize,
    seed: u64,
    sampler: F,
) -> Result<Vec<(Vec<DrValue>, SimResult)>, DrError>
where
    F: Fn(&mut ChaCha8Rng) -> Vec<DrValue> + Sync,
{
    (0..trials)
        .into_par_iter()
        .map_init(
            || Simulator::new(netlist, *delays),
            |sim, i| {
                let inputs = sampler(&mut trial_rng(seed, i as u64));
                let r = sim.simulate_cycle(&inputs)?;
                Ok((inputs, r))
            },
        )
        .collect()
}

pub fn worst_case_latency(netlist: &DrNetlist, delays: &DelayModel, norm: &Normalization) -> Result<Option<f64>, DrError> {
    match norm {
        Normalization::Raw => Ok(None),
        Normalization::Pattern(p) => Ok(Some(Simulator::new(netlist, *delays).simulate_cycle(p)?.latency_s2c)),
        Normalization::Exhaustive => {
            let k = netlist.primary_inputs().len();
            if k > 20 {
                return Err(DrError::Config(format!("{k} inputs are too many to enumerate")));
            }
            let worst = (0..1u64 << k)
                .into_par_iter()
                .map_init(
                    || Simulator::new(netlist, *delays),
                    |sim, bits| {
                        let inputs: Vec<DrValue> = (0..k).map(|i| DrValue::bit(bits >> i & 1 == 1)).collect();
                        sim.simulate_cycle(&inputs).map(|r| r.latency_s2c)
                    },
                )
                .try_reduce(|| 0.0, |a, b| Ok(f64::max(a, b)))?;
            Ok(Some(worst))
        }
    }
}

/// Spacer-to-codeword latency distribution over `trials` sampled codewords.
#[allow(clippy::too_many_arguments)]
pub fn latency_distribution<F>(
    netlist: &DrNetlist,
    delays: &DelayModel,
    sampler: F,
    trials: usize,
    seed: u64,
    normalize: &Normalization,
    bins: usize,
) -> Result<LatencyStats, DrError>
where
    F: Fn(&mut ChaCha8Rng) -> Vec<DrValue> + Sync,
{
    if trials == 0 {
        return Err(DrError::Config("trials must be at least 1".into()));
    }
    let raw: Vec<f64> = run_trials(netlist, delays, trials, seed, sampler)?
        .into_iter()
        .map(|(_, r)| r.latency_s2c)
        .collect();
    LatencyStats::from_samples(&raw, worst_case_latency(netlist, delays, normalize)?, bins)
}
