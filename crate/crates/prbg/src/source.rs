use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use tmsim_core::BitSource;

use crate::{PrbgError, RoModel, Sampler};

/// Duty cycles `k / 2T` for `k = 1 .. 2T-1`.
pub fn default_taps(t: u32) -> Vec<f64> {
    assert!(t >= 1, "threshold must be at least 1");
    let two_t = 2 * t;
    (1..two_t).map(|k| f64::from(k) / f64::from(two_t)).collect()
}

/// How request times advance between draws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RequestModel {
    /// Increments uniform in `[0, period)` on top of one full period.
    Uncorrelated,
    /// Fixed increment, e.g. a multiple of the period.
    Periodic(f64),
}

/// A ring-oscillator generator usable wherever the learner needs biased bits.
#[derive(Debug, Clone)]
pub struct PrbgSource {
    ro: RoModel,
    sampler: Sampler,
    requests: RequestModel,
    rng: ChaCha8Rng,
    time: f64,
    samples: u64,
}

impl PrbgSource {
    pub fn new(ro: RoModel, requests: RequestModel, seed: u64) -> Self {
        Self { ro, sampler: Sampler::new(), requests, rng: ChaCha8Rng::seed_from_u64(seed), time: 0.0, samples: 0 }
    }

    /// Unit-period oscillator with the default tap set for threshold `t`.
    pub fn for_threshold(t: u32, seed: u64) -> Self {
        let ro = RoModel::new(1.0, default_taps(t)).expect("default taps are valid");
        Self::new(ro, RequestModel::Uncorrelated, seed)
    }

    pub fn ro(&self) -> &RoModel {
        &self.ro
    }

    pub fn ro_mut(&mut self) -> &mut RoModel {
        &mut self.ro
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }

    /// Restarts the oscillator and the request clock.
    pub fn power_gate_cycle(&mut self, deterministic_phase: bool) {
        self.ro.power_gate_cycle(deterministic_phase, &mut self.rng);
        self.time = 0.0;
    }

    fn advance(&mut self) {
        self.time += match self.requests {
            RequestModel::Uncorrelated => self.ro.period() * (1.0 + self.rng.gen::<f64>()),
            RequestModel::Periodic(step) => step,
        };
    }

    /// One handshake on `tap` at the next request time.
    pub fn sample_tap(&mut self, tap: usize) -> Result<bool, PrbgError> {
        self.advance();
        self.samples += 1;
        self.sampler.sample(&self.ro, tap, self.time)
    }

    pub fn try_draw(&mut self, p: f64) -> Result<bool, PrbgError> {
        if p <= 0.0 {
            return Ok(false);
        }
        if p >= 1.0 {
            return Ok(true);
        }
        let tap = self.ro.tap_for_probability(p);
        self.sample_tap(tap)
    }
}

impl BitSource for PrbgSource {
    /// # Panics
    /// If the oscillator is powered down.
    fn draw(&mut self, p: f64) -> bool {
        self.try_draw(p).expect("PRBG oscillator must be powered")
    }
}
