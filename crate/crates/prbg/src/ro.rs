use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::PrbgError;

/// Free-running ring oscillator with several taps of different duty cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoModel {
    period: f64,
    taps: Vec<f64>,
    phase: f64,
    powered: bool,
}

impl RoModel {
    /// Powered up at phase 0.
    pub fn new(period: f64, taps: Vec<f64>) -> Result<Self, PrbgError> {
        if !(period.is_finite() && period > 0.0) {
            return Err(PrbgError::InvalidPeriod(period));
        }
        if taps.is_empty() {
            return Err(PrbgError::NoTaps);
        }
        if let Some(&d) = taps.iter().find(|&&d| !(d > 0.0 && d < 1.0)) {
            return Err(PrbgError::InvalidDuty(d));
        }
        Ok(Self { period, taps, phase: 0.0, powered: true })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn is_powered(&self) -> bool {
        self.powered
    }

    pub fn set_phase(&mut self, phase: f64) {
        self.phase = phase.rem_euclid(self.period);
    }

    pub fn power_down(&mut self) {
        self.powered = false;
    }

    /// Powers the oscillator off and on again. A gated ring restarts at
    /// phase 0 every time; an inverter ring settles at a random phase.
    pub fn power_gate_cycle<R: Rng + ?Sized>(&mut self, deterministic_phase: bool, rng: &mut R) {
        self.powered = true;
        self.phase = if deterministic_phase { 0.0 } else { rng.gen_range(0.0..self.period) };
    }

    /// `((t + phase) mod period) < duty · period`.
    pub fn ro_level(&self, tap: usize, t: f64) -> Result<bool, PrbgError> {
        if !self.powered {
            return Err(PrbgError::Unpowered);
        }
        let duty = *self.taps.get(tap).ok_or(PrbgError::NoSuchTap(tap))?;
        Ok((t + self.phase).rem_euclid(self.period) < duty * self.period)
    }

    /// Tap whose duty is nearest to `p`; ties go to the lower index.
    pub fn tap_for_probability(&self, p: f64) -> usize {
        let mut best = 0;
        for (i, &d) in self.taps.iter().enumerate() {
            if (d - p).abs() < (self.taps[best] - p).abs() {
                best = i;
            }
        }
        best
    }
}

/// Dual-rail acknowledge: `(ack_p, ack_n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DualRailBit {
    pub ack_p: bool,
    pub ack_n: bool,
}

impl DualRailBit {
    pub fn value(self) -> Option<bool> {
        (self.ack_p != self.ack_n).then_some(self.ack_p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum MutexOwner {
    #[default]
    None,
    /// The request won while the clock was low; the AND masks later clock rises.
    Req,
    /// The clock was high when the request arrived; the set-dominant latch holds.
    Clk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SamplerState {
    pub latch: bool,
    pub mutex_owner: MutexOwner,
}

/// Request/acknowledge front end resolving one bit per four-phase handshake.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Sampler {
    state: SamplerState,
}

impl Sampler {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn state(&self) -> SamplerState {
        self.state
    }

    pub fn busy(&self) -> bool {
        self.state.mutex_owner != MutexOwner::None
    }

    /// Raises the request at `req_time` and returns the resolved acknowledge.
    pub fn request(&mut self, ro: &RoModel, tap: usize, req_time: f64) -> Result<DualRailBit, PrbgError> {
        if self.busy() {
            return Err(PrbgError::Overlap);
        }
        let high = ro.ro_level(tap, req_time)?;
        self.state = if high {
            SamplerState { latch: true, mutex_owner: MutexOwner::Clk }
        } else {
            SamplerState { latch: false, mutex_owner: MutexOwner::Req }
        };
        Ok(self.ack())
    }

    /// Current acknowledge; clock edges after the request do not change it.
    pub fn ack(&self) -> DualRailBit {
        match self.state.mutex_owner {
            MutexOwner::None => DualRailBit::default(),
            MutexOwner::Clk => DualRailBit { ack_p: self.state.latch, ack_n: false },
            MutexOwner::Req => DualRailBit { ack_p: false, ack_n: true },
        }
    }

    /// Lowers the request; the acknowledge returns to spacer.
    pub fn release(&mut self) -> Result<(), PrbgError> {
        if !self.busy() {
            return Err(PrbgError::NoRequest);
        }
        self.state = SamplerState::default();
        Ok(())
    }

    /// Full handshake: request, read, release.
    pub fn sample(&mut self, ro: &RoModel, tap: usize, req_time: f64) -> Result<bool, PrbgError> {
        let ack = self.request(ro, tap, req_time)?;
        self.release()?;
        Ok(ack.value().expect("resolved acknowledge is one-hot"))
    }
}
