//! Pseudo-random bit generation by sampling a free-running multi-tap ring
//! oscillator with asynchronous requests.
//!
//! A request that arrives while the selected tap is high returns logic-1,
//! otherwise logic-0, so the probability of a 1 equals the tap's duty cycle
//! as long as request times are uncorrelated with the oscillator.

mod error;
mod lfsr;
mod ro;
mod source;
mod stats;

pub use error::PrbgError;
pub use lfsr::{lfsr_next, Lfsr8};
pub use ro::{DualRailBit, MutexOwner, RoModel, Sampler, SamplerState};
pub use source::{default_taps, PrbgSource, RequestModel};
pub use stats::{bias_report, conditional_entropy, BiasStats};
