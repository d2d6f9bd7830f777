//! Three-stage feedback: machine-level type selection (FB1), clause-level
//! gating and swapping (FB2) and automaton-level action assignment (FB3).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Feedback type carried by FB1 and FB2. `Type0` means no feedback.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FeedbackType {
    Type0,
    Type1,
    Type2,
}

impl FeedbackType {
    pub const ALL: [FeedbackType; 3] = [Self::Type0, Self::Type1, Self::Type2];

    /// One-hot rails `[f2, f1, f0]`.
    pub fn rails(self) -> [bool; 3] {
        [self == Self::Type2, self == Self::Type1, self == Self::Type0]
    }
}

/// Automaton action emitted by FB3 (`action0`, `action1`, `action2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TaCommand {
    Inaction,
    Penalty,
    Reward,
}

impl TaCommand {
    pub const ALL: [TaCommand; 3] = [Self::Inaction, Self::Penalty, Self::Reward];

    /// One-hot rails `[a2, a1, a0]`; `a1` drives the penalty input, `a2` the reward input.
    pub fn rails(self) -> [bool; 3] {
        [self == Self::Reward, self == Self::Penalty, self == Self::Inaction]
    }

    pub fn index(self) -> u8 {
        match self {
            Self::Inaction => 0,
            Self::Penalty => 1,
            Self::Reward => 2,
        }
    }
}

pub fn fb1(learn: bool, y_exp: bool) -> FeedbackType {
    match (learn, y_exp) {
        (false, _) => FeedbackType::Type0,
        (true, true) => FeedbackType::Type1,
        (true, false) => FeedbackType::Type2,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeedbackProbabilities {
    pub p1: f64,
    pub p2: f64,
}

pub fn clamp_sum(t: u32, c_sum: i64) -> i64 {
    c_sum.clamp(-(t as i64), t as i64)
}

/// `p1 = (T - clamp(c_sum)) / 2T`, `p2 = (T + clamp(c_sum)) / 2T`.
///
/// `p2` is taken as `1 - p1`, which stays within one ulp of the direct ratio
/// and keeps `p1 + p2 == 1.0` exact.
pub fn fb_probabilities(t: u32, c_sum: i64) -> FeedbackProbabilities {
    assert!(t >= 1, "threshold must be at least 1");
    let c = clamp_sum(t, c_sum);
    let two_t = 2.0 * t as f64;
    let p1 = (t as i64 - c) as f64 / two_t;
    FeedbackProbabilities { p1, p2: 1.0 - p1 }
}

/// Which `q2` level lets feedback through FB2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fb2Polarity {
    /// Type I passes on `q2 = 1`, Type II on `q2 = 0`, as in the published case list.
    Published,
    /// Type I passes on `q2 = 0`, Type II on `q2 = 1`, so feedback fades as
    /// the vote approaches the threshold.
    #[default]
    Swapped,
}

impl std::str::FromStr for Fb2Polarity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "published" => Ok(Self::Published),
            "swapped" => Ok(Self::Swapped),
            other => Err(format!("unknown fb2 polarity `{other}` (expected published|swapped)")),
        }
    }
}

/// Clause-level feedback, verbatim seven-case function.
pub fn fb2(stage1: FeedbackType, c_neg: bool, q2: bool) -> FeedbackType {
    use FeedbackType::*;
    match (stage1, c_neg, q2) {
        (Type0, _, _) => Type0,
        (Type1, _, false) => Type0,
        (Type2, _, true) => Type0,
        (Type2, true, false) => Type1,
        (Type1, true, true) => Type2,
        (Type1, false, true) => Type1,
        (Type2, false, false) => Type2,
    }
}

pub fn fb2_with(polarity: Fb2Polarity, stage1: FeedbackType, c_neg: bool, q2: bool) -> FeedbackType {
    match polarity {
        Fb2Polarity::Published => fb2(stage1, c_neg, q2),
        Fb2Polarity::Swapped => fb2(stage1, c_neg, !q2),
    }
}

/// Automaton-level feedback. Combinations the truth table leaves open give `Inaction`.
pub fn fb3(stage2: FeedbackType, inc: bool, c: bool, x: bool, q3: bool) -> TaCommand {
    use FeedbackType::*;
    use TaCommand::*;
    match (stage2, inc, c, x, q3) {
        (Type0, ..) => Inaction,
        (Type1, true, false, _, false) => Penalty,
        (Type1, true, false, _, true) => Inaction,
        (Type1, true, true, _, false) => Inaction,
        (Type1, true, true, _, true) => Reward,
        (Type1, false, false, _, false) => Reward,
        (Type1, false, false, _, true) => Inaction,
        (Type1, false, true, false, false) => Inaction,
        (Type1, false, true, false, true) => Reward,
        (Type1, false, true, true, false) => Inaction,
        (Type1, false, true, true, true) => Penalty,
        (Type2, true, ..) => Inaction,
        (Type2, false, true, false, _) => Penalty,
        (Type2, false, false, ..) => Inaction,
        (Type2, false, true, true, _) => Inaction,
    }
}

/// Probability that `q3 = 1`.
pub fn q3_probability(s: f64) -> f64 {
    (s - 1.0) / s
}

/// Every `d`-th automaton update draws a fresh `q3`; the rest take `q3 = 1`.
pub fn should_randomize(update_counter: u64, d_period: u64) -> bool {
    assert!(d_period >= 1, "d_period must be at least 1");
    update_counter % d_period == 0
}

/// What `q3` becomes on updates that skip randomization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SkipPolicy {
    /// The high-probability branch, `q3 = 1`.
    Majority,
    /// The last freshly drawn `q3`, latched until the next draw.
    #[default]
    Hold,
}

impl std::str::FromStr for SkipPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "majority" => Ok(Self::Majority),
            "hold" => Ok(Self::Hold),
            other => Err(format!("unknown skip policy `{other}` (expected majority|hold)")),
        }
    }
}

/// A stream of biased random bits.
pub trait BitSource {
    /// Returns `true` with probability `p`; `p <= 0` yields `false`, `p >= 1` yields `true`.
    fn draw(&mut self, p: f64) -> bool;
}

impl<B: BitSource + ?Sized> BitSource for &mut B {
    fn draw(&mut self, p: f64) -> bool {
        (**self).draw(p)
    }
}

/// Seeded software generator used as the ideal reference source.
#[derive(Debug, Clone)]
pub struct IdealSource {
    rng: ChaCha8Rng,
}

impl IdealSource {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl BitSource for IdealSource {
    fn draw(&mut self, p: f64) -> bool {
        if p <= 0.0 {
            false
        } else if p >= 1.0 {
            true
        } else {
            self.rng.gen::<f64>() < p
        }
    }
}

pub fn draw_q2<B: BitSource + ?Sized>(src: &mut B, t: u32, c_sum: i64) -> bool {
    src.draw(fb_probabilities(t, c_sum).p2)
}

pub fn draw_q3<B: BitSource + ?Sized>(src: &mut B, s: f64) -> bool {
    src.draw(q3_probability(s))
}

/// Fixed bit pattern, for hand traces in tests.
#[derive(Debug, Clone)]
pub struct ConstSource(pub bool);

impl BitSource for ConstSource {
    fn draw(&mut self, _p: f64) -> bool {
        self.0
    }
}
