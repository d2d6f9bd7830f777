//! Single-class Tsetlin Machine: clauses, voting and the training loop.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::automata::counter_step;
use crate::feedback::{
    draw_q2, draw_q3, fb1, fb2_with, fb3, should_randomize, BitSource, Fb2Polarity, FeedbackType,
    SkipPolicy, TaCommand,
};
use crate::CoreError;

/// Output of a clause with no included literal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EmptyClauseMode {
    /// 1 while training, 0 during inference.
    #[default]
    TrainOneInferZero,
    AlwaysOne,
    AlwaysZero,
}

impl EmptyClauseMode {
    pub fn output(self, mode: EvalMode) -> bool {
        match self {
            Self::TrainOneInferZero => mode == EvalMode::Train,
            Self::AlwaysOne => true,
            Self::AlwaysZero => false,
        }
    }
}

impl std::str::FromStr for EmptyClauseMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train-one-infer-zero" => Ok(Self::TrainOneInferZero),
            "always-one" => Ok(Self::AlwaysOne),
            "always-zero" => Ok(Self::AlwaysZero),
            other => Err(format!("unknown empty clause mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    Train,
    Infer,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TmConfig {
    pub num_features: usize,
    /// Even; odd-indexed clauses vote negatively.
    pub num_clauses: usize,
    pub threshold: u32,
    pub specificity: f64,
    /// States per action (`n`); automata live in `1..=2n`.
    pub state_depth: usize,
    /// Draw a fresh `q3` on every `d`-th automaton update only.
    pub d_period: u64,
    pub skip_policy: SkipPolicy,
    pub seed: u64,
    pub empty_clause_mode: EmptyClauseMode,
    pub fb2_polarity: Fb2Polarity,
    /// Visit training samples in a seeded random order each epoch.
    pub shuffle: bool,
}

impl Default for TmConfig {
    fn default() -> Self {
        Self {
            num_features: 16,
            num_clauses: 20,
            threshold: 15,
            specificity: 3.9,
            state_depth: 50,
            d_period: 1,
            skip_policy: SkipPolicy::default(),
            seed: 1,
            empty_clause_mode: EmptyClauseMode::default(),
            fb2_polarity: Fb2Polarity::default(),
            shuffle: true,
        }
    }
}

impl TmConfig {
    pub fn validate(&self) -> Result<(), CoreError> {
        let err = |m: &str| Err(CoreError::Config(m.into()));
        if self.num_features == 0 {
            return err("num_features must be positive");
        }
        if self.num_clauses == 0 || self.num_clauses % 2 != 0 {
            return err("num_clauses must be a positive even number");
        }
        if self.threshold == 0 {
            return err("threshold must be at least 1");
        }
        if !(self.specificity > 1.0) || !self.specificity.is_finite() {
            return err("specificity must be a finite number greater than 1");
        }
        if self.state_depth == 0 || self.state_depth > u32::MAX as usize / 2 {
            return err("state_depth must be positive");
        }
        if self.d_period == 0 {
            return err("d_period must be at least 1");
        }
        Ok(())
    }

    pub fn num_literals(&self) -> usize {
        2 * self.num_features
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    pub features: Vec<bool>,
    pub label: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VoteResult {
    pub clause_outputs: Vec<bool>,
    pub vote_sum: i64,
    pub predicted: bool,
}

/// Automata of one clause, one per literal (features first, then complements).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClauseTeam {
    pub ta_states: Vec<u32>,
    pub negative: bool,
}

impl ClauseTeam {
    pub fn includes(&self, literal: usize, n: usize) -> bool {
        self.ta_states[literal] as usize > n
    }
}

/// Features followed by their complements.
pub fn literal_vector(features: &[bool], num_features: usize) -> Result<Vec<bool>, CoreError> {
    if features.len() != num_features {
        return Err(CoreError::FeatureCount { expected: num_features, got: features.len() });
    }
    Ok(features.iter().copied().chain(features.iter().map(|&f| !f)).collect())
}

/// Conjunction of the included literals.
pub fn clause_eval(
    team: &ClauseTeam,
    literals: &[bool],
    n: usize,
    mode: EvalMode,
    empty: EmptyClauseMode,
) -> bool {
    debug_assert_eq!(team.ta_states.len(), literals.len());
    let mut any = false;
    for (&state, &lit) in team.ta_states.iter().zip(literals) {
        if state as usize > n {
            if !lit {
                return false;
            }
            any = true;
        }
    }
    any || empty.output(mode)
}

/// `vote_sum` = positive clauses firing minus negative clauses firing; ties predict 1.
pub fn vote_and_classify(clause_outputs: &[bool], negative: &[bool]) -> VoteResult {
    assert_eq!(clause_outputs.len(), negative.len());
    let vote_sum = clause_outputs
        .iter()
        .zip(negative)
        .filter(|(&c, _)| c)
        .map(|(_, &neg)| if neg { -1 } else { 1 })
        .sum();
    VoteResult { clause_outputs: clause_outputs.to_vec(), vote_sum, predicted: vote_sum >= 0 }
}

/// Command counts of one training step or epoch.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpdateReport {
    pub penalties: u64,
    pub rewards: u64,
    pub inactions: u64,
    /// Automata whose state index changed.
    pub state_changes: u64,
    /// Type I / Type II clause feedbacks emitted by FB2.
    pub type1_clauses: u64,
    pub type2_clauses: u64,
}

impl UpdateReport {
    pub fn total(&self) -> u64 {
        self.penalties + self.rewards + self.inactions
    }

    fn add(&mut self, other: &UpdateReport) {
        self.penalties += other.penalties;
        self.rewards += other.rewards;
        self.inactions += other.inactions;
        self.state_changes += other.state_changes;
        self.type1_clauses += other.type1_clauses;
        self.type2_clauses += other.type2_clauses;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    /// 1-based index of the finished epoch.
    pub epoch: u64,
    pub train_accuracy: f64,
    pub updates: UpdateReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TsetlinMachine {
    config: TmConfig,
    clauses: Vec<ClauseTeam>,
    /// Global learn enable; FB1 emits Type0 while it is low.
    pub learn: bool,
    /// Automaton updates seen by the `d`-period policy.
    update_counter: u64,
    /// Last fresh `q3`, reused under [`SkipPolicy::Hold`].
    held_q3: bool,
    epochs_trained: u64,
}

impl TsetlinMachine {
    /// All automata start at state `n`, the shallowest exclude state.
    pub fn new(config: TmConfig) -> Result<Self, CoreError> {
        config.validate()?;
        let team = |j: usize| ClauseTeam {
            ta_states: vec![config.state_depth as u32; config.num_literals()],
            negative: j % 2 == 1,
        };
        let clauses = (0..config.num_clauses).map(team).collect();
        Ok(Self { config, clauses, learn: true, update_counter: 0, held_q3: true, epochs_trained: 0 })
    }

    pub fn config(&self) -> &TmConfig {
        &self.config
    }

    pub fn clauses(&self) -> &[ClauseTeam] {
        &self.clauses
    }

    pub fn epochs_trained(&self) -> u64 {
        self.epochs_trained
    }

    pub fn ta_state(&self, clause: usize, literal: usize) -> u32 {
        self.clauses[clause].ta_states[literal]
    }

    pub fn set_ta_state(&mut self, clause: usize, literal: usize, state: u32) -> Result<(), CoreError> {
        let max = 2 * self.config.state_depth;
        if !(1..=max).contains(&(state as usize)) {
            return Err(CoreError::StateOutOfRange { state: state as usize, max });
        }
        self.clauses[clause].ta_states[literal] = state;
        Ok(())
    }

    pub fn negative_polarities(&self) -> Vec<bool> {
        self.clauses.iter().map(|c| c.negative).collect()
    }

    pub fn evaluate(&self, features: &[bool], mode: EvalMode) -> Result<VoteResult, CoreError> {
        let literals = literal_vector(features, self.config.num_features)?;
        let n = self.config.state_depth;
        let outputs: Vec<bool> = self
            .clauses
            .iter()
            .map(|c| clause_eval(c, &literals, n, mode, self.config.empty_clause_mode))
            .collect();
        Ok(vote_and_classify(&outputs, &self.negative_polarities()))
    }

    pub fn predict(&self, features: &[bool]) -> Result<bool, CoreError> {
        Ok(self.evaluate(features, EvalMode::Infer)?.predicted)
    }

    pub fn accuracy(&self, data: &[Sample]) -> Result<f64, CoreError> {
        if data.is_empty() {
            return Err(CoreError::EmptyDataset);
        }
        let mut correct = 0usize;
        for s in data {
            correct += usize::from(self.predict(&s.features)? == s.label);
        }
        Ok(correct as f64 / data.len() as f64)
    }

    /// One pass of the feedback pipeline. All feedback inputs are taken
    /// from the state before any automaton moves.
    pub fn train_step<B: BitSource + ?Sized>(
        &mut self,
        sample: &Sample,
        bits: &mut B,
    ) -> Result<UpdateReport, CoreError> {
        let literals = literal_vector(&sample.features, self.config.num_features)?;
        let vote = self.evaluate(&sample.features, EvalMode::Train)?;
        let stage1 = fb1(self.learn, sample.label);
        let cfg = &self.config;
        let n = cfg.state_depth;
        let mut report = UpdateReport::default();

        for (team, &c) in self.clauses.iter_mut().zip(&vote.clause_outputs) {
            let stage2 = if stage1 == FeedbackType::Type0 {
                FeedbackType::Type0
            } else {
                let q2 = draw_q2(bits, cfg.threshold, vote.vote_sum);
                fb2_with(cfg.fb2_polarity, stage1, team.negative, q2)
            };
            match stage2 {
                FeedbackType::Type0 => {
                    report.inactions += team.ta_states.len() as u64;
                    continue;
                }
                FeedbackType::Type1 => report.type1_clauses += 1,
                FeedbackType::Type2 => report.type2_clauses += 1,
            }
            for (state, &x) in team.ta_states.iter_mut().zip(&literals) {
                let inc = *state as usize > n;
                let q3 = if stage2 == FeedbackType::Type1 {
                    let fresh = should_randomize(self.update_counter, cfg.d_period);
                    self.update_counter += 1;
                    if fresh {
                        self.held_q3 = draw_q3(bits, cfg.specificity);
                        self.held_q3
                    } else {
                        match cfg.skip_policy {
                            SkipPolicy::Majority => true,
                            SkipPolicy::Hold => self.held_q3,
                        }
                    }
                } else {
                    false
                };
                let cmd = fb3(stage2, inc, c, x, q3);
                match cmd {
                    TaCommand::Inaction => report.inactions += 1,
                    TaCommand::Penalty => report.penalties += 1,
                    TaCommand::Reward => report.rewards += 1,
                }
                let next = counter_step(*state as usize, cmd, n)? as u32;
                report.state_changes += u64::from(next != *state);
                *state = next;
            }
        }
        Ok(report)
    }

    pub fn train_epoch<B: BitSource + ?Sized>(
        &mut self,
        data: &[Sample],
        bits: &mut B,
    ) -> Result<EpochStats, CoreError> {
        if data.is_empty() {
            return Err(CoreError::EmptyDataset);
        }
        let mut order: Vec<usize> = (0..data.len()).collect();
        if self.config.shuffle {
            let seed = self.config.seed ^ self.epochs_trained.wrapping_mul(0x9E37_79B9_7F4A_7C15);
            order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        }
        let mut updates = UpdateReport::default();
        for i in order {
            updates.add(&self.train_step(&data[i], bits)?);
        }
        self.epochs_trained += 1;
        Ok(EpochStats {
            epoch: self.epochs_trained,
            train_accuracy: self.accuracy(data)?,
            updates,
        })
    }

    pub fn snapshot(&self) -> MachineSnapshot {
        let n = self.config.state_depth;
        MachineSnapshot {
            epoch: self.epochs_trained,
            num_features: self.config.num_features,
            empty_clause_mode: self.config.empty_clause_mode,
            negative: self.negative_polarities(),
            exclude: self
                .clauses
                .iter()
                .map(|c| (0..c.ta_states.len()).map(|l| !c.includes(l, n)).collect())
                .collect(),
        }
    }
}

/// Exclude masks of a machine, all inference needs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MachineSnapshot {
    pub epoch: u64,
    pub num_features: usize,
    pub empty_clause_mode: EmptyClauseMode,
    /// Polarity per clause (`true` = votes negatively).
    pub negative: Vec<bool>,
    /// `exclude[j][l]` for clause `j`, literal `l` (features then complements).
    pub exclude: Vec<Vec<bool>>,
}

impl MachineSnapshot {
    pub fn num_clauses(&self) -> usize {
        self.exclude.len()
    }

    /// Inference-mode vote.
    pub fn evaluate(&self, features: &[bool]) -> Result<VoteResult, CoreError> {
        let literals = literal_vector(features, self.num_features)?;
        let outputs: Vec<bool> = self
            .exclude
            .iter()
            .map(|ex| {
                let mut any = false;
                let mut all = true;
                for (&e, &l) in ex.iter().zip(&literals) {
                    if !e {
                        any = true;
                        all &= l;
                    }
                }
                if any {
                    all
                } else {
                    self.empty_clause_mode.output(EvalMode::Infer)
                }
            })
            .collect();
        Ok(vote_and_classify(&outputs, &self.negative))
    }
}
