//! `verify`: feedback tables, automaton equivalence and STG properties.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;
use tmsim_core::automata::{check_equivalence, counter_step, CounterTa, Equivalence, NextStateEquations, OneHotTa, StgTa};
use tmsim_core::conformance::{check_feedback_tables, FeedbackImpl, TableReport};
use tmsim_core::TaCommand;
use tmsim_stg::{build_ta_stg, verify as verify_stg, VerifyReport};

use crate::config::{RunConfig, VerifyTarget};
use crate::manifest::{Artifact, CommandOutput, SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingleSteps {
    pub cases: usize,
    pub pass: bool,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaEquivalenceReport {
    pub pass: bool,
    pub states_per_action: usize,
    pub max_sequence_len: usize,
    pub counter_vs_onehot: Equivalence,
    pub counter_vs_stg: Equivalence,
    pub onehot_single_steps: SingleSteps,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StgCheck {
    pub pass: bool,
    pub states_per_action: usize,
    pub reachable_states: usize,
    pub report: VerifyReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifySummary {
    pub version: u32,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fb_tables: Option<TableReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ta_equivalence: Option<TaEquivalenceReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stg: Option<StgCheck>,
}

/// Every one-hot next-state vector from a one-hot state stays one-hot and
/// lands where the counter does.
pub fn onehot_single_steps(eqs: &NextStateEquations) -> SingleSteps {
    let n = eqs.states_per_action();
    let mut cases = 0;
    let mut failures = Vec::new();
    for s in 1..=2 * n {
        let mut x = vec![false; 2 * n];
        x[s - 1] = true;
        for cmd in TaCommand::ALL {
            cases += 1;
            let [r, p, _] = cmd.rails();
            let want = counter_step(s, cmd, n).ok();
            let got = eqs.next(&x, p, r).ok().and_then(|next| {
                let hot: Vec<usize> = next.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i + 1).collect();
                (hot.len() == 1).then(|| hot[0])
            });
            if got != want {
                failures.push(format!("state {s} {cmd:?}: expected {want:?}, got {got:?}"));
            }
        }
    }
    SingleSteps { cases, pass: failures.is_empty(), failures }
}

pub fn ta_equivalence(n: usize, max_len: usize) -> anyhow::Result<TaEquivalenceReport> {
    let eqs = Arc::new(NextStateEquations::generate(n));
    let counter_vs_onehot =
        check_equivalence(|s| CounterTa::new(n, s), |s| OneHotTa::new(Arc::clone(&eqs), s), n, max_len);
    let base = StgTa::new(n, n)?;
    let counter_vs_stg = check_equivalence(|s| CounterTa::new(n, s), |s| base.with_state(s), n, max_len);
    let onehot_single_steps = onehot_single_steps(&eqs);
    Ok(TaEquivalenceReport {
        pass: counter_vs_onehot.pass && counter_vs_stg.pass && onehot_single_steps.pass,
        states_per_action: n,
        max_sequence_len: max_len,
        counter_vs_onehot,
        counter_vs_stg,
        onehot_single_steps,
    })
}

pub fn stg_check(n: usize, bound: usize) -> anyhow::Result<StgCheck> {
    let report = verify_stg(&build_ta_stg(n), bound)?;
    Ok(StgCheck { pass: report.all_pass(), states_per_action: n, reachable_states: report.states, report })
}

/// Runs the configured targets against `imp` for the feedback tables.
pub fn verify_with(cfg: &RunConfig, imp: &FeedbackImpl) -> anyhow::Result<(CommandOutput, VerifySummary)> {
    let v = &cfg.verify;
    let wants = |t| v.targets.contains(&t);
    let fb_tables = wants(VerifyTarget::FbTables).then(|| check_feedback_tables(imp));
    let ta_equivalence = wants(VerifyTarget::TaEquivalence)
        .then(|| ta_equivalence(v.states_per_action, v.max_sequence_len))
        .transpose()?;
    let stg = wants(VerifyTarget::Stg).then(|| stg_check(v.states_per_action, v.reachability_bound)).transpose()?;
    let pass = fb_tables.as_ref().map_or(true, |r| r.pass)
        && ta_equivalence.as_ref().map_or(true, |r| r.pass)
        && stg.as_ref().map_or(true, |r| r.pass);
    let summary = VerifySummary { version: SCHEMA_VERSION, pass, fb_tables, ta_equivalence, stg };

    let mut lines = Vec::new();
    if let Some(r) = &summary.fb_tables {
        lines.push(format!(
            "fb-tables: {} ({} + {} + {} cases)",
            verdict(r.pass),
            r.fb1.cases,
            r.fb2.cases,
            r.fb3.cases
        ));
        for m in r.fb1.mismatches.iter().chain(&r.fb2.mismatches).chain(&r.fb3.mismatches) {
            lines.push(format!("  mismatch at {}: expected {}, got {}", m.inputs, m.expected, m.got));
        }
    }
    if let Some(r) = &summary.ta_equivalence {
        lines.push(format!(
            "ta-equivalence: {} ({} + {} sequences up to length {})",
            verdict(r.pass),
            r.counter_vs_onehot.sequences,
            r.counter_vs_stg.sequences,
            r.max_sequence_len
        ));
        for m in [&r.counter_vs_onehot, &r.counter_vs_stg].into_iter().filter_map(|e| e.counterexample.as_ref()) {
            lines.push(format!("  counterexample from state {}: {:?} ({})", m.start, m.commands, m.detail));
        }
    }
    if let Some(r) = &summary.stg {
        lines.push(format!("stg: {} ({} reachable states)", verdict(r.pass), r.reachable_states));
    }
    let output = CommandOutput {
        artifacts: vec![Artifact::json("verify.json", &summary)],
        inputs: BTreeMap::new(),
        success: pass,
        summary: lines.join("\n"),
    };
    Ok((output, summary))
}

pub fn verify(cfg: &RunConfig) -> anyhow::Result<(CommandOutput, VerifySummary)> {
    verify_with(cfg, &FeedbackImpl::default())
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}
