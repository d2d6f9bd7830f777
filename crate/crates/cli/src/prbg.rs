//! `prbg`: bias and correlation statistics of the ring-oscillator generator.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use tmsim_prbg::{bias_report, BiasStats, Lfsr8, PrbgSource, RequestModel, RoModel};

use crate::config::RunConfig;
use crate::manifest::{Artifact, CommandOutput, SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DutyResult {
    pub duty: f64,
    pub abs_error: f64,
    pub bits_file: String,
    pub stats: BiasStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GatingResult {
    pub deterministic_phase: bool,
    pub request_step: f64,
    pub cycles: usize,
    pub stats: BiasStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LfsrResult {
    pub seed: u8,
    pub taps: [u8; 4],
    pub period: usize,
    pub ones_per_period: usize,
    pub stats: BiasStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrbgReport {
    pub version: u32,
    pub period: f64,
    pub samples: usize,
    pub duties: Vec<DutyResult>,
    pub power_gating: Vec<GatingResult>,
    pub lfsr: LfsrResult,
}

/// MSB-first packing, zero-padded to a whole byte.
pub fn pack_bits(bits: &[bool]) -> Vec<u8> {
    bits.chunks(8)
        .map(|c| c.iter().enumerate().fold(0u8, |acc, (i, &b)| acc | (u8::from(b) << (7 - i))))
        .collect()
}

fn stream_seed(seed: u64, stream: u64) -> u64 {
    seed ^ (stream + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// One request per power-up, `step` periods after it.
pub fn power_gating_bits(period: f64, duty: f64, step: f64, cycles: usize, deterministic: bool, seed: u64) -> Vec<bool> {
    let ro = RoModel::new(period, vec![duty]).expect("validated duty");
    let mut src = PrbgSource::new(ro, RequestModel::Periodic(step * period), seed);
    (0..cycles)
        .map(|_| {
            src.power_gate_cycle(deterministic);
            src.sample_tap(0).expect("powered")
        })
        .collect()
}

pub fn lfsr_result(seed: u8) -> anyhow::Result<LfsrResult> {
    let mut l = Lfsr8::new(seed)?;
    let mut bits = Vec::new();
    loop {
        bits.push(l.next_bit()?);
        if l.state() == seed || bits.len() > 256 {
            break;
        }
    }
    Ok(LfsrResult {
        seed,
        taps: Lfsr8::TAPS,
        period: bits.len(),
        ones_per_period: bits.iter().filter(|&&b| b).count(),
        stats: bias_report(&bits)?,
    })
}

pub fn prbg(cfg: &RunConfig) -> anyhow::Result<(CommandOutput, PrbgReport)> {
    let p = &cfg.prbg;
    let mut artifacts = Vec::new();
    let mut duties = Vec::new();
    for (i, &duty) in p.duties.iter().enumerate() {
        let ro = RoModel::new(p.period, vec![duty])?;
        let mut src = PrbgSource::new(ro, RequestModel::Uncorrelated, stream_seed(cfg.seed, i as u64));
        let bits: Vec<bool> = (0..p.samples).map(|_| src.sample_tap(0)).collect::<Result<_, _>>()?;
        let stats = bias_report(&bits)?;
        let bits_file = format!("prbg_duty_{duty}.bin");
        artifacts.push(Artifact { name: bits_file.clone(), bytes: pack_bits(&bits) });
        duties.push(DutyResult { duty, abs_error: (stats.p_hat - duty).abs(), bits_file, stats });
    }
    let mut power_gating = Vec::new();
    for (k, deterministic) in [true, false].into_iter().enumerate() {
        let bits = power_gating_bits(
            p.period,
            0.5,
            p.gated_request_step,
            p.gated_cycles.max(1),
            deterministic,
            stream_seed(cfg.seed, 1000 + k as u64),
        );
        power_gating.push(GatingResult {
            deterministic_phase: deterministic,
            request_step: p.gated_request_step,
            cycles: bits.len(),
            stats: bias_report(&bits)?,
        });
    }
    let report = PrbgReport {
        version: SCHEMA_VERSION,
        period: p.period,
        samples: p.samples,
        duties,
        power_gating,
        lfsr: lfsr_result(p.lfsr_seed)?,
    };
    artifacts.push(Artifact::json("prbg.json", &report));
    let worst = report.duties.iter().map(|d| d.abs_error).fold(0.0, f64::max);
    let output = CommandOutput {
        artifacts,
        inputs: BTreeMap::new(),
        success: true,
        summary: format!("max |p_hat - duty| = {worst:.5}; LFSR8 period {}", report.lfsr.period),
    };
    Ok((output, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packing_is_msb_first() {
        assert_eq!(pack_bits(&[true, false, false, false, false, false, false, true, true]), [0x81, 0x80]);
        assert!(pack_bits(&[]).is_empty());
    }

    #[test]
    fn lfsr_summary() {
        let r = lfsr_result(0x3c).unwrap();
        assert_eq!((r.period, r.ones_per_period), (255, 128));
        assert!(lfsr_result(0).is_err());
    }
}
