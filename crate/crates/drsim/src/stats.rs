use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::DrError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// `counts.len() + 1` ascending edges; the last bin is closed on the right.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn new(values: &[f64], lo: f64, hi: f64, bins: usize) -> Self {
        let bins = bins.max(1);
        let hi = if hi > lo { hi } else { lo + 1.0 };
        let width = (hi - lo) / bins as f64;
        let edges: Vec<f64> = (0..=bins).map(|k| lo + width * k as f64).collect();
        let mut counts = vec![0u64; bins];
        for &v in values {
            let k = (((v - lo) / width).floor().max(0.0) as usize).min(bins - 1);
            counts[k] += 1;
        }
        Self { edges, counts }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_low,bin_high,count\n");
        for (k, c) in self.counts.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", self.edges[k], self.edges[k + 1], c);
        }
        out
    }
}

/// Distinct values with their multiplicities, ascending.
pub fn value_counts(values: &[f64]) -> Vec<(f64, u64)> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut out: Vec<(f64, u64)> = Vec::new();
    for v in sorted {
        match out.last_mut() {
            Some((last, c)) if *last == v => *c += 1,
            _ => out.push((v, 1)),
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatencyStats {
    pub count: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub median: f64,
    pub skewness: f64,
    /// Whether values were divided by `scale`.
    pub normalized: bool,
    /// Divisor applied to raw latencies (1 when not normalized).
    pub scale: f64,
    pub histogram: Histogram,
}

impl LatencyStats {
    /// Summarizes raw latencies, optionally dividing by `worst_case`.
    ///
    /// A worst case below the largest observed latency is raised to it, so
    /// normalized values always lie in `(0, 1]`.
    pub fn from_samples(raw: &[f64], worst_case: Option<f64>, bins: usize) -> Result<Self, DrError> {
        if raw.is_empty() {
            return Err(DrError::Config("no latency samples".into()));
        }
        let observed_max = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let scale = match worst_case {
            Some(w) => w.max(observed_max),
            None => 1.0,
        };
        let values: Vec<f64> = raw.iter().map(|v| v / scale).collect();
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let third = values.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / n;
        let skewness = if var > 0.0 { third / var.powf(1.5) } else { 0.0 };
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        let mid = sorted.len() / 2;
        let median = if sorted.len() % 2 == 0 { (sorted[mid - 1] + sorted[mid]) / 2.0 } else { sorted[mid] };
        let min = sorted[0];
        let max = sorted[sorted.len() - 1];
        let hi = if worst_case.is_some() { 1.0 } else { max };
        Ok(Self {
            count: values.len(),
            mean,
            min,
            max,
            median,
            skewness,
            normalized: worst_case.is_some(),
            scale,
            histogram: Histogram::new(&values, 0.0, hi, bins),
        })
    }

    /// Fraction of samples strictly below `x` (in the stats' units).
    pub fn fraction_below(&self, raw: &[f64], x: f64) -> f64 {
        raw.iter().filter(|&&v| v / self.scale < x).count() as f64 / raw.len() as f64
    }
}
