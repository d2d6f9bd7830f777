use serde::{Deserialize, Serialize};

use crate::PrbgError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasStats {
    pub n: usize,
    pub ones: usize,
    pub p_hat: f64,
    /// Lag-1 autocorrelation; `None` for fewer than two samples or a constant sequence.
    pub serial_correlation: Option<f64>,
    /// Order-0 Shannon entropy in bits per sample.
    pub entropy: f64,
    /// Entropy of a bit given the previous eight, in bits per sample.
    pub conditional_entropy: f64,
}

pub fn bias_report(bits: &[bool]) -> Result<BiasStats, PrbgError> {
    if bits.is_empty() {
        return Err(PrbgError::Empty);
    }
    let n = bits.len();
    let ones = bits.iter().filter(|&&b| b).count();
    Ok(BiasStats {
        n,
        ones,
        p_hat: ones as f64 / n as f64,
        serial_correlation: lag1_correlation(bits),
        entropy: conditional_entropy(bits, 0),
        conditional_entropy: conditional_entropy(bits, 8.min(n - 1)),
    })
}

fn lag1_correlation(bits: &[bool]) -> Option<f64> {
    if bits.len() < 2 {
        return None;
    }
    let x: Vec<f64> = bits.iter().map(|&b| f64::from(u8::from(b))).collect();
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let var: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
    if var == 0.0 {
        return None;
    }
    let cov: f64 = x.windows(2).map(|w| (w[0] - mean) * (w[1] - mean)).sum();
    Some(cov / var)
}

/// Empirical `H(X_t | X_{t-k} .. X_{t-1})` in bits, from plug-in frequencies.
pub fn conditional_entropy(bits: &[bool], order: usize) -> f64 {
    assert!(order < 32, "context order too large");
    if bits.len() <= order {
        return 0.0;
    }
    let mut counts: std::collections::BTreeMap<u32, [u64; 2]> = std::collections::BTreeMap::new();
    for w in bits.windows(order + 1) {
        let ctx = w[..order].iter().fold(0u32, |acc, &b| acc << 1 | u32::from(b));
        counts.entry(ctx).or_default()[usize::from(w[order])] += 1;
    }
    let total = (bits.len() - order) as f64;
    counts
        .values()
        .map(|&[c0, c1]| {
            let n = (c0 + c1) as f64;
            let h: f64 = [c0, c1]
                .iter()
                .filter(|&&c| c > 0)
                .map(|&c| {
                    let p = c as f64 / n;
                    p * (1.0 / p).log2()
                })
                .sum();
            n / total * h
        })
        .sum()
}
