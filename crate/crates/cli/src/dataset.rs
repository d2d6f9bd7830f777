//! Binary feature tables with one integer label column.

use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;
use tmsim_core::Sample;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}, column {column}: feature value `{token}` is not 0 or 1")]
    NonBinary { line: usize, column: usize, token: String },
    #[error("line {line}: label `{token}` is not an integer")]
    BadLabel { line: usize, token: String },
    #[error("line {line}: expected {expected} columns, found {found}")]
    Ragged { line: usize, expected: usize, found: usize },
    #[error("label column {column} is out of range for {columns} columns")]
    LabelColumn { column: usize, columns: usize },
    #[error("a row needs at least one feature and a label")]
    TooFewColumns,
    #[error("dataset has no samples")]
    Empty,
    #[error("test fraction {0} must lie in [0, 1)")]
    Fraction(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dataset {
    pub source: PathBuf,
    pub samples: Vec<Sample>,
    pub feature_count: usize,
    /// Raw label per sample, before mapping to the target class.
    pub classes: Vec<i64>,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn train_samples(&self) -> Vec<Sample> {
        self.train.iter().map(|&i| self.samples[i].clone()).collect()
    }

    pub fn test_samples(&self) -> Vec<Sample> {
        self.test.iter().map(|&i| self.samples[i].clone()).collect()
    }

    pub fn features(&self) -> Vec<Vec<bool>> {
        self.samples.iter().map(|s| s.features.clone()).collect()
    }

    /// Accuracy of always predicting the more frequent test label.
    pub fn majority_baseline(&self) -> f64 {
        if self.test.is_empty() {
            return 0.0;
        }
        let pos = self.test.iter().filter(|&&i| self.samples[i].label).count();
        pos.max(self.test.len() - pos) as f64 / self.test.len() as f64
    }
}

/// Parses rows of comma- or whitespace-separated values. `label_column`
/// defaults to the last column; blank lines and `#` comments are skipped.
pub fn parse_dataset(
    text: &str,
    label_column: Option<usize>,
    target_class: i64,
) -> Result<(Vec<Sample>, Vec<i64>), DatasetError> {
    let mut samples = Vec::new();
    let mut classes = Vec::new();
    let mut width = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> =
            line.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()).collect();
        let expected = *width.get_or_insert(tokens.len());
        if tokens.len() != expected {
            return Err(DatasetError::Ragged { line: line_no, expected, found: tokens.len() });
        }
        if expected < 2 {
            return Err(DatasetError::TooFewColumns);
        }
        let label_at = label_column.unwrap_or(expected - 1);
        if label_at >= expected {
            return Err(DatasetError::LabelColumn { column: label_at, columns: expected });
        }
        let mut features = Vec::with_capacity(expected - 1);
        let mut class = 0;
        for (col, tok) in tokens.iter().enumerate() {
            if col == label_at {
                class = tok
                    .parse()
                    .map_err(|_| DatasetError::BadLabel { line: line_no, token: tok.to_string() })?;
            } else {
                features.push(match *tok {
                    "0" => false,
                    "1" => true,
                    _ => {
                        return Err(DatasetError::NonBinary {
                            line: line_no,
                            column: col + 1,
                            token: tok.to_string(),
                        })
                    }
                });
            }
        }
        samples.push(Sample { features, label: class == target_class });
        classes.push(class);
    }
    if samples.is_empty() {
        return Err(DatasetError::Empty);
    }
    Ok((samples, classes))
}

/// Seeded split that keeps the positive/negative ratio: each label group is
/// shuffled (positives first) and its first `round(fraction · size)` indices
/// go to the test set.
pub fn stratified_split(samples: &[Sample], test_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>), DatasetError> {
    if !(0.0..1.0).contains(&test_fraction) {
        return Err(DatasetError::Fraction(test_fraction));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut test = Vec::new();
    for want in [true, false] {
        let mut group: Vec<usize> = (0..samples.len()).filter(|&i| samples[i].label == want).collect();
        group.shuffle(&mut rng);
        let k = (test_fraction * group.len() as f64).round() as usize;
        test.extend_from_slice(&group[..k]);
    }
    test.sort_unstable();
    let train = (0..samples.len()).filter(|i| test.binary_search(i).is_err()).collect();
    Ok((train, test))
}

pub fn load_dataset(
    path: &Path,
    label_column: Option<usize>,
    target_class: i64,
    test_fraction: f64,
    seed: u64,
) -> Result<Dataset, DatasetError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| DatasetError::Io { path: path.to_path_buf(), source })?;
    let (samples, classes) = parse_dataset(&text, label_column, target_class)?;
    let (train, test) = stratified_split(&samples, test_fraction, seed)?;
    Ok(Dataset {
        source: path.to_path_buf(),
        feature_count: samples[0].features.len(),
        samples,
        classes,
        train,
        test,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_maps_to_target_class() {
        let (s, c) = parse_dataset("1 0 1 0 2\n", None, 2).unwrap();
        assert_eq!(s[0].features, [true, false, true, false]);
        assert!(s[0].label);
        assert_eq!(c, [2]);
    }

    #[test]
    fn comma_separated_with_leading_label() {
        let (s, _) = parse_dataset("# header\n1,0,1\n\n0,1,1\n", Some(0), 0).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[1].features, [true, true]);
        assert!(s[1].label);
        assert!(!s[0].label);
    }

    #[test]
    fn non_binary_feature_reports_line() {
        let err = parse_dataset("1 0 0\n0 3 1\n", None, 0).unwrap_err();
        assert!(matches!(err, DatasetError::NonBinary { line: 2, column: 2, .. }), "{err}");
    }

    #[test]
    fn ragged_rows_rejected() {
        let err = parse_dataset("1 0 0\n0 1\n", None, 0).unwrap_err();
        assert!(matches!(err, DatasetError::Ragged { line: 2, expected: 3, found: 2 }));
    }

    #[test]
    fn empty_and_degenerate_inputs() {
        assert!(matches!(parse_dataset("\n# only\n", None, 0), Err(DatasetError::Empty)));
        assert!(matches!(parse_dataset("1\n", None, 0), Err(DatasetError::TooFewColumns)));
        assert!(matches!(parse_dataset("1 0\n", Some(5), 0), Err(DatasetError::LabelColumn { .. })));
        assert!(matches!(parse_dataset("1 x\n", None, 0), Err(DatasetError::BadLabel { line: 1, .. })));
    }

    #[test]
    fn split_is_stratified_and_seeded() {
        let samples: Vec<Sample> =
            (0..150).map(|i| Sample { features: vec![i % 2 == 0], label: i < 50 }).collect();
        let (train, test) = stratified_split(&samples, 0.2, 7).unwrap();
        assert_eq!(test.len(), 30);
        assert_eq!(test.iter().filter(|&&i| samples[i].label).count(), 10);
        assert_eq!(train.len() + test.len(), 150);
        assert!(train.iter().all(|i| !test.contains(i)));
        assert_eq!(stratified_split(&samples, 0.2, 7).unwrap(), (train, test));
        assert_ne!(stratified_split(&samples, 0.2, 8).unwrap().1, stratified_split(&samples, 0.2, 7).unwrap().1);
        assert!(stratified_split(&samples, 1.0, 0).is_err());
    }
}
