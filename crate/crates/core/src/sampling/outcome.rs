use serde::{Deserialize, Serialize};

/// A measurement record: photon counts, or click patterns for threshold detectors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Outcome {
    Counts(Vec<usize>),
    Clicks(Vec<bool>),
}

impl Outcome {
    pub fn total(&self) -> usize {
        match self {
            Outcome::Counts(c) => c.iter().sum(),
            Outcome::Clicks(c) => c.iter().filter(|&&b| b).count(),
        }
    }

    pub fn modes(&self) -> usize {
        match self {
            Outcome::Counts(c) => c.len(),
            Outcome::Clicks(c) => c.len(),
        }
    }
}

/// Threshold detection: a mode clicks when it holds at least one photon.
pub fn threshold_coarse_grain(counts: &[usize]) -> Vec<bool> {
    counts.iter().map(|&n| n >= 1).collect()
}

impl From<Vec<usize>> for Outcome {
    fn from(c: Vec<usize>) -> Self {
        Outcome::Counts(c)
    }
}
