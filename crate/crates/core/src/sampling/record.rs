use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerKind {
    Exact,
    Approx,
    Distinguishable,
}

/// One line of a samples file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub sample_id: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub counts: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub clicks: Option<Vec<bool>>,
    pub sampler: SamplerKind,
    pub seed: u64,
    pub stream: u64,
}
