//! Photon-number samplers: exact chain-rule Gaussian sampling, the per-sublattice
//! approximation and the distinguishable-photon Fock sampler.

mod approx;
mod chain;
mod fock;
mod marginal;
mod outcome;
mod record;
mod truncation;

pub use approx::{approx_sublattice_sample, ApproxSampler};
pub use chain::{chain_sample, gbs_exact_sample, ExactSampler, GaussianSamplerState, MAX_RETRIES};
pub use fock::{distinguishable_fock_sample, FockSampler};
pub use marginal::{marginal_prob, CovarianceMarginals, HafnianEvaluator, MarginalModel, SqueezedMarginals};
pub use outcome::{threshold_coarse_grain, Outcome};
pub use record::{SampleRecord, SamplerKind};
pub use truncation::{pair_tail, truncation_threshold, TruncationPolicy, BUDGET_FLOOR};
