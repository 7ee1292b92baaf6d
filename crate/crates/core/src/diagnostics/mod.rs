//! Oracles and bound checks: exact enumeration, total-variation distance, leakage, the
//! random-walk profile, and the Fock and Gaussian error bounds.

mod distribution;
mod enumerate;
mod fock_bound;
mod leakage;
mod report;
mod theorem;
mod walk;

pub use distribution::{empirical_distribution, tvd, Distribution};
pub use enumerate::{
    count_outcomes, count_vectors, count_vectors_with_total, enumerate_block_approx_distribution,
    enumerate_distinguishable_distribution, enumerate_fock_distribution, enumerate_gbs_distribution, enumerate_model,
    tvd_against_product, TvdEstimate, ORACLE_MAX_MODES, ORACLE_MAX_OUTCOMES, ORACLE_MAX_PHOTONS,
};
pub use fock_bound::{closed_form_bound, fock_error_bound, overlap_matrix, FockErrorBound};
pub use leakage::{
    circuit_leakage, leakage_bound, leakage_bound_scaling, leakage_rate, markov_tail, LeakageReport, MarkovCheck,
};
pub use report::CheckSummary;
pub use theorem::{theorem_bound_report, TheoremBoundReport};
pub use walk::{averaging_profile, random_walk_profile, WalkProfile, MIN_TRIALS};
