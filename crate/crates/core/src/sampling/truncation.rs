use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::CompensatedSum;

/// Floor on the pair budget in units of `N sech²r`.
pub const BUDGET_FLOOR: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    pub epsilon: f64,
    pub n_total_max: usize,
    pub n_mode_max: usize,
}

impl TruncationPolicy {
    /// A fixed photon budget applied both in total and per mode.
    pub fn fixed(epsilon: f64, n_total_max: usize) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!("epsilon={epsilon} must lie in (0, 1)")));
        }
        Ok(TruncationPolicy { epsilon, n_total_max, n_mode_max: n_total_max })
    }

    /// Smallest even budget `2K` for which the exact photon-pair tail beyond `K` pairs is at
    /// most `ε`.
    pub fn certified(n_sources: usize, r: f64, epsilon: f64) -> Result<Self> {
        truncation_threshold(n_sources, r, epsilon)?;
        let mut pairs = 0;
        while pair_tail(n_sources, r, pairs) > epsilon {
            pairs += 1;
        }
        TruncationPolicy::fixed(epsilon, 2 * pairs)
    }
}

/// Photon budget `2⌈max(2 sech²r ln(1/ε), 4 N sech²r)⌉`, used as both total and per-mode cap.
pub fn truncation_threshold(n_sources: usize, r: f64, epsilon: f64) -> Result<TruncationPolicy> {
    if n_sources == 0 {
        return Err(Error::InvalidParameter("need at least one source".into()));
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!("squeezing r={r} must be finite and >= 0")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon={epsilon} must lie in (0, 1)")));
    }
    let sech2 = 1.0 / r.cosh().powi(2);
    let pairs = (2.0 * sech2 * (1.0 / epsilon).ln()).max(n_sources as f64 * sech2 * BUDGET_FLOOR);
    TruncationPolicy::fixed(epsilon, 2 * pairs.ceil() as usize)
}

/// Probability of more than `pairs` photon pairs from `N` sources of squeezing `r`
/// (negative binomial with shape `N/2` and ratio `tanh²r`).
pub fn pair_tail(n_sources: usize, r: f64, pairs: usize) -> f64 {
    let t2 = r.tanh().powi(2);
    let shape = n_sources as f64 / 2.0;
    let mut p = (1.0 / r.cosh()).powf(n_sources as f64);
    let mut acc = CompensatedSum::default();
    for k in 0..=pairs {
        acc.add(p);
        p *= (shape + k as f64) / (k as f64 + 1.0) * t2;
    }
    (1.0 - acc.value()).max(0.0)
}
