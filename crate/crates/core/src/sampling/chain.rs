use rand::Rng;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gaussian::ComplexCovariance;
use crate::linalg::CMatrix;
use crate::rng::SimRng;
use crate::sampling::marginal::{CovarianceMarginals, MarginalModel, SqueezedMarginals};
use crate::sampling::truncation::TruncationPolicy;

pub const MAX_RETRIES: usize = 8;
const ZERO_PREFIX: f64 = 1e-300;

/// Progress of one chain-rule draw: the modes fixed so far and their joint probability.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSamplerState {
    pub partial: Vec<usize>,
    pub prefix_prob: f64,
    pub used: usize,
}

impl GaussianSamplerState {
    fn start() -> Self {
        GaussianSamplerState { partial: Vec::new(), prefix_prob: 1.0, used: 0 }
    }
}

enum Step {
    Chosen,
    ZeroPrefix,
}

/// Draws `n_k` from `P(prefix, n_k) / P(prefix)` restricted to `0..=cap`.
///
/// The conditional is scanned upwards against a uniform target in `[0, P(prefix))`, so on
/// average only `1 + E[n_k]` marginals are evaluated. If the target lies beyond the allowed
/// range the draw is repeated on the computed values, which realises the distribution
/// renormalised over `0..=cap`.
fn advance<M: MarginalModel + ?Sized>(
    model: &M,
    state: &mut GaussianSamplerState,
    policy: &TruncationPolicy,
    rng: &mut SimRng,
) -> Result<Step> {
    let cap = policy.n_mode_max.min(policy.n_total_max - state.used);
    let target = rng.random::<f64>() * state.prefix_prob;
    let mut probs = Vec::with_capacity(4);
    let mut cum = 0.0;
    let mut chosen = None;
    for n in 0..=cap {
        state.partial.push(n);
        let p = model.marginal(&state.partial);
        state.partial.pop();
        let p = p?;
        probs.push(p);
        cum += p;
        if cum > target {
            chosen = Some(n);
            break;
        }
    }
    let n = match chosen {
        Some(n) => n,
        None => {
            if cum < ZERO_PREFIX {
                return Ok(Step::ZeroPrefix);
            }
            let t = rng.random::<f64>() * cum;
            let mut acc = 0.0;
            probs
                .iter()
                .position(|&p| {
                    acc += p;
                    acc > t
                })
                .unwrap_or_else(|| probs.iter().rposition(|&p| p > 0.0).unwrap())
        }
    };
    if probs[n] < ZERO_PREFIX {
        return Ok(Step::ZeroPrefix);
    }
    state.partial.push(n);
    state.prefix_prob = probs[n];
    state.used += n;
    Ok(Step::Chosen)
}

/// One photon-number sample by sequential conditional sampling over the model's modes.
pub fn chain_sample<M: MarginalModel + ?Sized>(
    model: &M,
    policy: &TruncationPolicy,
    rng: &mut SimRng,
) -> Result<Vec<usize>> {
    'retry: for _ in 0..=MAX_RETRIES {
        let mut state = GaussianSamplerState::start();
        for _ in 0..model.modes() {
            if let Step::ZeroPrefix = advance(model, &mut state, policy, rng)? {
                log::warn!("zero-probability prefix {:?}; restarting sample", state.partial);
                continue 'retry;
            }
        }
        return Ok(state.partial);
    }
    Err(Error::ZeroProbability { retries: MAX_RETRIES })
}

/// Exact sample from an arbitrary Gaussian state, visiting modes in ascending order.
pub fn gbs_exact_sample(sigma: &ComplexCovariance, policy: &TruncationPolicy, rng: &mut SimRng) -> Result<Vec<usize>> {
    chain_sample(&CovarianceMarginals::new(sigma)?, policy, rng)
}

/// Exact sampler for squeezed vacuum on every source of a circuit's lattice.
#[derive(Debug, Clone)]
pub struct ExactSampler {
    model: SqueezedMarginals,
    pub policy: TruncationPolicy,
}

impl ExactSampler {
    pub fn new(circuit: &Circuit, r: f64, policy: TruncationPolicy) -> Result<Self> {
        let layout = &circuit.layout;
        circuit.validate()?;
        let columns: Vec<Vec<_>> = layout.sources.iter().map(|&s| circuit.propagate_column(s)).collect();
        let t = CMatrix::from_fn(layout.modes, layout.n_sources, |j, s| columns[s][j]);
        let model = SqueezedMarginals::new(t, &vec![r; layout.n_sources])?;
        Ok(ExactSampler { model, policy })
    }

    pub fn model(&self) -> &SqueezedMarginals {
        &self.model
    }

    pub fn sample(&self, rng: &mut SimRng) -> Result<Vec<usize>> {
        chain_sample(&self.model, &self.policy, rng)
    }
}
