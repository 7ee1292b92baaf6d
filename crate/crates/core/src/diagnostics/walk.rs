use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{brickwork_pairs, sample_random_circuit};
use crate::error::{Error, Result};
use crate::lattice::{build_lattice, LatticeSpec};
use crate::rng::{substream, CompensatedSum};

pub const MIN_TRIALS: usize = 1000;

/// Empirical and predicted mean of `|U_{j,s}|²` over random circuits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WalkProfile {
    pub source: usize,
    pub depth: usize,
    pub trials: usize,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub theory: Vec<f64>,
}

impl WalkProfile {
    /// Sites where `|mean − theory| > z · stderr` (exact agreement required where the
    /// standard error vanishes).
    pub fn outliers(&self, z: f64) -> Vec<usize> {
        (0..self.mean.len())
            .filter(|&j| {
                let dev = (self.mean[j] - self.theory[j]).abs();
                if self.stderr[j] > 0.0 {
                    dev > z * self.stderr[j]
                } else {
                    dev > 1e-12
                }
            })
            .collect()
    }
}

/// Expected intensity profile: each gate replaces the two weights it touches by their mean.
pub fn averaging_profile(layout: &LatticeSpec, source: usize, depth: usize) -> Vec<f64> {
    let mut w = vec![0.0; layout.modes];
    w[source] = 1.0;
    for l in 0..depth {
        for (i, j) in brickwork_pairs(layout, l) {
            let avg = 0.5 * (w[i] + w[j]);
            w[i] = avg;
            w[j] = avg;
        }
    }
    w
}

/// Walk statistics on a `d`-dimensional cube of `modes = L^d` modes with the source at its
/// centre; trial `t` uses circuit stream `t + 1` of `seed`.
pub fn random_walk_profile(d: usize, modes: usize, depth: usize, n_trials: usize, seed: u64) -> Result<WalkProfile> {
    if n_trials < MIN_TRIALS {
        return Err(Error::InvalidParameter(format!("need at least {MIN_TRIALS} trials, got {n_trials}")));
    }
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let edge = (modes as f64).powf(1.0 / d as f64).round() as usize;
    if edge.checked_pow(d as u32) != Some(modes) {
        return Err(Error::InvalidParameter(format!("{modes} modes is not a {d}-dimensional cube")));
    }
    let layout = build_lattice(d, 1, edge)?;
    let source = layout.sources[0];
    let rows: Vec<Vec<f64>> = (0..n_trials as u64)
        .into_par_iter()
        .map(|t| {
            let c = sample_random_circuit(&layout, depth, &mut substream(seed, t + 1));
            c.propagate_column(source).iter().map(|z| z.norm_sqr()).collect()
        })
        .collect();
    let n = n_trials as f64;
    let mut mean = Vec::with_capacity(modes);
    let mut stderr = Vec::with_capacity(modes);
    for j in 0..modes {
        let m = rows.iter().map(|r| r[j]).collect::<CompensatedSum>().value() / n;
        let var = rows.iter().map(|r| (r[j] - m).powi(2)).collect::<CompensatedSum>().value() / (n - 1.0);
        mean.push(m);
        stderr.push((var / n).sqrt());
    }
    Ok(WalkProfile { source, depth, trials: n_trials, mean, stderr, theory: averaging_profile(&layout, source, depth) })
}
