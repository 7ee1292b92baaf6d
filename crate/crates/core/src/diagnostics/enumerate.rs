//! Brute-force enumeration oracles.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gaussian::{a_matrix_with_det, quad_matrix_to_complex, BlockApproxCovariance, ComplexCovariance};
use crate::hafnian::{permanent, PERMANENT_CAP};
use crate::lattice::LatticeSpec;
use crate::linalg::{CMatrix, C64};
use crate::rng::CompensatedSum;
use crate::sampling::{HafnianEvaluator, MarginalModel, Outcome, TruncationPolicy};

use super::distribution::Distribution;

pub const ORACLE_MAX_MODES: usize = 12;
pub const ORACLE_MAX_PHOTONS: usize = 6;
pub const ORACLE_MAX_OUTCOMES: usize = 2_000_000;

/// Number of count vectors over `modes` modes with total `≤ total_max` and entries `≤ mode_max`.
pub fn count_outcomes(modes: usize, total_max: usize, mode_max: usize) -> u128 {
    // ways[t] = vectors so far with total t
    let mut ways = vec![0u128; total_max + 1];
    ways[0] = 1;
    for _ in 0..modes {
        let mut next = vec![0u128; total_max + 1];
        for (t, &w) in ways.iter().enumerate() {
            if w == 0 {
                continue;
            }
            for n in 0..=mode_max.min(total_max - t) {
                next[t + n] = next[t + n].saturating_add(w);
            }
        }
        ways = next;
    }
    ways.iter().fold(0u128, |a, &b| a.saturating_add(b))
}

/// All count vectors with total `≤ total_max` and entries `≤ mode_max`, lexicographic.
pub fn count_vectors(modes: usize, total_max: usize, mode_max: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0; modes];
    fn rec(i: usize, left: usize, cap: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for n in 0..=cap.min(left) {
            cur[i] = n;
            rec(i + 1, left - n, cap, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, total_max, mode_max, &mut cur, &mut out);
    out
}

/// Count vectors with total exactly `total`.
pub fn count_vectors_with_total(modes: usize, total: usize) -> Vec<Vec<usize>> {
    count_vectors(modes, total, total).into_iter().filter(|v| v.iter().sum::<usize>() == total).collect()
}

fn check_gaussian_scale(modes: usize, policy: &TruncationPolicy) -> Result<Vec<Vec<usize>>> {
    if modes > ORACLE_MAX_MODES {
        return Err(Error::SizeExceeded { what: "oracle mode count", size: modes, cap: ORACLE_MAX_MODES });
    }
    let n = count_outcomes(modes, policy.n_total_max, policy.n_mode_max);
    if n > ORACLE_MAX_OUTCOMES as u128 {
        return Err(Error::SizeExceeded {
            what: "oracle outcome count",
            size: usize::try_from(n).unwrap_or(usize::MAX),
            cap: ORACLE_MAX_OUTCOMES,
        });
    }
    Ok(count_vectors(modes, policy.n_total_max, policy.n_mode_max))
}

fn factorial_product(counts: &[usize]) -> f64 {
    counts.iter().map(|&n| (2..=n).map(|x| x as f64).product::<f64>()).product()
}

fn collect(outcomes: Vec<Vec<usize>>, probs: Vec<f64>) -> Result<Distribution> {
    Distribution::from_counts(outcomes.into_iter().zip(probs))
}

/// Every outcome within the policy's budget, with probabilities from the full A-matrix.
pub fn enumerate_gbs_distribution(sigma: &ComplexCovariance, policy: &TruncationPolicy) -> Result<Distribution> {
    let outcomes = check_gaussian_scale(sigma.modes(), policy)?;
    let (a, det) = a_matrix_with_det(sigma)?;
    let eval = HafnianEvaluator::from_a(&a.a);
    let norm = det.sqrt();
    let probs = outcomes
        .par_iter()
        .map(|n| Ok((eval.haf_repeated(n)? / (factorial_product(n) * norm)).max(0.0)))
        .collect::<Result<Vec<f64>>>()?;
    collect(outcomes, probs)
}

/// Every outcome within budget, with probabilities from a marginal model's full-length values.
pub fn enumerate_model<M: MarginalModel + ?Sized>(model: &M, policy: &TruncationPolicy) -> Result<Distribution> {
    let outcomes = check_gaussian_scale(model.modes(), policy)?;
    let probs = outcomes.par_iter().map(|n| model.marginal(n)).collect::<Result<Vec<f64>>>()?;
    collect(outcomes, probs)
}

/// Per-sublattice distributions of the block-approximated state (local mode order).
pub fn enumerate_block_approx_distribution(
    block: &BlockApproxCovariance,
    policy: &TruncationPolicy,
) -> Result<Vec<Distribution>> {
    block.blocks.iter().map(|b| enumerate_gbs_distribution(&quad_matrix_to_complex(b), policy)).collect()
}

fn check_fock_scale(u: &CMatrix, layout: &LatticeSpec) -> Result<()> {
    if layout.n_sources > ORACLE_MAX_PHOTONS {
        return Err(Error::SizeExceeded {
            what: "oracle photon count",
            size: layout.n_sources,
            cap: ORACLE_MAX_PHOTONS,
        });
    }
    if layout.modes > ORACLE_MAX_MODES {
        return Err(Error::SizeExceeded { what: "oracle mode count", size: layout.modes, cap: ORACLE_MAX_MODES });
    }
    if u.nrows() != layout.modes || u.ncols() != layout.modes {
        return Err(Error::Mismatch(format!("{}x{} unitary for {} modes", u.nrows(), u.ncols(), layout.modes)));
    }
    debug_assert!(layout.n_sources <= PERMANENT_CAP);
    Ok(())
}

/// Rows of `m` for the output modes (mode `j` repeated `n_j` times), columns at `cols`.
fn output_submatrix<T: nalgebra::Scalar + Copy>(
    m: &nalgebra::DMatrix<T>,
    counts: &[usize],
    cols: &[usize],
) -> nalgebra::DMatrix<T> {
    let rows: Vec<usize> = counts.iter().enumerate().flat_map(|(j, &n)| std::iter::repeat_n(j, n)).collect();
    nalgebra::DMatrix::from_fn(rows.len(), cols.len(), |i, k| m[(rows[i], cols[k])])
}

/// Exact single-photon output distribution: `|Per(U_sub)|² / ∏ n_j!`.
pub fn enumerate_fock_distribution(u: &CMatrix, layout: &LatticeSpec) -> Result<Distribution> {
    check_fock_scale(u, layout)?;
    let outcomes = count_vectors_with_total(layout.modes, layout.n_sources);
    let probs = outcomes
        .par_iter()
        .map(|n| Ok(permanent(&output_submatrix(u, n, &layout.sources))?.norm_sqr() / factorial_product(n)))
        .collect::<Result<Vec<f64>>>()?;
    collect(outcomes, probs)
}

/// Distribution of distinguishable photons: `Per(W_sub) / ∏ n_j!` with `W = |U|²`.
pub fn enumerate_distinguishable_distribution(u: &CMatrix, layout: &LatticeSpec) -> Result<Distribution> {
    check_fock_scale(u, layout)?;
    let w = u.map(|z| C64::new(z.norm_sqr(), 0.0));
    let outcomes = count_vectors_with_total(layout.modes, layout.n_sources);
    let probs = outcomes
        .par_iter()
        .map(|n| Ok((permanent(&output_submatrix(&w, n, &layout.sources))?.re / factorial_product(n)).max(0.0)))
        .collect::<Result<Vec<f64>>>()?;
    collect(outcomes, probs)
}

/// Bracket on the total-variation distance between two distributions when both were only
/// enumerated up to a common photon budget.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct TvdEstimate {
    /// Distance restricted to outcomes within the budget.
    pub truncated: f64,
    pub lower: f64,
    pub upper: f64,
    pub tail_p: f64,
    pub tail_q: f64,
}

/// Compares `exact` (all outcomes with total `≤ budget`) to the product of independent parts,
/// each enumerated over its own modes up to the same budget.
pub fn tvd_against_product(
    exact: &Distribution,
    parts: &[(Vec<usize>, Distribution)],
    budget: usize,
) -> Result<TvdEstimate> {
    let mut diff = CompensatedSum::default();
    let mut q_on_support = CompensatedSum::default();
    for (o, p) in exact.iter() {
        let Outcome::Counts(c) = o else {
            return Err(Error::Mismatch("expected photon-count outcomes".into()));
        };
        if c.iter().sum::<usize>() > budget {
            continue;
        }
        let q: f64 =
            parts.iter().map(|(modes, d)| d.prob_counts(&modes.iter().map(|&m| c[m]).collect::<Vec<_>>())).product();
        diff.add((p - q).abs());
        q_on_support.add(q);
    }
    // mass of the product within the budget, by convolving per-part totals
    let mut conv = vec![1.0];
    for (_, d) in parts {
        let by_total = d.mass_by_total();
        let mut next = vec![0.0; (conv.len() + by_total.len()).min(budget + 2)];
        for (a, &x) in conv.iter().enumerate() {
            for (b, &y) in by_total.iter().enumerate() {
                if a + b <= budget {
                    next[a + b] += x * y;
                }
            }
        }
        conv = next;
    }
    let q_region: f64 = conv.iter().sum();
    let q_off_support = (q_region - q_on_support.value()).max(0.0);
    let truncated = 0.5 * (diff.value() + q_off_support);
    let tail_p = (1.0 - exact.mass()).max(0.0);
    let tail_q = (1.0 - q_region).max(0.0);
    Ok(TvdEstimate {
        truncated,
        lower: truncated + 0.5 * (tail_p - tail_q).abs(),
        upper: truncated + 0.5 * (tail_p + tail_q),
        tail_p,
        tail_q,
    })
}
