//! Oracle-equivalence suite for the hafnian and permanent kernels.
//!
//! Each check runs one kernel against an independent one on seeded random inputs and records
//! the worst relative error.

use rand::Rng;
use serde::Serialize;

use crate::error::Result;
use crate::hafnian::{hafnian_general, hafnian_low_rank, hafnian_low_rank_repeated, hafnian_matchings, permanent};
use crate::linalg::{principal_submatrix, CMatrix, C64, ZERO};
use crate::rng::{substream, SimRng};

pub const LOW_RANK_CASES: usize = 200;
pub const LOW_RANK_MAX_DIM: usize = 12;
pub const LOW_RANK_TOL: f64 = 1e-9;
pub const PERMANENT_MAX_DIM: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelCheck {
    pub name: String,
    pub cases: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub checks: Vec<KernelCheck>,
    pub pass: bool,
}

fn check(name: &str, cases: usize, max_error: f64, tolerance: f64) -> KernelCheck {
    KernelCheck { name: name.into(), cases, max_error, tolerance, pass: max_error <= tolerance }
}

fn random_complex(rng: &mut SimRng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
}

fn rel_err(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

/// Low-rank kernel against the general one on `cases` random rank-2 factored matrices with even
/// dimension cycling through `2..=max_dim`.
pub fn low_rank_vs_general(rng: &mut SimRng, cases: usize, max_dim: usize) -> Result<f64> {
    let dims: Vec<usize> = (1..=max_dim / 2).map(|k| 2 * k).collect();
    let mut worst = 0.0_f64;
    for c in 0..cases {
        let g = random_complex(rng, dims[c % dims.len()], 2);
        let a = &g * g.transpose();
        worst = worst.max(rel_err(hafnian_low_rank(&g)?, hafnian_general(&a)?));
    }
    Ok(worst)
}

/// Repeated-row low-rank kernel against the general kernel on the explicitly repeated matrix.
pub fn repeated_vs_general(rng: &mut SimRng, cases: usize) -> Result<f64> {
    let mut worst = 0.0_f64;
    for _ in 0..cases {
        let rank = rng.random_range(1..=4usize);
        let g = random_complex(rng, 4, rank);
        let mut mult: Vec<usize> = (0..4).map(|_| rng.random_range(0..=3usize)).collect();
        if mult.iter().sum::<usize>() % 2 == 1 {
            mult[0] += 1;
        }
        let idx: Vec<usize> = mult.iter().enumerate().flat_map(|(i, &m)| std::iter::repeat_n(i, m)).collect();
        let a = principal_submatrix(&(&g * g.transpose()), &idx);
        worst = worst.max(rel_err(hafnian_low_rank_repeated(&g, &mult)?, hafnian_general(&a)?));
    }
    Ok(worst)
}

/// Power-trace hafnian against memoized matching enumeration on dense symmetric matrices.
pub fn general_vs_matchings(rng: &mut SimRng, max_dim: usize) -> Result<f64> {
    let mut worst = 0.0_f64;
    for n in (2..=max_dim).step_by(2) {
        let b = random_complex(rng, n, n);
        let a = &b + b.transpose();
        worst = worst.max(rel_err(hafnian_general(&a)?, hafnian_matchings(&a)?));
    }
    Ok(worst)
}

/// Ryser's formula against the sum over all permutations, on small integer matrices so both
/// sides are exact in floating point.
pub fn permanent_vs_permutations(rng: &mut SimRng, max_dim: usize) -> Result<f64> {
    let mut worst = 0.0_f64;
    for n in 1..=max_dim {
        let a =
            CMatrix::from_fn(n, n, |_, _| C64::new(rng.random_range(-2..=2) as f64, rng.random_range(-2..=2) as f64));
        worst = worst.max((permanent(&a)? - permutation_sum(&a)).norm());
    }
    Ok(worst)
}

fn permutation_sum(a: &CMatrix) -> C64 {
    fn go(a: &CMatrix, row: usize, used: &mut [bool], acc: C64) -> C64 {
        if row == a.nrows() {
            return acc;
        }
        let mut total = ZERO;
        for col in 0..a.ncols() {
            if !used[col] {
                used[col] = true;
                total += go(a, row + 1, used, acc * a[(row, col)]);
                used[col] = false;
            }
        }
        total
    }
    go(a, 0, &mut vec![false; a.ncols()], C64::new(1.0, 0.0))
}

/// Hafnian of a block `[[0, B], [Bᵀ, 0]]` equals `Per(B)`; ties the two kernel families together.
pub fn bipartite_hafnian_vs_permanent(rng: &mut SimRng, max_dim: usize) -> Result<f64> {
    let mut worst = 0.0_f64;
    for n in 1..=max_dim {
        let b = random_complex(rng, n, n);
        let mut a = CMatrix::zeros(2 * n, 2 * n);
        a.view_mut((0, n), (n, n)).copy_from(&b);
        a.view_mut((n, 0), (n, n)).copy_from(&b.transpose());
        worst = worst.max(rel_err(hafnian_general(&a)?, permanent(&b)?));
    }
    Ok(worst)
}

/// Runs every check with streams derived from `seed`.
pub fn run_selftest(seed: u64) -> Result<SelftestReport> {
    let checks = vec![
        check(
            "hafnian_low_rank_vs_general",
            LOW_RANK_CASES,
            low_rank_vs_general(&mut substream(seed, 1), LOW_RANK_CASES, LOW_RANK_MAX_DIM)?,
            LOW_RANK_TOL,
        ),
        check(
            "hafnian_low_rank_repeated_vs_general",
            50,
            repeated_vs_general(&mut substream(seed, 2), 50)?,
            LOW_RANK_TOL,
        ),
        check("hafnian_general_vs_matchings", 7, general_vs_matchings(&mut substream(seed, 3), 14)?, 1e-9),
        check(
            "permanent_vs_permutation_sum",
            PERMANENT_MAX_DIM,
            permanent_vs_permutations(&mut substream(seed, 4), PERMANENT_MAX_DIM)?,
            0.0,
        ),
        check("bipartite_hafnian_vs_permanent", 8, bipartite_hafnian_vs_permanent(&mut substream(seed, 5), 8)?, 1e-9),
    ];
    let pass = checks.iter().all(|c| c.pass);
    Ok(SelftestReport { seed, checks, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes() {
        let rep = run_selftest(2024).unwrap();
        for c in &rep.checks {
            assert!(c.pass, "{c:?}");
        }
        assert!(rep.pass);
    }

    #[test]
    fn permutation_sum_small() {
        let a = CMatrix::from_fn(2, 2, |i, j| C64::new((2 * i + j + 1) as f64, 0.0));
        assert_eq!(permutation_sum(&a), C64::new(1.0 * 4.0 + 2.0 * 3.0, 0.0));
    }
}
