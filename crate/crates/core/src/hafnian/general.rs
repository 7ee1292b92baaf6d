use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, ONE, ZERO};

pub const GENERAL_CAP: usize = 24;
pub const MATCHING_CAP: usize = 20;

fn check_square_even(a: &CMatrix, cap: usize) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::Domain(format!("hafnian of non-square {}x{} matrix", a.nrows(), a.ncols())));
    }
    let n = a.nrows();
    if n % 2 == 1 {
        return Err(Error::Domain(format!("hafnian of odd dimension {n}")));
    }
    if n > cap {
        return Err(Error::SizeExceeded { what: "hafnian dimension", size: n, cap });
    }
    Ok(n)
}

/// Hafnian by the power-trace inclusion–exclusion formula, `O(n³ 2^{n/2})`.
///
/// Rows `i` and `i + n/2` are grouped as a fixed pairing; for each subset `S` of pairs the
/// contribution is the `η^{n/2}` coefficient of `exp(Σ_k tr((A_S X)^k) η^k / 2k)`, where
/// `X` swaps the two halves of the selected index list.
pub fn hafnian_general(a: &CMatrix) -> Result<C64> {
    let n = check_square_even(a, GENERAL_CAP)?;
    if n == 0 {
        return Ok(ONE);
    }
    let m = n / 2;
    let terms: Vec<C64> = (0u32..1 << m)
        .into_par_iter()
        .map(|mask| {
            let pairs: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
            let s = pairs.len();
            if s == 0 {
                return ZERO;
            }
            let idx: Vec<usize> = pairs.iter().copied().chain(pairs.iter().map(|&i| i + m)).collect();
            // C = A_S X: column j of C is column (j + s) mod 2s of A_S.
            let c = CMatrix::from_fn(2 * s, 2 * s, |i, j| a[(idx[i], idx[(j + s) % (2 * s)])]);
            let mut traces = vec![ZERO; m + 1];
            let mut p = c.clone();
            for (k, t) in traces.iter_mut().enumerate().skip(1) {
                if k > 1 {
                    p = &p * &c;
                }
                *t = p.trace() / (2.0 * k as f64);
            }
            let coeff = exp_series_coefficient(&traces, m);
            if (m - s).is_multiple_of(2) {
                coeff
            } else {
                -coeff
            }
        })
        .collect();
    Ok(terms.into_iter().sum())
}

/// Coefficient of `η^m` in `exp(Σ_{k≥1} p_k η^k)`.
fn exp_series_coefficient(p: &[C64], m: usize) -> C64 {
    let mut e = vec![ZERO; m + 1];
    e[0] = ONE;
    for j in 1..=m {
        let mut acc = ZERO;
        for k in 1..=j {
            acc += p[k] * e[j - k] * k as f64;
        }
        e[j] = acc / j as f64;
    }
    e[m]
}

/// Hafnian by memoised enumeration of perfect matchings. Exponential memory; used as the
/// reference against which faster kernels are checked.
pub fn hafnian_matchings(a: &CMatrix) -> Result<C64> {
    let n = check_square_even(a, MATCHING_CAP)?;
    let mut memo = HashMap::new();
    Ok(matchings(a, (1u32 << n) - 1, &mut memo))
}

fn matchings(a: &CMatrix, mask: u32, memo: &mut HashMap<u32, C64>) -> C64 {
    if mask == 0 {
        return ONE;
    }
    if let Some(&v) = memo.get(&mask) {
        return v;
    }
    let i = mask.trailing_zeros() as usize;
    let rest = mask & !(1 << i);
    let mut acc = ZERO;
    let mut bits = rest;
    while bits != 0 {
        let j = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        if a[(i, j)] != ZERO {
            acc += a[(i, j)] * matchings(a, rest & !(1 << j), memo);
        }
    }
    memo.insert(mask, acc);
    acc
}
