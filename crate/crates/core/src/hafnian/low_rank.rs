use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, ONE, ZERO};

pub const MAX_LOW_RANK: usize = 4;

/// `Haf(G Gᵀ)` for a `2k × R` factor, `R ≤ 4`.
pub fn hafnian_low_rank(g: &CMatrix) -> Result<C64> {
    let ones = vec![1; g.nrows()];
    hafnian_low_rank_repeated(g, &ones)
}

/// Hafnian of `G Gᵀ` with row/column `i` repeated `mult[i]` times.
///
/// By Isserlis' theorem the hafnian equals `E[∏_i y_i^{mult_i}]` with `y = G z` and `z`
/// standard normal, so it is `Σ_e c_e ∏_r (e_r − 1)!!` over even exponent vectors `e`, where
/// `c_e` are the coefficients of `∏_i (Σ_r G_ir x_r)^{mult_i}`. The coefficient table is
/// indexed by the exponents of the first `R − 1` variables; the last exponent is implied by
/// the total degree.
pub fn hafnian_low_rank_repeated(g: &CMatrix, mult: &[usize]) -> Result<C64> {
    let rank = g.ncols();
    if rank > MAX_LOW_RANK {
        return Err(Error::UnsupportedRank { rank, max: MAX_LOW_RANK });
    }
    if mult.len() != g.nrows() {
        return Err(Error::Mismatch(format!("{} multiplicities for a factor with {} rows", mult.len(), g.nrows())));
    }
    let degree: usize = mult.iter().sum();
    if degree == 0 {
        return Ok(ONE);
    }
    if degree % 2 == 1 || rank == 0 {
        return Ok(ZERO);
    }
    let side = degree + 1;
    let free = rank - 1;
    let len = side.pow(free as u32);
    let strides: Vec<usize> = (0..free).map(|r| side.pow((free - 1 - r) as u32)).collect();

    let mut coeff = vec![ZERO; len];
    coeff[0] = ONE;
    let mut exps = vec![0usize; free];
    for (i, &times) in mult.iter().enumerate() {
        let row: Vec<C64> = (0..rank).map(|r| g[(i, r)]).collect();
        let last = row[free];
        for _ in 0..times {
            for idx in (0..len).rev() {
                let mut rem = idx;
                for r in 0..free {
                    exps[r] = rem / strides[r];
                    rem %= strides[r];
                }
                let mut v = coeff[idx] * last;
                for r in 0..free {
                    if exps[r] > 0 {
                        v += coeff[idx - strides[r]] * row[r];
                    }
                }
                coeff[idx] = v;
            }
        }
    }

    let dfact = double_factorials(degree);
    let mut total = ZERO;
    for (idx, c) in coeff.iter().enumerate() {
        if *c == ZERO {
            continue;
        }
        let mut rem = idx;
        let mut used = 0;
        let mut weight = 1.0;
        let mut even = true;
        for r in 0..free {
            let e = rem / strides[r];
            rem %= strides[r];
            used += e;
            even &= e.is_multiple_of(2);
            weight *= dfact[e];
        }
        if !even || used > degree || (degree - used) % 2 == 1 {
            continue;
        }
        total += c * (weight * dfact[degree - used]);
    }
    Ok(total)
}

/// `(e − 1)!!` for even `e` up to `max` (index `e`); odd entries are unused.
fn double_factorials(max: usize) -> Vec<f64> {
    let mut d = vec![1.0; max + 1];
    for e in (2..=max).step_by(2) {
        d[e] = d[e - 2] * (e - 1) as f64;
    }
    d
}
