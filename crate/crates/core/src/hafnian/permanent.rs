use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, ONE, ZERO};

pub const PERMANENT_CAP: usize = 14;

/// Permanent by Ryser's inclusion–exclusion formula, visiting column subsets in Gray-code
/// order so each step updates the row sums with one column.
pub fn permanent(a: &CMatrix) -> Result<C64> {
    if a.nrows() != a.ncols() {
        return Err(Error::Domain(format!("permanent of non-square {}x{} matrix", a.nrows(), a.ncols())));
    }
    let n = a.nrows();
    if n > PERMANENT_CAP {
        return Err(Error::SizeExceeded { what: "permanent dimension", size: n, cap: PERMANENT_CAP });
    }
    if n == 0 {
        return Ok(ONE);
    }
    let mut row_sums = vec![ZERO; n];
    let mut total = ZERO;
    let mut gray = 0u32;
    for k in 1u32..1 << n {
        let next = k ^ (k >> 1);
        let col = (gray ^ next).trailing_zeros() as usize;
        let added = next & (1 << col) != 0;
        for (i, s) in row_sums.iter_mut().enumerate() {
            if added {
                *s += a[(i, col)];
            } else {
                *s -= a[(i, col)];
            }
        }
        gray = next;
        let prod: C64 = row_sums.iter().product();
        if (n - next.count_ones() as usize).is_multiple_of(2) {
            total += prod;
        } else {
            total -= prod;
        }
    }
    Ok(total)
}
