//! Hafnian and permanent kernels.

mod general;
mod low_rank;
mod permanent;

use serde::{Deserialize, Serialize};

pub use general::{hafnian_general, hafnian_matchings, GENERAL_CAP, MATCHING_CAP};
pub use low_rank::{hafnian_low_rank, hafnian_low_rank_repeated, MAX_LOW_RANK};
pub use permanent::{permanent, PERMANENT_CAP};

use crate::error::{Error, Result};
use crate::linalg::{is_symmetric, max_abs, CMatrix, C64};

/// A complex symmetric matrix, optionally with a factor `G` such that `A = G Gᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricComplexMatrix {
    pub entries: CMatrix,
    pub factor: Option<CMatrix>,
}

impl SymmetricComplexMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        if entries.nrows() != entries.ncols() || !is_symmetric(&entries, 1e-10) {
            return Err(Error::Domain("matrix is not square symmetric".into()));
        }
        Ok(SymmetricComplexMatrix { entries, factor: None })
    }

    pub fn from_factor(g: CMatrix) -> Self {
        SymmetricComplexMatrix { entries: &g * g.transpose(), factor: Some(g) }
    }

    pub fn with_factor(entries: CMatrix, g: CMatrix) -> Result<Self> {
        let m = Self::new(entries)?;
        if g.nrows() != m.dim() || max_abs(&(&g * g.transpose() - &m.entries)) > 1e-10 {
            return Err(Error::Mismatch("factor does not reproduce the matrix".into()));
        }
        Ok(SymmetricComplexMatrix { factor: Some(g), ..m })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn rank_tag(&self) -> Option<usize> {
        self.factor.as_ref().map(|g| g.ncols())
    }

    /// Uses the low-rank kernel when a factor of rank `≤ 4` is present.
    pub fn hafnian(&self) -> Result<C64> {
        match &self.factor {
            Some(g) if g.ncols() <= MAX_LOW_RANK => hafnian_low_rank(g),
            _ => hafnian_general(&self.entries),
        }
    }
}

/// Photon counts per mode.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RepetitionVector(pub Vec<usize>);

impl RepetitionVector {
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn within_budget(&self, budget: usize) -> Result<()> {
        if self.total() > budget {
            return Err(Error::SizeExceeded { what: "photon total", size: self.total(), cap: budget });
        }
        Ok(())
    }

    /// Row multiplicities for a `2M × 2M` matrix: `n` for the first half, `n` again for the second.
    pub fn doubled(&self) -> Vec<usize> {
        self.0.iter().chain(self.0.iter()).copied().collect()
    }
}

/// Row indices of `A_n`: mode `i` repeated `n_i` times, then `i + M` repeated `n_i` times.
pub fn repeated_indices(n: &[usize]) -> Vec<usize> {
    let m = n.len();
    let first = n.iter().enumerate().flat_map(|(i, &c)| std::iter::repeat_n(i, c));
    let second = n.iter().enumerate().flat_map(move |(i, &c)| std::iter::repeat_n(i + m, c));
    first.chain(second).collect()
}

/// `A_n`: rows and columns `i` and `i + M` of the `2M × 2M` matrix repeated `n_i` times.
pub fn repeat_rows_cols(a: &SymmetricComplexMatrix, n: &RepetitionVector) -> Result<SymmetricComplexMatrix> {
    if a.dim() != 2 * n.0.len() {
        return Err(Error::Mismatch(format!(
            "repetition vector of length {} for a {}x{} matrix",
            n.0.len(),
            a.dim(),
            a.dim()
        )));
    }
    let idx = repeated_indices(&n.0);
    let entries = CMatrix::from_fn(idx.len(), idx.len(), |i, j| a.entries[(idx[i], idx[j])]);
    let factor = a.factor.as_ref().map(|g| CMatrix::from_fn(idx.len(), g.ncols(), |i, r| g[(idx[i], r)]));
    Ok(SymmetricComplexMatrix { entries, factor })
}
