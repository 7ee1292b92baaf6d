use rand::Rng;

use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::linalg::CMatrix;
use crate::rng::SimRng;

/// Distinguishable-photon sampler: each source photon independently lands in mode `k` with
/// probability `|U_{k,s}|²`. Binning the independent draws realises the symmetrisation over
/// photon orderings with its `1/t!` weight, so no permanent of `|U|²` is needed.
#[derive(Debug, Clone)]
pub struct FockSampler {
    cumulative: Vec<Vec<f64>>,
    modes: usize,
}

impl FockSampler {
    pub fn from_columns(columns: &[Vec<crate::linalg::C64>]) -> Result<Self> {
        let modes = columns.first().map_or(0, |c| c.len());
        let cumulative = columns
            .iter()
            .map(|col| {
                if col.len() != modes {
                    return Err(Error::Mismatch("source columns of different length".into()));
                }
                let mut acc = 0.0;
                Ok(col
                    .iter()
                    .map(|z| {
                        acc += z.norm_sqr();
                        acc
                    })
                    .collect())
            })
            .collect::<Result<Vec<Vec<f64>>>>()?;
        Ok(FockSampler { cumulative, modes })
    }

    pub fn new(u: &CMatrix, layout: &LatticeSpec) -> Result<Self> {
        if u.nrows() != layout.modes || u.ncols() != layout.modes {
            return Err(Error::Mismatch(format!("{}x{} unitary for {} modes", u.nrows(), u.ncols(), layout.modes)));
        }
        let columns: Vec<Vec<_>> = layout.sources.iter().map(|&s| u.column(s).iter().copied().collect()).collect();
        Self::from_columns(&columns)
    }

    pub fn sample(&self, rng: &mut SimRng) -> Vec<usize> {
        let mut counts = vec![0; self.modes];
        for cum in &self.cumulative {
            let total = *cum.last().unwrap();
            let target = rng.random::<f64>() * total;
            let k = cum.partition_point(|&c| c <= target).min(self.modes - 1);
            counts[k] += 1;
        }
        counts
    }
}

pub fn distinguishable_fock_sample(u: &CMatrix, layout: &LatticeSpec, rng: &mut SimRng) -> Result<Vec<usize>> {
    Ok(FockSampler::new(u, layout)?.sample(rng))
}
