use crate::circuit::Circuit;
use crate::error::Result;
use crate::gaussian::covariance::{circuit_symplectic, input_covariance, quad_indices, QuadCovariance};
use crate::lattice::LatticeSpec;
use crate::linalg::{principal_submatrix, RMatrix};

/// Block-diagonal approximation of the output state: one independently propagated
/// single-source block per sublattice, with all inter-sublattice correlations dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockApproxCovariance {
    pub va: RMatrix,
    /// Per-sublattice blocks in the mode order of `layout.sublattices[α]`.
    pub blocks: Vec<RMatrix>,
    pub sublattices: Vec<Vec<usize>>,
    pub r: f64,
}

impl BlockApproxCovariance {
    pub fn block_state(&self, alpha: usize) -> Result<QuadCovariance> {
        QuadCovariance::new(self.blocks[alpha].clone(), self.r)
    }
}

/// Output covariance of source α alone after the circuit: `½𝟙` plus a rank-2 update along the
/// images of the source's quadratures.
pub fn single_source_output(s: &RMatrix, source: usize, r: f64) -> RMatrix {
    let n = s.nrows();
    let mut v = RMatrix::identity(n, n) * 0.5;
    let sx = s.column(2 * source);
    let sp = s.column(2 * source + 1);
    let (xx, pp) = (sx * sx.transpose(), sp * sp.transpose());
    // Remove the vacuum part first so unpropagated sources reproduce the input exactly.
    v -= (&xx + &pp) * 0.5;
    v += xx * (0.5 * (2.0 * r).exp());
    v += pp * (0.5 * (-2.0 * r).exp());
    v
}

pub fn block_approx_covariance(circuit: &Circuit, layout: &LatticeSpec, r: f64) -> Result<BlockApproxCovariance> {
    // validates r
    input_covariance(layout, r)?;
    let s = circuit_symplectic(circuit)?;
    let n = 2 * layout.modes;
    let mut va = RMatrix::zeros(n, n);
    let mut blocks = Vec::with_capacity(layout.n_sources);
    for (alpha, sub) in layout.sublattices.iter().enumerate() {
        let v_alpha = single_source_output(&s, layout.sources[alpha], r);
        let idx = quad_indices(sub);
        let block = principal_submatrix(&v_alpha, &idx);
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                va[(i, j)] = block[(a, b)];
            }
        }
        blocks.push(block);
    }
    Ok(BlockApproxCovariance { va, blocks, sublattices: layout.sublattices.clone(), r })
}
