use crate::error::{Error, Result};
use crate::gaussian::covariance::ComplexCovariance;
use crate::linalg::{hermitian_pd_inverse, swap_halves, CMatrix, C64, ZERO};

pub const MIN_EIGENVALUE: f64 = 1e-12;

/// `A = Y (𝟙 − (Σ + 𝟙/2)^{-1})`, optionally with a factor `G` (`A = G Gᵀ`).
#[derive(Debug, Clone, PartialEq)]
pub struct AMatrix {
    pub a: CMatrix,
    pub factor: Option<CMatrix>,
}

impl AMatrix {
    pub fn rank_tag(&self) -> Option<usize> {
        self.factor.as_ref().map(|g| g.ncols())
    }

    /// Top-left `M × M` block.
    pub fn b_block(&self) -> CMatrix {
        let m = self.a.nrows() / 2;
        self.a.view((0, 0), (m, m)).into_owned()
    }
}

/// A-matrix and `det(Σ + 𝟙/2)`.
pub fn a_matrix_with_det(sigma: &ComplexCovariance) -> Result<(AMatrix, f64)> {
    let n = sigma.sigma.nrows();
    let q = &sigma.sigma + CMatrix::identity(n, n) * C64::new(0.5, 0.0);
    let (qinv, det) = hermitian_pd_inverse(&q, MIN_EIGENVALUE)?;
    let a = swap_halves(n / 2) * (CMatrix::identity(n, n) - qinv);
    let a = (&a + a.transpose()) * C64::new(0.5, 0.0);
    Ok((AMatrix { a, factor: None }, det))
}

pub fn a_matrix(sigma: &ComplexCovariance) -> Result<AMatrix> {
    a_matrix_with_det(sigma).map(|(a, _)| a)
}

/// `B = K diag(tanh r) Kᵀ` in factored form, and `A = B ⊕ B*`.
///
/// Only columns with `r_j > 0` enter the factor, so the rank is the number of squeezed
/// inputs. With the `a_out = U a_in` convention used throughout, the output state of a
/// circuit has `K = conj(U)`.
pub fn b_matrix(k: &CMatrix, r: &[f64]) -> Result<AMatrix> {
    let m = k.nrows();
    if k.ncols() != m || r.len() != m {
        return Err(Error::Mismatch(format!("K is {}x{} with {} squeezing values", k.nrows(), k.ncols(), r.len())));
    }
    let cols: Vec<usize> = (0..m).filter(|&j| r[j] != 0.0).collect();
    let gb = CMatrix::from_fn(m, cols.len(), |i, c| k[(i, cols[c])] * r[cols[c]].tanh().sqrt());
    Ok(block_sum_from_b_factor(&gb))
}

/// `A` with factor `[[G_B, 0], [0, G_B*]]`.
pub fn block_sum_from_b_factor(gb: &CMatrix) -> AMatrix {
    let (m, rank) = gb.shape();
    let mut g = CMatrix::from_element(2 * m, 2 * rank, ZERO);
    g.view_mut((0, 0), (m, rank)).copy_from(gb);
    g.view_mut((m, rank), (m, rank)).copy_from(&gb.map(|z| z.conj()));
    AMatrix { a: &g * g.transpose(), factor: Some(g) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{accumulate_unitary, sample_random_circuit};
    use crate::gaussian::covariance::{input_covariance, output_covariance, quad_to_complex};
    use crate::lattice::build_lattice;
    use crate::linalg::max_abs;
    use crate::rng::substream;

    #[test]
    fn vacuum_gives_zero() {
        let a = a_matrix(&ComplexCovariance::vacuum(3)).unwrap();
        assert!(max_abs(&a.a) < 1e-15);
    }

    #[test]
    fn single_mode_squeezed() {
        let r: f64 = 0.45;
        let sigma = quad_to_complex(&input_covariance(&build_lattice(1, 1, 1).unwrap(), r).unwrap());
        let (a, det) = a_matrix_with_det(&sigma).unwrap();
        assert!((a.a[(0, 0)].re - r.tanh()).abs() < 1e-14);
        assert!((a.a[(1, 1)].re - r.tanh()).abs() < 1e-14);
        assert!(a.a[(0, 1)].norm() < 1e-14);
        assert!((det - r.cosh().powi(2)).abs() < 1e-13);
        let b = b_matrix(&CMatrix::identity(1, 1), &[r]).unwrap();
        assert!(max_abs(&(b.a - a.a)) < 1e-14);
    }

    #[test]
    fn b_matrix_examples() {
        let k = CMatrix::identity(3, 3);
        let zero = b_matrix(&k, &[0.0; 3]).unwrap();
        assert_eq!(zero.rank_tag(), Some(0));
        assert!(max_abs(&zero.a) == 0.0);
        let one = b_matrix(&k, &[0.8, 0.0, 0.0]).unwrap();
        let b = one.b_block();
        assert!((b[(0, 0)].re - 0.8f64.tanh()).abs() < 1e-15);
        assert_eq!(b.iter().filter(|z| z.norm() > 0.0).count(), 1);
        assert_eq!(one.rank_tag(), Some(2));
    }

    #[test]
    fn two_constructions_agree_on_circuits() {
        for seed in 0..10 {
            let l = build_lattice(1, 2, 2).unwrap();
            let c = sample_random_circuit(&l, 1 + seed as usize % 5, &mut substream(seed, 0));
            let r = 0.3 + 0.1 * seed as f64;
            let a = a_matrix(&quad_to_complex(&output_covariance(&c, r).unwrap())).unwrap();
            let u = accumulate_unitary(&c).unwrap().u;
            let mut rs = vec![0.0; 4];
            for &s in &l.sources {
                rs[s] = r;
            }
            let b = b_matrix(&u.map(|z| z.conj()), &rs).unwrap();
            assert!(max_abs(&(a.a - b.a)) < 1e-10, "seed {seed}");
        }
    }

    #[test]
    fn singular_q_is_a_conditioning_error() {
        let sigma = ComplexCovariance { sigma: CMatrix::identity(2, 2) * C64::new(-0.5, 0.0) };
        assert!(matches!(a_matrix(&sigma), Err(Error::Conditioning(_))));
    }
}
