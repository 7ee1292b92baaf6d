//! Dense matrix helpers shared by the Gaussian engine and the kernels.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type RMatrix = DMatrix<f64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Symplectic form `I_M ⊗ [[0, 1], [-1, 0]]` in interleaved `(x1, p1, ..., xM, pM)` order.
pub fn omega(modes: usize) -> RMatrix {
    let mut w = RMatrix::zeros(2 * modes, 2 * modes);
    for j in 0..modes {
        w[(2 * j, 2 * j + 1)] = 1.0;
        w[(2 * j + 1, 2 * j)] = -1.0;
    }
    w
}

/// `Y = [[0, I], [I, 0]]` of size `2m x 2m`.
pub fn swap_halves(m: usize) -> CMatrix {
    let mut y = CMatrix::zeros(2 * m, 2 * m);
    for j in 0..m {
        y[(j, m + j)] = ONE;
        y[(m + j, j)] = ONE;
    }
    y
}

pub fn max_abs_real(m: &RMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.norm()))
}

pub fn is_symmetric_real(m: &RMatrix, tol: f64) -> bool {
    m.is_square() && max_abs_real(&(m - m.transpose())) <= tol
}

pub fn is_symmetric(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && max_abs(&(m - m.transpose())) <= tol
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && max_abs(&(m - m.adjoint())) <= tol
}

/// Principal submatrix on the given (ordered) indices.
pub fn principal_submatrix<T: nalgebra::Scalar + Copy>(m: &DMatrix<T>, idx: &[usize]) -> DMatrix<T> {
    DMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

/// Inverse and determinant of a Hermitian positive-definite matrix.
///
/// Fails with a conditioning error when the smallest eigenvalue is below `min_eig`.
pub fn hermitian_pd_inverse(q: &CMatrix, min_eig: f64) -> Result<(CMatrix, f64)> {
    let n = q.nrows();
    if n == 0 {
        return Ok((CMatrix::zeros(0, 0), 1.0));
    }
    let herm = (q + q.adjoint()) * C64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let smallest = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if smallest < min_eig {
        return Err(Error::Conditioning(format!("smallest eigenvalue {smallest:.3e} below {min_eig:.0e}")));
    }
    let det = eig.eigenvalues.iter().product();
    let v = &eig.eigenvectors;
    let inv_diag = CMatrix::from_diagonal(&eig.eigenvalues.map(|l| C64::new(1.0 / l, 0.0)));
    Ok((v * inv_diag * v.adjoint(), det))
}

/// Factor a complex symmetric matrix as `A = G Gᵀ` with `G` of shape `n x rank`.
///
/// Greedy symmetric elimination: each step removes one direction `v` (a unit vector, or
/// `(e_p ± e_q)/√2` when the diagonal is small next to the off-diagonal) through
/// `W ← W − (Wv)(Wv)ᵀ / (vᵀWv)`. Stops once every remaining entry is at most `abs_tol`.
/// Returns `None` if more than `max_rank` steps would be needed.
pub fn symmetric_factor(a: &CMatrix, abs_tol: f64, max_rank: usize) -> Option<CMatrix> {
    let n = a.nrows();
    let mut w = (a + a.transpose()) * C64::new(0.5, 0.0);
    let mut cols: Vec<nalgebra::DVector<C64>> = Vec::new();
    loop {
        let (mut di, mut dmax) = (0, 0.0_f64);
        let (mut op, mut oq, mut omax) = (0, 0, 0.0_f64);
        for i in 0..n {
            let d = w[(i, i)].norm();
            if d > dmax {
                dmax = d;
                di = i;
            }
            for j in (i + 1)..n {
                let o = w[(i, j)].norm();
                if o > omax {
                    omax = o;
                    op = i;
                    oq = j;
                }
            }
        }
        if dmax.max(omax) <= abs_tol {
            break;
        }
        if cols.len() == max_rank {
            return None;
        }
        let (c, d) = if dmax >= 0.5 * omax {
            (w.column(di).into_owned(), w[(di, di)])
        } else {
            let mean = (w[(op, op)] + w[(oq, oq)]) * 0.5;
            let (plus, minus) = (mean + w[(op, oq)], mean - w[(op, oq)]);
            let (s, d) = if plus.norm() >= minus.norm() { (1.0, plus) } else { (-1.0, minus) };
            let c = (w.column(op) + w.column(oq) * C64::new(s, 0.0)) * C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            (c, d)
        };
        let g = c / d.sqrt();
        w -= &g * g.transpose();
        cols.push(g);
    }
    let mut out = CMatrix::zeros(n, cols.len());
    for (k, g) in cols.iter().enumerate() {
        out.set_column(k, g);
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_factor(rng: &mut ChaCha8Rng, n: usize, r: usize) -> CMatrix {
        CMatrix::from_fn(n, r, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
    }

    #[test]
    fn omega_is_antisymmetric_with_unit_square() {
        let w = omega(3);
        assert_eq!(&w.transpose(), &(-&w));
        assert_eq!(&w * &w, -RMatrix::identity(6, 6));
    }

    #[test]
    fn factor_recovers_random_low_rank_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for r in 1..=4 {
            let g = random_factor(&mut rng, 9, r);
            let a = &g * g.transpose();
            let f = symmetric_factor(&a, 1e-13, 4).expect("rank within cap");
            assert_eq!(f.ncols(), r);
            assert!(max_abs(&(&f * f.transpose() - &a)) < 1e-12);
        }
    }

    #[test]
    fn factor_handles_zero_diagonal() {
        let mut a = CMatrix::zeros(4, 4);
        a[(0, 3)] = C64::new(0.3, -0.2);
        a[(3, 0)] = a[(0, 3)];
        a[(1, 2)] = C64::new(0.0, 0.7);
        a[(2, 1)] = a[(1, 2)];
        let f = symmetric_factor(&a, 1e-14, 4).unwrap();
        assert_eq!(f.ncols(), 4);
        assert!(max_abs(&(&f * f.transpose() - &a)) < 1e-14);
    }

    #[test]
    fn factor_reports_rank_overflow() {
        let a = CMatrix::identity(5, 5);
        assert!(symmetric_factor(&a, 1e-14, 4).is_none());
        assert_eq!(symmetric_factor(&CMatrix::zeros(3, 3), 1e-14, 4).unwrap().ncols(), 0);
    }

    #[test]
    fn hermitian_inverse_matches_and_rejects_singular() {
        let q = CMatrix::from_row_slice(
            2,
            2,
            &[C64::new(2.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0), C64::new(2.0, 0.0)],
        );
        let (inv, det) = hermitian_pd_inverse(&q, 1e-12).unwrap();
        assert!((det - 3.0).abs() < 1e-12);
        assert!(max_abs(&(&q * inv - CMatrix::identity(2, 2))) < 1e-12);
        let sing = CMatrix::from_element(2, 2, ONE);
        assert!(matches!(hermitian_pd_inverse(&sing, 1e-12), Err(Error::Conditioning(_))));
    }
}
