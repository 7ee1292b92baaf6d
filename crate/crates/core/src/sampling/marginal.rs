//! Marginal photon-number probabilities of Gaussian states.
//!
//! `P(n_1, …, n_k) = Re Haf(A_n) / (∏ n_i! · √det(Σ^{(k)} + 𝟙/2))`, where `Σ^{(k)}` is the
//! reduced state of the first `k` modes and `A_n` repeats rows `i` and `i + k` of its A-matrix
//! `n_i` times.

use crate::error::{Error, Result};
use crate::gaussian::{a_matrix_with_det, reduce, ComplexCovariance};
use crate::hafnian::{hafnian_general, hafnian_low_rank_repeated, repeated_indices, MAX_LOW_RANK};
use crate::linalg::{max_abs, swap_halves, symmetric_factor, CMatrix, C64, ZERO};

/// Probabilities of prefixes of a fixed mode ordering.
pub trait MarginalModel: Send + Sync {
    fn modes(&self) -> usize;

    /// Probability that the first `counts.len()` modes hold exactly `counts`.
    fn marginal(&self, counts: &[usize]) -> Result<f64>;
}

fn factorial_product(counts: &[usize]) -> f64 {
    counts.iter().map(|&n| (2..=n).map(|x| x as f64).product::<f64>()).product()
}

/// Hafnian of a `2k × 2k` A-matrix with rows `i`, `i + k` repeated `n_i` times, using the
/// cheapest exact route the matrix structure allows.
#[derive(Debug, Clone)]
pub enum HafnianEvaluator {
    /// `A = B ⊕ B*` with `B = G Gᵀ`: `Haf(A_n) = |Haf(B_n)|²`.
    PureLowRank(CMatrix),
    /// `A = G Gᵀ`.
    LowRank(CMatrix),
    Dense(CMatrix),
}

impl HafnianEvaluator {
    pub fn from_a(a: &CMatrix) -> Self {
        let k = a.nrows() / 2;
        let scale = max_abs(a).max(1.0);
        let tol = 1e-13 * scale;
        let off = max_abs(&a.view((0, k), (k, k)).into_owned());
        if off <= 1e-12 * scale {
            let b = a.view((0, 0), (k, k)).into_owned();
            let conj_mismatch = max_abs(&(a.view((k, k), (k, k)) - b.map(|z| z.conj())));
            if conj_mismatch <= 1e-10 * scale {
                if let Some(g) = symmetric_factor(&b, tol, MAX_LOW_RANK) {
                    return HafnianEvaluator::PureLowRank(g);
                }
            }
        }
        match symmetric_factor(a, tol, MAX_LOW_RANK) {
            Some(g) => HafnianEvaluator::LowRank(g),
            None => HafnianEvaluator::Dense(a.clone()),
        }
    }

    /// `Re Haf(A_n)`.
    pub fn haf_repeated(&self, n: &[usize]) -> Result<f64> {
        match self {
            HafnianEvaluator::PureLowRank(g) => {
                let (g_sub, mult) = nonzero_rows(g, n, false);
                Ok(hafnian_low_rank_repeated(&g_sub, &mult)?.norm_sqr())
            }
            HafnianEvaluator::LowRank(g) => {
                let (g_sub, mult) = nonzero_rows(g, n, true);
                Ok(hafnian_low_rank_repeated(&g_sub, &mult)?.re)
            }
            HafnianEvaluator::Dense(a) => {
                let idx = repeated_indices(n);
                let an = CMatrix::from_fn(idx.len(), idx.len(), |i, j| a[(idx[i], idx[j])]);
                Ok(hafnian_general(&an)?.re)
            }
        }
    }
}

/// Rows of `g` with nonzero multiplicity; `doubled` selects rows `i` and `i + k` for `n_i`.
fn nonzero_rows(g: &CMatrix, n: &[usize], doubled: bool) -> (CMatrix, Vec<usize>) {
    let k = n.len();
    let mut rows = Vec::new();
    let mut mult = Vec::new();
    let halves = if doubled { 2 } else { 1 };
    for h in 0..halves {
        for (i, &c) in n.iter().enumerate() {
            if c > 0 {
                rows.push(i + h * k);
                mult.push(c);
            }
        }
    }
    let sub = CMatrix::from_fn(rows.len(), g.ncols(), |i, r| g[(rows[i], r)]);
    (sub, mult)
}

/// Marginal probability of `prefix` for a state already reduced to `prefix.len()` modes.
pub fn marginal_prob(sigma_reduced: &ComplexCovariance, prefix: &[usize]) -> Result<f64> {
    if sigma_reduced.modes() != prefix.len() {
        return Err(Error::Mismatch(format!(
            "{} counts for a {}-mode reduced state",
            prefix.len(),
            sigma_reduced.modes()
        )));
    }
    let (a, det) = a_matrix_with_det(sigma_reduced)?;
    let haf = HafnianEvaluator::from_a(&a.a).haf_repeated(prefix)?;
    Ok((haf / (factorial_product(prefix) * det.sqrt())).max(0.0))
}

/// Marginals of an arbitrary covariance, with the A-matrix of every prefix precomputed.
#[derive(Debug, Clone)]
pub struct CovarianceMarginals {
    prefixes: Vec<(HafnianEvaluator, f64)>,
}

impl CovarianceMarginals {
    pub fn new(sigma: &ComplexCovariance) -> Result<Self> {
        let modes: Vec<usize> = (0..sigma.modes()).collect();
        let prefixes = (1..=modes.len())
            .map(|k| {
                let (a, det) = a_matrix_with_det(&reduce(sigma, &modes[..k])?)?;
                Ok((HafnianEvaluator::from_a(&a.a), det.sqrt()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CovarianceMarginals { prefixes })
    }

    pub fn evaluator(&self, k: usize) -> &HafnianEvaluator {
        &self.prefixes[k - 1].0
    }
}

impl MarginalModel for CovarianceMarginals {
    fn modes(&self) -> usize {
        self.prefixes.len()
    }

    fn marginal(&self, counts: &[usize]) -> Result<f64> {
        if counts.is_empty() {
            return Ok(1.0);
        }
        let (eval, sqrt_det) = &self.prefixes[counts.len() - 1];
        let haf = eval.haf_repeated(counts)?;
        Ok((haf / (factorial_product(counts) * sqrt_det)).max(0.0))
    }
}

/// Marginals of squeezed vacuum in `N` sources sent through a passive circuit, from the
/// `M × N` block `T` of the mode unitary (rows in visiting order, columns sources).
///
/// With `w = T ⊕ T*` and `E` the input excess covariance of the sources, the prefix state
/// obeys `Σ + 𝟙/2 = 𝟙 + w E w†`. Then `A = (Y w) H (Y w)ᵀ` with
/// `H = sym(E (𝟙 + w†w E)^{-1} Y)` and `det(Σ + 𝟙/2) = det(𝟙 + w†w E)`, so every prefix only
/// needs a `2N × 2N` factorisation `H = h hᵀ`.
#[derive(Debug, Clone)]
pub struct SqueezedMarginals {
    t: CMatrix,
    prefixes: Vec<(CMatrix, f64)>,
    /// `conj(T) diag(√tanh r)`: factor of `B` when `T` has orthonormal columns, so that the
    /// state on all `M` rows is pure.
    pure_factor: Option<CMatrix>,
    cosh_product: f64,
}

impl SqueezedMarginals {
    pub fn new(t: CMatrix, r: &[f64]) -> Result<Self> {
        let (m, n) = t.shape();
        if r.len() != n {
            return Err(Error::Mismatch(format!("{} squeezing values for {n} sources", r.len())));
        }
        let mut e = CMatrix::from_element(2 * n, 2 * n, ZERO);
        for (s, &rs) in r.iter().enumerate() {
            let (sh, ch) = (rs.sinh(), rs.cosh());
            e[(s, s)] = C64::new(sh * sh, 0.0);
            e[(n + s, n + s)] = C64::new(sh * sh, 0.0);
            e[(s, n + s)] = C64::new(sh * ch, 0.0);
            e[(n + s, s)] = C64::new(sh * ch, 0.0);
        }
        let y = swap_halves(n);
        let id = CMatrix::identity(2 * n, 2 * n);
        let mut gram = CMatrix::from_element(n, n, ZERO);
        let mut prefixes = Vec::with_capacity(m);
        for k in 0..m {
            let row = t.row(k);
            gram += row.adjoint() * row;
            let mut wdw = CMatrix::from_element(2 * n, 2 * n, ZERO);
            wdw.view_mut((0, 0), (n, n)).copy_from(&gram);
            wdw.view_mut((n, n), (n, n)).copy_from(&gram.map(|z| z.conj()));
            let q = &id + wdw * &e;
            let det = q.clone().determinant();
            if !(det.re > 0.0) || det.im.abs() > 1e-8 * det.re {
                return Err(Error::Conditioning(format!("prefix {k}: det(Σ + 𝟙/2) = {det}")));
            }
            let qinv = q.try_inverse().ok_or_else(|| Error::Conditioning(format!("prefix {k}: singular 𝟙 + w†wE")))?;
            let fy = &e * qinv * &y;
            let h = (&fy + fy.transpose()) * C64::new(0.5, 0.0);
            let tol = 1e-15 * max_abs(&h).max(1e-300);
            let hf = symmetric_factor(&h, tol, 2 * n)
                .ok_or_else(|| Error::Conditioning(format!("prefix {k}: cannot factor H")))?;
            prefixes.push((hf, det.re.sqrt()));
        }
        let isometry = m > 0 && max_abs(&(gram - CMatrix::identity(n, n))) <= 1e-12;
        let pure_factor =
            isometry.then(|| CMatrix::from_fn(m, n, |j, s| t[(j, s)].conj() * C64::new(r[s].tanh(), 0.0).sqrt()));
        let cosh_product = r.iter().map(|x| x.cosh()).product();
        Ok(SqueezedMarginals { t, prefixes, pure_factor, cosh_product })
    }

    pub fn sources(&self) -> usize {
        self.t.ncols()
    }

    /// Rows of the A-matrix factor `(Y w) h` for the modes with nonzero counts.
    fn factor_rows(&self, counts: &[usize]) -> (CMatrix, Vec<usize>) {
        let n = self.t.ncols();
        let h = &self.prefixes[counts.len() - 1].0;
        let rank = h.ncols();
        let (h_top, h_bottom) = (h.rows(0, n), h.rows(n, n));
        let occupied: Vec<usize> = (0..counts.len()).filter(|&i| counts[i] > 0).collect();
        let mut g = CMatrix::from_element(2 * occupied.len(), rank, ZERO);
        let mut mult = Vec::with_capacity(2 * occupied.len());
        for (a, &i) in occupied.iter().enumerate() {
            let ti = self.t.row(i);
            g.row_mut(a).copy_from(&(ti.map(|z| z.conj()) * h_bottom));
            g.row_mut(occupied.len() + a).copy_from(&(ti * h_top));
        }
        for _ in 0..2 {
            mult.extend(occupied.iter().map(|&i| counts[i]));
        }
        (g, mult)
    }

    /// Full-length outcome of the pure output state: `|Haf(B_n)|² / (∏ n_j! ∏ cosh r)`.
    fn pure_marginal(&self, factor: &CMatrix, counts: &[usize]) -> Result<f64> {
        let total: usize = counts.iter().sum();
        if total % 2 == 1 {
            return Ok(0.0);
        }
        let haf = if factor.ncols() <= MAX_LOW_RANK {
            hafnian_low_rank_repeated(factor, counts)?
        } else {
            let rows: Vec<usize> = counts.iter().enumerate().flat_map(|(i, &c)| std::iter::repeat_n(i, c)).collect();
            let g = CMatrix::from_fn(rows.len(), factor.ncols(), |i, r| factor[(rows[i], r)]);
            hafnian_general(&(&g * g.transpose()))?
        };
        Ok(haf.norm_sqr() / (factorial_product(counts) * self.cosh_product))
    }
}

impl MarginalModel for SqueezedMarginals {
    fn modes(&self) -> usize {
        self.t.nrows()
    }

    fn marginal(&self, counts: &[usize]) -> Result<f64> {
        if counts.is_empty() {
            return Ok(1.0);
        }
        if counts.len() > self.modes() {
            return Err(Error::Mismatch(format!("{} counts for {} modes", counts.len(), self.modes())));
        }
        if let (true, Some(g)) = (counts.len() == self.modes(), &self.pure_factor) {
            return self.pure_marginal(g, counts);
        }
        let sqrt_det = self.prefixes[counts.len() - 1].1;
        let (g, mult) = self.factor_rows(counts);
        let haf = if g.ncols() <= MAX_LOW_RANK {
            hafnian_low_rank_repeated(&g, &mult)?.re
        } else {
            let rows: Vec<usize> = mult.iter().enumerate().flat_map(|(i, &c)| std::iter::repeat_n(i, c)).collect();
            let gr = CMatrix::from_fn(rows.len(), g.ncols(), |i, r| g[(rows[i], r)]);
            hafnian_general(&(&gr * gr.transpose()))?.re
        };
        Ok((haf / (factorial_product(counts) * sqrt_det)).max(0.0))
    }
}
