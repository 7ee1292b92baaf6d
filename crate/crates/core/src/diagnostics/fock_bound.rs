use serde::Serialize;

use crate::error::{Error, Result};
use crate::hafnian::{permanent, PERMANENT_CAP};
use crate::lattice::LatticeSpec;
use crate::linalg::{CMatrix, C64};

/// Upper bounds on the distance between the exact and the distinguishable-photon output
/// distributions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FockErrorBound {
    /// `C_i = Σ_{m≠i} Σ_j |U_{j,in_i}| |U_{j,in_m}|`.
    pub c_i: Vec<f64>,
    pub c_max: f64,
    /// `[(c+1)^N − N c − 1] / 2` with `c = max_i C_i`.
    pub exact_sum_bound: f64,
    /// `½ (Per(G) − 1)` with `G_im = Σ_j |U_{j,in_i}| |U_{j,in_m}|`; tighter than the closed
    /// form, available while the permanent is tractable.
    pub overlap_permanent_bound: Option<f64>,
    pub eta_max: f64,
    /// `c' = 2 √(η k N^{γ+1})`, a leakage-based upper estimate of `c`.
    pub surrogate_c: f64,
    pub surrogate_bound: f64,
}

pub fn closed_form_bound(c: f64, n: usize) -> f64 {
    0.5 * ((c + 1.0).powi(n as i32) - n as f64 * c - 1.0)
}

/// Overlap matrix `G_im` between the intensity profiles of the sources.
pub fn overlap_matrix(u: &CMatrix, sources: &[usize]) -> Vec<Vec<f64>> {
    let abs = u.map(|z| z.norm());
    sources.iter().map(|&a| sources.iter().map(|&b| abs.column(a).dot(&abs.column(b))).collect()).collect()
}

pub fn fock_error_bound(u: &CMatrix, layout: &LatticeSpec) -> Result<FockErrorBound> {
    if u.nrows() != layout.modes {
        return Err(Error::Mismatch(format!("{}-row unitary for {} modes", u.nrows(), layout.modes)));
    }
    let n = layout.n_sources;
    let g = overlap_matrix(u, &layout.sources);
    let c_i: Vec<f64> = (0..n).map(|i| (0..n).filter(|&m| m != i).map(|m| g[i][m]).sum()).collect();
    let c_max = c_i.iter().cloned().fold(0.0, f64::max);
    let overlap_permanent_bound = if n <= PERMANENT_CAP {
        let gm = CMatrix::from_fn(n, n, |i, m| C64::new(g[i][m], 0.0));
        Some((0.5 * (permanent(&gm)?.re - 1.0)).max(0.0))
    } else {
        None
    };
    let eta_max = layout
        .sources
        .iter()
        .enumerate()
        .map(|(alpha, &s)| {
            (0..layout.modes).filter(|&j| layout.sublattice_of(j) != alpha).map(|j| u[(j, s)].norm_sqr()).sum::<f64>()
        })
        .fold(0.0, f64::max);
    // k N^{γ+1} = N M for M = k N^γ
    let surrogate_c = 2.0 * (eta_max * (n * layout.modes) as f64).sqrt();
    Ok(FockErrorBound {
        c_i,
        c_max,
        exact_sum_bound: closed_form_bound(c_max, n),
        overlap_permanent_bound,
        eta_max,
        surrogate_c,
        surrogate_bound: closed_form_bound(surrogate_c, n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{accumulate_unitary, sample_random_circuit};
    use crate::lattice::build_lattice;
    use crate::rng::substream;

    #[test]
    fn separated_sources_have_zero_bound() {
        let l = build_lattice(1, 3, 3).unwrap();
        let b = fock_error_bound(&CMatrix::identity(9, 9), &l).unwrap();
        assert_eq!(b.c_max, 0.0);
        assert_eq!(b.exact_sum_bound, 0.0);
        assert_eq!(b.overlap_permanent_bound, Some(0.0));
        assert_eq!(b.surrogate_c, 0.0);
    }

    #[test]
    fn two_photon_closed_form() {
        for c in [0.0, 0.1, 0.7, 2.0] {
            assert!((closed_form_bound(c, 2) - c * c / 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn permanent_form_is_tighter() {
        for seed in 0..10 {
            let l = build_lattice(1, 3, 3).unwrap();
            let c = sample_random_circuit(&l, 4, &mut substream(seed, 0));
            let b = fock_error_bound(&accumulate_unitary(&c).unwrap().u, &l).unwrap();
            assert!(b.overlap_permanent_bound.unwrap() <= b.exact_sum_bound + 1e-12);
        }
    }

    #[test]
    fn surrogate_dominates_overlap() {
        // C_i ≤ 2√(η N M) whenever the sublattices partition the modes.
        for seed in 0..10 {
            let l = build_lattice(1, 2, 4).unwrap();
            let c = sample_random_circuit(&l, 3, &mut substream(seed, 0));
            let b = fock_error_bound(&accumulate_unitary(&c).unwrap().u, &l).unwrap();
            assert!(b.c_max <= b.surrogate_c + 1e-12, "{b:?}");
        }
    }
}
