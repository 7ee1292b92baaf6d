//! d-dimensional mode lattices partitioned into source-carrying sublattices.
//!
//! Modes live on a rectangular grid whose extent along axis `a` is `blocks[a] * L`, where
//! `blocks` is a balanced factorisation of the source count `N` into `d` factors. Mode indices
//! are row-major in the grid coordinates (axis 0 slowest). Each `L^d` cube of the grid is one
//! sublattice and carries one source.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub dim: usize,
    pub n_sources: usize,
    pub edge: usize,
    /// Number of sublattice cubes along each axis; product equals `n_sources`.
    pub blocks: Vec<usize>,
    /// Number of modes along each axis.
    pub extents: Vec<usize>,
    pub modes: usize,
    /// Mode indices of each sublattice, ascending.
    pub sublattices: Vec<Vec<usize>>,
    pub sources: Vec<usize>,
    /// Offset of the source inside its cube along every axis.
    pub source_offset: usize,
    /// Scaling prefactor in `M = k N^γ`.
    pub k: f64,
    /// Scaling exponent in `M = k N^γ`; undefined for a single source.
    pub gamma: Option<f64>,
    sublattice_of: Vec<usize>,
}

/// Builds a lattice of `n_sources` cubes of edge `edge` in `dim` dimensions, with each
/// source at the cube center (offset `⌊L/2⌋` along every axis).
pub fn build_lattice(dim: usize, n_sources: usize, edge: usize) -> Result<LatticeSpec> {
    LatticeSpec::new(dim, n_sources, edge, edge / 2)
}

impl LatticeSpec {
    pub fn new(dim: usize, n_sources: usize, edge: usize, source_offset: usize) -> Result<Self> {
        if dim == 0 || n_sources == 0 || edge == 0 {
            return Err(Error::InvalidParameter(format!(
                "lattice needs d, N, L >= 1 (got d={dim}, N={n_sources}, L={edge})"
            )));
        }
        if source_offset >= edge {
            return Err(Error::InvalidParameter(format!("source offset {source_offset} outside cube of edge {edge}")));
        }
        let cube = edge
            .checked_pow(dim as u32)
            .filter(|c| c.checked_mul(n_sources).is_some())
            .ok_or_else(|| Error::InvalidParameter("lattice too large".into()))?;
        let blocks = balanced_factorisation(n_sources, dim);
        let extents: Vec<usize> = blocks.iter().map(|b| b * edge).collect();
        let modes = n_sources * cube;

        let mut sublattice_of = vec![0; modes];
        let mut sublattices = vec![Vec::with_capacity(cube); n_sources];
        let mut coords = vec![0; dim];
        for idx in 0..modes {
            unravel(idx, &extents, &mut coords);
            let block_coords: Vec<usize> = coords.iter().map(|c| c / edge).collect();
            let alpha = ravel(&block_coords, &blocks);
            sublattice_of[idx] = alpha;
            sublattices[alpha].push(idx);
        }
        let sources = (0..n_sources)
            .map(|alpha| {
                let mut block_coords = vec![0; dim];
                unravel(alpha, &blocks, &mut block_coords);
                let site: Vec<usize> = block_coords.iter().map(|b| b * edge + source_offset).collect();
                ravel(&site, &extents)
            })
            .collect();

        let mut spec = LatticeSpec {
            dim,
            n_sources,
            edge,
            blocks,
            extents,
            modes,
            sublattices,
            sources,
            source_offset,
            k: 1.0,
            gamma: None,
            sublattice_of,
        };
        spec.set_scale_prefactor(1.0)?;
        Ok(spec)
    }

    /// Records `k` in `M = k N^γ` and recomputes `γ = ln(M/k)/ln N`.
    pub fn set_scale_prefactor(&mut self, k: f64) -> Result<()> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidParameter(format!("scale prefactor k={k} must be positive")));
        }
        self.k = k;
        self.gamma = (self.n_sources > 1).then(|| (self.modes as f64 / k).ln() / (self.n_sources as f64).ln());
        Ok(())
    }

    pub fn sublattice_of(&self, mode: usize) -> usize {
        self.sublattice_of[mode]
    }

    pub fn coords(&self, mode: usize) -> Vec<usize> {
        let mut c = vec![0; self.dim];
        unravel(mode, &self.extents, &mut c);
        c
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        ravel(coords, &self.extents)
    }

    /// Row-major stride of `axis` in mode indices.
    pub fn stride(&self, axis: usize) -> usize {
        self.extents[axis + 1..].iter().product()
    }

    /// True if `a` and `b` differ by one step along exactly one axis.
    pub fn are_neighbors(&self, a: usize, b: usize) -> bool {
        if a >= self.modes || b >= self.modes {
            return false;
        }
        let (ca, cb) = (self.coords(a), self.coords(b));
        let diffs: Vec<usize> = ca.iter().zip(&cb).map(|(x, y)| x.abs_diff(*y)).collect();
        diffs.iter().filter(|&&d| d == 1).count() == 1 && diffs.iter().all(|&d| d <= 1)
    }

    /// l∞ distance between two modes on the grid.
    pub fn distance(&self, a: usize, b: usize) -> usize {
        self.coords(a).iter().zip(self.coords(b)).map(|(x, y)| x.abs_diff(y)).max().unwrap_or(0)
    }
}

fn unravel(mut idx: usize, extents: &[usize], out: &mut [usize]) {
    for axis in (0..extents.len()).rev() {
        out[axis] = idx % extents[axis];
        idx /= extents[axis];
    }
}

fn ravel(coords: &[usize], extents: &[usize]) -> usize {
    coords.iter().zip(extents).fold(0, |acc, (c, e)| acc * e + c)
}

/// Splits `n` into `d` factors as evenly as possible: prime factors, largest first, go to
/// the axis with the smallest running product (lowest axis on ties).
fn balanced_factorisation(n: usize, d: usize) -> Vec<usize> {
    let mut primes = Vec::new();
    let mut rest = n;
    let mut p = 2;
    while p * p <= rest {
        while rest.is_multiple_of(p) {
            primes.push(p);
            rest /= p;
        }
        p += 1;
    }
    if rest > 1 {
        primes.push(rest);
    }
    let mut out = vec![1; d];
    for p in primes.into_iter().rev() {
        let axis = (0..d).min_by_key(|&a| (out[a], a)).unwrap();
        out[axis] *= p;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_partition(spec: &LatticeSpec) {
        let mut seen = vec![false; spec.modes];
        for (alpha, sub) in spec.sublattices.iter().enumerate() {
            assert_eq!(sub.len(), spec.edge.pow(spec.dim as u32));
            for &m in sub {
                assert!(!seen[m]);
                seen[m] = true;
                assert_eq!(spec.sublattice_of(m), alpha);
            }
            assert!(sub.contains(&spec.sources[alpha]));
        }
        assert!(seen.iter().all(|&s| s));
        assert_eq!(spec.modes, spec.n_sources * spec.edge.pow(spec.dim as u32));
    }

    #[test]
    fn smallest_lattice() {
        let l = build_lattice(1, 1, 1).unwrap();
        assert_eq!(l.modes, 1);
        assert_eq!(l.sublattices, vec![vec![0]]);
        assert_eq!(l.sources, vec![0]);
        assert_eq!(l.gamma, None);
    }

    #[test]
    fn one_dimensional_centered_sources() {
        let l = build_lattice(1, 2, 4).unwrap();
        assert_eq!(l.modes, 8);
        assert_eq!(l.sublattices, vec![(0..4).collect::<Vec<_>>(), (4..8).collect()]);
        assert_eq!(l.sources, vec![2, 6]);
        check_partition(&l);
        // M = 8 = 1 * 2^3
        assert!((l.gamma.unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn two_dimensional_cubes() {
        let l = build_lattice(2, 4, 3).unwrap();
        assert_eq!(l.modes, 36);
        assert_eq!(l.blocks, vec![2, 2]);
        check_partition(&l);
        for (alpha, &s) in l.sources.iter().enumerate() {
            let c = l.coords(s);
            assert_eq!((c[0] % 3, c[1] % 3), (1, 1), "source {alpha}");
        }
    }

    #[test]
    fn uneven_source_counts_still_partition() {
        for (d, n, e) in [(2, 2, 2), (3, 6, 2), (2, 5, 3), (3, 1, 3)] {
            check_partition(&build_lattice(d, n, e).unwrap());
        }
    }

    #[test]
    fn rejects_zero_parameters() {
        assert!(build_lattice(0, 1, 1).is_err());
        assert!(build_lattice(1, 0, 1).is_err());
        assert!(build_lattice(1, 1, 0).is_err());
    }

    #[test]
    fn neighbors_follow_axes() {
        let l = build_lattice(2, 1, 3).unwrap();
        assert!(l.are_neighbors(0, 1));
        assert!(l.are_neighbors(0, 3));
        assert!(!l.are_neighbors(0, 4));
        assert!(!l.are_neighbors(2, 3));
        assert_eq!(l.stride(0), 3);
        assert_eq!(l.distance(0, 8), 2);
    }
}
