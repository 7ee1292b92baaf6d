use serde::Serialize;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::linalg::{CMatrix, C64};

/// Weight each source sends outside its own sublattice, with the depth-dependent bound on
/// its expectation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeakageReport {
    pub per_source_eta: Vec<f64>,
    pub eta_max: f64,
    pub bound: f64,
    pub d: usize,
    pub k: f64,
    pub gamma: Option<f64>,
    pub n_sources: usize,
    pub edge: usize,
    pub depth: usize,
}

/// `2d · exp(−L² / (8D/d))`; zero at `D = 0`.
pub fn leakage_bound(d: usize, edge: usize, depth: usize) -> f64 {
    if depth == 0 {
        return 0.0;
    }
    let l = edge as f64;
    2.0 * d as f64 * (-(d as f64) * l * l / (8.0 * depth as f64)).exp()
}

/// `2d · exp(−d k² N^{2(γ−1)/d} / (8D))`, the same bound written in terms of `M = k N^γ`.
pub fn leakage_bound_scaling(d: usize, k: f64, gamma: f64, n: usize, depth: usize) -> f64 {
    if depth == 0 {
        return 0.0;
    }
    let df = d as f64;
    let reach = k * k * (n as f64).powf(2.0 * (gamma - 1.0) / df);
    2.0 * df * (-df * reach / (8.0 * depth as f64)).exp()
}

fn eta_of_column(col: impl Iterator<Item = C64>, layout: &LatticeSpec, alpha: usize) -> f64 {
    col.enumerate().filter(|(j, _)| layout.sublattice_of(*j) != alpha).map(|(_, z)| z.norm_sqr()).sum::<f64>()
}

fn report(per_source_eta: Vec<f64>, layout: &LatticeSpec, depth: usize) -> LeakageReport {
    let eta_max = per_source_eta.iter().cloned().fold(0.0, f64::max);
    let bound = match layout.gamma {
        Some(g) => leakage_bound_scaling(layout.dim, layout.k, g, layout.n_sources, depth),
        None => leakage_bound(layout.dim, layout.edge, depth),
    };
    LeakageReport {
        per_source_eta,
        eta_max,
        bound,
        d: layout.dim,
        k: layout.k,
        gamma: layout.gamma,
        n_sources: layout.n_sources,
        edge: layout.edge,
        depth,
    }
}

/// `η_α = Σ_{j ∉ 𝓛_α} |U_{j,s_α}|²` for every source.
pub fn leakage_rate(u: &CMatrix, layout: &LatticeSpec, depth: usize) -> Result<LeakageReport> {
    if u.nrows() != layout.modes {
        return Err(Error::Mismatch(format!("{}-row unitary for {} modes", u.nrows(), layout.modes)));
    }
    let etas = layout
        .sources
        .iter()
        .enumerate()
        .map(|(alpha, &s)| eta_of_column(u.column(s).iter().copied(), layout, alpha))
        .collect();
    Ok(report(etas, layout, depth))
}

/// Same as [`leakage_rate`] but propagates only the source columns.
pub fn circuit_leakage(circuit: &Circuit) -> Result<LeakageReport> {
    circuit.validate()?;
    let layout = &circuit.layout;
    let etas = layout
        .sources
        .iter()
        .enumerate()
        .map(|(alpha, &s)| eta_of_column(circuit.propagate_column(s).into_iter(), layout, alpha))
        .collect();
    Ok(report(etas, layout, circuit.depth()))
}

/// Markov's inequality on a sample: fraction with `η ≥ a` against `mean(η)/a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarkovCheck {
    pub threshold: f64,
    pub fraction: f64,
    pub fraction_stderr: f64,
    pub markov_bound: f64,
}

pub fn markov_tail(etas: &[f64], threshold: f64) -> MarkovCheck {
    let n = etas.len() as f64;
    let mean = etas.iter().sum::<f64>() / n;
    let fraction = etas.iter().filter(|&&e| e >= threshold).count() as f64 / n;
    MarkovCheck {
        threshold,
        fraction,
        fraction_stderr: (fraction * (1.0 - fraction) / n).sqrt(),
        markov_bound: mean / threshold,
    }
}
