use serde::Serialize;

use crate::circuit::Circuit;
use crate::error::Result;
use crate::gaussian::{
    block_approx_covariance, fidelity, frobenius_diff, infidelity_bound, infidelity_bound_valid, output_covariance,
    quad_to_complex, tvd_bound_from_x, x_norm_bound,
};
use crate::lattice::LatticeSpec;
use crate::sampling::TruncationPolicy;

use super::enumerate::{
    enumerate_block_approx_distribution, enumerate_gbs_distribution, tvd_against_product, TvdEstimate,
};
use super::leakage::circuit_leakage;

/// Every link of the chain leakage → covariance error → infidelity → total-variation distance
/// on one concrete instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremBoundReport {
    pub n_sources: usize,
    pub modes: usize,
    pub depth: usize,
    pub r: f64,
    pub eta_max: f64,
    /// Measured `‖V_out − V_a‖_F`.
    pub x_norm: f64,
    /// `e^{2r} N² (η_max + 2√η_max)`.
    pub x_norm_bound: f64,
    pub infidelity: f64,
    pub infidelity_bound: f64,
    /// Whether `‖X‖` is small enough for the leading-order bounds to apply.
    pub small_x: bool,
    /// `(N cosh(4r) ‖X‖² / 2)^{1/4}` from the measured `‖X‖`.
    pub tvd_bound: f64,
    /// Enumerated distance between the exact and block-approximate distributions.
    pub true_tvd: Option<TvdEstimate>,
}

/// Builds the report; when `oracle` is given and the instance is small enough, the exact and
/// approximate distributions are enumerated up to that policy's budget.
pub fn theorem_bound_report(
    circuit: &Circuit,
    layout: &LatticeSpec,
    r: f64,
    oracle: Option<&TruncationPolicy>,
) -> Result<TheoremBoundReport> {
    let n = layout.n_sources;
    let leak = circuit_leakage(circuit)?;
    let v_out = output_covariance(circuit, r)?;
    let block = block_approx_covariance(circuit, layout, r)?;
    let x_norm = frobenius_diff(&v_out.v, &block.va)?;
    let infidelity = 1.0 - fidelity(&v_out.v, &block.va)?;
    let true_tvd = match oracle {
        Some(policy) => oracle_tvd(&v_out.v, &block, layout, policy)?,
        None => None,
    };
    Ok(TheoremBoundReport {
        n_sources: n,
        modes: layout.modes,
        depth: circuit.depth(),
        r,
        eta_max: leak.eta_max,
        x_norm,
        x_norm_bound: x_norm_bound(leak.eta_max, n, r),
        infidelity,
        infidelity_bound: infidelity_bound(x_norm, n, r),
        small_x: infidelity_bound_valid(x_norm),
        tvd_bound: tvd_bound_from_x(x_norm, n, r),
        true_tvd,
    })
}

fn oracle_tvd(
    v_out: &crate::linalg::RMatrix,
    block: &crate::gaussian::BlockApproxCovariance,
    layout: &LatticeSpec,
    policy: &TruncationPolicy,
) -> Result<Option<TvdEstimate>> {
    let exact = match enumerate_gbs_distribution(&quad_to_complex_matrix(v_out), policy) {
        Ok(d) => d,
        Err(e) if e.is_scale_error() => return Ok(None),
        Err(e) => return Err(e),
    };
    let parts = enumerate_block_approx_distribution(block, policy)?;
    let parts: Vec<_> = layout.sublattices.iter().cloned().zip(parts).collect();
    Ok(Some(tvd_against_product(&exact, &parts, policy.n_total_max)?))
}

fn quad_to_complex_matrix(v: &crate::linalg::RMatrix) -> crate::gaussian::ComplexCovariance {
    quad_to_complex(&crate::gaussian::QuadCovariance { v: v.clone(), r: 0.0, pure: true })
}
