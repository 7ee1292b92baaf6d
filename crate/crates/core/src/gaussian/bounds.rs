use crate::error::{Error, Result};
use crate::gaussian::covariance::PURITY_TOL;
use crate::linalg::RMatrix;

/// Above this `‖X‖` the leading-order infidelity bound is reported but flagged as outside
/// its regime of validity.
pub const SMALL_X_THRESHOLD: f64 = 0.1;

/// Fidelity `1/√det(V1 + V2)` between a pure state `V1` and any state `V2`.
pub fn fidelity(v1_pure: &RMatrix, v2: &RMatrix) -> Result<f64> {
    if v1_pure.shape() != v2.shape() {
        return Err(Error::Mismatch("covariances of different size".into()));
    }
    let purity = (v1_pure * 2.0).determinant();
    if (purity - 1.0).abs() > PURITY_TOL {
        return Err(Error::Domain(format!("first state is not pure: det(2V) = {purity}")));
    }
    let det = (v1_pure + v2).determinant();
    if !(det > 0.0) {
        return Err(Error::Conditioning(format!("det(V1 + V2) = {det}")));
    }
    Ok(1.0 / det.sqrt())
}

pub fn frobenius_diff(v: &RMatrix, va: &RMatrix) -> Result<f64> {
    if v.shape() != va.shape() {
        return Err(Error::Mismatch("covariances of different size".into()));
    }
    Ok((v - va).norm())
}

/// Leading-order infidelity bound `½ ‖X‖ √(2N cosh 4r)`.
pub fn infidelity_bound(norm_x: f64, n: usize, r: f64) -> f64 {
    0.5 * norm_x * (2.0 * n as f64 * (4.0 * r).cosh()).sqrt()
}

pub fn infidelity_bound_valid(norm_x: f64) -> bool {
    norm_x <= SMALL_X_THRESHOLD
}

/// Bound on `‖V − V_a‖` from the largest leakage: `e^{2r} N² (η + 2√η)`.
pub fn x_norm_bound(eta: f64, n: usize, r: f64) -> f64 {
    (2.0 * r).exp() * (n * n) as f64 * (eta + 2.0 * eta.sqrt())
}

/// Total-variation bound implied by a covariance error: `(N cosh(4r) ‖X‖² / 2)^{1/4}`.
pub fn tvd_bound_from_x(norm_x: f64, n: usize, r: f64) -> f64 {
    (n as f64 * (4.0 * r).cosh() * norm_x * norm_x / 2.0).powf(0.25)
}
