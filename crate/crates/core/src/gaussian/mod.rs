//! Covariance-matrix engine for zero-mean Gaussian states.

mod amatrix;
mod block;
mod bounds;
mod covariance;
pub mod io;

pub use amatrix::{a_matrix, a_matrix_with_det, b_matrix, block_sum_from_b_factor, AMatrix, MIN_EIGENVALUE};
pub use block::{block_approx_covariance, single_source_output, BlockApproxCovariance};
pub use bounds::{
    fidelity, frobenius_diff, infidelity_bound, infidelity_bound_valid, tvd_bound_from_x, x_norm_bound,
    SMALL_X_THRESHOLD,
};
pub use covariance::{
    circuit_symplectic, complex_to_quad, input_covariance, input_covariance_per_mode, is_pure, output_covariance,
    quad_indices, quad_matrix_to_complex, quad_to_complex, reduce, symplectic_eigenvalues, symplectic_from_unitary,
    ComplexCovariance, QuadCovariance, PURITY_TOL,
};
