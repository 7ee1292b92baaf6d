//! Simulation of photon-number sampling from random linear-optical lattice circuits.
//!
//! The crate is organised around the pipeline a run goes through:
//!
//! - [`lattice`] and [`circuit`]: d-dimensional mode lattices split into source-carrying
//!   sublattices, brickwork layers of random beam splitters, and the accumulated mode unitary.
//! - [`gaussian`]: covariance-matrix engine for squeezed-vacuum inputs, the block
//!   (per-sublattice) approximation of the output state, fidelity and the covariance bounds.
//! - [`hafnian`]: hafnian (general and low-rank) and permanent kernels.
//! - [`sampling`]: the exact chain-rule Gaussian sampler, the per-sublattice approximate
//!   sampler and the distinguishable-photon Fock sampler.
//! - [`diagnostics`]: enumeration oracles, total-variation distance, leakage measurement
//!   and evaluators for the leakage, infidelity, covariance and Fock error bounds.
//!
//! All randomness flows through seeded [`rng::substream`]s so that every result is a pure
//! function of its parameters and seed.

pub mod circuit;
pub mod diagnostics;
pub mod error;
pub mod gaussian;
pub mod hafnian;
pub mod lattice;
pub mod linalg;
pub mod rng;
pub mod sampling;
pub mod selftest;

pub use circuit::{
    accumulate_unitary, beam_splitter_unitary, sample_random_circuit, BeamSplitterGate, Circuit, ModeUnitary,
};
pub use error::{Error, Result};
pub use lattice::{build_lattice, LatticeSpec};
pub use linalg::{CMatrix, RMatrix, C64};
