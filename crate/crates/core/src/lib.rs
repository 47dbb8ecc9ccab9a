//! Spectra and level-spacing statistics for a quantum particle on a ring (or a
//! segment) with scale-free point interactions.
//!
//! The crate is organized bottom-up:
//!
//! - [`model`]: system definition, transfer matrices and secular functions.
//! - [`rootfinder`]: certified computation of the first N eigen-wavenumbers.
//! - [`perturbation`]: weak-coupling predictions for the doublet splitting.
//! - [`statistics`]: unfolding, parity-split spacings, distances to reference laws, number variance.
//! - [`rmt`]: Wigner, exact GOE (Gaudin–Mehta) and Poisson references, number-variance curves, and a Monte-Carlo GOE oracle.
//! - [`cli`]: the experiment driver behind the `circlespec` binary.

// `!(x > 0.0)` is used deliberately so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod model;
pub mod perturbation;
pub mod quad;
pub mod rmt;
pub mod rootfinder;
pub mod statistics;

pub use error::{Error, Result};
pub use model::{beta_of_alpha, prime_positions, Secular, SystemConfig, Topology};
pub use rootfinder::{find_spectrum, Coverage, ScanPolicy, Spectrum};
