//! Noise-filtered k-local distinguishability of binary quantum encodings.
//!
//! Exact amplitudes `A_k(p)` from the Pauli-weight contraction, a
//! shot-sampled split protocol, deterministic parallel sweeps and a CLI.

pub mod cli;
pub mod encodings;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod metrics;
pub mod noise;
pub mod pauli;
pub mod sampling;
pub mod scalar;

pub use error::{Error, Result};

pub type Matrix = linalg::ComplexMatrix<f64>;
pub type Matrix32 = linalg::ComplexMatrix<f32>;
pub type Density = encodings::DensityMatrix<f64>;
pub type Density32 = encodings::DensityMatrix<f32>;
pub type Signal = encodings::SignalOperator<f64>;
pub type Coefficients = metrics::SignalCoefficients<f64>;
