//! Photon statistics of a coherently driven two-level atom coupled to one or
//! several cavity modes with two-photon dissipation.
//!
//! The crate computes steady states of the Lindblad master equation and the
//! normalized second-order correlation function g²(0) and g²(τ) through two
//! independent pipelines:
//!
//! - **master**: a full master-equation solve on the tensor-product Fock
//!   space (per-mode photon cutoff 2), with the steady state obtained from a
//!   trace-constrained direct solve of the vectorized Liouvillian and g²(τ)
//!   from quantum-regression propagation;
//! - **oracle**: steady-state probability amplitudes of the excitation-capped
//!   weak-drive ansatz under the non-Hermitian Hamiltonian, which reduces to
//!   a closed-form g²(0) expression in the single-mode case.
//!
//! All rates and frequencies are expressed in units of the atomic decay rate
//! γ (ħ = 1); delays are in units of γ⁻¹. The numerical core is generic over
//! the real scalar type (`f32` or `f64`); concrete aliases for `f64` are
//! exported at the crate root.

pub mod cli;
pub mod correlate;
pub mod fockspace;
pub mod linalg;
pub mod lindblad;
pub mod model;
pub mod weakdrive;
pub mod scalar;

use thiserror::Error as ThisError;

pub use scalar::{Scalar, C};

/// Crate-wide error type.
#[derive(Debug, ThisError)]
pub enum Error {
    /// Invalid or inconsistent configuration input.
    #[error("config error: {0}")]
    Config(String),
    /// Argument outside an operation's domain (bad dimension, empty list, …).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// Linear solve failed or exceeded its residual tolerance.
    #[error("solver error: {0}")]
    Solver(String),
    /// The Liouvillian kernel is not one-dimensional.
    #[error("degenerate steady-state kernel: {0}")]
    DegenerateKernel(String),
    /// Time integration broke down.
    #[error("integration error at tau = {tau}: {message}")]
    Integration { tau: f64, message: String },
    /// g² is undefined because the photon flux vanishes.
    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(String),
    /// Density matrix negativity too large to attribute to numerical dust.
    #[error("gross negativity: {0}")]
    GrossNegativity(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code contract: 1 config, 2 solver/numeric, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidArgument(_) => 1,
            Error::Io(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Complex scalar over `f64`.
pub type C64 = num_complex::Complex<f64>;
/// Complex scalar over `f32`.
pub type C32 = num_complex::Complex<f32>;

pub type Operator64 = fockspace::Operator<f64>;
pub type Operator32 = fockspace::Operator<f32>;
pub type SystemConfig64 = model::SystemConfig<f64>;
pub type SystemConfig32 = model::SystemConfig<f32>;
pub type DensityMatrix64 = lindblad::DensityMatrix<f64>;
pub type Superoperator64 = lindblad::Superoperator<f64>;
pub type CorrelationTrace64 = correlate::CorrelationTrace<f64>;
pub type AmplitudeSolution64 = weakdrive::AmplitudeSolution<f64>;
