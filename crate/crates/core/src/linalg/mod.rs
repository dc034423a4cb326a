//! Complex linear algebra kernels: dense and sparse matrices, LU solvers,
//! Hermitian and general eigendecompositions, matrix exponential, and an
//! adaptive Runge-Kutta integrator.
//!
//! Everything is generic over the real scalar type via [`crate::Scalar`].

pub mod dense;
pub mod eig;
pub mod expm;
pub mod ode;
pub mod sparse;
pub mod splu;


pub use dense::{lu_factor, rank_complete_pivot, CMat, DenseLu};
pub use eig::{eigh, eigvals};
pub use expm::expm;
pub use ode::{integrate_to, OdeOptions};
pub use sparse::CsrMat;
pub use splu::{sparse_lu, SparseLu};
