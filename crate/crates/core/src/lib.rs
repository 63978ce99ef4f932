//! Linear stability of elliptic relative equilibria of the planar four-body
//! problem.
//!
//! The pipeline runs in five stages:
//!
//! 1. [`centralconfig`] normalizes masses and positions and solves for a
//!    central configuration, producing the matrices `B` and `D`.
//! 2. [`symbasis`] builds the `M̃`-unitary eigenbasis of `D`, the symplectic
//!    coordinate matrix `A` and the coefficients `β₂, β₁₁, β₁₂, β₂₂`.
//! 3. [`linsys`] assembles the θ-periodic quadratic Hamiltonians: the full
//!    12-dimensional system, its Kepler block and the 8-dimensional
//!    essential part.
//! 4. [`floquet`] integrates those systems over one period and classifies
//!    the monodromy spectrum.
//! 5. [`orbit`] realizes the homographic solution in physical time and
//!    integrates the nonlinear equations as an end-to-end check.
//!
//! [`pipeline`] strings the first three stages together with the numerical
//! audits the command-line tool reports.

pub mod centralconfig;
pub mod cplx;
pub mod dd;
mod error;
pub mod floquet;
pub mod linsys;
pub mod ode;
pub mod orbit;
pub mod pipeline;
pub mod symbasis;

pub use error::{Error, Result};
