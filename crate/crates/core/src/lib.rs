//! Numerics for superharmonically weighted Dirichlet spaces on the unit disc.
//!
//! A weight ω = G_μ + P_ν is described by a [`measure::DiscMeasure`] μ and a
//! [`measure::BoundaryMeasure`] ν. The crate evaluates the associated potentials,
//! computes Dirichlet integrals D_ω(f) by several independent formulas, estimates
//! reproducing-kernel diagonals and capacities, and runs cyclicity diagnostics.

pub mod capacity;
pub mod config;
pub mod cyclicity;
pub mod dirichlet;
pub mod error;
pub mod fourier;
pub mod measure;
pub mod potentials;
pub mod outer;
pub mod quad;
pub mod sets;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
