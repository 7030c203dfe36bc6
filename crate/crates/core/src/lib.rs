//! Matrix forms of second-order linear difference equations.
//!
//! A three-term recurrence
//!
//! ```text
//! y[k+1] + a[k] y[k] + b[k] y[k-1] = f[k]
//! ```
//!
//! is rewritten as a first-order system for two auxiliary grid functions
//! `y1`, `y2` with `y = y1 + y2` and `y[k+1] = rho1[k] y1[k] + rho2[k] y2[k]`
//! for freely chosen, pointwise distinct splitting sequences `rho1`, `rho2`.
//! The crate provides the transfer (T) and scattering (S) step matrices of
//! that system, Riccati sequences that make the T-matrix diagonal, and two
//! applications built on top: diffraction on a 1-D dielectric slab and the
//! constant-gradient design of a chain of coupled cavities.
//!
//! Module map:
//!
//! * [`recurrence`]: coefficients, grid functions, direct solvers.
//! * [`split`]: the splitting ansatz and its inverse.
//! * [`matrix_forms`]: T/S step matrices, sweeps and star-product cascades.
//! * [`riccati`]: diagonalizing sequences and diagonal propagation.
//! * [`slab`]: tight-binding wave equation and slab scattering.
//! * [`cavity`]: coupled-cavity chain coefficients and design.
//! * [`acceptance`]: the numbered acceptance checks, shared by tests and CLI.

pub mod acceptance;
pub mod cavity;
mod error;
pub mod matrix_forms;
pub mod quartic;
pub mod recurrence;
pub mod riccati;
pub mod slab;
pub mod split;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Shorthand for building a complex number.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
