//! Explicit singular solutions of the sinh-Gordon, modified KdV and nonlinear
//! Schroedinger equations built from spectral data through paired
//! Cauchy/Vandermonde determinants, plus the associated interpolation,
//! singularity-line and inverse problems.

pub mod error;
pub mod interp;
pub mod io;
pub mod jet;
pub mod line_inverse;
pub mod linalg;
pub mod poly;
pub mod riccati;
pub mod determinants;
pub mod dynamics;
pub mod selftest;
pub mod sl_inverse;
pub mod solutions;
pub mod spectral;
pub mod structured;
pub mod tol;
pub mod weyl;

pub use error::{Error, Result};
pub use num_complex::Complex64;
