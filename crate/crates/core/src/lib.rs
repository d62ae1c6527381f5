//! Multiscale approximation coefficients, square-function Carleson constants,
//! BMO norms and fractional derivatives on periodic grids.

pub mod bmo;
pub mod carleson;
pub mod cli;
pub mod coeffs;
pub mod corpus;
pub mod error;
pub mod field;
pub mod geometry;
mod fourier;
pub mod quad;
pub mod report;
pub mod spectral;

pub use error::{Error, ErrorClass, Result};
