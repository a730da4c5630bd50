//! Numerical toolkit for weighted Bergman spaces on the unit disc.
//!
//! Radial weights and their class tests, hyperbolic geometry and lattices, disc
//! quadrature, Bergman kernels and projections, Hankel operators, Carleson tests,
//! distance-to-analytic (BDA) functions and the experiment harness behind the
//! `hankel-lab` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bda;
pub mod bergman;
pub mod carleson;
pub mod error;
pub mod geometry;
pub mod lab;
pub mod quadrature;
pub mod weights;

pub use error::{LabError, Result};
pub use num_complex::Complex64;
