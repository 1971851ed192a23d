//! Simulation core for splitting a single-photon pulse into time bins by
//! parametric coupling of two slow-light fields in a driven EIT medium.
//!
//! The crate is organised in three layers:
//!
//! * [`params`]: physical inputs, derived propagation coefficients and the
//!   operating-regime validator.
//! * [`propagation`]: three independent solvers for the coupled envelope
//!   equations (split-step, Bessel-kernel formula, equal-velocity rotation).
//! * [`analysis`]: time-bin decomposition of the output and the two-mode
//!   Wigner function / Bell combination.
//!
//! Data-parallel loops go through [`Execution`]; with the `parallel` feature
//! disabled every path runs sequentially and produces identical results.

pub mod analysis;
pub mod exec;
pub mod params;
pub mod propagation;
pub mod quadrature;
pub mod special;

pub use exec::Execution;

/// Vacuum speed of light (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
