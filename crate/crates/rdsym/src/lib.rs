//! Verification toolkit for conditional symmetries of two-component
//! reaction-diffusion systems with power diffusivities.
//!
//! The crate evaluates the determining equations and the full prolonged
//! invariance condition of a candidate symmetry operator numerically,
//! constructs the five admissible system/operator families together with
//! their reduction ansatz profiles, assembles the closed-form periodic
//! solutions of the linear specialization, and cross-validates everything
//! against an independent conservative finite-difference simulator.
//!
//! Layout:
//! * [`model`] - the system in original and transformed variables, residuals
//! * [`detcheck`] - determining equations, invariance residual, splitting
//! * [`families`] - the five symmetry families and their ansatz reductions
//! * [`reduction`] - linear specialization, quartic spectrum, p(x) equation
//! * [`exact`] - closed-form solutions, zero-flux admissibility, intervals
//! * [`pdesim`] - explicit conservative simulator and error norms
//! * [`config`] / [`cli`] / [`report`] - the command-line surface

pub mod cli;
pub mod config;
pub mod detcheck;
pub mod error;
pub mod eval;
pub mod exact;
pub mod families;
pub mod model;
pub mod pdesim;
pub mod reduction;
pub mod report;

pub use error::{Category, Error, Result};
