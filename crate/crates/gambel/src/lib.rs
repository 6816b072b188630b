//! Gambel shrinkage priors.
//!
//! Special functions, the distribution calculus of the Gambel family and its
//! building blocks, shrinkage diagnostics, random variate generators, Gibbs
//! samplers for sparse linear regression and a simulation harness.

pub mod analysis;
pub mod harness;
pub mod error;
pub mod quad;
pub mod specfun;
pub mod samplers;
pub mod stats;
pub mod distributions;

pub use error::{Error, ErrorKind, Result};
