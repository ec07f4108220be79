//! Brownian motions on the half-line and on `[0, 1]` with every
//! Feller-Wentzell boundary behavior: reflecting, absorbing, elastic, sticky,
//! and their combinations.
//!
//! The crate builds sample paths from a single driving Brownian motion,
//! evaluates the closed-form transition and resolvent kernels, and checks
//! the two against each other with Monte Carlo estimates.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod interval;
pub mod kernels;
pub mod laws;
pub mod model;
pub mod path;
pub mod quad;
pub mod rng;
pub mod special;
pub mod validation;

pub use error::{Error, Result};
pub use model::{normalize_wentzell, wentzell_residual, Absorption, BoundaryModel, Mode, Side};
pub use path::{AugmentedPath, SamplePath, TimeGrid};
