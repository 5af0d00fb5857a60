//! Approximate minimum spanning trees in arbitrary metric spaces by
//! completing an initial forest.
//!
//! The pipeline: partition the points and span each component exactly
//! ([`forest`]), pick representative points under a budget ([`reps`]),
//! connect components through edges incident to representatives
//! ([`solver`]), and certify the result with an instance-specific
//! approximation bound ([`analysis`]). Every distance evaluation goes
//! through a counted oracle ([`metric`]), so query costs are measured,
//! not estimated.

pub mod analysis;
pub mod dataset;
pub mod error;
pub mod forest;
pub mod metric;
pub mod reps;
pub mod solver;
pub mod synth;

mod union_find;

pub use error::{Error, Result};

/// Largest point count for which routines that materialize the full
/// distance matrix (gamma-overlap, the brute-force MST oracle) will run.
pub const DENSE_MATRIX_LIMIT: usize = 2_000;
