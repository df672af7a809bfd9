//! Sharp lower bounds for the first nontrivial eigenvalue of the p-Laplacian
//! via one-dimensional model ODEs, potential theory on model manifolds, and
//! Almgren frequency analysis of harmonic polynomials.

pub mod eigen_bounds;
pub mod emit;
pub mod error;
pub mod frequency;
pub mod model_manifold;
pub mod ode;
pub mod ode_model;
pub mod ptrig;
pub mod quad;

pub use error::{Error, Result};
