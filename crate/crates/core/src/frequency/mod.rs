//! Almgren frequency of harmonic polynomials, quantitative symmetry of
//! blow-ups and tubular volumes of critical sets.

pub mod affine;
pub mod corpus;
pub mod critical;
pub mod curve;
pub mod polynomial;
pub mod sphere;
pub mod symmetry;

pub use affine::{affine_normalize, AffineNormalization};
pub use critical::{critical_set, minkowski_report, CriticalSetReport, MinkowskiReport};
pub use curve::{frequency_curve, frequency_eval, rescale, FrequencyCurve, FrequencySample};
pub use polynomial::{HarmonicPolynomial, Polynomial};
pub use symmetry::{is_symmetric, k_symmetry_measure, stratum_membership, symmetry_measure, StratumReport, SymmetryReport};
