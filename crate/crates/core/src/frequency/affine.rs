//! Reduction of constant-coefficient equations `div(a ∇u) = 0` to the Laplacian.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::polynomial::Polynomial;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineNormalization {
    /// `Q = a^{-1/2}`, row-major.
    pub q: Vec<Vec<f64>>,
    /// Singular values of `Q`, descending.
    pub q_singular_values: Vec<f64>,
    /// Ellipticity constant: smallest `λ ≥ 1` with `λ^{-1} ≤ a ≤ λ`.
    pub ellipticity: f64,
    /// `U(y) = u(x̄ + Q^{-1} y)`.
    pub polynomial: Polynomial,
    /// Largest coefficient of `ΔU`, relative to the coefficients of `U`.
    pub laplacian_residual: f64,
}

/// Change of variables taking solutions of `div(a ∇u) = 0` to harmonic functions.
pub fn affine_normalize(a: &[Vec<f64>], x_bar: &[f64], u: &Polynomial) -> Result<AffineNormalization> {
    let n = u.n();
    if a.len() != n || a.iter().any(|row| row.len() != n) || x_bar.len() != n {
        return Err(Error::Domain(format!("coefficient matrix and center must match n = {n}")));
    }
    let m = DMatrix::from_fn(n, n, |i, j| a[i][j]);
    let asym = (&m - m.transpose()).abs().max();
    if asym > 1e-12 * m.abs().max() {
        return Err(Error::Domain("coefficient matrix is not symmetric".into()));
    }
    let eig = SymmetricEigen::new(m);
    let lo = eig.eigenvalues.min();
    let hi = eig.eigenvalues.max();
    if !(lo > 0.0) {
        return Err(Error::Domain(format!("coefficient matrix is not positive definite (eigenvalue {lo})")));
    }
    let v = &eig.eigenvectors;
    let root = v * DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt)) * v.transpose();
    let q = v * DMatrix::from_diagonal(&eig.eigenvalues.map(|x| 1.0 / x.sqrt())) * v.transpose();
    let rows = |mat: &DMatrix<f64>| (0..n).map(|i| (0..n).map(|j| mat[(i, j)]).collect::<Vec<f64>>()).collect::<Vec<_>>();
    let polynomial = u.compose_affine(x_bar, &rows(&root));
    let mut sv: Vec<f64> = eig.eigenvalues.iter().map(|x| 1.0 / x.sqrt()).collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    let scale = polynomial.max_abs_coefficient().max(f64::MIN_POSITIVE);
    Ok(AffineNormalization {
        q: rows(&q),
        q_singular_values: sv,
        ellipticity: hi.max(1.0 / lo),
        laplacian_residual: polynomial.laplacian().max_abs_coefficient() / scale,
        polynomial,
    })
}
