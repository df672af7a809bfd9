//! Product quadrature on `S^{n-1}` exact for polynomials up to a given degree.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::model_manifold::{gamma_half, unit_sphere_area};
use crate::quad::gauss_legendre;

use super::polynomial::Polynomial;

#[derive(Debug, Clone)]
pub struct SphereRule {
    pub n: usize,
    pub points: Vec<Vec<f64>>,
    /// Weights sum to the area of `S^{n-1}`.
    pub weights: Vec<f64>,
}

/// Gauss rule for the weight `(1 - t²)^a` on `[-1, 1]` by Golub–Welsch.
pub fn gauss_gegenbauer(order: usize, a: f64) -> (Vec<f64>, Vec<f64>) {
    if a == 0.0 {
        return gauss_legendre(order);
    }
    let mut jac = DMatrix::<f64>::zeros(order, order);
    for k in 1..order {
        let kf = k as f64;
        let b = kf * (kf + 2.0 * a) / ((2.0 * kf + 2.0 * a + 1.0) * (2.0 * kf + 2.0 * a - 1.0));
        jac[(k, k - 1)] = b.sqrt();
        jac[(k - 1, k)] = b.sqrt();
    }
    let mu0 = PI.sqrt() * gamma_half_step(a + 1.0) / gamma_half_step(a + 1.5);
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..order)
        .map(|i| (eig.eigenvalues[i], mu0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    pairs.into_iter().unzip()
}

/// Γ at half-integers and integers, which is all the sphere rules need.
fn gamma_half_step(x: f64) -> f64 {
    let twice = (2.0 * x).round();
    debug_assert!((2.0 * x - twice).abs() < 1e-12 && twice >= 1.0);
    gamma_half(twice as u32)
}

impl SphereRule {
    /// Rule on `S^{n-1}` integrating every polynomial of degree ≤ `degree` exactly.
    pub fn exact_for(n: usize, degree: u32) -> Self {
        assert!(n >= 2, "sphere rules need n ≥ 2");
        if n == 2 {
            let m = degree as usize + 1;
            let w = 2.0 * PI / m as f64;
            let points = (0..m).map(|j| {
                let th = 2.0 * PI * j as f64 / m as f64;
                vec![th.cos(), th.sin()]
            });
            return SphereRule { n, points: points.collect(), weights: vec![w; m] };
        }
        let inner = SphereRule::exact_for(n - 1, degree);
        let (t, wt) = gauss_gegenbauer(degree as usize / 2 + 1, (n as f64 - 3.0) / 2.0);
        let mut points = Vec::with_capacity(t.len() * inner.points.len());
        let mut weights = Vec::with_capacity(points.capacity());
        for (ti, wi) in t.iter().zip(&wt) {
            let s = (1.0 - ti * ti).sqrt();
            for (z, wz) in inner.points.iter().zip(&inner.weights) {
                let mut pt = Vec::with_capacity(n);
                pt.push(*ti);
                pt.extend(z.iter().map(|zj| s * zj));
                points.push(pt);
                weights.push(wi * wz);
            }
        }
        SphereRule { n, points, weights }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `∫_{S^{n-1}} f`.
    pub fn integrate<F: Fn(&[f64]) -> f64>(&self, f: F) -> f64 {
        self.points.iter().zip(&self.weights).map(|(p, w)| w * f(p)).sum()
    }

    /// `∫_{∂B_r(x)} f dS`.
    pub fn integrate_on<F: Fn(&[f64]) -> f64>(&self, f: F, x: &[f64], r: f64) -> f64 {
        let mut buf = vec![0.0; self.n];
        let jac = r.powi(self.n as i32 - 1);
        let mut sum = 0.0;
        for (p, w) in self.points.iter().zip(&self.weights) {
            for i in 0..self.n {
                buf[i] = x[i] + r * p[i];
            }
            sum += w * f(&buf);
        }
        jac * sum
    }

    pub fn area(&self) -> f64 {
        unit_sphere_area(self.n as u32)
    }

    /// Mean of `f` over the unit sphere.
    pub fn mean<F: Fn(&[f64]) -> f64>(&self, f: F) -> f64 {
        self.integrate(f) / self.area()
    }
}

/// Exact `∫_{S^{n-1}} y^α dS`.
pub fn monomial_moment(alpha: &[u32]) -> f64 {
    if alpha.iter().any(|a| a % 2 == 1) {
        return 0.0;
    }
    let n = alpha.len() as u32;
    let total: u32 = alpha.iter().sum();
    let num: f64 = alpha.iter().map(|&a| gamma_half(a + 1)).product();
    2.0 * num / gamma_half(total + n)
}

/// Exact `⨍_{S^{n-1}} u²`, by monomial moments.
pub fn exact_mean_square(u: &Polynomial) -> f64 {
    let sq = u * u;
    let total: f64 = sq.terms().map(|(e, c)| c * monomial_moment(e)).sum();
    total / unit_sphere_area(u.n() as u32)
}
