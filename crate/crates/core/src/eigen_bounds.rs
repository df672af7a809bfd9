//! Sharp lower bound `λ̄(n, k, d)` for the first nontrivial Neumann/closed
//! eigenvalue of the p-Laplacian, its inverse `δ̄(λ)`, and the warped-product
//! families showing the bound cannot be improved.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model_manifold::{warped_curvature, ScaledCosh, WarpProfile};
use crate::ode_model::{symmetric_start, OddPhase};
use crate::ptrig;

/// Bisection stops once the bracket on `α` is this narrow (relative).
pub const ALPHA_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub p: f64,
    pub n: f64,
    pub k: f64,
    pub d: f64,
    pub lambda_bar: f64,
    pub alpha: f64,
    pub iterations: usize,
}

fn check_inputs(p: f64, n: f64, k: f64, d: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Domain(format!("p must be > 1, got {p}")));
    }
    if !(n >= 1.0 && n.is_finite()) {
        return Err(Error::Domain(format!("n must be ≥ 1, got {n}")));
    }
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::Domain(format!("diameter must be > 0, got {d}")));
    }
    if k > 0.0 {
        return Err(Error::Unsupported("positive lower Ricci bounds are not covered by the model ODEs".into()));
    }
    if !k.is_finite() {
        return Err(Error::Domain(format!("k must be finite, got {k}")));
    }
    Ok(())
}

/// `λ̄(n, k, d)` with the shooting details.
pub fn sharp_gap_report(p: f64, n: f64, k: f64, d: f64) -> Result<GapReport> {
    check_inputs(p, n, k, d)?;
    let pi_p = ptrig::pi_p(p)?;
    let flat_alpha = pi_p / d;
    if k == 0.0 || n == 1.0 {
        return Ok(GapReport { p, n, k, d, lambda_bar: (p - 1.0) * flat_alpha.powf(p), alpha: flat_alpha, iterations: 0 });
    }
    let target = 0.5 * pi_p;
    let excess = |alpha: f64| -> Result<f64> { Ok(OddPhase::new(p, n, k, alpha)?.phase_at(0.5 * d)? - target) };
    // φ' ≥ α on (0, d/2), so α = π_p/d already reaches π_p/2 by d/2.
    let mut hi = flat_alpha;
    let mut lo = 0.5 * hi;
    let mut iterations = 0;
    while excess(lo)? >= 0.0 {
        hi = lo;
        lo *= 0.5;
        iterations += 1;
        if iterations > 200 {
            return Err(Error::RootNotBracketed("no lower bracket for α".into()));
        }
    }
    while hi - lo > ALPHA_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if excess(mid)? >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    let alpha = 0.5 * (lo + hi);
    Ok(GapReport { p, n, k, d, lambda_bar: (p - 1.0) * alpha.powf(p), alpha, iterations })
}

/// `λ̄(n, k, d)`.
pub fn sharp_gap(p: f64, n: f64, k: f64, d: f64) -> Result<f64> {
    sharp_gap_report(p, n, k, d).map(|r| r.lambda_bar)
}

/// Ordered parallel evaluation of `sharp_gap_report` over a list of instances.
pub fn sharp_gap_sweep(cells: &[(f64, f64, f64, f64)]) -> Vec<Result<GapReport>> {
    cells.par_iter().map(|&(p, n, k, d)| sharp_gap_report(p, n, k, d)).collect()
}

/// `δ̄(λ) = 2ā`, the smallest model diameter carrying the eigenvalue `λ`.
pub fn delta_bar(p: f64, n: f64, k: f64, lambda: f64) -> Result<f64> {
    Ok(2.0 * symmetric_start(p, n, k, lambda)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub p: f64,
    pub n: f64,
    pub k: f64,
    pub d: f64,
    pub i: u32,
    /// `√(d² + i^{-2} π² τ₃(d/2)²)`.
    pub diameter_bound: f64,
    pub lambda_bar: f64,
    /// Smallest `Ric(∂t, ∂t) - (n-1)k` over the sampled slices.
    pub radial_ricci_excess: f64,
    /// Smallest `Ric(X, X) - (n-1)k` over unit fiber vectors.
    pub fiber_ricci_excess: f64,
    /// Second fundamental form coefficients `f' f` at `d/2` and `-f' f` at `-d/2`
    /// (outward normals); nonnegative means convex boundary.
    pub convexity_plus: f64,
    pub convexity_minus: f64,
    pub convex_boundary: bool,
}

/// Warped product `[-d/2, d/2] ×_{τ₃/i} S^{n-1}` carrying the model eigenfunction.
pub fn sharpness_witness(p: f64, n: u32, k: f64, d: f64, i: u32) -> Result<WitnessReport> {
    if !(k < 0.0) {
        return Err(Error::Domain(format!("witness family needs k < 0, got {k}")));
    }
    if i == 0 {
        return Err(Error::Domain("witness index i must be ≥ 1".into()));
    }
    if n < 2 {
        return Err(Error::Domain(format!("witness needs n ≥ 2, got {n}")));
    }
    let nf = n as f64;
    let lambda_bar = sharp_gap(p, nf, k, d)?;
    let s = (-k).sqrt();
    let inv_i = 1.0 / i as f64;
    let tau_half = (s * 0.5 * d).cosh();
    let diameter_bound = (d * d + (inv_i * std::f64::consts::PI * tau_half).powi(2)).sqrt();
    let warp = ScaledCosh { k, scale: inv_i };
    let samples = 201;
    let mut radial_ricci_excess = f64::INFINITY;
    let mut fiber_ricci_excess = f64::INFINITY;
    for j in 0..samples {
        let t = -0.5 * d + d * j as f64 / (samples - 1) as f64;
        let c = warped_curvature(n, warp.sigma(t), warp.sigma_prime(t), warp.sigma_second(t));
        radial_ricci_excess = radial_ricci_excess.min(c.radial_ricci - (nf - 1.0) * k);
        fiber_ricci_excess = fiber_ricci_excess.min(c.fiber_ricci - (nf - 1.0) * k);
    }
    let edge = |t: f64| warped_curvature(n, warp.sigma(t), warp.sigma_prime(t), warp.sigma_second(t)).second_fundamental;
    let convexity_plus = edge(0.5 * d);
    let convexity_minus = -edge(-0.5 * d);
    Ok(WitnessReport {
        p,
        n: nf,
        k,
        d,
        i,
        diameter_bound,
        lambda_bar,
        radial_ricci_excess,
        fiber_ricci_excess,
        convexity_plus,
        convexity_minus,
        convex_boundary: convexity_plus >= 0.0 && convexity_minus >= 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn flat_closed_forms() {
        assert!((sharp_gap(2.0, 3.0, 0.0, PI).unwrap() - 1.0).abs() < 1e-12);
        let pi3 = ptrig::pi_p(3.0).unwrap();
        let v = sharp_gap(3.0, 2.0, 0.0, 1.0).unwrap();
        assert!((v - 2.0 * pi3.powi(3)).abs() < 1e-10);
        assert!((v - 28.29).abs() < 0.01);
        assert!(matches!(sharp_gap(2.0, 3.0, 1.0, 1.0), Err(Error::Unsupported(_))));
        assert!(sharp_gap(2.0, 3.0, -1.0, 0.0).is_err());
    }

    #[test]
    fn negative_curvature_lowers_the_gap() {
        let flat = sharp_gap(2.0, 3.0, 0.0, 2.0).unwrap();
        let hyp = sharp_gap(2.0, 3.0, -1.0, 2.0).unwrap();
        assert!(hyp < flat);
        assert!(hyp > 0.0);
    }

    #[test]
    fn round_trip_with_delta_bar() {
        for &(p, n, k, lambda) in &[(2.0, 3.0, -1.0, 3.0), (1.7, 2.0, -0.5, 1.2), (3.0, 4.0, -2.0, 20.0)] {
            let d = delta_bar(p, n, k, lambda).unwrap();
            let back = sharp_gap(p, n, k, d).unwrap();
            assert!((back - lambda).abs() / lambda < 1e-6, "{p} {n} {k} {lambda}: {back}");
        }
        let alpha = 2f64.powf(1.0 / 3.0);
        let d = delta_bar(3.0, 1.0, -1.0, 4.0).unwrap();
        assert!((d - ptrig::pi_p(3.0).unwrap() / alpha).abs() < 1e-12);
    }

    #[test]
    fn witness_example() {
        let w = sharpness_witness(2.0, 3, -1.0, 2.0, 10).unwrap();
        let expected = (4.0 + PI * PI * 1f64.cosh().powi(2) / 100.0).sqrt();
        assert!((w.diameter_bound - expected).abs() < 1e-12);
        assert!((w.diameter_bound - 2.0580).abs() < 1e-3);
        assert!(w.radial_ricci_excess.abs() < 1e-12);
        assert!(w.fiber_ricci_excess >= -1e-12);
        assert!(w.convex_boundary);
        let mut last = f64::INFINITY;
        for i in [1, 2, 5, 10, 100, 1000] {
            let b = sharpness_witness(2.0, 3, -1.0, 2.0, i).unwrap().diameter_bound;
            assert!(b < last && b > 2.0);
            last = b;
        }
        assert!(last - 2.0 < 1e-5);
    }
}
