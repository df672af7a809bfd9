//! Quantitative symmetry of blow-ups `T_{x,r}`.
//!
//! Distances are mean squares on the unit sphere. For a normalized `T` and a
//! normalized homogeneous harmonic `P` of degree `d`, `⨍|T - P|² = 2 - 2⨍TP`,
//! minimized by `P = T_d / ‖T_d‖` at `2 - 2‖T_d‖` where `T_d` is the degree-`d`
//! component of `T` (spherical harmonics of distinct degrees are orthogonal).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::curve::rescale;
use super::polynomial::{HarmonicPolynomial, Polynomial};
use super::sphere::{exact_mean_square, SphereRule};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegreeDistance {
    pub degree: u32,
    pub distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KSymmetry {
    pub k: usize,
    /// Smallest distance from `T` to a normalized homogeneous harmonic
    /// polynomial invariant along some `k`-dimensional subspace.
    pub measure: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub center: Vec<f64>,
    pub scale: f64,
    /// `𝒩(u, x, r)`: distance to the nearest normalized homogeneous harmonic polynomial.
    pub measure: f64,
    pub best_degree: u32,
    pub best_polynomial: Polynomial,
    pub per_degree: Vec<DegreeDistance>,
    pub k_symmetry: Vec<KSymmetry>,
}

/// Fourier coefficients `(a_d, b_d)` of `T(cos θ, sin θ)` for `d = 0..=deg`.
fn circle_fourier(t: &Polynomial) -> Vec<(f64, f64)> {
    let deg = t.degree() as usize;
    let m = 2 * deg + 2;
    let vals: Vec<f64> = (0..m)
        .map(|j| {
            let th = 2.0 * PI * j as f64 / m as f64;
            t.eval(&[th.cos(), th.sin()])
        })
        .collect();
    (0..=deg)
        .map(|d| {
            let (mut a, mut b) = (0.0, 0.0);
            for (j, v) in vals.iter().enumerate() {
                let th = 2.0 * PI * (d * j) as f64 / m as f64;
                a += v * th.cos();
                b += v * th.sin();
            }
            let f = if d == 0 { 1.0 } else { 2.0 } / m as f64;
            (a * f, b * f)
        })
        .collect()
}

/// `‖T_d‖` (root mean square on the sphere) for each degree `d ≥ 1`.
fn degree_norms(t: &Polynomial) -> Vec<(u32, f64)> {
    if t.is_homogeneous() {
        // A normalized homogeneous blow-up is its own best approximant.
        let d = t.degree();
        return (1..=d).map(|k| (k, if k == d { 1.0 } else { 0.0 })).collect();
    }
    if t.n() == 2 {
        circle_fourier(t)
            .into_iter()
            .enumerate()
            .skip(1)
            .map(|(d, (a, b))| (d as u32, ((a * a + b * b) / 2.0).sqrt()))
            .collect()
    } else {
        (1..=t.degree()).map(|d| (d, exact_mean_square(&t.homogeneous_part(d)).sqrt())).collect()
    }
}

fn orthonormal_complement(v: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let a = if v[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let dot = a[0] * v[0] + a[1] * v[1] + a[2] * v[2];
    let mut e1 = [a[0] - dot * v[0], a[1] - dot * v[1], a[2] - dot * v[2]];
    let nrm = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
    e1.iter_mut().for_each(|c| *c /= nrm);
    let e2 = [v[1] * e1[2] - v[2] * e1[1], v[2] * e1[0] - v[0] * e1[2], v[0] * e1[1] - v[1] * e1[0]];
    (e1, e2)
}

/// In `ℝ³`, the best distance to degree-`d` harmonics invariant along the
/// line spanned by `v`: those are spanned by `Re, Im (e₁·y + i e₂·y)^d`.
fn line_invariant_norm(values: &[f64], rule: &SphereRule, v: [f64; 3], d: u32) -> f64 {
    let (e1, e2) = orthonormal_complement(v);
    let (mut tc, mut ts, mut cc) = (0.0, 0.0, 0.0);
    for ((p, w), t) in rule.points.iter().zip(&rule.weights).zip(values) {
        let x = e1[0] * p[0] + e1[1] * p[1] + e1[2] * p[2];
        let y = e2[0] * p[0] + e2[1] * p[1] + e2[2] * p[2];
        let rho = x.hypot(y);
        let th = y.atan2(x);
        let mag = rho.powi(d as i32);
        let (c, s) = (mag * (d as f64 * th).cos(), mag * (d as f64 * th).sin());
        tc += w * t * c;
        ts += w * t * s;
        cc += w * c * c;
    }
    let area = rule.area();
    // Re and Im parts are orthogonal with equal norms.
    ((tc * tc + ts * ts) / (cc * area)).sqrt()
}

fn direction(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

/// Largest line-invariant projection norm over directions, for `n = 3`.
fn best_line_norm(t: &Polynomial) -> f64 {
    let deg = t.degree();
    let rule = SphereRule::exact_for(3, 2 * deg + 2);
    let values: Vec<f64> = rule.points.iter().map(|p| t.eval(p)).collect();
    let score = |th: f64, ph: f64| (1..=deg).map(|d| line_invariant_norm(&values, &rule, direction(th, ph), d)).fold(0.0, f64::max);
    let (nt, np) = (24, 48);
    let mut best = (0.0, 0.0, f64::NEG_INFINITY);
    for i in 0..=nt {
        for j in 0..np {
            let th = 0.5 * PI * i as f64 / nt as f64;
            let ph = 2.0 * PI * j as f64 / np as f64;
            let s = score(th, ph);
            if s > best.2 {
                best = (th, ph, s);
            }
        }
    }
    // Pattern search refinement.
    let mut step = PI / nt as f64;
    while step > 1e-9 {
        let mut improved = false;
        for (dt, dp) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let s = score(best.0 + dt, best.1 + dp);
            if s > best.2 {
                best = (best.0 + dt, best.1 + dp, s);
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best.2
}

/// Measure of failure of `k`-symmetry for a normalized blow-up `T`.
fn k_measure(t: &Polynomial, norms: &[(u32, f64)], k: usize) -> Result<f64> {
    let n = t.n();
    let best_any = norms.iter().fold(0.0f64, |m, &(_, v)| m.max(v));
    let linear = norms.iter().find(|(d, _)| *d == 1).map(|x| x.1).unwrap_or(0.0);
    match k {
        0 => Ok(2.0 - 2.0 * best_any),
        k if k == n - 1 => Ok(2.0 - 2.0 * linear),
        // No nonconstant polynomial is invariant along all of ℝⁿ.
        k if k >= n => Ok(f64::INFINITY),
        1 if n == 3 => Ok(2.0 - 2.0 * best_line_norm(t).max(linear)),
        _ => Err(Error::Unsupported(format!("k = {k} symmetry in n = {n}"))),
    }
}

/// `𝒩(u, x, r)` with per-degree distances and `k`-symmetry measures for `k < n`.
pub fn symmetry_measure(u: &HarmonicPolynomial, x: &[f64], r: f64) -> Result<SymmetryReport> {
    let n = u.n();
    if n < 2 {
        return Err(Error::Unsupported("symmetry measure needs n ≥ 2".into()));
    }
    let t = rescale(u, x, r)?;
    let norms = degree_norms(&t);
    let per_degree: Vec<DegreeDistance> = norms.iter().map(|&(d, v)| DegreeDistance { degree: d, distance: (2.0 - 2.0 * v).max(0.0) }).collect();
    let best = per_degree
        .iter()
        .copied()
        .min_by(|a, b| a.distance.total_cmp(&b.distance))
        .ok_or_else(|| Error::Domain("blow-up has no nonconstant part".into()))?;
    let part = t.homogeneous_part(best.degree);
    let best_polynomial = part.scale(1.0 / exact_mean_square(&part).sqrt());
    let supported: Vec<usize> = (0..n).filter(|&k| k == 0 || k == n - 1 || (n == 3 && k == 1)).collect();
    let k_symmetry = supported
        .into_iter()
        .map(|k| Ok(KSymmetry { k, measure: k_measure(&t, &norms, k)?.max(0.0) }))
        .collect::<Result<Vec<_>>>()?;
    Ok(SymmetryReport {
        center: x.to_vec(),
        scale: r,
        measure: best.distance,
        best_degree: best.degree,
        best_polynomial,
        per_degree,
        k_symmetry,
    })
}

/// Distance of `T_{x,r}` from `k`-symmetric normalized homogeneous harmonics.
pub fn k_symmetry_measure(u: &HarmonicPolynomial, x: &[f64], r: f64, k: usize) -> Result<f64> {
    let t = rescale(u, x, r)?;
    let norms = degree_norms(&t);
    Ok(k_measure(&t, &norms, k)?.max(0.0))
}

/// Whether `u` is `(ε, r, k, x)`-symmetric: some normalized homogeneous
/// harmonic `P` invariant along a `k`-plane has `⨍_{∂B₁}|T_{x,r} - P|² < ε`.
pub fn is_symmetric(u: &HarmonicPolynomial, eps: f64, r: f64, k: usize, x: &[f64]) -> Result<bool> {
    Ok(k_symmetry_measure(u, x, r, k)? < eps)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleTrace {
    pub scale: f64,
    /// `(k+1)`-symmetry measure at this scale.
    pub measure: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratumReport {
    pub member: bool,
    pub trace: Vec<ScaleTrace>,
}

/// Membership of `x` in the effective stratum `S^k_{η,r}`: at every scale
/// `s = r γ^{-j} ∈ [r, 1]`, `u` fails to be `(η, s, k+1, x)`-symmetric.
pub fn stratum_membership(u: &HarmonicPolynomial, x: &[f64], eta: f64, r: f64, k: usize, gamma: f64) -> Result<StratumReport> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Domain(format!("scale ratio must lie in (0,1), got {gamma}")));
    }
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::Domain(format!("scale must lie in (0,1], got {r}")));
    }
    if !(eta > 0.0) {
        return Err(Error::Domain(format!("η must be > 0, got {eta}")));
    }
    let mut trace = Vec::new();
    let mut s = r;
    while s <= 1.0 * (1.0 + 1e-12) {
        let measure = k_symmetry_measure(u, x, s, k + 1)?;
        trace.push(ScaleTrace { scale: s, measure });
        s /= gamma;
    }
    let member = trace.iter().all(|t| t.measure >= eta);
    Ok(StratumReport { member, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frequency::polynomial::poly;

    fn h(p: Polynomial) -> HarmonicPolynomial {
        HarmonicPolynomial::new(p).unwrap()
    }

    #[test]
    fn fourier_oracle() {
        // Circle trace cos2θ + 0.3 cos3θ = (x² - y²) + 0.3 (x³ - 3xy²).
        let u = h(poly(2, &[(&[2, 0], 1.0), (&[0, 2], -1.0), (&[3, 0], 0.3), (&[1, 2], -0.9)]));
        let rep = symmetry_measure(&u, &[0.0, 0.0], 1.0).unwrap();
        let expected = 2.0 - 2.0 / 1.09f64.sqrt();
        assert!((rep.measure - expected).abs() < 1e-8);
        assert!((expected - 0.08435).abs() < 1e-5);
        assert_eq!(rep.best_degree, 2);
    }

    #[test]
    fn homogeneous_inputs_are_exactly_symmetric() {
        let u = h(poly(2, &[(&[2, 0], 1.0), (&[0, 2], -1.0)]));
        let rep = symmetry_measure(&u, &[0.0, 0.0], 0.37).unwrap();
        assert_eq!(rep.measure, 0.0);
        assert_eq!(rep.best_degree, 2);
        let v = h(poly(3, &[(&[3, 0, 0], 1.0), (&[1, 2, 0], -3.0)]));
        let rep = symmetry_measure(&v, &[0.0, 0.0, 0.0], 0.5).unwrap();
        assert!(rep.measure < 1e-14);
        let k1 = rep.k_symmetry.iter().find(|s| s.k == 1).unwrap().measure;
        assert!(k1 < 1e-9, "{k1}");
        let k2 = rep.k_symmetry.iter().find(|s| s.k == 2).unwrap().measure;
        assert!((k2 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn line_search_finds_translation_invariance() {
        let u2 = h(poly(2, &[(&[2, 0], 1.0), (&[0, 2], -1.0), (&[3, 0], 0.3), (&[1, 2], -0.9)]));
        let u3 = h(poly(3, &[(&[2, 0, 0], 1.0), (&[0, 2, 0], -1.0), (&[3, 0, 0], 0.3), (&[1, 2, 0], -0.9)]));
        let a = symmetry_measure(&u2, &[0.0, 0.0], 1.0).unwrap();
        let b = symmetry_measure(&u3, &[0.0, 0.0, 0.0], 1.0).unwrap();
        // Every homogeneous part of the 3-d input is invariant along the z-axis.
        let b1 = b.k_symmetry.iter().find(|s| s.k == 1).unwrap().measure;
        assert!((b1 - b.measure).abs() < 1e-8, "{b1} {}", b.measure);
        assert_eq!(a.best_degree, 2);
        assert_eq!(b.best_degree, 2);
    }

    #[test]
    fn linear_functions_are_fully_symmetric() {
        let u = h(poly(2, &[(&[1, 0], 2.0), (&[0, 1], -1.0), (&[0, 0], 3.0)]));
        assert!(is_symmetric(&u, 1e-12, 0.4, 1, &[0.2, 0.1]).unwrap());
        let rep = stratum_membership(&u, &[0.1, 0.0], 0.01, 0.05, 0, 0.5).unwrap();
        assert!(!rep.member);
    }

    #[test]
    fn saddle_lies_in_bottom_stratum() {
        let u = h(poly(2, &[(&[2, 0], 1.0), (&[0, 2], -1.0)]));
        let rep = stratum_membership(&u, &[0.0, 0.0], 0.5, 0.05, 0, 0.5).unwrap();
        assert!(rep.member);
        assert!(rep.trace.iter().all(|t| (t.measure - 2.0).abs() < 1e-12));
        assert_eq!(rep.trace.len(), 5);
    }
}
