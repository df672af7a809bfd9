use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, gauss_legendre_on};

use super::polynomial::{HarmonicPolynomial, Polynomial};
use super::sphere::SphereRule;

/// Extra quadrature degree on top of what exactness requires.
pub const QUADRATURE_MARGIN: u32 = 2;

/// Boundary mass, Dirichlet energy and frequencies at one radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencySample {
    pub r: f64,
    /// `∫_{∂B_r} u²`.
    pub height: f64,
    /// `∫_{B_r} |∇u|²`.
    pub energy: f64,
    /// `r D / H`.
    pub frequency: f64,
    /// `∫_{∂B_r} (u - u(x))²`.
    pub height_bar: f64,
    /// `r D / H̄`.
    pub frequency_bar: f64,
}

/// Quadrature rules reused across radii for a fixed polynomial.
#[derive(Debug, Clone)]
pub struct FrequencyEvaluator {
    u: Polynomial,
    grad: Vec<Polynomial>,
    boundary: SphereRule,
    inner: SphereRule,
    radial_order: usize,
}

impl FrequencyEvaluator {
    pub fn new(u: &HarmonicPolynomial) -> Result<Self> {
        let d = u.degree();
        if d == 0 {
            return Err(Error::Domain("frequency needs a nonconstant polynomial".into()));
        }
        if u.n() < 2 {
            return Err(Error::Domain("frequency needs n ≥ 2".into()));
        }
        let n = u.n();
        let boundary = SphereRule::exact_for(n, 2 * d + QUADRATURE_MARGIN);
        let inner = SphereRule::exact_for(n, 2 * (d - 1) + QUADRATURE_MARGIN);
        // Radial integrand s^{n-1} |∇u|² has degree ≤ 2(d-1) + n - 1.
        let radial_degree = 2 * (d as usize - 1) + n - 1 + QUADRATURE_MARGIN as usize;
        Ok(FrequencyEvaluator {
            u: u.poly().clone(),
            grad: u.gradient(),
            boundary,
            inner,
            radial_order: radial_degree / 2 + 1,
        })
    }

    pub fn polynomial(&self) -> &Polynomial {
        &self.u
    }

    pub fn height(&self, x: &[f64], r: f64) -> f64 {
        self.boundary.integrate_on(|y| self.u.eval(y).powi(2), x, r)
    }

    pub fn height_bar(&self, x: &[f64], r: f64) -> f64 {
        let ux = self.u.eval(x);
        self.boundary.integrate_on(|y| (self.u.eval(y) - ux).powi(2), x, r)
    }

    pub fn energy(&self, x: &[f64], r: f64) -> f64 {
        let (s, w) = gauss_legendre_on(0.0, r, self.radial_order);
        s.iter()
            .zip(&w)
            .map(|(&si, &wi)| wi * self.inner.integrate_on(|y| self.grad.iter().map(|g| g.eval(y).powi(2)).sum(), x, si))
            .sum()
    }

    pub fn eval(&self, x: &[f64], r: f64) -> Result<FrequencySample> {
        check_point(&self.u, x, r)?;
        let height = self.height(x, r);
        let height_bar = self.height_bar(x, r);
        let energy = self.energy(x, r);
        if !(height_bar > 0.0) {
            return Err(Error::Domain("boundary mass vanishes; polynomial is constant on the sphere".into()));
        }
        Ok(FrequencySample { r, height, energy, frequency: r * energy / height, height_bar, frequency_bar: r * energy / height_bar })
    }
}

fn check_point(u: &Polynomial, x: &[f64], r: f64) -> Result<()> {
    if x.len() != u.n() {
        return Err(Error::Domain(format!("center has {} coordinates but n = {}", x.len(), u.n())));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("radius must be > 0, got {r}")));
    }
    Ok(())
}

/// `(H, D, N, H̄, N̄)` of `u` on the ball `B_r(x)`.
pub fn frequency_eval(u: &HarmonicPolynomial, x: &[f64], r: f64) -> Result<FrequencySample> {
    FrequencyEvaluator::new(u)?.eval(x, r)
}

/// Doubling check between consecutive radii:
/// `H_m(r₂)/H_m(r₁)` against `exp(2∫_{r₁}^{r₂} N(s)/s ds)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoublingCheck {
    pub r1: f64,
    pub r2: f64,
    pub ratio: f64,
    pub predicted: f64,
    /// `|ratio - predicted|`.
    pub residual: f64,
    /// `|ratio - predicted| / predicted`.
    pub relative_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyCurve {
    pub center: Vec<f64>,
    pub samples: Vec<FrequencySample>,
    /// Degree the boundary rule integrates exactly.
    pub quadrature_degree: u32,
    /// Largest `N(r_i) - N(r_{i+1})`, clamped at 0.
    pub max_violation_n: f64,
    pub max_violation_n_bar: f64,
    pub doubling: Vec<DoublingCheck>,
    /// Frequency drops `W = N̄(r_{i+1}) - N̄(r_i)` between consecutive radii.
    pub drops: Vec<f64>,
}

impl FrequencyCurve {
    pub fn max_doubling_residual(&self) -> f64 {
        self.doubling.iter().fold(0.0, |m, c| m.max(c.residual))
    }
}

/// Frequency samples over an increasing radius grid, with diagnostics.
pub fn frequency_curve(u: &HarmonicPolynomial, x: &[f64], radii: &[f64]) -> Result<FrequencyCurve> {
    if radii.is_empty() {
        return Err(Error::Domain("radius grid is empty".into()));
    }
    if radii.windows(2).any(|w| !(w[1] > w[0])) || !(radii[0] > 0.0) {
        return Err(Error::Domain("radius grid must be positive and strictly increasing".into()));
    }
    let ev = FrequencyEvaluator::new(u)?;
    let samples = radii.iter().map(|&r| ev.eval(x, r)).collect::<Result<Vec<_>>>()?;
    let mut max_violation_n: f64 = 0.0;
    let mut max_violation_n_bar: f64 = 0.0;
    let mut drops = Vec::with_capacity(samples.len().saturating_sub(1));
    let mut doubling = Vec::with_capacity(drops.capacity());
    let n = u.n() as i32;
    for w in samples.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        max_violation_n = max_violation_n.max(a.frequency - b.frequency);
        max_violation_n_bar = max_violation_n_bar.max(a.frequency_bar - b.frequency_bar);
        drops.push(b.frequency_bar - a.frequency_bar);
        let ratio = (b.height / a.height) * (a.r / b.r).powi(n - 1);
        let integral = quad::integrate(
            |s| {
                let h = ev.height(x, s);
                2.0 * ev.energy(x, s) / h
            },
            a.r,
            b.r,
            1e-13,
        )?;
        let predicted = integral.exp();
        let residual = (ratio - predicted).abs();
        doubling.push(DoublingCheck { r1: a.r, r2: b.r, ratio, predicted, residual, relative_residual: residual / predicted });
    }
    Ok(FrequencyCurve {
        center: x.to_vec(),
        samples,
        quadrature_degree: 2 * u.degree() + QUADRATURE_MARGIN,
        max_violation_n,
        max_violation_n_bar,
        doubling,
        drops,
    })
}

/// `T_{x,r}(y) = (u(x + r y) - u(x)) / (⨍_{∂B₁} (u(x + r ·) - u(x))²)^{1/2}`.
pub fn rescale(u: &HarmonicPolynomial, x: &[f64], r: f64) -> Result<HarmonicPolynomial> {
    check_point(u, x, r)?;
    let shifted = u.translate_scale(x, r);
    let v = &shifted - &Polynomial::constant(u.n(), u.eval(x));
    let rule = SphereRule::exact_for(u.n(), 2 * v.degree() + QUADRATURE_MARGIN);
    let ms = rule.mean(|y| v.eval(y).powi(2));
    if !(ms > 0.0) {
        return Err(Error::Domain("u is constant near x; blow-up undefined".into()));
    }
    // Drop round-off terms of the translated constant.
    let v = Polynomial::from_terms(u.n(), v.terms().filter(|(e, _)| e.iter().any(|&k| k > 0)).map(|(e, c)| (e.clone(), c)))?;
    HarmonicPolynomial::new(v.scale(1.0 / ms.sqrt()))
}
