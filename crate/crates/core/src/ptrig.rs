//! Generalized trigonometric functions `sin_p`, `cos_p` and the signed power.
//!
//! `sin_p` on `[0, pi_p/2]` is the inverse of
//! `F(s) = ∫_0^s (1 - σ^p)^{-1/p} dσ`. Both halves of that range are inverted
//! with Newton's method on a convergent power series: in `u = s^p` near the
//! origin, and in `q = 1 - s^p` near the endpoint where the integrand blows up.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;

const SERIES_TERMS: usize = 80;

/// Closed-form half period `2π / (p sin(π/p))`.
pub fn pi_p(p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(2.0 * PI / (p * (PI / p).sin()))
}

/// `π_p` by tanh-sinh quadrature of `∫_{-1}^{1} (1-|s|^p)^{-1/p} ds`.
pub fn pi_p_by_quadrature(p: f64, rel_tol: f64) -> Result<f64> {
    check_exponent(p)?;
    let half = quad::tanh_sinh(
        |s, _, to_one| {
            // 1 - s^p from the distance to the singular endpoint, without cancellation.
            let gap = if s < 0.5 { 1.0 - s.powf(p) } else { -(p * (-to_one).ln_1p()).exp_m1() };
            gap.powf(-1.0 / p)
        },
        0.0,
        1.0,
        rel_tol,
    )?;
    Ok(2.0 * half)
}

fn check_exponent(p: f64) -> Result<()> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::Domain(format!("exponent p must be finite and > 1, got {p}")));
    }
    Ok(())
}

/// `|w|^q · sign(w)`.
pub fn signed_pow(w: f64, q: f64) -> f64 {
    if w == 0.0 {
        0.0
    } else {
        w.signum() * w.abs().powf(q)
    }
}

/// Values of `sin_p`, `cos_p` and the signed power `cos_p^{(p-1)}` at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PTrig {
    pub sin: f64,
    pub cos: f64,
    pub cos_pm1: f64,
}

/// Precomputed series for a fixed exponent. Cheap to clone and read-only.
#[derive(Debug, Clone)]
pub struct PContext {
    p: f64,
    pi_p: f64,
    lower: Vec<f64>,
    upper: Vec<f64>,
    split_s: f64,
    split_x: f64,
    split_z: f64,
}

impl PContext {
    pub fn new(p: f64) -> Result<Self> {
        let pi_p = pi_p(p)?;
        // (1-u)^{-1/p} = Σ c_k u^k and (1-q)^{1/p-1} = Σ d_k q^k.
        let mut lower = Vec::with_capacity(SERIES_TERMS);
        let mut upper = Vec::with_capacity(SERIES_TERMS);
        let (mut c, mut d) = (1.0, 1.0);
        for k in 0..SERIES_TERMS {
            let kf = k as f64;
            lower.push(c / (p * kf + 1.0));
            upper.push(d / (p * kf + p - 1.0));
            c *= (1.0 / p + kf) / (kf + 1.0);
            d *= (1.0 - 1.0 / p + kf) / (kf + 1.0);
        }
        let split_s = 0.5f64.powf(1.0 / p);
        let mut ctx = PContext {
            p,
            pi_p,
            lower,
            upper,
            split_s,
            split_x: 0.0,
            split_z: 0.5f64.powf((p - 1.0) / p),
        };
        ctx.split_x = ctx.lower_integral(split_s);
        Ok(ctx)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn pi_p(&self) -> f64 {
        self.pi_p
    }

    /// `F(s)` for `0 ≤ s ≤ split_s`.
    fn lower_integral(&self, s: f64) -> f64 {
        let u = s.powf(self.p);
        s * series(&self.lower, u)
    }

    /// `π_p/2 - F(s)` written in `z = q^{(p-1)/p}`, `q = 1 - s^p`.
    fn upper_integral(&self, z: f64) -> f64 {
        let q = z.powf(self.p / (self.p - 1.0));
        z * series(&self.upper, q)
    }

    /// Solve `F(s) = x` for `0 ≤ x ≤ split_x`.
    fn invert_lower(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        // F is convex with F(s) ≥ s, so Newton from s = x descends monotonically.
        let mut s = x.min(self.split_s);
        for _ in 0..60 {
            let f = self.lower_integral(s) - x;
            let deriv = (1.0 - s.powf(self.p)).powf(-1.0 / self.p);
            let next = (s - f / deriv).clamp(0.0, self.split_s);
            let done = (next - s).abs() <= 4.0 * f64::EPSILON * s.max(f64::MIN_POSITIVE);
            s = next;
            if done {
                break;
            }
        }
        s
    }

    /// Solve `π_p/2 - F = y` for the variable `z`, with `0 ≤ y ≤ π_p/2 - split_x`.
    fn invert_upper(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        let p = self.p;
        let mut z = ((p - 1.0) * y).min(self.split_z);
        for _ in 0..60 {
            let g = self.upper_integral(z) - y;
            let q = z.powf(p / (p - 1.0));
            let deriv = (1.0 - q).powf(1.0 / p - 1.0) / (p - 1.0);
            let next = (z - g / deriv).clamp(0.0, self.split_z);
            let done = (next - z).abs() <= 4.0 * f64::EPSILON * z.max(f64::MIN_POSITIVE);
            z = next;
            if done {
                break;
            }
        }
        z
    }

    /// `sin_p`, `cos_p` and `cos_p^{(p-1)}` at `x`.
    pub fn eval(&self, x: f64) -> PTrig {
        let pi_p = self.pi_p;
        let period = 2.0 * pi_p;
        let mut r = x % period;
        if r > pi_p {
            r -= period;
        } else if r <= -pi_p {
            r += period;
        }
        let sin_sign = if r < 0.0 { -1.0 } else { 1.0 };
        let mut r = r.abs();
        let mut cos_sign = 1.0;
        if r > 0.5 * pi_p {
            r = pi_p - r;
            cos_sign = -1.0;
        }
        let (s, c, cpm1) = if r <= self.split_x {
            let s = self.invert_lower(r);
            let q = 1.0 - s.powf(self.p);
            (s, q.powf(1.0 / self.p), q.powf((self.p - 1.0) / self.p))
        } else {
            let z = self.invert_upper((0.5 * pi_p - r).max(0.0));
            let q = z.powf(self.p / (self.p - 1.0));
            ((1.0 - q).powf(1.0 / self.p), z.powf(1.0 / (self.p - 1.0)), z)
        };
        PTrig { sin: sin_sign * s, cos: cos_sign * c, cos_pm1: cos_sign * cpm1 }
    }

    pub fn sin(&self, x: f64) -> f64 {
        self.eval(x).sin
    }

    pub fn cos(&self, x: f64) -> f64 {
        self.eval(x).cos
    }

    /// Signed power `cos_p(x)^{(p-1)}`, accurate near the zeros of `cos_p`.
    pub fn cos_pm1(&self, x: f64) -> f64 {
        self.eval(x).cos_pm1
    }

    /// Angle in `[0, π_p/2]` whose `(sin_p, cos_p)` is `(s, c)`, for
    /// `s, c ≥ 0` on the unit p-circle.
    fn first_quadrant_angle(&self, s: f64, c: f64) -> f64 {
        let p = self.p;
        if s.powf(p) <= 0.5 {
            self.lower_integral(s)
        } else {
            0.5 * self.pi_p - self.upper_integral(c.powf(p - 1.0))
        }
    }

    /// Prüfer pair `(e, φ)` with `w_scaled = e sin_p φ`, `wdot = e cos_p φ`.
    /// Without a hint `φ ∈ (-π_p, π_p]`; with a hint the branch nearest to it.
    pub fn prufer(&self, w_scaled: f64, wdot: f64, hint: Option<f64>) -> Result<(f64, f64)> {
        if w_scaled == 0.0 && wdot == 0.0 {
            return Err(Error::DegenerateState);
        }
        let p = self.p;
        let scale = w_scaled.abs().max(wdot.abs());
        let (a, b) = (w_scaled / scale, wdot / scale);
        let e_unit = (a.abs().powf(p) + b.abs().powf(p)).powf(1.0 / p);
        let e = scale * e_unit;
        let s = (a.abs() / e_unit).min(1.0);
        let c = (b.abs() / e_unit).min(1.0);
        let psi = self.first_quadrant_angle(s, c);
        let quadrant = if b >= 0.0 { psi } else { self.pi_p - psi };
        let mut phi = if a >= 0.0 { quadrant } else { -quadrant };
        if a == 0.0 && b < 0.0 {
            phi = self.pi_p;
        }
        if let Some(h) = hint {
            let period = 2.0 * self.pi_p;
            phi += period * ((h - phi) / period).round();
        }
        Ok((e, phi))
    }
}

fn series(coeffs: &[f64], u: f64) -> f64 {
    let mut sum = 0.0;
    let mut power = 1.0;
    for &c in coeffs {
        let term = c * power;
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
        power *= u;
    }
    sum
}

pub fn sin_p(p: f64, x: f64) -> Result<f64> {
    Ok(PContext::new(p)?.sin(x))
}

pub fn cos_p(p: f64, x: f64) -> Result<f64> {
    Ok(PContext::new(p)?.cos(x))
}

pub fn prufer_coords(p: f64, w_scaled: f64, wdot: f64, hint: Option<f64>) -> Result<(f64, f64)> {
    PContext::new(p)?.prufer(w_scaled, wdot, hint)
}
