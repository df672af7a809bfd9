//! Potential theory on rotationally symmetric model manifolds
//! `dr² + σ(r)² dθ²`: p-parabolicity, condenser capacities, Evans potentials,
//! radial cutoffs and the annulus decay conditions used by Stokes-type theorems.

use std::f64::consts::PI;
use std::fmt::Debug;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;

const RTOL: f64 = 1e-12;

/// `Γ(m/2)` for a positive integer `m`.
pub fn gamma_half(m: u32) -> f64 {
    assert!(m >= 1, "Γ(m/2) needs m ≥ 1");
    let (mut value, mut x) = if m % 2 == 0 { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    let target = m as f64 / 2.0;
    while x < target {
        value *= x;
        x += 1.0;
    }
    value
}

/// Area of the unit sphere `S^{n-1}`, i.e. `n ω_n = 2π^{n/2}/Γ(n/2)`.
pub fn unit_sphere_area(n: u32) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half(n)
}

/// A warping function `σ` with two derivatives.
pub trait WarpProfile: Send + Sync + Debug {
    fn sigma(&self, t: f64) -> f64;
    fn sigma_prime(&self, t: f64) -> f64;
    fn sigma_second(&self, t: f64) -> f64;

    /// `ln σ(t)`; override when `σ` overflows.
    fn log_sigma(&self, t: f64) -> f64 {
        self.sigma(t).ln()
    }

    /// Left end of the radial domain.
    fn domain_start(&self) -> f64 {
        0.0
    }

    /// Right end of the radial domain.
    fn domain_end(&self) -> f64 {
        f64::INFINITY
    }

    fn describe(&self) -> String;
}

/// Flat space, `σ(t) = t`.
#[derive(Debug, Clone, Copy)]
pub struct Euclid;

impl WarpProfile for Euclid {
    fn sigma(&self, t: f64) -> f64 {
        t
    }
    fn sigma_prime(&self, _t: f64) -> f64 {
        1.0
    }
    fn sigma_second(&self, _t: f64) -> f64 {
        0.0
    }
    fn describe(&self) -> String {
        "euclid".into()
    }
}

/// Constant curvature `k < 0`, `σ(t) = sinh(√(-k) t)/√(-k)`.
#[derive(Debug, Clone, Copy)]
pub struct Hyperbolic {
    pub k: f64,
}

impl Hyperbolic {
    pub fn new(k: f64) -> Result<Self> {
        if !(k < 0.0 && k.is_finite()) {
            return Err(Error::Domain(format!("hyperbolic warping needs k < 0, got {k}")));
        }
        Ok(Hyperbolic { k })
    }

    fn rate(&self) -> f64 {
        (-self.k).sqrt()
    }
}

impl WarpProfile for Hyperbolic {
    fn sigma(&self, t: f64) -> f64 {
        (self.rate() * t).sinh() / self.rate()
    }
    fn sigma_prime(&self, t: f64) -> f64 {
        (self.rate() * t).cosh()
    }
    fn sigma_second(&self, t: f64) -> f64 {
        self.rate() * (self.rate() * t).sinh()
    }
    fn log_sigma(&self, t: f64) -> f64 {
        let x = self.rate() * t;
        if x < 20.0 {
            self.sigma(t).ln()
        } else {
            x + (-(-2.0 * x).exp()).ln_1p() - std::f64::consts::LN_2 - self.rate().ln()
        }
    }
    fn describe(&self) -> String {
        format!("hyperbolic(k={})", self.k)
    }
}

/// Surface of revolution with `σ(t) = e^{-t}`, so `A = 2π e^{-t}` for `n = 2`.
#[derive(Debug, Clone, Copy)]
pub struct ExpSurface;

impl WarpProfile for ExpSurface {
    fn sigma(&self, t: f64) -> f64 {
        (-t).exp()
    }
    fn sigma_prime(&self, t: f64) -> f64 {
        -(-t).exp()
    }
    fn sigma_second(&self, t: f64) -> f64 {
        (-t).exp()
    }
    fn log_sigma(&self, t: f64) -> f64 {
        -t
    }
    fn describe(&self) -> String {
        "exp_surface".into()
    }
}

/// `σ(t) = scale · cosh(√(-k) t)` on the whole line.
#[derive(Debug, Clone, Copy)]
pub struct ScaledCosh {
    pub k: f64,
    pub scale: f64,
}

impl WarpProfile for ScaledCosh {
    fn sigma(&self, t: f64) -> f64 {
        self.scale * ((-self.k).sqrt() * t).cosh()
    }
    fn sigma_prime(&self, t: f64) -> f64 {
        let s = (-self.k).sqrt();
        self.scale * s * (s * t).sinh()
    }
    fn sigma_second(&self, t: f64) -> f64 {
        -self.k * self.sigma(t)
    }
    fn domain_start(&self) -> f64 {
        f64::NEG_INFINITY
    }
    fn describe(&self) -> String {
        format!("scaled_cosh(k={}, scale={})", self.k, self.scale)
    }
}

/// Tabulated `σ` with Fritsch–Carlson monotone cubic interpolation.
#[derive(Debug, Clone)]
pub struct TableProfile {
    t: Vec<f64>,
    sigma: Vec<f64>,
    slopes: Vec<f64>,
}

impl TableProfile {
    pub fn new(t: Vec<f64>, sigma: Vec<f64>) -> Result<Self> {
        if t.len() != sigma.len() || t.len() < 2 {
            return Err(Error::Domain("warping table needs at least two (t, sigma) rows of equal length".into()));
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("warping table abscissae must be strictly increasing".into()));
        }
        if sigma.iter().skip(1).any(|&s| !(s > 0.0)) || sigma[0] < 0.0 {
            return Err(Error::Domain("warping table values must be positive".into()));
        }
        let m = t.len();
        let secants: Vec<f64> = (0..m - 1).map(|i| (sigma[i + 1] - sigma[i]) / (t[i + 1] - t[i])).collect();
        let mut slopes = vec![0.0; m];
        slopes[0] = secants[0];
        slopes[m - 1] = secants[m - 2];
        for i in 1..m - 1 {
            slopes[i] = if secants[i - 1] * secants[i] <= 0.0 { 0.0 } else { 0.5 * (secants[i - 1] + secants[i]) };
        }
        for i in 0..m - 1 {
            if secants[i] == 0.0 {
                slopes[i] = 0.0;
                slopes[i + 1] = 0.0;
                continue;
            }
            let a = slopes[i] / secants[i];
            let b = slopes[i + 1] / secants[i];
            let r = a * a + b * b;
            if r > 9.0 {
                let tau = 3.0 / r.sqrt();
                slopes[i] = tau * a * secants[i];
                slopes[i + 1] = tau * b * secants[i];
            }
        }
        Ok(TableProfile { t, sigma, slopes })
    }

    fn locate(&self, x: f64) -> Option<(usize, f64, f64)> {
        let (first, last) = (self.t[0], *self.t.last().unwrap());
        if !(x >= first && x <= last) {
            return None;
        }
        let i = self.t.partition_point(|&v| v <= x).clamp(1, self.t.len() - 1) - 1;
        let h = self.t[i + 1] - self.t[i];
        Some((i, h, (x - self.t[i]) / h))
    }
}

impl WarpProfile for TableProfile {
    fn sigma(&self, x: f64) -> f64 {
        let Some((i, h, s)) = self.locate(x) else { return f64::NAN };
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * s) * (1.0 - s).powi(2),
            s * (1.0 - s).powi(2),
            s * s * (3.0 - 2.0 * s),
            s * s * (s - 1.0),
        );
        h00 * self.sigma[i] + h10 * h * self.slopes[i] + h01 * self.sigma[i + 1] + h11 * h * self.slopes[i + 1]
    }
    fn sigma_prime(&self, x: f64) -> f64 {
        let Some((i, h, s)) = self.locate(x) else { return f64::NAN };
        let d00 = 6.0 * s * s - 6.0 * s;
        let d10 = 3.0 * s * s - 4.0 * s + 1.0;
        let d01 = -d00;
        let d11 = 3.0 * s * s - 2.0 * s;
        (d00 * self.sigma[i] + d01 * self.sigma[i + 1]) / h + d10 * self.slopes[i] + d11 * self.slopes[i + 1]
    }
    fn sigma_second(&self, x: f64) -> f64 {
        let Some((i, h, s)) = self.locate(x) else { return f64::NAN };
        let e00 = 12.0 * s - 6.0;
        let e10 = 6.0 * s - 4.0;
        let e11 = 6.0 * s - 2.0;
        (e00 * (self.sigma[i] - self.sigma[i + 1]) / h + e10 * self.slopes[i] + e11 * self.slopes[i + 1]) / h
    }
    fn domain_start(&self) -> f64 {
        self.t[0]
    }
    fn domain_end(&self) -> f64 {
        *self.t.last().unwrap()
    }
    fn describe(&self) -> String {
        format!("table({} rows on [{}, {}])", self.t.len(), self.t[0], self.domain_end())
    }
}

/// Serializable choice of warping, as read from configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WarpingSpec {
    Euclid,
    Hyperbolic { k: f64 },
    ExpSurface,
    Table { t: Vec<f64>, sigma: Vec<f64> },
}

impl WarpingSpec {
    pub fn build(&self, n: u32) -> Result<Warping> {
        let profile: Arc<dyn WarpProfile> = match self {
            WarpingSpec::Euclid => Arc::new(Euclid),
            WarpingSpec::Hyperbolic { k } => Arc::new(Hyperbolic::new(*k)?),
            WarpingSpec::ExpSurface => Arc::new(ExpSurface),
            WarpingSpec::Table { t, sigma } => Arc::new(TableProfile::new(t.clone(), sigma.clone())?),
        };
        Warping::new(profile, n)
    }
}

/// Model manifold of dimension `n` with warping `σ`.
#[derive(Debug, Clone)]
pub struct Warping {
    pub profile: Arc<dyn WarpProfile>,
    pub n: u32,
    sphere: f64,
}

impl Warping {
    pub fn new(profile: Arc<dyn WarpProfile>, n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("model manifolds need n ≥ 2, got {n}")));
        }
        Ok(Warping { profile, n, sphere: unit_sphere_area(n) })
    }

    pub fn euclid(n: u32) -> Result<Self> {
        Warping::new(Arc::new(Euclid), n)
    }

    pub fn hyperbolic(n: u32, k: f64) -> Result<Self> {
        Warping::new(Arc::new(Hyperbolic::new(k)?), n)
    }

    pub fn exp_surface() -> Self {
        Warping::new(Arc::new(ExpSurface), 2).expect("n = 2 is valid")
    }

    fn log_area(&self, t: f64) -> f64 {
        self.sphere.ln() + (self.n as f64 - 1.0) * self.profile.log_sigma(t)
    }

    /// `A(t) = n ω_n σ(t)^{n-1}`.
    pub fn area(&self, t: f64) -> f64 {
        self.sphere * self.profile.sigma(t).powi(self.n as i32 - 1)
    }

    /// `a_p(t) = A(t)^{-1/(p-1)}`.
    pub fn a_p(&self, p: f64, t: f64) -> f64 {
        (-self.log_area(t) / (p - 1.0)).exp()
    }

    /// `V(t) = ∫ A` from the start of the domain.
    pub fn volume(&self, t: f64) -> Result<f64> {
        let start = self.profile.domain_start();
        if !start.is_finite() {
            return Err(Error::Domain("volume needs a finite domain start".into()));
        }
        radial_integral(|s| self.area(s), start, t)
    }

    fn check_radii(&self, r1: f64, r2: f64) -> Result<()> {
        let (lo, hi) = (self.profile.domain_start(), self.profile.domain_end());
        if !(r1 > lo) || !(r2 <= hi) || !(r1 <= r2) {
            return Err(Error::Domain(format!("radii [{r1}, {r2}] outside the warping domain ({lo}, {hi}]")));
        }
        Ok(())
    }
}

/// Adaptive integral split into pieces of length at most `max(1, x)`, so that
/// long radial ranges are covered geometrically.
fn radial_integral<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let mut total = 0.0;
    let mut x = a;
    while x < b {
        let next = (x + x.abs().max(1.0)).min(b);
        total += quad::adaptive(&f, x, next, RTOL, 1e-300)?.value;
        x = next;
    }
    Ok(total)
}

/// `f_{p,r̄}(r) = ∫_{r̄}^{r} a_p`.
pub fn radial_p_harmonic(w: &Warping, p: f64, r_bar: f64, r: f64) -> Result<f64> {
    check_p(p)?;
    if !(r_bar > 0.0) || r < r_bar {
        return Err(Error::Domain(format!("need 0 < r_bar ≤ r, got r_bar = {r_bar}, r = {r}")));
    }
    w.check_radii(r_bar, r)?;
    radial_integral(|t| w.a_p(p, t), r_bar, r)
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Domain(format!("p must be > 1, got {p}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parabolicity {
    Parabolic,
    Hyperbolic,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParabolicityReport {
    pub verdict: Parabolicity,
    /// `∫_{T_j}^{2T_j} a_p` over the doubling horizons `T_j = T_0 2^j`.
    pub increments: Vec<f64>,
    pub early_slope: f64,
    pub late_slope: f64,
}

pub const PROBE_DOUBLINGS: usize = 20;
pub const SLOPE_RESOLUTION: f64 = 1e-3;
const DRIFT_RESOLUTION: f64 = 1e-2;

/// Trend of a positive sequence sampled on doubling horizons: mean log2 growth
/// over a window of five ratios ending `offset` ratios before the tail.
fn log2_growth(values: &[f64], offset: usize) -> f64 {
    let m = values.len();
    let end = m - 1 - offset;
    let start = end - 5;
    (values[end] / values[start]).log2() / 5.0
}

/// Integral test for `∫^∞ a_p = ∞` over doubling horizons.
pub fn is_p_parabolic(w: &Warping, p: f64) -> Result<ParabolicityReport> {
    check_p(p)?;
    let start = w.profile.domain_start();
    let t0 = if start.is_finite() { (start + 1.0).max(1.0) } else { 1.0 };
    let mut increments = Vec::with_capacity(PROBE_DOUBLINGS + 1);
    let mut t = t0;
    for _ in 0..=PROBE_DOUBLINGS {
        if 2.0 * t > w.profile.domain_end() {
            break;
        }
        if !w.a_p(p, 2.0 * t).is_finite() {
            // a_p overflows: the integral diverges.
            increments.push(f64::INFINITY);
            break;
        }
        increments.push(quad::adaptive(|s| w.a_p(p, s), t, 2.0 * t, 1e-10, 1e-300)?.value);
        t *= 2.0;
    }
    if increments.last() == Some(&f64::INFINITY) {
        return Ok(ParabolicityReport { verdict: Parabolicity::Parabolic, increments, early_slope: f64::INFINITY, late_slope: f64::INFINITY });
    }
    if increments.len() < 12 {
        return Ok(ParabolicityReport { verdict: Parabolicity::Inconclusive, increments, early_slope: f64::NAN, late_slope: f64::NAN });
    }
    if let Some(first_zero) = increments.iter().position(|&v| v == 0.0) {
        // Underflow: the tail contributes nothing representable.
        let verdict = if first_zero > 0 && increments[first_zero - 1] < increments[0] {
            Parabolicity::Hyperbolic
        } else {
            Parabolicity::Inconclusive
        };
        return Ok(ParabolicityReport { verdict, increments, early_slope: f64::NEG_INFINITY, late_slope: f64::NEG_INFINITY });
    }
    let late_slope = log2_growth(&increments, 0);
    let early_slope = log2_growth(&increments, 5);
    let verdict = if late_slope >= -SLOPE_RESOLUTION {
        Parabolicity::Parabolic
    } else if late_slope - early_slope <= DRIFT_RESOLUTION {
        Parabolicity::Hyperbolic
    } else {
        Parabolicity::Inconclusive
    };
    Ok(ParabolicityReport { verdict, increments, early_slope, late_slope })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvansReport {
    /// Radius `R` with `f_{p,r̄}(R) = t`.
    pub radius: f64,
    /// `t^{1-p}`.
    pub cap: f64,
    /// `∫_{r̄}^{R} |∇(E/t)|^p A` by quadrature.
    pub cap_quadrature: f64,
}

/// Level set of the Evans potential at height `t` and its condenser capacity.
pub fn evans(w: &Warping, p: f64, r_bar: f64, t: f64) -> Result<EvansReport> {
    check_p(p)?;
    if !(t > 0.0) {
        return Err(Error::Domain(format!("level t must be > 0, got {t}")));
    }
    if !(r_bar > 0.0) {
        return Err(Error::Domain(format!("r_bar must be > 0, got {r_bar}")));
    }
    let report = is_p_parabolic(w, p)?;
    if report.verdict != Parabolicity::Parabolic {
        return Err(Error::NotParabolic(format!("probe verdict {:?}", report.verdict)));
    }
    // Double the radius until the potential passes t, then bisect in log R.
    let mut lo = r_bar;
    let mut f_lo = 0.0;
    let mut hi = 2.0 * r_bar;
    let mut f_hi = radial_integral(|s| w.a_p(p, s), lo, hi)?;
    let mut doublings = 0;
    while f_hi < t {
        doublings += 1;
        if doublings > 1000 || !hi.is_finite() || hi > w.profile.domain_end() {
            return Err(Error::RootNotBracketed(format!("potential stays below {t} up to R = {hi}")));
        }
        lo = hi;
        f_lo = f_hi;
        hi *= 2.0;
        f_hi = f_lo + radial_integral(|s| w.a_p(p, s), lo, hi)?;
    }
    for _ in 0..200 {
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
        let mid = (lo * hi).sqrt();
        let f_mid = f_lo + radial_integral(|s| w.a_p(p, s), lo, mid)?;
        if f_mid < t {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    let radius = 0.5 * (lo + hi);
    let cap_quadrature = radial_integral(|s| (w.a_p(p, s) / t).powf(p) * w.area(s), r_bar, radius)?;
    Ok(EvansReport { radius, cap: t.powf(1.0 - p), cap_quadrature })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityReport {
    /// Energy of the radial potential by quadrature.
    pub exact: f64,
    /// `(∫_{r1}^{r2} a_p)^{1-p}`.
    pub area_bound: f64,
    /// `2^p (∫_{r1}^{r2} ((t-r1)/(V(t)-V(r1)))^{1/(p-1)} dt)^{1-p}`.
    pub volume_bound: f64,
}

/// Capacity of the condenser `(B̄_{r1}, B_{r2})`.
pub fn capacity(w: &Warping, p: f64, r1: f64, r2: f64) -> Result<CapacityReport> {
    check_p(p)?;
    if !(r1 > 0.0 && r1 < r2) {
        return Err(Error::Domain(format!("need 0 < r1 < r2, got r1 = {r1}, r2 = {r2}")));
    }
    w.check_radii(r1, r2)?;
    let integral = radial_integral(|t| w.a_p(p, t), r1, r2)?;
    let area_bound = integral.powf(1.0 - p);
    let exact = radial_integral(|t| (w.a_p(p, t) / integral).powf(p) * w.area(t), r1, r2)?;
    let shell = |t: f64| radial_integral(|s| w.area(s), r1, t);
    let inner = quad::adaptive(
        |t| match shell(t) {
            Ok(v) if v > 0.0 => ((t - r1) / v).powf(1.0 / (p - 1.0)),
            _ => f64::NAN,
        },
        r1,
        r2,
        1e-10,
        1e-300,
    )?
    .value;
    let volume_bound = 2f64.powf(p) * inner.powf(1.0 - p);
    Ok(CapacityReport { exact, area_bound, volume_bound })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffReport {
    /// `(∫_{r1}^{r2} a_p)^{1-p}`.
    pub phi_energy: f64,
    /// `∫ |φ'|^p A` by quadrature.
    pub phi_energy_quadrature: f64,
    /// `(1/(r2-r1))^p ∫_{r1}^{r2} A`, the energy bound of the linear cutoff.
    pub xi_energy_bound: f64,
}

/// p-energy of the optimal radial cutoff between `r1` and `r2`.
pub fn cutoff_energy(w: &Warping, p: f64, r1: f64, r2: f64) -> Result<CutoffReport> {
    check_p(p)?;
    if !(r1 > 0.0 && r1 < r2) {
        return Err(Error::Domain(format!("need 0 < r1 < r2, got r1 = {r1}, r2 = {r2}")));
    }
    w.check_radii(r1, r2)?;
    let integral = radial_integral(|t| w.a_p(p, t), r1, r2)?;
    let phi_energy = integral.powf(1.0 - p);
    let phi_energy_quadrature = radial_energy(w, p, r1, r2, |t| -w.a_p(p, t) / integral)?;
    let xi_energy_bound = (1.0 / (r2 - r1)).powf(p) * radial_integral(|t| w.area(t), r1, r2)?;
    Ok(CutoffReport { phi_energy, phi_energy_quadrature, xi_energy_bound })
}

/// `∫_{r1}^{r2} |φ'(t)|^p A(t) dt` for a radial profile with derivative `dphi`.
pub fn radial_energy<F: Fn(f64) -> f64>(w: &Warping, p: f64, r1: f64, r2: f64, dphi: F) -> Result<f64> {
    radial_integral(|t| dphi(t).abs().powf(p) * w.area(t), r1, r2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StokesMode {
    /// Annuli `[R, 2R]` weighted by `(∫_R^{2R} a_p)^{-1}`.
    AMp,
    /// Annuli `[R, R+g(R)]` weighted by `(∫ (t/V(t))^{1/(p-1)})^{-1}`.
    VMp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionVerdict {
    Holds,
    Fails,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StokesReport {
    pub mode: StokesMode,
    pub radii: Vec<f64>,
    pub q: Vec<f64>,
    pub verdict: ConditionVerdict,
}

/// Sequence `q(R)` of annulus integrals of the radial density `f` against the
/// capacity-type weight, and whether its lower limit appears to vanish.
pub fn stokes_condition<F, G>(w: &Warping, p: f64, f: F, mode: StokesMode, gap: G, radii: &[f64]) -> Result<StokesReport>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    check_p(p)?;
    if radii.len() < 2 || radii.windows(2).any(|r| !(r[1] > r[0])) || !(radii[0] > 0.0) {
        return Err(Error::Domain("radius grid must be positive and strictly increasing".into()));
    }
    let mut q = Vec::with_capacity(radii.len());
    for &r in radii {
        let outer = match mode {
            StokesMode::AMp => 2.0 * r,
            StokesMode::VMp => r + gap(r),
        };
        if !(outer > r) {
            return Err(Error::Domain(format!("annulus at R = {r} is empty")));
        }
        let mass = radial_integral(|t| f(t) * w.area(t), r, outer)?;
        let weight = match mode {
            StokesMode::AMp => radial_integral(|t| w.a_p(p, t), r, outer)?,
            StokesMode::VMp => {
                let base = w.volume(r)?;
                let mut acc = 0.0;
                // Accumulate V(t) along the annulus from V(R).
                let pieces = 16;
                let mut left = r;
                let mut v_left = base;
                for j in 1..=pieces {
                    let right = r + (outer - r) * j as f64 / pieces as f64;
                    acc += quad::adaptive(
                        |t| {
                            let v = v_left + radial_integral(|s| w.area(s), left, t).unwrap_or(f64::NAN);
                            (t / v).powf(1.0 / (p - 1.0))
                        },
                        left,
                        right,
                        1e-10,
                        1e-300,
                    )?
                    .value;
                    v_left += radial_integral(|s| w.area(s), left, right)?;
                    left = right;
                }
                acc
            }
        };
        q.push(if mass == 0.0 { 0.0 } else { mass / weight });
    }
    let verdict = tail_verdict(radii, &q);
    Ok(StokesReport { mode, radii: radii.to_vec(), q, verdict })
}

/// Holds when `q` vanishes or decays at a non-slowing log-log rate, fails when
/// it does not decay, inconclusive otherwise.
fn tail_verdict(radii: &[f64], q: &[f64]) -> ConditionVerdict {
    let m = q.len();
    let tail = &q[m / 2..];
    if tail.iter().all(|&v| v.abs() == 0.0) || q[m - 1].abs() == 0.0 && q[m / 2..].windows(2).all(|w| w[1].abs() <= w[0].abs()) {
        return ConditionVerdict::Holds;
    }
    let logs: Vec<(f64, f64)> = radii.iter().zip(q).filter(|(_, v)| v.abs() > 0.0).map(|(r, v)| (r.ln(), v.abs().ln())).collect();
    if logs.len() < 4 {
        return ConditionVerdict::Inconclusive;
    }
    let slope = |pts: &[(f64, f64)]| {
        let (first, last) = (pts[0], pts[pts.len() - 1]);
        (last.1 - first.1) / (last.0 - first.0)
    };
    let half = logs.len() / 2;
    let early = slope(&logs[..=half]);
    let late = slope(&logs[half..]);
    if late >= -SLOPE_RESOLUTION && early >= -SLOPE_RESOLUTION {
        ConditionVerdict::Fails
    } else if late < -SLOPE_RESOLUTION && late <= early + DRIFT_RESOLUTION {
        ConditionVerdict::Holds
    } else {
        ConditionVerdict::Inconclusive
    }
}

/// Curvatures of `dt² + f(t)² g_{S^{n-1}}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WarpedCurvature {
    /// `Ric(∂t, ∂t) = -(n-1) f''/f`.
    pub radial_ricci: f64,
    /// `Ric(X, X)` for a unit fiber vector: `-f''/f + (n-2)(1-f'²)/f²`.
    pub fiber_ricci: f64,
    /// Coefficient of `g_S` in the second fundamental form of a slice, `f' f`.
    pub second_fundamental: f64,
}

pub fn warped_curvature(n: u32, f: f64, fdot: f64, fddot: f64) -> WarpedCurvature {
    let nf = n as f64;
    WarpedCurvature {
        radial_ricci: -(nf - 1.0) * fddot / f,
        fiber_ricci: -fddot / f + (nf - 2.0) * (1.0 - fdot * fdot) / (f * f),
        second_fundamental: fdot * f,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn sphere_constants() {
        assert!(rel(unit_sphere_area(2), 2.0 * PI) < 1e-15);
        assert!(rel(unit_sphere_area(3), 4.0 * PI) < 1e-15);
        assert!(rel(unit_sphere_area(4), 2.0 * PI * PI) < 1e-15);
        assert!(rel(gamma_half(7), 15.0 / 8.0 * PI.sqrt()) < 1e-15);
    }

    #[test]
    fn radial_potential_examples() {
        let plane = Warping::euclid(2).unwrap();
        let v = radial_p_harmonic(&plane, 2.0, 1.0, std::f64::consts::E).unwrap();
        assert!(rel(v, 1.0 / (2.0 * PI)) < 1e-12);
        let space = Warping::euclid(3).unwrap();
        let v = radial_p_harmonic(&space, 2.0, 1.0, 2.0).unwrap();
        assert!(rel(v, 1.0 / (8.0 * PI)) < 1e-12);
        assert_eq!(radial_p_harmonic(&space, 2.0, 1.5, 1.5).unwrap(), 0.0);
    }

    #[test]
    fn volume_is_antiderivative_of_area() {
        let w = Warping::hyperbolic(3, -1.0).unwrap();
        for &t in &[0.5, 1.0, 3.0] {
            let h = 1e-3;
            let v = |x: f64| w.volume(x).unwrap();
            let fd = (-v(t + 2.0 * h) + 8.0 * v(t + h) - 8.0 * v(t - h) + v(t - 2.0 * h)) / (12.0 * h);
            assert!(rel(fd, w.area(t)) < 1e-8, "t={t}: {fd} vs {}", w.area(t));
        }
    }

    #[test]
    fn parabolicity_examples() {
        let verdict = |w: &Warping, p| is_p_parabolic(w, p).unwrap().verdict;
        assert_eq!(verdict(&Warping::euclid(3).unwrap(), 2.0), Parabolicity::Hyperbolic);
        assert_eq!(verdict(&Warping::euclid(2).unwrap(), 2.0), Parabolicity::Parabolic);
        assert_eq!(verdict(&Warping::hyperbolic(3, -1.0).unwrap(), 4.0), Parabolicity::Hyperbolic);
        assert_eq!(verdict(&Warping::exp_surface(), 2.0), Parabolicity::Parabolic);
    }

    #[test]
    fn borderline_log_growth_is_inconclusive() {
        // A(t) = 2π t ln(t)^2 for large t: ∫ a_2 converges, but only like 1/ln.
        #[derive(Debug)]
        struct LogWarp;
        impl WarpProfile for LogWarp {
            fn sigma(&self, t: f64) -> f64 {
                t * (1.0 + t).ln().powi(2)
            }
            fn sigma_prime(&self, _t: f64) -> f64 {
                f64::NAN
            }
            fn sigma_second(&self, _t: f64) -> f64 {
                f64::NAN
            }
            fn describe(&self) -> String {
                "log".into()
            }
        }
        let w = Warping::new(Arc::new(LogWarp), 2).unwrap();
        assert_eq!(is_p_parabolic(&w, 2.0).unwrap().verdict, Parabolicity::Inconclusive);
    }

    #[test]
    fn evans_examples() {
        let plane = Warping::euclid(2).unwrap();
        let rep = evans(&plane, 2.0, 1.0, 2.0).unwrap();
        assert!(rel(rep.radius, (4.0 * PI).exp()) < 1e-10);
        assert!((rep.cap - 0.5).abs() < 1e-15);
        assert!((2.0 * rep.cap_quadrature - 1.0).abs() < 1e-8);
        let space = Warping::euclid(3).unwrap();
        assert!(matches!(evans(&space, 2.0, 1.0, 1.0), Err(Error::NotParabolic(_))));
    }

    #[test]
    fn capacity_examples() {
        let space = Warping::euclid(3).unwrap();
        let rep = capacity(&space, 2.0, 1.0, 2.0).unwrap();
        assert!(rel(rep.exact, 8.0 * PI) < 1e-8);
        assert!(rel(rep.area_bound, rep.exact) < 1e-8);
        assert!(rep.exact <= rep.volume_bound);
        let thin = capacity(&space, 2.0, 1.0, 1.0 + 1e-6).unwrap();
        assert!(thin.exact > 1e6);
    }

    #[test]
    fn cutoff_on_exponential_surface() {
        let w = Warping::exp_surface();
        let rep = cutoff_energy(&w, 2.0, 5.0, 10.0).unwrap();
        let exact = 2.0 * PI / (10f64.exp() - 5f64.exp());
        assert!(rel(rep.phi_energy, exact) < 1e-10);
        assert!(rel(rep.phi_energy_quadrature, exact) < 1e-8);
        let xi = 2.0 * PI / 25.0 * ((-5f64).exp() - (-10f64).exp());
        assert!(rel(rep.xi_energy_bound, xi) < 1e-10);
        assert!(rep.phi_energy <= rep.xi_energy_bound);
        // The linear cutoff has at least the optimal energy.
        let linear = radial_energy(&w, 2.0, 5.0, 10.0, |_| -1.0 / 5.0).unwrap();
        assert!(rep.phi_energy <= linear);
    }

    #[test]
    fn stokes_examples() {
        let radii: Vec<f64> = (0..10).map(|j| 2f64.powi(j)).collect();
        let surf = Warping::exp_surface();
        let rep = stokes_condition(&surf, 2.0, |_| 1.0, StokesMode::AMp, |r| r, &radii[..5]).unwrap();
        assert_eq!(rep.verdict, ConditionVerdict::Holds);
        let plane = Warping::euclid(2).unwrap();
        let rep = stokes_condition(&plane, 2.0, |_| 1.0, StokesMode::AMp, |r| r, &radii).unwrap();
        assert_eq!(rep.verdict, ConditionVerdict::Fails);
        for (r, q) in rep.radii.iter().zip(&rep.q) {
            assert!(rel(*q, 6.0 * PI * PI * r * r / 2f64.ln()) < 1e-9);
        }
        let rep = stokes_condition(&plane, 2.0, |_| 0.0, StokesMode::VMp, |_| 1.0, &radii).unwrap();
        assert_eq!(rep.verdict, ConditionVerdict::Holds);
        let space = Warping::euclid(3).unwrap();
        let rep = stokes_condition(&space, 2.0, |t| t.powi(-6), StokesMode::VMp, |r| r, &radii).unwrap();
        assert_eq!(rep.verdict, ConditionVerdict::Holds);
    }

    #[test]
    fn table_profile_reproduces_smooth_warping() {
        let t: Vec<f64> = (0..=400).map(|j| j as f64 * 0.01).collect();
        let sigma: Vec<f64> = t.iter().map(|&x| x.sinh()).collect();
        let tab = TableProfile::new(t, sigma).unwrap();
        for &x in &[0.123, 1.0, 2.71, 3.99] {
            assert!((tab.sigma(x) - x.sinh()).abs() < 1e-5);
            assert!((tab.sigma_prime(x) - x.cosh()).abs() < 1e-3);
        }
        assert!(tab.sigma(4.5).is_nan());
        let w = WarpingSpec::Table { t: vec![0.0, 1.0, 2.0, 4.0], sigma: vec![0.0, 1.0, 2.0, 4.0] }.build(3).unwrap();
        let cap = capacity(&w, 2.0, 1.0, 2.0).unwrap();
        assert!(rel(cap.exact, 8.0 * PI) < 1e-6);
    }

    #[test]
    fn warped_curvature_of_round_and_cosh_metrics() {
        // Hyperbolic space: σ = sinh has constant Ricci -(n-1).
        let t: f64 = 0.7;
        let c = warped_curvature(4, t.sinh(), t.cosh(), t.sinh());
        assert!((c.radial_ricci + 3.0).abs() < 1e-12);
        assert!((c.fiber_ricci + 3.0).abs() < 1e-12);
    }
}
