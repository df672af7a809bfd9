//! One-dimensional model eigen-ODEs
//! `d/dt(μ v) + λ μ w^{(p-1)} = 0`, `v = ẇ^{(p-1)}`, `w(a) = -1`, `ẇ(a) = 0`,
//! integrated together with the Prüfer phase and log-amplitude.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{self, Control, DenseStep, StepperOptions, Tolerances};
use crate::ptrig::{signed_pow, PContext};

/// Hand-off point for singular starts at `t = 0`.
pub const SINGULAR_HANDOFF: f64 = 1e-6;
/// Relative width of the band around the oscillation threshold.
pub const CRITICAL_BAND: f64 = 1e-9;
const EVENT_TOL: f64 = 1e-12;
const REREFERENCE_LOG: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelFamily {
    Flat0,
    FlatRadial,
    HypSinh,
    HypExp,
    HypCosh,
}

impl ModelFamily {
    pub const ALL: [ModelFamily; 5] = [
        ModelFamily::Flat0,
        ModelFamily::FlatRadial,
        ModelFamily::HypSinh,
        ModelFamily::HypExp,
        ModelFamily::HypCosh,
    ];

    pub fn is_hyperbolic(self) -> bool {
        matches!(self, ModelFamily::HypSinh | ModelFamily::HypExp | ModelFamily::HypCosh)
    }

    /// Families whose drift blows up at `t = 0`; their domain is `(0, ∞)`.
    pub fn singular_at_origin(self) -> bool {
        matches!(self, ModelFamily::FlatRadial | ModelFamily::HypSinh)
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelFamily::Flat0 => "flat0",
            ModelFamily::FlatRadial => "flat-radial",
            ModelFamily::HypSinh => "hyp-sinh",
            ModelFamily::HypExp => "hyp-exp",
            ModelFamily::HypCosh => "hyp-cosh",
        }
    }
}

impl std::str::FromStr for ModelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown model family '{s}'")))
    }
}

/// Drift `T(t)` of the family.
pub fn drift(family: ModelFamily, n: f64, k: f64, t: f64) -> Result<f64> {
    if family.singular_at_origin() && t <= 0.0 {
        return Err(Error::Domain(format!("{} drift is defined for t > 0, got t = {t}", family.name())));
    }
    Ok(drift_unchecked(family, n, k, t))
}

fn drift_unchecked(family: ModelFamily, n: f64, k: f64, t: f64) -> f64 {
    let s = (-k).max(0.0).sqrt();
    match family {
        ModelFamily::Flat0 => 0.0,
        ModelFamily::FlatRadial => -(n - 1.0) / t,
        ModelFamily::HypSinh => -(n - 1.0) * s / (s * t).tanh(),
        ModelFamily::HypExp => -(n - 1.0) * s,
        ModelFamily::HypCosh => -(n - 1.0) * s * (s * t).tanh(),
    }
}

/// `ln μ(t)` with `μ = τ^{n-1}`, so that `(ln μ)' = -T`. NaN outside the domain.
pub fn log_weight(family: ModelFamily, n: f64, k: f64, t: f64) -> f64 {
    let s = (-k).max(0.0).sqrt();
    let ln2 = std::f64::consts::LN_2;
    let log_tau = match family {
        ModelFamily::Flat0 => 0.0,
        ModelFamily::FlatRadial => {
            if t > 0.0 {
                t.ln()
            } else {
                f64::NAN
            }
        }
        ModelFamily::HypSinh => {
            if t > 0.0 {
                let x = s * t;
                x + (-(-2.0 * x).exp()).ln_1p() - ln2
            } else {
                f64::NAN
            }
        }
        ModelFamily::HypExp => s * t,
        ModelFamily::HypCosh => {
            let x = (s * t).abs();
            x + (-2.0 * x).exp().ln_1p() - ln2
        }
    };
    if n == 1.0 {
        0.0
    } else {
        (n - 1.0) * log_tau
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelProblem {
    pub p: f64,
    pub n: f64,
    pub k: f64,
    pub lambda: f64,
    pub family: ModelFamily,
    pub a: f64,
}

impl ModelProblem {
    pub fn new(p: f64, n: f64, k: f64, lambda: f64, family: ModelFamily, a: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::Domain(format!("p must be > 1, got {p}")));
        }
        if !(n >= 1.0 && n.is_finite()) {
            return Err(Error::Domain(format!("n must be ≥ 1, got {n}")));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Domain(format!("lambda must be > 0, got {lambda}")));
        }
        if !a.is_finite() {
            return Err(Error::Domain(format!("start point must be finite, got {a}")));
        }
        if family.is_hyperbolic() {
            if !(k < 0.0 && k.is_finite()) {
                return Err(Error::Domain(format!("{} requires k < 0, got {k}", family.name())));
            }
        } else if k != 0.0 {
            return Err(Error::Domain(format!("{} requires k = 0, got {k}", family.name())));
        }
        if family.singular_at_origin() && a < 0.0 {
            return Err(Error::Domain(format!("{} requires a ≥ 0, got {a}", family.name())));
        }
        Ok(ModelProblem { p, n, k, lambda, family, a })
    }

    pub fn alpha(&self) -> f64 {
        (self.lambda / (self.p - 1.0)).powf(1.0 / self.p)
    }

    /// Default search horizon `a + 4 n π_p / α`.
    pub fn default_t_max(&self) -> f64 {
        let pi_p = crate::ptrig::pi_p(self.p).expect("validated exponent");
        self.a + 4.0 * self.n * pi_p / self.alpha()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub w: f64,
    pub v: f64,
    pub phi: f64,
    pub e: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryStatus {
    ReachedEvent,
    ReachedTmax,
}

#[derive(Debug, Clone)]
struct Segment {
    step: DenseStep<4>,
    log_ref: f64,
}

/// Sampled solution with its dense interpolant.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub problem: ModelProblem,
    pub samples: Vec<Sample>,
    pub status: TrajectoryStatus,
    pub tolerances: Tolerances,
    /// Time of the first `φ = π_p/2` crossing, if it was searched for and found.
    pub event: Option<f64>,
    segments: Vec<Segment>,
    handoff: Option<f64>,
    ctx: PContext,
}

struct Rhs<'a> {
    ctx: &'a PContext,
    problem: ModelProblem,
    alpha: f64,
    log_ref: f64,
}

impl Rhs<'_> {
    fn eval(&self, t: f64, y: &[f64; 4]) -> [f64; 4] {
        let pr = &self.problem;
        let p = pr.p;
        let mu = (log_weight(pr.family, pr.n, pr.k, t) - self.log_ref).exp();
        let v = y[1] / mu;
        let wdot = signed_pow(v, 1.0 / (p - 1.0));
        let mdot = -pr.lambda * mu * signed_pow(y[0], p - 1.0);
        let drift = if pr.family.singular_at_origin() && t <= 0.0 {
            f64::NAN
        } else {
            drift_unchecked(pr.family, pr.n, pr.k, t)
        };
        let trig = self.ctx.eval(y[2]);
        let phidot = self.alpha - drift / (p - 1.0) * trig.cos_pm1 * trig.sin;
        let log_e_dot = drift / (p - 1.0) * trig.cos.abs().powf(p);
        [wdot, mdot, phidot, log_e_dot]
    }
}

fn options(tol: Tolerances) -> StepperOptions {
    StepperOptions { tol, ..StepperOptions::default() }
}

/// Integrate the model IVP up to `t_end`, optionally stopping at the first
/// crossing `φ = π_p/2`.
fn integrate_model(problem: &ModelProblem, t_end: f64, tol: Tolerances, stop_at_event: bool) -> Result<Trajectory> {
    if !(t_end > problem.a) {
        return Err(Error::Domain(format!("t_end = {t_end} must exceed a = {}", problem.a)));
    }
    let ctx = PContext::new(problem.p)?;
    let p = problem.p;
    let alpha = problem.alpha();
    let half_pi = 0.5 * ctx.pi_p();
    let mut samples = vec![Sample { t: problem.a, w: -1.0, v: 0.0, phi: -half_pi, e: alpha }];

    let (mut t, mut w, mut v, mut handoff) = (problem.a, -1.0, 0.0, None);
    if problem.family.singular_at_origin() && problem.a == 0.0 {
        let t0 = SINGULAR_HANDOFF.min(0.5 * t_end);
        let (w0, v0) = singular_start(problem, t0);
        t = t0;
        w = w0;
        v = v0;
        handoff = Some(t0);
    }
    let (e0, phi0) = if handoff.is_some() {
        ctx.prufer(alpha * w, signed_pow(v, 1.0 / (p - 1.0)), Some(-half_pi))?
    } else {
        (alpha, -half_pi)
    };
    if handoff.is_some() {
        samples.push(Sample { t, w, v, phi: phi0, e: e0 });
    }

    let mut log_ref = log_weight(problem.family, problem.n, problem.k, t);
    let mut y = [w, v, phi0, e0.ln()];
    let mut segments: Vec<Segment> = Vec::new();
    let mut event = None;
    let mut opts = options(tol);
    if problem.family.singular_at_origin() {
        opts.relative_step_cap = 0.25;
    }
    loop {
        let rhs = Rhs { ctx: &ctx, problem: *problem, alpha, log_ref };
        let mut rereference = false;
        let outcome = ode::integrate(
            |tt, yy| rhs.eval(tt, yy),
            t,
            y,
            t_end,
            &opts,
            |step| {
                let (phi_a, phi_b) = (step.y0[2], step.y1[2]);
                if stop_at_event && phi_a < half_pi && phi_b >= half_pi {
                    let tb = ode::bisect_in_step(step, |s| s[2] - half_pi, EVENT_TOL);
                    event = Some(tb);
                    segments.push(Segment { step: *step, log_ref });
                    return Control::Stop;
                }
                segments.push(Segment { step: *step, log_ref });
                let t1 = step.t1();
                let mu = (log_weight(problem.family, problem.n, problem.k, t1) - log_ref).exp();
                samples.push(Sample {
                    t: t1,
                    w: step.y1[0],
                    v: step.y1[1] / mu,
                    phi: step.y1[2],
                    e: step.y1[3].exp(),
                });
                let drifted = (log_weight(problem.family, problem.n, problem.k, t1) - log_ref).abs();
                if drifted > REREFERENCE_LOG {
                    rereference = true;
                    Control::Stop
                } else {
                    Control::Continue
                }
            },
        )?;
        if event.is_some() || !rereference {
            break;
        }
        // Restart with the weight renormalized at the current time.
        t = outcome.t;
        let new_ref = log_weight(problem.family, problem.n, problem.k, t);
        y = outcome.y;
        y[1] *= (log_ref - new_ref).exp();
        log_ref = new_ref;
    }

    let mut traj = Trajectory {
        problem: *problem,
        samples,
        status: TrajectoryStatus::ReachedTmax,
        tolerances: tol,
        event,
        segments,
        handoff,
        ctx,
    };
    if let Some(tb) = event {
        let s = traj.state_at(tb).expect("event lies inside the last step");
        traj.samples.push(s);
        traj.status = TrajectoryStatus::ReachedEvent;
    }
    Ok(traj)
}

/// Leading-order series at a singular start: `v = λt/n`,
/// `w = -1 + ((p-1)/p)(λ/n)^{1/(p-1)} t^{p/(p-1)}`.
fn singular_start(problem: &ModelProblem, t: f64) -> (f64, f64) {
    let p = problem.p;
    let rate = problem.lambda / problem.n;
    let w = -1.0 + (p - 1.0) / p * rate.powf(1.0 / (p - 1.0)) * t.powf(p / (p - 1.0));
    (w, rate * t)
}

impl Trajectory {
    pub fn ctx(&self) -> &PContext {
        &self.ctx
    }

    pub fn t_start(&self) -> f64 {
        self.problem.a
    }

    pub fn t_end(&self) -> f64 {
        self.samples.last().map(|s| s.t).unwrap_or(self.problem.a)
    }

    /// Interpolated state at `t ∈ [a, t_end]`.
    pub fn state_at(&self, t: f64) -> Option<Sample> {
        let pr = &self.problem;
        let upper = self.segments.last().map_or(pr.a, |s| s.step.t1().max(s.step.t0));
        if t < pr.a || t > upper + 1e-14 * upper.abs().max(1.0) {
            return None;
        }
        if let Some(t0) = self.handoff {
            if t <= t0 {
                let (w, v) = if t == 0.0 { (-1.0, 0.0) } else { singular_start(pr, t) };
                let alpha = pr.alpha();
                let (e, phi) = if t == 0.0 {
                    (alpha, -0.5 * self.ctx.pi_p())
                } else {
                    self.ctx
                        .prufer(alpha * w, signed_pow(v, 1.0 / (pr.p - 1.0)), Some(-0.5 * self.ctx.pi_p()))
                        .ok()?
                };
                return Some(Sample { t, w, v, phi, e });
            }
        }
        let idx = self.segments.partition_point(|s| s.step.t1() < t);
        let seg = self.segments.get(idx).or_else(|| self.segments.last())?;
        let y = seg.step.eval(t);
        let mu = (log_weight(pr.family, pr.n, pr.k, t) - seg.log_ref).exp();
        Some(Sample { t, w: y[0], v: y[1] / mu, phi: y[2], e: y[3].exp() })
    }

    /// `ẇ` from a sample.
    pub fn wdot(&self, s: &Sample) -> f64 {
        signed_pow(s.v, 1.0 / (self.problem.p - 1.0))
    }

    /// Largest mismatch between the state and its Prüfer representation.
    pub fn prufer_inconsistency(&self) -> f64 {
        let alpha = self.problem.alpha();
        self.samples
            .iter()
            .map(|s| {
                let t = self.ctx.eval(s.phi);
                let dw = (alpha * s.w - s.e * t.sin).abs();
                let dv = (self.wdot(s) - s.e * t.cos).abs();
                dw.max(dv)
            })
            .fold(0.0, f64::max)
    }

    /// Largest `|(μ v)' + λ μ w^{(p-1)}| / μ` at step midpoints, using the
    /// exact derivative of the dense interpolant.
    pub fn mu_form_residual(&self) -> f64 {
        let pr = &self.problem;
        let mut worst: f64 = 0.0;
        for seg in &self.segments {
            let st = &seg.step;
            let tm = st.t0 + 0.5 * st.h;
            let dh = 1e-3 * st.h;
            let ya = st.eval(tm - dh);
            let yb = st.eval(tm + dh);
            let ym = st.eval(tm);
            let mdot = (yb[1] - ya[1]) / (2.0 * dh);
            let mu = (log_weight(pr.family, pr.n, pr.k, tm) - seg.log_ref).exp();
            let r = (mdot + pr.lambda * mu * signed_pow(ym[0], pr.p - 1.0)) / mu;
            worst = worst.max(r.abs());
        }
        worst
    }

    /// Time in `[a, b]` at which `w` takes the value `s`, assuming `w` is
    /// increasing there.
    pub fn time_at_value(&self, s: f64) -> Option<f64> {
        let end = self.event.unwrap_or_else(|| self.t_end());
        let first = self.samples.first()?;
        if s < first.w {
            return None;
        }
        let (mut lo, mut hi) = (self.problem.a, end);
        let w_end = self.state_at(end)?.w;
        if s > w_end {
            return None;
        }
        // Coarse bracket from the samples, then bisection on the interpolant.
        for pair in self.samples.windows(2) {
            if pair[1].t > end {
                break;
            }
            if pair[0].w <= s && s <= pair[1].w {
                lo = pair[0].t;
                hi = pair[1].t;
                break;
            }
        }
        for _ in 0..200 {
            if hi - lo <= 1e-14 * hi.abs().max(1.0) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if self.state_at(mid)?.w < s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }
}

/// Integrate the model IVP on `[a, t_end]` and keep every accepted step.
pub fn solve_ivp(problem: &ModelProblem, t_end: f64, tol: Tolerances) -> Result<Trajectory> {
    if !(tol.rtol > 0.0 && tol.atol > 0.0) {
        return Err(Error::Domain("tolerances must be positive".into()));
    }
    integrate_model(problem, t_end, tol, false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileStatus {
    Finite,
    Infinite,
    Critical,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfileResult {
    pub b: Option<f64>,
    pub delta: Option<f64>,
    pub m: Option<f64>,
    pub status: ProfileStatus,
    #[serde(skip)]
    pub trajectory: Trajectory,
}

/// First `b > a` with `ẇ(b) = 0`, `δ = b - a` and `m = w(b)`.
pub fn profile(problem: &ModelProblem, t_max: Option<f64>) -> Result<ProfileResult> {
    profile_with(problem, t_max, Tolerances::default())
}

pub fn profile_with(problem: &ModelProblem, t_max: Option<f64>, tol: Tolerances) -> Result<ProfileResult> {
    let t_max = t_max.unwrap_or_else(|| problem.default_t_max());
    let traj = integrate_model(problem, t_max, tol, true)?;
    if let Some(b) = traj.event {
        let end = traj.state_at(b).expect("event inside trajectory");
        return Ok(ProfileResult {
            b: Some(b),
            delta: Some(b - problem.a),
            m: Some(end.w),
            status: ProfileStatus::Finite,
            trajectory: traj,
        });
    }
    let verdict = classify_oscillation(problem.p, problem.n, problem.k, problem.lambda)?;
    let status = match verdict {
        Oscillation::Oscillatory => {
            return Err(Error::Inconclusive(format!(
                "no derivative zero up to t_max = {t_max} although the instance is oscillatory; increase t_max"
            )))
        }
        Oscillation::Critical => ProfileStatus::Critical,
        Oscillation::NonOscillatory => ProfileStatus::Infinite,
    };
    Ok(ProfileResult { b: None, delta: None, m: None, status, trajectory: traj })
}

/// `max_{ψ ∈ [-π_p/2, 0]} -cos_p^{(p-1)}(ψ) sin_p(ψ)` by golden-section search.
pub fn phase_damping_peak(ctx: &PContext) -> f64 {
    let g = |psi: f64| {
        let t = ctx.eval(psi);
        -t.cos_pm1 * t.sin
    };
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (-0.5 * ctx.pi_p(), 0.0);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut g1, mut g2) = (g(x1), g(x2));
    while hi - lo > 1e-12 {
        if g1 < g2 {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + inv_phi * (hi - lo);
            g2 = g(x2);
        } else {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - inv_phi * (hi - lo);
            g1 = g(x1);
        }
    }
    g(0.5 * (lo + hi))
}

/// Oscillation threshold `ᾱ = (n-1) l √(-k) / (p-1)`.
pub fn alpha_bar(p: f64, n: f64, k: f64) -> Result<f64> {
    if !(k < 0.0) {
        return Err(Error::Domain(format!("the oscillation threshold needs k < 0, got {k}")));
    }
    if !(n >= 1.0) {
        return Err(Error::Domain(format!("n must be ≥ 1, got {n}")));
    }
    let ctx = PContext::new(p)?;
    Ok((n - 1.0) * phase_damping_peak(&ctx) * (-k).sqrt() / (p - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Oscillation {
    Oscillatory,
    Critical,
    NonOscillatory,
}

/// Trichotomy of `α = (λ/(p-1))^{1/p}` against `ᾱ`. For `k = 0` the
/// threshold is zero and every instance oscillates.
pub fn classify_oscillation(p: f64, n: f64, k: f64, lambda: f64) -> Result<Oscillation> {
    if k > 0.0 {
        return Err(Error::Unsupported("positive curvature models".into()));
    }
    let alpha = (lambda / (p - 1.0)).powf(1.0 / p);
    if k == 0.0 || n == 1.0 {
        return Ok(Oscillation::Oscillatory);
    }
    let bar = alpha_bar(p, n, k)?;
    Ok(if (alpha - bar).abs() <= CRITICAL_BAND * bar {
        Oscillation::Critical
    } else if alpha > bar {
        Oscillation::Oscillatory
    } else {
        Oscillation::NonOscillatory
    })
}

/// Phase of the odd cosh-model solution: `φ(0) = 0`,
/// `φ' = α - T₃(t)/(p-1) cos_p^{(p-1)}(φ) sin_p(φ)`.
pub struct OddPhase {
    ctx: PContext,
    n: f64,
    k: f64,
    alpha: f64,
}

impl OddPhase {
    pub fn new(p: f64, n: f64, k: f64, alpha: f64) -> Result<Self> {
        if !(k <= 0.0) {
            return Err(Error::Unsupported("positive curvature models".into()));
        }
        Ok(OddPhase { ctx: PContext::new(p)?, n, k, alpha })
    }

    fn rhs(&self, t: f64, phi: f64) -> f64 {
        let trig = self.ctx.eval(phi);
        let drift = drift_unchecked(ModelFamily::HypCosh, self.n, self.k, t);
        self.alpha - drift / (self.ctx.p() - 1.0) * trig.cos_pm1 * trig.sin
    }

    fn options() -> StepperOptions {
        options(Tolerances { rtol: 1e-13, atol: 1e-14 })
    }

    /// `φ(t)` for the odd solution.
    pub fn phase_at(&self, t: f64) -> Result<f64> {
        let out = ode::integrate(|tt, y: &[f64; 1]| [self.rhs(tt, y[0])], 0.0, [0.0], t, &Self::options(), |_| {
            Control::Continue
        })?;
        Ok(out.y[0])
    }

    /// Time `t < 0` at which the phase reaches `-π_p/2`, i.e. `-ā`.
    pub fn start_time(&self) -> Result<f64> {
        let target = -0.5 * self.ctx.pi_p();
        // φ' ≥ α on the way down, so the crossing happens before -π_p/(2α).
        let horizon = -(0.5 * self.ctx.pi_p() / self.alpha) * (1.0 + 1e-6) - 1e-9;
        let mut hit = None;
        ode::integrate(|tt, y: &[f64; 1]| [self.rhs(tt, y[0])], 0.0, [0.0], horizon, &Self::options(), |step| {
            if step.y1[0] <= target {
                hit = Some(ode::bisect_in_step(step, |y| y[0] - target, EVENT_TOL));
                Control::Stop
            } else {
                Control::Continue
            }
        })?;
        hit.ok_or_else(|| Error::Inconclusive("odd phase did not reach -π_p/2 within the certified horizon".into()))
    }
}

/// `ā > 0` such that the cosh-model solution started at `-ā` is odd.
pub fn symmetric_start(p: f64, n: f64, k: f64, lambda: f64) -> Result<f64> {
    if !(k < 0.0) {
        return Err(Error::Domain(format!("symmetric start needs k < 0, got {k}")));
    }
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("lambda must be > 0, got {lambda}")));
    }
    let alpha = (lambda / (p - 1.0)).powf(1.0 / p);
    let phase = OddPhase::new(p, n, k, alpha)?;
    if n == 1.0 {
        return Ok(0.5 * phase.ctx.pi_p() / alpha);
    }
    Ok(-phase.start_time()?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelComparison {
    /// Largest value of `|ẇ₁| - |ẇ₂|` at a shared level (≤ 0 when the inequality holds).
    pub max_violation: f64,
    pub max_abs_difference: f64,
    pub levels: usize,
}

/// Compare `|ẇ₁|∘w₁^{-1}` with `|ẇ₂|∘w₂^{-1}` on levels shared by both
/// profiles. Requires `w₁[a₁,b₁] ⊆ w₂[a₂,b₂]`.
pub fn compare_models(sol1: &ProfileResult, sol2: &ProfileResult) -> Result<ModelComparison> {
    let (m1, m2) = match (sol1.m, sol2.m) {
        (Some(m1), Some(m2)) => (m1, m2),
        _ => return Err(Error::RangeContainment("both profiles need a finite b".into())),
    };
    // Both ranges start at w(a) = -1 and increase up to m.
    let slack = 1e-10;
    if m1 > m2 + slack {
        return Err(Error::RangeContainment(format!("w1 range [-1, {m1}] is not inside w2 range [-1, {m2}]")));
    }
    let levels = 200;
    let mut max_violation = f64::NEG_INFINITY;
    let mut max_abs_difference: f64 = 0.0;
    for j in 0..levels {
        let s = -1.0 + (m1.min(m2) + 1.0) * (j as f64 + 0.5) / levels as f64;
        let t1 = sol1.trajectory.time_at_value(s).ok_or_else(|| Error::RangeContainment(format!("level {s} missing in w1")))?;
        let t2 = sol2.trajectory.time_at_value(s).ok_or_else(|| Error::RangeContainment(format!("level {s} missing in w2")))?;
        let d1 = sol1.trajectory.wdot(&sol1.trajectory.state_at(t1).expect("inside")).abs();
        let d2 = sol2.trajectory.wdot(&sol2.trajectory.state_at(t2).expect("inside")).abs();
        max_violation = max_violation.max(d1 - d2);
        max_abs_difference = max_abs_difference.max((d1 - d2).abs());
    }
    Ok(ModelComparison { max_violation, max_abs_difference, levels })
}
