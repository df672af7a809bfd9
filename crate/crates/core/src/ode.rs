//! Dormand–Prince 5(4) stepper with continuous extension and step observers.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { rtol: 1e-10, atol: 1e-12 }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct StepperOptions {
    pub tol: Tolerances,
    pub initial_step: Option<f64>,
    pub max_step: f64,
    /// Caps the step at this multiple of `|t|` (useful next to a singular point at 0).
    pub relative_step_cap: f64,
    pub max_steps: usize,
}

impl Default for StepperOptions {
    fn default() -> Self {
        StepperOptions {
            tol: Tolerances::default(),
            initial_step: None,
            max_step: f64::INFINITY,
            relative_step_cap: f64::INFINITY,
            max_steps: 500_000,
        }
    }
}

/// One accepted step together with its quartic interpolant.
#[derive(Debug, Clone, Copy)]
pub struct DenseStep<const N: usize> {
    pub t0: f64,
    pub h: f64,
    pub y0: [f64; N],
    pub y1: [f64; N],
    rc: [[f64; N]; 5],
}

impl<const N: usize> DenseStep<N> {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    /// Interpolated state at `t` inside the step.
    pub fn eval(&self, t: f64) -> [f64; N] {
        let theta = (t - self.t0) / self.h;
        let theta1 = 1.0 - theta;
        let mut out = [0.0; N];
        for i in 0..N {
            let r = &self.rc;
            out[i] = r[0][i] + theta * (r[1][i] + theta1 * (r[2][i] + theta * (r[3][i] + theta1 * r[4][i])));
        }
        out
    }
}

/// Observer verdict after each accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Debug, Clone, Copy)]
pub struct Outcome<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub accepted: usize,
    pub rejected: usize,
    pub stopped: bool,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

fn combine<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for &(c, k) in terms {
        if c != 0.0 {
            for i in 0..N {
                out[i] += h * c * k[i];
            }
        }
    }
    out
}

fn error_norm<const N: usize>(y0: &[f64; N], y1: &[f64; N], err: &[f64; N], tol: &Tolerances) -> f64 {
    let mut acc = 0.0;
    for i in 0..N {
        let sc = tol.atol + tol.rtol * y0[i].abs().max(y1[i].abs());
        acc += (err[i] / sc).powi(2);
    }
    (acc / N as f64).sqrt()
}

/// Integrate `y' = f(t, y)` from `t0` towards `t_end` (either direction).
/// The observer sees every accepted step and may stop the integration.
/// `f` returning a non-finite component is treated as a domain exit.
pub fn integrate<const N: usize, F, O>(
    f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &StepperOptions,
    mut observer: O,
) -> Result<Outcome<N>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    O: FnMut(&DenseStep<N>) -> Control,
{
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let span = (t_end - t0).abs();
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    if k1.iter().any(|v| !v.is_finite()) {
        return Err(Error::DomainExit { t });
    }
    let mut outcome = Outcome { t, y, accepted: 0, rejected: 0, stopped: false };
    if span == 0.0 {
        return Ok(outcome);
    }
    let mut h = opts
        .initial_step
        .unwrap_or_else(|| initial_step(&f, t, &y, &k1, dir, opts))
        .abs()
        .min(span)
        .min(opts.max_step);
    let mut last_rejected = false;
    let mut total = 0usize;
    loop {
        let remaining = (t_end - t) * dir;
        if remaining <= 1e-15 * t.abs().max(1.0) {
            break;
        }
        if total >= opts.max_steps {
            return Err(Error::TooManySteps(opts.max_steps));
        }
        total += 1;
        let mut last = false;
        h = h.min(opts.relative_step_cap * t.abs());
        if h >= remaining {
            h = remaining;
            last = true;
        }
        let hs = dir * h;
        if h <= 1e-14 * t.abs().max(1e-300) || h < 1e-300 {
            return Err(Error::StepSizeUnderflow { t });
        }
        let k2 = f(t + C2 * hs, &combine(&y, hs, &[(A21, &k1)]));
        let k3 = f(t + C3 * hs, &combine(&y, hs, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * hs, &combine(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(t + C5 * hs, &combine(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = f(
            t + hs,
            &combine(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y1 = combine(&y, hs, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let t1 = if last { t_end } else { t + hs };
        let k7 = f(t1, &y1);
        let finite = [&k2, &k3, &k4, &k5, &k6, &k7].iter().all(|k| k.iter().all(|v| v.is_finite()))
            && y1.iter().all(|v| v.is_finite());
        if !finite {
            // Shrink towards the domain boundary; give up once the step is tiny.
            h *= 0.25;
            outcome.rejected += 1;
            last_rejected = true;
            if h <= 1e-12 * span {
                return Err(Error::DomainExit { t });
            }
            continue;
        }
        let mut err = [0.0; N];
        for i in 0..N {
            err[i] = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let en = error_norm(&y, &y1, &err, &opts.tol);
        if en <= 1.0 {
            let mut rc = [[0.0; N]; 5];
            for i in 0..N {
                let dy = y1[i] - y[i];
                let bspl = hs * k1[i] - dy;
                rc[0][i] = y[i];
                rc[1][i] = dy;
                rc[2][i] = bspl;
                rc[3][i] = dy - hs * k7[i] - bspl;
                rc[4][i] = hs
                    * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            }
            let step = DenseStep { t0: t, h: hs, y0: y, y1, rc };
            t = t1;
            y = y1;
            k1 = k7;
            outcome.accepted += 1;
            outcome.t = t;
            outcome.y = y;
            if observer(&step) == Control::Stop {
                outcome.stopped = true;
                return Ok(outcome);
            }
            let mut fac = 0.9 * en.max(1e-10).powf(-0.2);
            fac = fac.clamp(0.2, 10.0);
            if last_rejected {
                fac = fac.min(1.0);
            }
            h = (h * fac).min(opts.max_step);
            last_rejected = false;
            if last {
                break;
            }
        } else {
            let fac = (0.9 * en.powf(-0.2)).max(0.2);
            h *= fac;
            outcome.rejected += 1;
            last_rejected = true;
        }
    }
    Ok(outcome)
}

fn initial_step<const N: usize, F>(f: &F, t: f64, y: &[f64; N], k1: &[f64; N], dir: f64, opts: &StepperOptions) -> f64
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let tol = &opts.tol;
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for i in 0..N {
        let sc = tol.atol + tol.rtol * y[i].abs();
        d0 += (y[i] / sc).powi(2);
        d1 += (k1[i] / sc).powi(2);
    }
    d0 = (d0 / N as f64).sqrt();
    d1 = (d1 / N as f64).sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1 = combine(y, dir * h0, &[(1.0, k1)]);
    let k2 = f(t + dir * h0, &y1);
    let mut d2 = 0.0;
    for i in 0..N {
        let sc = tol.atol + tol.rtol * y[i].abs();
        d2 += ((k2[i] - k1[i]) / sc).powi(2);
    }
    d2 = (d2 / N as f64).sqrt() / h0;
    if !d2.is_finite() {
        return h0;
    }
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1)
}

/// Locate a sign change of `g` inside a dense step by bisection, to `t_tol`.
pub fn bisect_in_step<const N: usize, G>(step: &DenseStep<N>, g: G, t_tol: f64) -> f64
where
    G: Fn(&[f64; N]) -> f64,
{
    let (mut lo, mut hi) = (step.t0, step.t1());
    let mut g_lo = g(&step.y0);
    for _ in 0..200 {
        if (hi - lo).abs() <= t_tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let g_mid = g(&step.eval(mid));
        if (g_mid > 0.0) == (g_lo > 0.0) && g_mid != 0.0 {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_with_dense_output() {
        let opts = StepperOptions::default();
        let mut worst: f64 = 0.0;
        let out = integrate(
            |_, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            [0.0, 1.0],
            10.0,
            &opts,
            |step| {
                for j in 0..=8 {
                    let t = step.t0 + step.h * j as f64 / 8.0;
                    let y = step.eval(t);
                    worst = worst.max((y[0] - t.sin()).abs()).max((y[1] - t.cos()).abs());
                }
                Control::Continue
            },
        )
        .unwrap();
        assert!((out.t - 10.0).abs() < 1e-15);
        assert!((out.y[0] - 10f64.sin()).abs() < 1e-9);
        assert!(worst < 1e-9, "dense output error {worst}");
    }

    #[test]
    fn backward_integration_and_event() {
        let opts = StepperOptions::default();
        let mut crossing = None;
        integrate(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], -5.0, &opts, |step| {
            let g = |y: &[f64; 1]| y[0] - 0.5;
            if g(&step.y1) < 0.0 {
                crossing = Some(bisect_in_step(step, g, 1e-13));
                Control::Stop
            } else {
                Control::Continue
            }
        })
        .unwrap();
        assert!((crossing.unwrap() - 0.5f64.ln()).abs() < 1e-9);
    }
}
