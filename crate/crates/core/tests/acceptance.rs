//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use pspectral::eigen_bounds::{delta_bar, sharp_gap};
use pspectral::frequency::corpus::{complex_power, corpus};
use pspectral::frequency::{
    frequency_curve, frequency_eval, minkowski_report, symmetry_measure, HarmonicPolynomial, Polynomial,
};
use pspectral::model_manifold::{capacity, cutoff_energy, evans, is_p_parabolic, Parabolicity, Warping};
use pspectral::ode_model::{
    classify_oscillation, profile, profile_with, symmetric_start, ModelFamily, ModelProblem, Oscillation, ProfileResult,
};
use pspectral::ode::Tolerances;
use pspectral::ptrig::{cos_p, pi_p, pi_p_by_quadrature, sin_p};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn closed_pi_p(p: f64) -> f64 {
    2.0 * PI / (p * (PI / p).sin())
}

fn run_profile(p: f64, n: f64, k: f64, lambda: f64, family: ModelFamily, a: f64) -> ProfileResult {
    profile(&ModelProblem::new(p, n, k, lambda, family, a).unwrap(), None).unwrap()
}

fn ptrig_identities() -> Outcome {
    let mut worst: f64 = 0.0;
    for &p in &[1.5, 2.0, 3.0, 4.0] {
        let half = closed_pi_p(p);
        for i in 0..1000 {
            let x = -2.0 * half + 4.0 * half * i as f64 / 999.0;
            let s = sin_p(p, x).unwrap().abs().powf(p);
            let c = cos_p(p, x).unwrap().abs().powf(p);
            worst = worst.max((s + c - 1.0).abs());
        }
    }
    let pi2 = (pi_p(2.0).unwrap() - PI).abs();
    let mut quad_worst: f64 = 0.0;
    for &p in &[1.2, 1.5, 2.0, 3.0, 4.0, 7.5] {
        quad_worst = quad_worst.max(rel(pi_p_by_quadrature(p, 1e-12).unwrap(), closed_pi_p(p)));
    }
    outcome(
        worst <= 1e-10 && pi2 <= 1e-12 && quad_worst <= 1e-8,
        format!("identity {worst:.2e}, |pi_2 - π| {pi2:.2e}, quadrature {quad_worst:.2e}"),
    )
}

fn flat_sharp_bound() -> Outcome {
    let mut unit: f64 = 0.0;
    for &n in &[1.0, 2.0, 3.0, 7.0] {
        unit = unit.max((sharp_gap(2.0, n, 0.0, PI).unwrap() - 1.0).abs());
    }
    let (mut closed, mut profile_err): (f64, f64) = (0.0, 0.0);
    for &p in &[1.5, 2.0, 3.0, 4.0] {
        for &d in &[0.5, 1.0, 3.0] {
            let lambda = sharp_gap(p, 3.0, 0.0, d).unwrap();
            let expected = (p - 1.0) * (closed_pi_p(p) / d).powf(p);
            closed = closed.max(rel(lambda, expected));
            let alpha = (lambda / (p - 1.0)).powf(1.0 / p);
            let res = run_profile(p, 1.0, 0.0, lambda, ModelFamily::Flat0, 0.0);
            profile_err = profile_err.max((res.delta.unwrap() - closed_pi_p(p) / alpha).abs());
        }
    }
    outcome(
        unit <= 1e-10 && closed <= 1e-12 && profile_err <= 1e-8,
        format!("|λ̄(2,·,0,π) - 1| {unit:.2e}, closed form {closed:.2e}, Flat0 δ {profile_err:.2e}"),
    )
}

fn first_tan_fixed_point() -> f64 {
    let mut t: f64 = 4.49;
    for _ in 0..50 {
        t -= (t.tan() - t) / (1.0 / t.cos().powi(2) - 1.0);
    }
    t
}

fn flat_radial_profile() -> Outcome {
    let res = run_profile(2.0, 3.0, 0.0, 1.0, ModelFamily::FlatRadial, 0.0);
    let b_star = first_tan_fixed_point();
    let m_star = -b_star.sin() / b_star;
    let (b, m) = (res.b.unwrap(), res.m.unwrap());
    let mut shape: f64 = 0.0;
    for i in 1..=40 {
        let t = b * i as f64 / 40.0;
        shape = shape.max((res.trajectory.state_at(t).unwrap().w + t.sin() / t).abs());
    }
    outcome(
        (b - b_star).abs() <= 1e-6 && (m - m_star).abs() <= 1e-4 && (m - 0.2172).abs() <= 1e-4,
        format!("b {b:.10} vs {b_star:.10}, m {m:.6} vs {m_star:.6}, max |w + sin t/t| {shape:.1e}"),
    )
}

fn delta_strict_and_limit() -> Outcome {
    let mut min_excess = f64::INFINITY;
    let mut worst_limit: f64 = 0.0;
    for &p in &[1.5, 2.0, 3.0] {
        for &n in &[2.0, 3.0] {
            let lambda: f64 = 1.0;
            let alpha = (lambda / (p - 1.0)).powf(1.0 / p);
            let base = closed_pi_p(p) / alpha;
            for &a in &[0.0, 0.5, 1.0, 5.0, 20.0] {
                let delta = run_profile(p, n, 0.0, lambda, ModelFamily::FlatRadial, a).delta.unwrap();
                min_excess = min_excess.min(delta - base);
            }
            let far = run_profile(p, n, 0.0, lambda, ModelFamily::FlatRadial, 1e3).delta.unwrap();
            worst_limit = worst_limit.max(rel(far, base));
        }
    }
    outcome(
        min_excess >= 1e-6 && worst_limit <= 0.01,
        format!("min δ(a) - π_p/α {min_excess:.3e}, δ(10³) rel gap {worst_limit:.2e}"),
    )
}

fn oscillation_threshold() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut consistent = true;
    for &n in &[2.0, 3.0, 5.0] {
        for &k in &[-0.5, -1.0] {
            let oracle = (n - 1.0) * (n - 1.0) * (-k) / 4.0;
            let osc = |l: f64| classify_oscillation(2.0, n, k, l).unwrap();
            let (mut lo, mut hi) = (0.25 * oracle, 4.0 * oracle);
            consistent &= osc(lo) == Oscillation::NonOscillatory && osc(hi) == Oscillation::Oscillatory;
            while rel(hi, lo) > 1e-13 {
                let mid = 0.5 * (lo + hi);
                match osc(mid) {
                    Oscillation::NonOscillatory => lo = mid,
                    _ => hi = mid,
                }
            }
            worst = worst.max(rel(hi, oracle));
        }
    }
    outcome(consistent && worst <= 1e-6, format!("max rel offset of the located boundary {worst:.2e}"))
}

/// Smallest positive λ with an odd solution of
/// `w'' + (n-1) √-k tanh(√-k t) w' + λ w = 0` satisfying `w'(d/2) = 0`.
fn linear_neumann_gap(n: f64, k: f64, d: f64) -> f64 {
    let s = (-k).sqrt();
    let end_slope = |lambda: f64| {
        let steps = 4000;
        let h = 0.5 * d / steps as f64;
        let f = |t: f64, y: [f64; 2]| [y[1], -(n - 1.0) * s * (s * t).tanh() * y[1] - lambda * y[0]];
        let (mut t, mut y) = (0.0, [0.0, 1.0]);
        for _ in 0..steps {
            let k1 = f(t, y);
            let k2 = f(t + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
            let k3 = f(t + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
            let k4 = f(t + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
            for j in 0..2 {
                y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            }
            t += h;
        }
        y[1]
    };
    let step = 0.01 * (PI / d).powi(2);
    let mut lo = 0.0;
    let mut hi = step;
    while end_slope(hi) > 0.0 {
        lo = hi;
        hi += step;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if end_slope(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn negative_curvature_gap() -> Outcome {
    let mut worst: f64 = 0.0;
    for &n in &[2.0, 3.0, 5.0] {
        for &k in &[-0.5, -1.0, -2.0] {
            for &d in &[1.0, 2.0, 4.0] {
                worst = worst.max(rel(sharp_gap(2.0, n, k, d).unwrap(), linear_neumann_gap(n, k, d)));
            }
        }
    }
    let mut continuity: f64 = 0.0;
    for &(p, n, d) in &[(2.0, 3.0, 1.0), (1.5, 2.0, 2.0), (3.0, 4.0, 1.5), (2.0, 5.0, 4.0)] {
        let flat = (p - 1.0) * (closed_pi_p(p) / d).powf(p);
        continuity = continuity.max(rel(sharp_gap(p, n, -1e-6, d).unwrap(), flat));
    }
    outcome(
        worst <= 1e-6 && continuity <= 1e-3,
        format!("max rel vs linear shooting {worst:.2e}, k→0⁻ continuity {continuity:.2e}"),
    )
}

fn delta_bar_round_trip() -> Outcome {
    let instances = [
        (2.0, 2.0, -1.0, 1.0),
        (2.0, 3.0, -1.0, 3.0),
        (2.0, 5.0, -0.5, 4.0),
        (1.5, 2.0, -0.5, 1.2),
        (1.5, 3.0, -1.0, 5.0),
        (2.5, 3.0, -1.0, 4.0),
        (3.0, 2.0, -1.0, 6.0),
        (3.0, 4.0, -2.0, 40.0),
        (4.0, 3.0, -0.5, 10.0),
        (1.8, 6.0, -0.3, 3.0),
    ];
    let mut worst: f64 = 0.0;
    let mut all_oscillatory = true;
    for &(p, n, k, lambda) in &instances {
        all_oscillatory &= classify_oscillation(p, n, k, lambda).unwrap() == Oscillation::Oscillatory;
        let d = delta_bar(p, n, k, lambda).unwrap();
        worst = worst.max(rel(sharp_gap(p, n, k, d).unwrap(), lambda));
    }
    // For p < 2 the restoring term |w|^{p-2} w is not Lipschitz where w crosses
    // zero, so oddness is checked with a tighter integrator tolerance.
    let tight = Tolerances { rtol: 1e-12, atol: 1e-14 };
    let (mut odd, mut odd_default): (f64, f64) = (0.0, 0.0);
    for &(p, n, k, lambda) in &instances[..6] {
        let a_bar = symmetric_start(p, n, k, lambda).unwrap();
        let problem = ModelProblem::new(p, n, k, lambda, ModelFamily::HypCosh, -a_bar).unwrap();
        for (tol, acc) in [(tight, &mut odd), (Tolerances::default(), &mut odd_default)] {
            let tr = profile_with(&problem, None, tol).unwrap().trajectory;
            for j in 0..=50 {
                let t = a_bar * j as f64 / 50.0;
                *acc = acc.max((tr.state_at(t).unwrap().w + tr.state_at(-t).unwrap().w).abs());
            }
        }
    }
    outcome(
        all_oscillatory && worst <= 1e-6 && odd <= 1e-8,
        format!(
            "max rel round trip {worst:.2e} over {} instances, oddness {odd:.2e} at rtol 1e-12 ({odd_default:.2e} at default rtol)",
            instances.len()
        ),
    )
}

fn gap_monotonicity() -> Outcome {
    let ds = [1.0, 2.0, 4.0];
    let ns = [2.0, 3.0, 5.0];
    let ks = [-2.0, -1.0, -0.5];
    let mut grid = [[[0.0; 3]; 3]; 3];
    for (i, &d) in ds.iter().enumerate() {
        for (j, &n) in ns.iter().enumerate() {
            for (l, &k) in ks.iter().enumerate() {
                grid[i][j][l] = sharp_gap(2.0, n, k, d).unwrap();
            }
        }
    }
    // Largest amount by which λ̄ fails to move in the stated direction along each axis.
    let (mut d_viol, mut n_viol, mut k_viol, mut n_reverse): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..3 {
        for j in 0..3 {
            for l in 0..3 {
                let g = grid[i][j][l];
                if i + 1 < 3 {
                    d_viol = d_viol.max(grid[i + 1][j][l] - g);
                }
                if j + 1 < 3 {
                    n_viol = n_viol.max(g - grid[i][j + 1][l]);
                    n_reverse = n_reverse.max(grid[i][j + 1][l] - g);
                }
                if l + 1 < 3 {
                    k_viol = k_viol.max(g - grid[i][j][l + 1]);
                }
            }
        }
    }
    let pass = d_viol <= 1e-9 && n_viol <= 1e-9 && k_viol <= 1e-9;
    let mut detail = format!("violations d↓ {d_viol:.2e}, n↑ {n_viol:.2e}, k↑ {k_viol:.2e}");
    if n_viol > 1e-9 {
        detail.push_str(&format!(
            "; λ̄ decreases in n (max increase {n_reverse:.2e}). At d=2, k=-1: n=2 {:.6}, n=3 {:.6}, n=5 {:.6}; \
             linear shooting oracle {:.6}, {:.6}, {:.6}",
            grid[1][0][1],
            grid[1][1][1],
            grid[1][2][1],
            linear_neumann_gap(2.0, -1.0, 2.0),
            linear_neumann_gap(3.0, -1.0, 2.0),
            linear_neumann_gap(5.0, -1.0, 2.0),
        ));
    }
    outcome(pass, detail)
}

fn model_capacities() -> Outcome {
    let space = Warping::euclid(3).unwrap();
    let cap = capacity(&space, 2.0, 1.0, 2.0).unwrap().exact;
    let cap_err = rel(cap, 8.0 * PI);
    let mut evans_err: f64 = 0.0;
    for &p in &[1.5, 2.0, 3.0] {
        let w = if p >= 2.0 { Warping::euclid(2).unwrap() } else { Warping::exp_surface() };
        for &t in &[0.5, 1.0, 2.0] {
            let rep = evans(&w, p, 1.0, t).unwrap();
            evans_err = evans_err.max((t.powf(p - 1.0) * rep.cap_quadrature - 1.0).abs());
        }
    }
    let mut wrong = Vec::new();
    for n in 2..=5u32 {
        let w = Warping::euclid(n).unwrap();
        for &p in &[1.5, 2.0, 3.0, 4.0, 5.0, 6.0] {
            let verdict = is_p_parabolic(&w, p).unwrap().verdict;
            let expected = if p >= n as f64 { Parabolicity::Parabolic } else { Parabolicity::Hyperbolic };
            if verdict != expected {
                wrong.push(format!("(n={n}, p={p}: {verdict:?})"));
            }
        }
    }
    outcome(
        cap_err <= 1e-8 && evans_err <= 1e-8 && wrong.is_empty(),
        format!("8π rel {cap_err:.2e}, Evans identity {evans_err:.2e}, wrong parabolicity verdicts {}", wrong.len()),
    )
}

fn exp_surface_cutoff() -> Outcome {
    let w = Warping::exp_surface();
    let rep = cutoff_energy(&w, 2.0, 5.0, 10.0).unwrap();
    let closed = 2.0 * PI / (10f64.exp() - 5f64.exp());
    let closed_err = rel(rep.phi_energy, closed);
    let radii: Vec<f64> = (0..=10).map(|i| 5.0 + 0.5 * i as f64).collect();
    let energies: Vec<f64> = radii.iter().map(|&r| cutoff_energy(&w, 2.0, r, 2.0 * r).unwrap().phi_energy).collect();
    let m = radii.len() as f64;
    let (sx, sy) = (radii.iter().sum::<f64>() / m, energies.iter().map(|e| e.ln()).sum::<f64>() / m);
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (r, e) in radii.iter().zip(&energies) {
        sxy += (r - sx) * (e.ln() - sy);
        sxx += (r - sx) * (r - sx);
    }
    let slope = sxy / sxx;
    let mut bound_ok = true;
    for &p in &[1.5, 2.0, 3.0] {
        for &(r1, r2) in &[(0.5, 1.0), (1.0, 3.0), (5.0, 10.0), (2.0, 2.5)] {
            let c = cutoff_energy(&w, p, r1, r2).unwrap();
            bound_ok &= c.phi_energy <= c.xi_energy_bound * (1.0 + 1e-12);
        }
    }
    outcome(
        closed_err <= 1e-8 && (slope + 2.0).abs() <= 0.1 && bound_ok,
        format!("closed form rel {closed_err:.2e}, log-slope {slope:.5}, φ ≤ ξ bound on all instances: {bound_ok}"),
    )
}

fn harmonic(p: Polynomial) -> HarmonicPolynomial {
    HarmonicPolynomial::new(p).unwrap()
}

fn homogeneous_examples() -> Vec<(u32, HarmonicPolynomial)> {
    let mut out = Vec::new();
    let (c, s) = (0.6f64, 0.8f64);
    for d in 1..=5 {
        let (re, im) = complex_power(&[1.0, 0.0], &[0.0, 1.0], d);
        out.push((d, harmonic(re)));
        out.push((d, harmonic(im)));
        let (re, im) = complex_power(&[c, 0.0, s], &[0.0, 1.0, 0.0], d);
        out.push((d, harmonic(re)));
        out.push((d, harmonic(im)));
    }
    out
}

fn radii() -> Vec<f64> {
    (1..=9).map(|i| 0.1 * i as f64).collect()
}

fn frequency_suite() -> Outcome {
    let mut homog: f64 = 0.0;
    for (d, u) in homogeneous_examples() {
        let origin = vec![0.0; u.n()];
        for &r in &[0.1, 0.5, 1.0, 3.0] {
            homog = homog.max((frequency_eval(&u, &origin, r).unwrap().frequency - d as f64).abs());
        }
    }
    let (mut mono, mut doubling): (f64, f64) = (0.0, 0.0);
    for u in corpus(0, 20, 5) {
        let curve = frequency_curve(&u, &vec![0.0; u.n()], &radii()).unwrap();
        mono = mono.max(curve.max_violation_n).max(curve.max_violation_n_bar);
        doubling = doubling.max(curve.max_doubling_residual());
    }
    let mut linear: f64 = 0.0;
    let lin2 = harmonic(Polynomial::from_terms(2, [(vec![1, 0], 0.3), (vec![0, 1], -1.2), (vec![0, 0], 0.7)]).unwrap());
    let lin3 = harmonic(Polynomial::from_terms(3, [(vec![1, 0, 0], 1.0), (vec![0, 0, 1], 2.0)]).unwrap());
    for (u, x) in [(&lin2, vec![0.4, -1.0]), (&lin2, vec![5.0, 2.0]), (&lin3, vec![0.1, 0.2, 0.3])] {
        for &r in &[0.05, 0.5, 2.0] {
            linear = linear.max((frequency_eval(u, &x, r).unwrap().frequency_bar - 1.0).abs());
        }
    }
    outcome(
        homog <= 1e-8 && mono <= 1e-8 && doubling <= 1e-6 && linear <= 1e-8,
        format!(
            "homogeneous |N - d| {homog:.2e}, corpus monotonicity violation {mono:.2e}, doubling residual {doubling:.2e}, linear |N̄ - 1| {linear:.2e}"
        ),
    )
}

fn symmetry_suite() -> Outcome {
    let fourier = harmonic(
        Polynomial::from_terms(2, [(vec![2, 0], 1.0), (vec![0, 2], -1.0), (vec![3, 0], 0.3), (vec![1, 2], -0.9)]).unwrap(),
    );
    let measure = symmetry_measure(&fourier, &[0.0, 0.0], 1.0).unwrap().measure;
    let fourier_err = (measure - (2.0 - 2.0 / 1.09f64.sqrt())).abs();

    let mut exact_zero = true;
    for (_, u) in homogeneous_examples() {
        let origin = vec![0.0; u.n()];
        for &r in &[0.2, 1.0] {
            exact_zero &= symmetry_measure(&u, &origin, r).unwrap().measure == 0.0;
        }
    }

    // Pinching: tiny frequency drop between radii forces near-symmetry at those radii.
    let mut triggered = 0;
    let mut pinch_ok = true;
    let mut inputs: Vec<HarmonicPolynomial> = Vec::new();
    for u in corpus(0, 20, 5) {
        let top = u.homogeneous_part(u.degree());
        inputs.push(harmonic(top));
        inputs.push(u);
    }
    for u in &inputs {
        let origin = vec![0.0; u.n()];
        let curve = frequency_curve(u, &origin, &radii()).unwrap();
        for (i, w) in curve.drops.iter().enumerate() {
            if w.abs() < 1e-10 {
                triggered += 1;
                for r in [curve.samples[i].r, curve.samples[i + 1].r] {
                    pinch_ok &= symmetry_measure(u, &origin, r).unwrap().measure < 1e-8;
                }
            }
        }
    }
    outcome(
        fourier_err <= 1e-8 && exact_zero && pinch_ok && triggered > 0,
        format!(
            "Fourier instance {measure:.8} (err {fourier_err:.1e}), homogeneous exactly 0: {exact_zero}, pinching held on {triggered} small-drop intervals: {pinch_ok}"
        ),
    )
}

fn cylinder_ball(r: f64) -> f64 {
    4.0 * PI / 3.0 * (0.25f64.powf(1.5) - (0.25 - r * r).powf(1.5))
}

fn minkowski_scaling() -> Outcome {
    let rs = [0.02, 0.05, 0.1];
    let planar = harmonic(Polynomial::from_terms(2, [(vec![3, 0], 1.0), (vec![1, 2], -3.0)]).unwrap());
    let (spatial, _) = complex_power(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], 3);
    let spatial = harmonic(spatial);
    let mut worst: f64 = 0.0;
    let mut min_exponent = f64::INFINITY;
    for (u, oracle) in [(&planar, (&|r: f64| PI * r * r) as &dyn Fn(f64) -> f64), (&spatial, &cylinder_ball)] {
        let rep = minkowski_report(u, &rs).unwrap();
        for v in &rep.volumes {
            worst = worst.max(rel(v.volume, oracle(v.r)));
        }
        min_exponent = min_exponent.min(rep.exponent);
    }
    outcome(
        worst <= 0.1 && min_exponent >= 1.75,
        format!("max rel volume error {worst:.3}, min fitted exponent {min_exponent:.3}"),
    )
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome, Duration); 13] = [
        (1, "p-trig identities", ptrig_identities, Duration::from_secs(1)),
        (2, "k=0 sharp bound", flat_sharp_bound, Duration::MAX),
        (3, "FlatRadial profile", flat_radial_profile, Duration::from_secs(1)),
        (4, "δ strictness and limit", delta_strict_and_limit, Duration::from_secs(30)),
        (5, "oscillation threshold", oscillation_threshold, Duration::MAX),
        (6, "k<0 sharp gap vs p=2 oracle", negative_curvature_gap, Duration::from_secs(60)),
        (7, "δ̄ round trip", delta_bar_round_trip, Duration::MAX),
        (8, "monotonicity of λ̄", gap_monotonicity, Duration::MAX),
        (9, "model capacities", model_capacities, Duration::MAX),
        (10, "cutoff on the e^{-t} surface", exp_surface_cutoff, Duration::MAX),
        (11, "frequency suite", frequency_suite, Duration::from_secs(30)),
        (12, "symmetry measure", symmetry_suite, Duration::MAX),
        (13, "Minkowski scaling", minkowski_scaling, Duration::from_secs(120)),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = Vec::new();
    for (id, name, check, budget) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| f == &id.to_string()) {
            continue;
        }
        let start = Instant::now();
        let out = check();
        let elapsed = start.elapsed();
        let pass = out.pass && elapsed <= budget;
        let timing = if budget == Duration::MAX {
            format!("{:.2}s", elapsed.as_secs_f64())
        } else {
            format!("{:.2}s of {}s", elapsed.as_secs_f64(), budget.as_secs())
        };
        println!("criterion {id:>2} {}: {name} [{timing}] {}", if pass { "PASS" } else { "FAIL" }, out.detail);
        if !pass {
            failed.push(id);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
