//! Certified enclosure of the critical set `{∇u = 0}` and tubular-volume
//! measurements of it.

use std::collections::{HashMap, HashSet};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model_manifold::unit_sphere_area;

use super::polynomial::{HarmonicPolynomial, Polynomial};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub center: Vec<f64>,
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalSetReport {
    /// Cells not excluded by the gradient test; their union contains every
    /// critical point in the box.
    pub cells: Vec<Cell>,
    /// Newton-refined critical points, deduplicated.
    pub points: Vec<Vec<f64>>,
    /// Candidate cells from which refinement did not converge.
    pub unresolved: Vec<Cell>,
    pub pitch: f64,
}

/// Per-cell bound on the Hessian operator norm from Taylor coefficients of
/// each Hessian entry at the cell center.
struct HessianBound {
    /// For each entry `(i, j)`: list of `(β, ∂^β H_ij / β!)`.
    entries: Vec<Vec<(Vec<u32>, Polynomial)>>,
}

fn multi_indices(n: usize, max_deg: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for k in 0..=max_deg {
        for mut rest in multi_indices(n - 1, max_deg - k) {
            rest.insert(0, k);
            out.push(rest);
        }
    }
    out
}

impl HessianBound {
    fn new(u: &Polynomial) -> Self {
        let hess = u.hessian();
        let n = u.n();
        let mut entries = Vec::with_capacity(n * n);
        for row in &hess {
            for h in row {
                let deg = h.degree();
                let mut list = Vec::new();
                if !h.is_zero() {
                    for beta in multi_indices(n, deg) {
                        let fact: f64 = beta.iter().map(|&b| (1..=b).fold(1.0, |a, i| a * i as f64)).product();
                        let dp = h.derivative(&beta).scale(1.0 / fact);
                        if !dp.is_zero() {
                            list.push((beta, dp));
                        }
                    }
                }
                entries.push(list);
            }
        }
        HessianBound { entries }
    }

    /// Frobenius bound of the Hessian over the cube `c + [-h/2, h/2]^n`.
    fn over_cell(&self, c: &[f64], half: f64) -> f64 {
        self.entries
            .iter()
            .map(|list| {
                let b: f64 = list.iter().map(|(beta, p)| p.eval(c).abs() * half.powi(beta.iter().sum::<u32>() as i32)).sum();
                b * b
            })
            .sum::<f64>()
            .sqrt()
    }
}

fn grad_norm(grad: &[Polynomial], x: &[f64]) -> f64 {
    grad.iter().map(|g| g.eval(x).powi(2)).sum::<f64>().sqrt()
}

/// Gauss–Newton on `∇u = 0` with an SVD pseudo-inverse; tolerates degenerate zeros.
pub fn refine_critical_point(u: &Polynomial, start: &[f64], max_iter: usize) -> Option<Vec<f64>> {
    let n = u.n();
    let grad = u.gradient();
    let hess = u.hessian();
    let scale = u.max_abs_coefficient().max(1e-300);
    let mut x = DVector::from_column_slice(start);
    for _ in 0..max_iter {
        let xs = x.as_slice();
        let g = DVector::from_iterator(n, grad.iter().map(|p| p.eval(xs)));
        if g.norm() <= 1e-13 * scale {
            return Some(x.as_slice().to_vec());
        }
        let h = DMatrix::from_fn(n, n, |i, j| hess[i][j].eval(xs));
        let step = h.svd(true, true).solve(&g, 1e-14 * scale).ok()?;
        if !step.iter().all(|v| v.is_finite()) {
            return None;
        }
        x -= step;
    }
    let g = grad_norm(&grad, x.as_slice());
    (g <= 1e-10 * scale).then(|| x.as_slice().to_vec())
}

/// Certified subdivision of `[lo, hi]` down to cells of width ≤ `h`. A cell is
/// discarded when `|∇u(center)| > L · w · √n`, with `L` bounding the Hessian on it.
pub fn critical_set(u: &HarmonicPolynomial, lo: &[f64], hi: &[f64], h: f64) -> Result<CriticalSetReport> {
    let n = u.n();
    if lo.len() != n || hi.len() != n {
        return Err(Error::Domain("box corners must have n coordinates".into()));
    }
    if !(h > 0.0) {
        return Err(Error::Domain(format!("grid pitch must be > 0, got {h}")));
    }
    if lo.iter().zip(hi).any(|(a, b)| !(b > a)) {
        return Err(Error::Domain("box must have positive extent".into()));
    }
    let grad = u.gradient();
    let bound = HessianBound::new(u);
    let extent = lo.iter().zip(hi).fold(0.0f64, |m, (a, b)| m.max(b - a));
    // Start from a cubical cover whose subdivision reaches width ≤ h exactly.
    let levels = (extent / h).log2().ceil().max(0.0) as i32;
    let pitch = extent / 2f64.powi(levels);
    let root_width = extent;
    let mut frontier = vec![lo.iter().map(|a| a + 0.5 * root_width).collect::<Vec<f64>>()];
    let mut width = root_width;
    let sqrt_n = (n as f64).sqrt();
    loop {
        frontier = frontier
            .into_par_iter()
            .filter(|c| {
                // Drop cells lying completely outside the box.
                let inside = c.iter().zip(lo.iter().zip(hi)).all(|(x, (a, b))| x + 0.5 * width > *a && x - 0.5 * width < *b);
                inside && grad_norm(&grad, c) <= bound.over_cell(c, 0.5 * width) * width * sqrt_n
            })
            .collect();
        if width <= pitch * (1.0 + 1e-12) {
            break;
        }
        let child = 0.5 * width;
        frontier = frontier
            .into_par_iter()
            .flat_map_iter(|c| {
                (0..1usize << n).map(move |mask| (0..n).map(|i| c[i] + if mask >> i & 1 == 1 { 0.25 } else { -0.25 } * width).collect::<Vec<f64>>())
            })
            .collect();
        width = child;
    }
    frontier.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let poly = u.poly();
    let refined: Vec<Option<Vec<f64>>> = frontier.par_iter().map(|c| refine_critical_point(poly, c, 200)).collect();
    let unresolved = frontier
        .iter()
        .zip(&refined)
        .filter(|(_, r)| r.is_none())
        .map(|(c, _)| Cell { center: c.clone(), width })
        .collect();
    // Degenerate zeros converge slowly, so merge at a fraction of the pitch.
    let mut points = dedup_points(refined.into_iter().flatten().collect(), 0.25 * width);
    points.retain(|p| p.iter().zip(lo.iter().zip(hi)).all(|(x, (a, b))| *x >= *a - width && *x <= *b + width));
    let cells = frontier.into_iter().map(|center| Cell { center, width }).collect();
    Ok(CriticalSetReport { cells, points, unresolved, pitch: width })
}

fn dedup_points(mut pts: Vec<Vec<f64>>, tol: f64) -> Vec<Vec<f64>> {
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut index: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for p in pts {
        let key: Vec<i64> = p.iter().map(|x| (x / tol).floor() as i64).collect();
        let near = neighbor_keys(&key).into_iter().filter_map(|k| index.get(&k)).flatten().any(|&i| dist(&out[i], &p) <= tol);
        if !near {
            index.entry(key).or_default().push(out.len());
            out.push(p);
        }
    }
    out
}

fn neighbor_keys(key: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::with_capacity(key.len())];
    for &k in key {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<i64>| {
                (-1..=1).map(move |d| {
                    let mut v = prefix.clone();
                    v.push(k + d);
                    v
                })
            })
            .collect();
    }
    out
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TubeVolume {
    pub r: f64,
    pub volume: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinkowskiReport {
    pub volumes: Vec<TubeVolume>,
    /// Slope of `ln Vol` against `ln r` by least squares.
    pub exponent: f64,
    pub detection_pitch: f64,
    pub critical_points: usize,
}

/// Cell-counting estimate of `Vol(T_r(Cr(u)) ∩ B_{1/2})` at pitch `r/8`,
/// using refined critical points (or candidate cells where refinement fails).
pub fn minkowski_report(u: &HarmonicPolynomial, r_list: &[f64]) -> Result<MinkowskiReport> {
    if r_list.is_empty() || r_list.iter().any(|r| !(*r > 0.0 && *r < 0.5)) {
        return Err(Error::Domain("radii must lie in (0, 1/2)".into()));
    }
    let n = u.n();
    let r_min = r_list.iter().cloned().fold(f64::INFINITY, f64::min);
    let r_max = r_list.iter().cloned().fold(0.0, f64::max);
    let lo = vec![-0.5 - r_max; n];
    let hi = vec![0.5 + r_max; n];
    let crit = critical_set(u, &lo, &hi, r_min / 8.0)?;
    // Candidate cells whose refinement did not converge still count as critical.
    let mut anchors = crit.points.clone();
    anchors.extend(crit.unresolved.iter().map(|c| c.center.clone()));
    let volumes: Vec<TubeVolume> = r_list
        .par_iter()
        .map(|&r| TubeVolume { r, volume: tube_volume(&anchors, n, r) })
        .collect();
    let exponent = if volumes.len() >= 2 && volumes.iter().all(|v| v.volume > 0.0) {
        let xs: Vec<f64> = volumes.iter().map(|v| v.r.ln()).collect();
        let ys: Vec<f64> = volumes.iter().map(|v| v.volume.ln()).collect();
        let mx = xs.iter().sum::<f64>() / xs.len() as f64;
        let my = ys.iter().sum::<f64>() / ys.len() as f64;
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        sxy / sxx
    } else {
        f64::NAN
    };
    Ok(MinkowskiReport { volumes, exponent, detection_pitch: crit.pitch, critical_points: crit.points.len() })
}

/// Volume of `{y ∈ B_{1/2} : dist(y, anchors) ≤ r}` by counting cells of width `r/8`.
fn tube_volume(anchors: &[Vec<f64>], n: usize, r: f64) -> f64 {
    if anchors.is_empty() {
        return 0.0;
    }
    let pitch = r / 8.0;
    let mut buckets: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for (i, a) in anchors.iter().enumerate() {
        buckets.entry(a.iter().map(|x| (x / r).floor() as i64).collect()).or_default().push(i);
    }
    // Grid cells centered at (k + 1/2)·pitch, restricted to the anchors' r-neighborhood.
    let mut cells: HashSet<Vec<i64>> = HashSet::new();
    let reach = (r / pitch).ceil() as i64 + 1;
    let bases: HashSet<Vec<i64>> = anchors.iter().map(|a| a.iter().map(|x| (x / pitch).floor() as i64).collect()).collect();
    for base in bases {
        let mut stack = vec![Vec::with_capacity(n)];
        for &b in &base {
            stack = stack
                .into_iter()
                .flat_map(|prefix: Vec<i64>| {
                    (-reach..=reach).map(move |d| {
                        let mut v = prefix.clone();
                        v.push(b + d);
                        v
                    })
                })
                .collect();
        }
        cells.extend(stack);
    }
    let count = cells
        .par_iter()
        .filter(|key| {
            let c: Vec<f64> = key.iter().map(|&k| (k as f64 + 0.5) * pitch).collect();
            if c.iter().map(|x| x * x).sum::<f64>() > 0.25 {
                return false;
            }
            let bkey: Vec<i64> = c.iter().map(|x| (x / r).floor() as i64).collect();
            neighbor_keys(&bkey).into_iter().filter_map(|k| buckets.get(&k)).flatten().any(|&i| dist(&anchors[i], &c) <= r)
        })
        .count();
    count as f64 * pitch.powi(n as i32)
}

/// `Vol({|(y₁, y₂)| ≤ r} ∩ B_{1/2})` in ℝ³: tube around a line through the center.
pub fn cylinder_ball_volume(r: f64) -> f64 {
    4.0 * std::f64::consts::PI / 3.0 * (0.25f64.powf(1.5) - (0.25 - r * r).powf(1.5))
}

/// Volume of a ball of radius `r` in ℝⁿ.
pub fn ball_volume(n: usize, r: f64) -> f64 {
    unit_sphere_area(n as u32) / n as f64 * r.powi(n as i32)
}
