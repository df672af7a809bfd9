use std::path::PathBuf;

use anyhow::{anyhow, Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use pspectral::eigen_bounds::{sharp_gap_report, sharpness_witness, GapReport};
use pspectral::emit::{self, Format};
use pspectral::frequency::{self, corpus, polynomial::Polynomial, HarmonicPolynomial};
use pspectral::model_manifold::{self as mm, StokesMode, Warping, WarpingSpec};
use pspectral::ode::Tolerances;
use pspectral::ode_model::{profile_with, ModelFamily, ModelProblem};

use crate::config::{
    BoundSettings, FrequencySettings, ManifoldSettings, PolynomialSource, ProfileSettings, WarpingValue, WitnessSettings,
};

/// Input problems (exit code 2) as opposed to numerical failures.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn missing(what: &str) -> anyhow::Error {
    anyhow!(ConfigError(format!("missing required setting `{what}`")))
}

fn require<T>(v: Option<T>, what: &str) -> Result<T> {
    v.ok_or_else(|| missing(what))
}

fn config_err(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(ConfigError(msg.into()))
}

/// Rendered output plus optional side files.
pub struct Rendered {
    pub body: String,
    pub side_files: Vec<(PathBuf, String)>,
}

impl From<String> for Rendered {
    fn from(body: String) -> Self {
        Rendered { body, side_files: Vec::new() }
    }
}

fn render<T: Serialize>(format: Format, value: &T, csv: impl FnOnce() -> pspectral::Result<String>) -> Result<Rendered> {
    Ok(match format {
        Format::Json => emit::to_json(value)?,
        Format::Csv => csv()?,
    }
    .into())
}

/// Runs cells in parallel and returns results in input order; the first
/// failing cell (in input order) aborts with its parameters attached.
fn ordered<C, T, F>(cells: &[C], f: F) -> Result<Vec<T>>
where
    C: Sync + std::fmt::Debug,
    T: Send,
    F: Fn(&C) -> pspectral::Result<T> + Sync,
{
    let results: Vec<pspectral::Result<T>> = cells.par_iter().map(&f).collect();
    let mut out = Vec::with_capacity(results.len());
    for (cell, r) in cells.iter().zip(results) {
        out.push(r.with_context(|| format!("cell {cell:?}"))?);
    }
    Ok(out)
}

pub fn bound(s: BoundSettings, format: Format) -> Result<Rendered> {
    let p = s.p.map(|g| g.values()).transpose()?.unwrap_or_else(|| vec![2.0]);
    let n = s.n.map(|g| g.values()).transpose()?.unwrap_or_else(|| vec![2.0]);
    let k = require(s.k, "bound.k")?.values()?;
    let d = require(s.d, "bound.d")?.values()?;
    let mut cells = Vec::with_capacity(p.len() * n.len() * k.len() * d.len());
    for &pi in &p {
        for &ni in &n {
            for &ki in &k {
                for &di in &d {
                    cells.push((pi, ni, ki, di));
                }
            }
        }
    }
    let rows: Vec<GapReport> = ordered(&cells, |&(p, n, k, d)| sharp_gap_report(p, n, k, d))?;
    render(format, &rows, || Ok(emit::gap_table_csv(&rows)))
}

pub fn profile(s: ProfileSettings, format: Format) -> Result<Rendered> {
    let family: ModelFamily = require(s.family, "profile.family")?.parse()?;
    let p = require(s.p, "profile.p")?;
    let n = s.n.unwrap_or(1.0);
    let k = s.k.unwrap_or(0.0);
    let lambda = require(s.lambda, "profile.lambda")?.values()?;
    let a = s.a.map(|g| g.values()).transpose()?.unwrap_or_else(|| vec![0.0]);
    let mut tol = Tolerances::default();
    if let Some(r) = s.rtol {
        if !(r > 0.0) {
            return Err(config_err("profile.rtol must be > 0"));
        }
        tol.rtol = r;
        tol.atol = 1e-2 * r;
    }
    let cells: Vec<(f64, f64)> = lambda.iter().flat_map(|&l| a.iter().map(move |&ai| (l, ai))).collect();
    if s.trajectory.is_some() && cells.len() != 1 {
        return Err(config_err("--trajectory needs exactly one (lambda, a) cell"));
    }
    let results = ordered(&cells, |&(l, ai)| {
        let problem = ModelProblem::new(p, n, k, l, family, ai)?;
        profile_with(&problem, s.t_max, tol)
    })?;
    #[derive(Serialize)]
    struct Row<'a> {
        family: &'a str,
        p: f64,
        n: f64,
        k: f64,
        lambda: f64,
        a: f64,
        b: Option<f64>,
        delta: Option<f64>,
        m: Option<f64>,
        status: pspectral::ode_model::ProfileStatus,
    }
    let rows: Vec<Row> = results
        .iter()
        .zip(&cells)
        .map(|(r, &(l, ai))| Row { family: family.name(), p, n, k, lambda: l, a: ai, b: r.b, delta: r.delta, m: r.m, status: r.status })
        .collect();
    let mut out = render(format, &rows, || Ok(emit::profile_table_csv(&results)))?;
    if let Some(path) = s.trajectory {
        out.side_files.push((path, emit::trajectory_csv(&results[0].trajectory)));
    }
    Ok(out)
}

fn warping(s: &ManifoldSettings) -> Result<Warping> {
    let spec = match require(s.warping.clone(), "manifold.warping")? {
        WarpingValue::Spec(spec) => spec,
        WarpingValue::Name(name) => match name.replace('_', "-").as_str() {
            "euclid" => WarpingSpec::Euclid,
            "hyperbolic" => WarpingSpec::Hyperbolic { k: require(s.k, "manifold.k")? },
            "exp-surface" => WarpingSpec::ExpSurface,
            other => return Err(config_err(format!("unknown warping {other:?}; use euclid, hyperbolic or exp-surface"))),
        },
    };
    let n = match (&spec, s.n) {
        (_, Some(n)) => n,
        (WarpingSpec::ExpSurface, None) => 2,
        _ => return Err(missing("manifold.n")),
    };
    Ok(spec.build(n)?)
}

pub fn manifold(s: ManifoldSettings, format: Format) -> Result<Rendered> {
    let w = warping(&s)?;
    let p = require(s.p, "manifold.p")?;
    let action = require(s.action.clone(), "manifold.action")?;
    match action.as_str() {
        "capacity" => {
            let rep = mm::capacity(&w, p, require(s.r1, "r1")?, require(s.r2, "r2")?)?;
            render(format, &rep, || emit::record_csv(&rep))
        }
        "evans" => {
            let rep = mm::evans(&w, p, require(s.r_bar, "r_bar")?, require(s.t, "t")?)?;
            render(format, &rep, || emit::record_csv(&rep))
        }
        "cutoff" => {
            let rep = mm::cutoff_energy(&w, p, require(s.r1, "r1")?, require(s.r2, "r2")?)?;
            render(format, &rep, || emit::record_csv(&rep))
        }
        "parabolic" => {
            let rep = mm::is_p_parabolic(&w, p)?;
            #[derive(Serialize)]
            struct Flat {
                verdict: mm::Parabolicity,
                early_slope: f64,
                late_slope: f64,
            }
            let flat = Flat { verdict: rep.verdict, early_slope: rep.early_slope, late_slope: rep.late_slope };
            render(format, &rep, || emit::record_csv(&flat))
        }
        "stokes" => {
            let mode = match s.mode.as_deref().unwrap_or("a") {
                "a" | "a_mp" | "area" => StokesMode::AMp,
                "v" | "v_mp" | "volume" => StokesMode::VMp,
                other => return Err(config_err(format!("unknown Stokes mode {other:?}; use a or v"))),
            };
            let (s_exp, rate, gap) = (s.density_exponent.unwrap_or(0.0), s.density_rate.unwrap_or(0.0), s.gap.unwrap_or(1.0));
            let radii = require(s.radii, "radii")?.values()?;
            let rep = mm::stokes_condition(&w, p, |t| t.powf(s_exp) * (rate * t).exp(), mode, |_| gap, &radii)?;
            #[derive(Serialize)]
            struct Row {
                r: f64,
                q: f64,
            }
            let rows: Vec<Row> = rep.radii.iter().zip(&rep.q).map(|(&r, &q)| Row { r, q }).collect();
            render(format, &rep, || emit::records_csv(&rows))
        }
        other => Err(config_err(format!("unknown manifold action {other:?}"))),
    }
}

fn load_polynomial(s: &FrequencySettings, seed: u64) -> Result<HarmonicPolynomial> {
    match (&s.polynomial, s.corpus_index) {
        (Some(_), Some(_)) => Err(config_err("give either a polynomial or a corpus index, not both")),
        (None, Some(i)) => Ok(corpus::corpus(seed, i + 1, 5).pop().expect("nonempty corpus")),
        (Some(PolynomialSource::Inline(json)), None) => {
            Ok(HarmonicPolynomial::new(Polynomial::try_from(json.clone())?)?)
        }
        (Some(PolynomialSource::Path(path)), None) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading polynomial {}", path.display()))?;
            let poly: Polynomial = serde_json::from_str(&text)
                .map_err(|e| config_err(format!("parsing polynomial {}: {e}", path.display())))?;
            Ok(HarmonicPolynomial::new(poly)?)
        }
        (None, None) => Err(missing("frequency.polynomial")),
    }
}

fn parse_matrix(text: &str) -> Result<Vec<Vec<f64>>> {
    text.split(';')
        .map(|row| row.split(',').map(|x| x.trim().parse::<f64>().map_err(|e| config_err(format!("bad matrix entry {x:?}: {e}")))).collect())
        .collect()
}

pub fn frequency(s: FrequencySettings, seed: u64, format: Format) -> Result<Rendered> {
    let u = load_polynomial(&s, seed)?;
    let n = u.n();
    let center = match &s.center {
        Some(g) => g.values()?,
        None => vec![0.0; n],
    };
    if center.len() != n {
        return Err(config_err(format!("center has {} coordinates but the polynomial has n = {n}", center.len())));
    }
    let action = require(s.action.clone(), "frequency.action")?;
    match action.as_str() {
        "eval" => {
            let rep = frequency::frequency_eval(&u, &center, require(s.r, "r")?)?;
            render(format, &rep, || emit::record_csv(&rep))
        }
        "curve" => {
            let radii = require(s.radii, "radii")?.values()?;
            let curve = frequency::frequency_curve(&u, &center, &radii)?;
            render(format, &curve, || Ok(emit::frequency_curve_csv(&curve)))
        }
        "symmetry" => {
            let rep = frequency::symmetry_measure(&u, &center, require(s.r, "r")?)?;
            render(format, &rep, || emit::records_csv(&rep.per_degree))
        }
        "stratum" => {
            let rep = frequency::stratum_membership(
                &u,
                &center,
                require(s.eta, "eta")?,
                require(s.r, "r")?,
                s.k.unwrap_or(0),
                s.gamma.unwrap_or(0.5),
            )?;
            render(format, &rep, || emit::records_csv(&rep.trace))
        }
        "critical" => {
            let hw = s.half_width.unwrap_or(1.0);
            let lo: Vec<f64> = center.iter().map(|c| c - hw).collect();
            let hi: Vec<f64> = center.iter().map(|c| c + hw).collect();
            let rep = frequency::critical_set(&u, &lo, &hi, require(s.h, "h")?)?;
            let header: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
            let mut csv = header.join(",");
            csv.push('\n');
            for p in &rep.points {
                csv.push_str(&p.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(","));
                csv.push('\n');
            }
            render(format, &rep, || Ok(csv))
        }
        "minkowski" => {
            let radii = require(s.radii, "radii")?.values()?;
            let rep = frequency::minkowski_report(&u, &radii)?;
            render(format, &rep, || Ok(emit::minkowski_csv(&rep)))
        }
        "normalize" => {
            let a = parse_matrix(&require(s.matrix.clone(), "matrix")?)?;
            let rep = frequency::affine_normalize(&a, &center, u.poly())?;
            if format == Format::Csv {
                return Err(config_err("normalize output is JSON only"));
            }
            render(format, &rep, || unreachable!())
        }
        other => Err(config_err(format!("unknown frequency action {other:?}"))),
    }
}

pub fn witness(s: WitnessSettings, format: Format) -> Result<Rendered> {
    let p = s.p.unwrap_or(2.0);
    let n = require(s.n, "witness.n")?;
    let k = require(s.k, "witness.k")?;
    let d = require(s.d, "witness.d")?;
    let idx = require(s.i, "witness.i")?.values()?;
    let idx: Vec<u32> = idx
        .iter()
        .map(|&x| if x >= 1.0 && x.fract() == 0.0 && x <= u32::MAX as f64 { Ok(x as u32) } else { Err(config_err(format!("witness index {x} is not a positive integer"))) })
        .collect::<Result<_>>()?;
    let rows = ordered(&idx, |&i| sharpness_witness(p, n, k, d, i))?;
    render(format, &rows, || emit::records_csv(&rows))
}
