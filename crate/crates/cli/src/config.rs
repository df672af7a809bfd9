//! TOML run configuration. Every field is optional; command-line flags win.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use pspectral::frequency::polynomial::PolynomialJson;
use pspectral::model_manifold::WarpingSpec;

/// A list of reals written as numbers, or as a string of comma-separated
/// items where each item is a number or a `start:stop:count` linspace.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum GridValue {
    One(f64),
    Many(Vec<f64>),
    Text(String),
}

impl GridValue {
    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            GridValue::One(x) => Ok(vec![*x]),
            GridValue::Many(v) => Ok(v.clone()),
            GridValue::Text(s) => parse_grid(s),
        }
    }
}

pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [x] => out.push(x.parse::<f64>().with_context(|| format!("bad number {x:?}"))?),
            [a, b, c] => {
                let a: f64 = a.parse().with_context(|| format!("bad range start {a:?}"))?;
                let b: f64 = b.parse().with_context(|| format!("bad range stop {b:?}"))?;
                let c: usize = c.parse().with_context(|| format!("bad range count {c:?}"))?;
                match c {
                    0 => bail!("range {item:?} has zero points"),
                    1 => out.push(a),
                    _ => out.extend((0..c).map(|i| a + (b - a) * i as f64 / (c - 1) as f64)),
                }
            }
            _ => bail!("cannot parse grid item {item:?}; use a number or start:stop:count"),
        }
    }
    if out.is_empty() {
        bail!("grid {s:?} is empty");
    }
    Ok(out)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum WarpingValue {
    Name(String),
    Spec(WarpingSpec),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PolynomialSource {
    Path(PathBuf),
    Inline(PolynomialJson),
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundSettings {
    pub p: Option<GridValue>,
    pub n: Option<GridValue>,
    pub k: Option<GridValue>,
    pub d: Option<GridValue>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSettings {
    pub family: Option<String>,
    pub p: Option<f64>,
    pub n: Option<f64>,
    pub k: Option<f64>,
    pub lambda: Option<GridValue>,
    pub a: Option<GridValue>,
    pub t_max: Option<f64>,
    pub rtol: Option<f64>,
    pub trajectory: Option<PathBuf>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldSettings {
    pub warping: Option<WarpingValue>,
    pub k: Option<f64>,
    pub n: Option<u32>,
    pub p: Option<f64>,
    pub action: Option<String>,
    pub r1: Option<f64>,
    pub r2: Option<f64>,
    pub r_bar: Option<f64>,
    pub t: Option<f64>,
    pub mode: Option<String>,
    pub density_exponent: Option<f64>,
    pub density_rate: Option<f64>,
    pub gap: Option<f64>,
    pub radii: Option<GridValue>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencySettings {
    pub polynomial: Option<PolynomialSource>,
    pub corpus_index: Option<usize>,
    pub center: Option<GridValue>,
    pub action: Option<String>,
    pub radii: Option<GridValue>,
    pub r: Option<f64>,
    pub eta: Option<f64>,
    pub k: Option<usize>,
    pub gamma: Option<f64>,
    pub h: Option<f64>,
    pub half_width: Option<f64>,
    pub matrix: Option<String>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessSettings {
    pub p: Option<f64>,
    pub n: Option<u32>,
    pub k: Option<f64>,
    pub d: Option<f64>,
    pub i: Option<GridValue>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<String>,
    pub format: Option<String>,
    pub output: Option<PathBuf>,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub bound: BoundSettings,
    #[serde(default)]
    pub profile: ProfileSettings,
    #[serde(default)]
    pub manifold: ManifoldSettings,
    #[serde(default)]
    pub frequency: FrequencySettings,
    #[serde(default)]
    pub witness: WitnessSettings,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Field-wise `flag.or(config)`.
pub trait Overlay {
    fn overlay(self, base: Self) -> Self;
}

macro_rules! overlay_fields {
    ($ty:ty { $($f:ident),* $(,)? }) => {
        impl Overlay for $ty {
            fn overlay(self, base: Self) -> Self {
                Self { $($f: self.$f.or(base.$f)),* }
            }
        }
    };
}

overlay_fields!(BoundSettings { p, n, k, d });
overlay_fields!(ProfileSettings { family, p, n, k, lambda, a, t_max, rtol, trajectory });
overlay_fields!(ManifoldSettings {
    warping, k, n, p, action, r1, r2, r_bar, t, mode, density_exponent, density_rate, gap, radii
});
overlay_fields!(FrequencySettings {
    polynomial, corpus_index, center, action, radii, r, eta, k, gamma, h, half_width, matrix
});
overlay_fields!(WitnessSettings { p, n, k, d, i });

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("1, 2.5").unwrap(), vec![1.0, 2.5]);
        assert_eq!(parse_grid("0:1:3,5").unwrap(), vec![0.0, 0.5, 1.0, 5.0]);
        assert!(parse_grid("").is_err());
        assert!(parse_grid("1:2").is_err());
    }

    #[test]
    fn config_sections() {
        let cfg: RunConfig = toml::from_str(
            r#"
            command = "bound"
            format = "json"
            [bound]
            p = 2.0
            k = [0.0, -1.0]
            d = "1:2:3"
            [manifold]
            warping = { kind = "hyperbolic", k = -1.0 }
            [frequency]
            polynomial = { n = 2, coefficients = { "2,0" = 1.0, "0,2" = -1.0 } }
            "#,
        )
        .unwrap();
        assert_eq!(cfg.bound.d.unwrap().values().unwrap().len(), 3);
        assert!(matches!(cfg.manifold.warping, Some(WarpingValue::Spec(WarpingSpec::Hyperbolic { .. }))));
        assert!(matches!(cfg.frequency.polynomial, Some(PolynomialSource::Inline(_))));
        assert!(toml::from_str::<RunConfig>("bogus = 1").is_err());
    }
}
