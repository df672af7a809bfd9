use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{
    BoundSettings, FrequencySettings, GridValue, ManifoldSettings, PolynomialSource, ProfileSettings, WarpingValue,
    WitnessSettings,
};

/// Sharp p-Laplacian spectral gaps, model-manifold potential theory and
/// frequency analysis of harmonic polynomials.
///
/// Lists accept comma-separated numbers and `start:stop:count` ranges.
#[derive(Debug, Parser)]
#[command(name = "pspectral", version)]
pub struct Cli {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output format: csv or json.
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Write results here instead of stdout.
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads (capped by PSPECTRAL_THREADS).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for the random polynomial corpus.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep the sharp gap λ̄(n, k, d) over a parameter grid.
    Bound(BoundArgs),
    /// Model-ODE profiles: first derivative zero b, diameter δ and maximum m.
    Profile(ProfileArgs),
    /// Potential theory on a rotationally symmetric model manifold.
    Manifold(ManifoldArgs),
    /// Frequency, symmetry and critical-set analysis of a harmonic polynomial.
    Frequency(FrequencyArgs),
    /// Warped products showing that the gap bound is sharp.
    Witness(WitnessArgs),
}

fn grid(s: Option<String>) -> Option<GridValue> {
    s.map(GridValue::Text)
}

#[derive(Debug, Args, Default)]
pub struct BoundArgs {
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<String>,
    #[arg(long)]
    pub d: Option<String>,
}

impl From<BoundArgs> for BoundSettings {
    fn from(a: BoundArgs) -> Self {
        BoundSettings { p: grid(a.p), n: grid(a.n), k: grid(a.k), d: grid(a.d) }
    }
}

#[derive(Debug, Args, Default)]
pub struct ProfileArgs {
    /// flat0, flat-radial, hyp-sinh, hyp-exp or hyp-cosh.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub n: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<f64>,
    #[arg(long)]
    pub lambda: Option<String>,
    /// Start points.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Relative tolerance of the integrator.
    #[arg(long)]
    pub rtol: Option<f64>,
    /// Also write the sampled trajectory (single-cell runs only).
    #[arg(long)]
    pub trajectory: Option<PathBuf>,
}

impl From<ProfileArgs> for ProfileSettings {
    fn from(a: ProfileArgs) -> Self {
        ProfileSettings {
            family: a.family,
            p: a.p,
            n: a.n,
            k: a.k,
            lambda: grid(a.lambda),
            a: grid(a.a),
            t_max: a.t_max,
            rtol: a.rtol,
            trajectory: a.trajectory,
        }
    }
}

#[derive(Debug, Args, Default)]
pub struct ManifoldArgs {
    /// euclid, hyperbolic or exp-surface; tables only via config.
    #[arg(long)]
    pub warping: Option<String>,
    /// Curvature of the hyperbolic warping.
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<f64>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub p: Option<f64>,
    #[command(subcommand)]
    pub action: Option<ManifoldAction>,
}

#[derive(Debug, Subcommand)]
pub enum ManifoldAction {
    /// Capacity of the condenser between radii r1 < r2, with its bounds.
    Capacity {
        #[arg(long)]
        r1: Option<f64>,
        #[arg(long)]
        r2: Option<f64>,
    },
    /// Evans potential and capacity of its sublevel set.
    Evans {
        #[arg(long)]
        r_bar: Option<f64>,
        #[arg(long)]
        t: Option<f64>,
    },
    /// p-energy of the radial cutoff between r1 and r2.
    Cutoff {
        #[arg(long)]
        r1: Option<f64>,
        #[arg(long)]
        r2: Option<f64>,
    },
    /// Parabolicity verdict.
    Parabolic,
    /// Annulus condition for a radial density t^s e^{ct}.
    Stokes {
        /// a (annuli [R, 2R]) or v (annuli [R, R+gap]).
        #[arg(long)]
        mode: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        density_exponent: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        density_rate: Option<f64>,
        #[arg(long)]
        gap: Option<f64>,
        #[arg(long)]
        radii: Option<String>,
    },
}

impl From<ManifoldArgs> for ManifoldSettings {
    fn from(a: ManifoldArgs) -> Self {
        let mut s = ManifoldSettings { warping: a.warping.map(WarpingValue::Name), k: a.k, n: a.n, p: a.p, ..Default::default() };
        match a.action {
            None => {}
            Some(ManifoldAction::Capacity { r1, r2 }) => {
                s.action = Some("capacity".into());
                (s.r1, s.r2) = (r1, r2);
            }
            Some(ManifoldAction::Evans { r_bar, t }) => {
                s.action = Some("evans".into());
                (s.r_bar, s.t) = (r_bar, t);
            }
            Some(ManifoldAction::Cutoff { r1, r2 }) => {
                s.action = Some("cutoff".into());
                (s.r1, s.r2) = (r1, r2);
            }
            Some(ManifoldAction::Parabolic) => s.action = Some("parabolic".into()),
            Some(ManifoldAction::Stokes { mode, density_exponent, density_rate, gap, radii }) => {
                s.action = Some("stokes".into());
                s.mode = mode;
                s.density_exponent = density_exponent;
                s.density_rate = density_rate;
                s.gap = gap;
                s.radii = grid(radii);
            }
        }
        s
    }
}

#[derive(Debug, Args, Default)]
pub struct FrequencyArgs {
    /// Polynomial JSON file: {"n": 2, "coefficients": {"2,0": 1.0, "0,2": -1.0}}.
    #[arg(long)]
    pub poly: Option<PathBuf>,
    /// Use entry i of the seeded random corpus instead of a file.
    #[arg(long)]
    pub corpus_index: Option<usize>,
    /// Center point (defaults to the origin).
    #[arg(long, allow_hyphen_values = true)]
    pub center: Option<String>,
    #[command(subcommand)]
    pub action: Option<FrequencyAction>,
}

#[derive(Debug, Subcommand)]
pub enum FrequencyAction {
    /// H, D, N, H̄, N̄ at one radius.
    Eval {
        #[arg(long)]
        r: Option<f64>,
    },
    /// Frequency curve over radii with monotonicity and doubling diagnostics.
    Curve {
        #[arg(long)]
        radii: Option<String>,
    },
    /// Distance of the blow-up at scale r from homogeneous harmonic polynomials.
    Symmetry {
        #[arg(long)]
        r: Option<f64>,
    },
    /// Effective-stratum membership over scales r γ^{-j} ≤ 1.
    Stratum {
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        gamma: Option<f64>,
    },
    /// Certified enclosure of the critical set in a cube around the center.
    Critical {
        #[arg(long)]
        h: Option<f64>,
        #[arg(long)]
        half_width: Option<f64>,
    },
    /// Tubular volumes of the critical set inside B_{1/2} and their scaling exponent.
    Minkowski {
        #[arg(long)]
        radii: Option<String>,
    },
    /// Transform a solution of div(a∇u) = 0 into a harmonic polynomial.
    Normalize {
        /// Rows separated by ';', entries by ','.
        #[arg(long)]
        matrix: Option<String>,
    },
}

impl From<FrequencyArgs> for FrequencySettings {
    fn from(a: FrequencyArgs) -> Self {
        let mut s = FrequencySettings {
            polynomial: a.poly.map(PolynomialSource::Path),
            corpus_index: a.corpus_index,
            center: grid(a.center),
            ..Default::default()
        };
        let name = |x: &str| Some(x.to_owned());
        match a.action {
            None => {}
            Some(FrequencyAction::Eval { r }) => {
                s.action = name("eval");
                s.r = r;
            }
            Some(FrequencyAction::Curve { radii }) => {
                s.action = name("curve");
                s.radii = grid(radii);
            }
            Some(FrequencyAction::Symmetry { r }) => {
                s.action = name("symmetry");
                s.r = r;
            }
            Some(FrequencyAction::Stratum { eta, r, k, gamma }) => {
                s.action = name("stratum");
                (s.eta, s.r, s.k, s.gamma) = (eta, r, k, gamma);
            }
            Some(FrequencyAction::Critical { h, half_width }) => {
                s.action = name("critical");
                (s.h, s.half_width) = (h, half_width);
            }
            Some(FrequencyAction::Minkowski { radii }) => {
                s.action = name("minkowski");
                s.radii = grid(radii);
            }
            Some(FrequencyAction::Normalize { matrix }) => {
                s.action = name("normalize");
                s.matrix = matrix;
            }
        }
        s
    }
}

#[derive(Debug, Args, Default)]
pub struct WitnessArgs {
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<f64>,
    #[arg(long)]
    pub d: Option<f64>,
    /// Indices of the warped-product sequence.
    #[arg(long)]
    pub i: Option<String>,
}

impl From<WitnessArgs> for WitnessSettings {
    fn from(a: WitnessArgs) -> Self {
        WitnessSettings { p: a.p, n: a.n, k: a.k, d: a.d, i: grid(a.i) }
    }
}
