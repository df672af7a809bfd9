use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Real polynomial in `n` variables stored as a sparse map from exponent
/// vectors to coefficients. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolynomialJson", into = "PolynomialJson")]
pub struct Polynomial {
    n: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

/// Wire format: `{"n": 2, "coefficients": {"2,0": 1.0, "0,2": -1.0}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolynomialJson {
    pub n: usize,
    pub coefficients: BTreeMap<String, f64>,
}

impl TryFrom<PolynomialJson> for Polynomial {
    type Error = Error;

    fn try_from(json: PolynomialJson) -> Result<Self> {
        let mut terms = Vec::with_capacity(json.coefficients.len());
        for (key, c) in json.coefficients {
            let exps = key
                .split(',')
                .map(|s| s.trim().parse::<u32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::InvalidPolynomial(format!("bad multi-index {key:?}: {e}")))?;
            terms.push((exps, c));
        }
        Polynomial::from_terms(json.n, terms)
    }
}

impl From<Polynomial> for PolynomialJson {
    fn from(p: Polynomial) -> Self {
        let coefficients = p
            .terms
            .iter()
            .map(|(e, &c)| (e.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","), c))
            .collect();
        PolynomialJson { n: p.n, coefficients }
    }
}

fn factorial(k: u32) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

impl Polynomial {
    pub fn zero(n: usize) -> Self {
        Polynomial { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        let mut p = Self::zero(n);
        p.add_term(vec![0; n], c);
        p
    }

    /// The coordinate function `x_i`.
    pub fn variable(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        let mut p = Self::zero(n);
        p.add_term(e, 1.0);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Vec<u32>, f64)>>(n: usize, terms: I) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPolynomial("dimension must be ≥ 1".into()));
        }
        let mut p = Self::zero(n);
        for (e, c) in terms {
            if e.len() != n {
                return Err(Error::InvalidPolynomial(format!("multi-index {e:?} has length {} but n = {n}", e.len())));
            }
            if !c.is_finite() {
                return Err(Error::InvalidPolynomial(format!("coefficient of {e:?} is not finite")));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, e: Vec<u32>, c: f64) {
        if c == 0.0 {
            return;
        }
        let entry = self.terms.entry(e);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let v = *o.get() + c;
                if v == 0.0 {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, f64)> {
        self.terms.iter().map(|(e, &c)| (e, c))
    }

    pub fn coefficient(&self, e: &[u32]) -> f64 {
        self.terms.get(e).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; 0 for constants and for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum::<u32>()).max().unwrap_or(0)
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.n);
        let deg = self.degree() as usize;
        // Power table avoids repeated powi calls.
        let mut pows = vec![1.0; self.n * (deg + 1)];
        for (i, &xi) in x.iter().enumerate() {
            for k in 1..=deg {
                pows[i * (deg + 1) + k] = pows[i * (deg + 1) + k - 1] * xi;
            }
        }
        self.terms
            .iter()
            .map(|(e, &c)| e.iter().enumerate().fold(c, |acc, (i, &k)| acc * pows[i * (deg + 1) + k as usize]))
            .sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut p = Self::zero(self.n);
        for (e, &c) in &self.terms {
            p.add_term(e.clone(), c * s);
        }
        p
    }

    pub fn partial(&self, i: usize) -> Self {
        let mut p = Self::zero(self.n);
        for (e, &c) in &self.terms {
            if e[i] > 0 {
                let mut f = e.clone();
                f[i] -= 1;
                p.add_term(f, c * e[i] as f64);
            }
        }
        p
    }

    /// Mixed partial derivative `∂^β`.
    pub fn derivative(&self, beta: &[u32]) -> Self {
        let mut p = Self::zero(self.n);
        for (e, &c) in &self.terms {
            if e.iter().zip(beta).any(|(a, b)| a < b) {
                continue;
            }
            let mut coef = c;
            let mut f = e.clone();
            for (i, &b) in beta.iter().enumerate() {
                coef *= factorial(e[i]) / factorial(e[i] - b);
                f[i] -= b;
            }
            p.add_term(f, coef);
        }
        p
    }

    pub fn gradient(&self) -> Vec<Self> {
        (0..self.n).map(|i| self.partial(i)).collect()
    }

    pub fn hessian(&self) -> Vec<Vec<Self>> {
        let g = self.gradient();
        g.iter().map(|gi| (0..self.n).map(|j| gi.partial(j)).collect()).collect()
    }

    pub fn laplacian(&self) -> Self {
        let mut p = Self::zero(self.n);
        for i in 0..self.n {
            p = &p + &self.partial(i).partial(i);
        }
        p
    }

    /// Degree-`d` homogeneous component.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        let mut p = Self::zero(self.n);
        for (e, &c) in &self.terms {
            if e.iter().sum::<u32>() == d {
                p.add_term(e.clone(), c);
            }
        }
        p
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut out = Self::constant(self.n, 1.0);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// `y ↦ self(shift + M y)` with `M` given row-major as `m[i][j]`.
    pub fn compose_affine(&self, shift: &[f64], m: &[Vec<f64>]) -> Self {
        let n = self.n;
        let deg = self.degree();
        let linear: Vec<Polynomial> = (0..n)
            .map(|i| {
                let mut l = Self::constant(n, shift[i]);
                for (j, &mij) in m[i].iter().enumerate() {
                    l = &l + &Self::variable(n, j).scale(mij);
                }
                l
            })
            .collect();
        let powers: Vec<Vec<Polynomial>> = linear
            .iter()
            .map(|l| {
                let mut v = vec![Self::constant(n, 1.0)];
                for k in 1..=deg as usize {
                    let next = &v[k - 1] * l;
                    v.push(next);
                }
                v
            })
            .collect();
        let mut out = Self::zero(n);
        for (e, &c) in &self.terms {
            let mut term = Self::constant(n, c);
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    term = &term * &powers[i][k as usize];
                }
            }
            out = &out + &term;
        }
        out
    }

    /// `y ↦ self(x + r y)`.
    pub fn translate_scale(&self, x: &[f64], r: f64) -> Self {
        let m: Vec<Vec<f64>> = (0..self.n).map(|i| (0..self.n).map(|j| if i == j { r } else { 0.0 }).collect()).collect();
        self.compose_affine(x, &m)
    }

    pub fn to_json(&self) -> PolynomialJson {
        self.clone().into()
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let mut p = self.clone();
        for (e, &c) in &rhs.terms {
            p.add_term(e.clone(), c);
        }
        p
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &rhs.scale(-1.0)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let mut p = Polynomial::zero(self.n);
        for (a, &ca) in &self.terms {
            for (b, &cb) in &rhs.terms {
                let e: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                p.add_term(e, ca * cb);
            }
        }
        p
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, &c) in self.terms.iter().rev() {
            if !first {
                write!(f, " {} ", if c < 0.0 { '-' } else { '+' })?;
                write!(f, "{}", c.abs())?;
            } else {
                write!(f, "{c}")?;
            }
            first = false;
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "·x{}", i + 1)?,
                    _ => write!(f, "·x{}^{}", i + 1, k)?,
                }
            }
        }
        Ok(())
    }
}

/// Harmonic, nonzero polynomial. The Laplacian is checked exactly on
/// coefficients, relative to the coefficient scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Polynomial", into = "Polynomial")]
pub struct HarmonicPolynomial(Polynomial);

/// Relative tolerance for the coefficient-wise Laplacian check.
pub const HARMONIC_TOL: f64 = 1e-10;

impl HarmonicPolynomial {
    pub fn new(p: Polynomial) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::InvalidPolynomial("polynomial is identically zero".into()));
        }
        let lap = p.laplacian();
        let d = p.degree() as f64;
        let scale = p.max_abs_coefficient() * d.max(1.0) * d.max(1.0);
        let residual = lap.max_abs_coefficient();
        if residual > HARMONIC_TOL * scale {
            return Err(Error::InvalidPolynomial(format!("Laplacian has coefficient {residual:e}; polynomial is not harmonic")));
        }
        Ok(HarmonicPolynomial(p))
    }

    pub fn poly(&self) -> &Polynomial {
        &self.0
    }

    pub fn into_inner(self) -> Polynomial {
        self.0
    }
}

impl TryFrom<Polynomial> for HarmonicPolynomial {
    type Error = Error;
    fn try_from(p: Polynomial) -> Result<Self> {
        HarmonicPolynomial::new(p)
    }
}

impl From<HarmonicPolynomial> for Polynomial {
    fn from(h: HarmonicPolynomial) -> Self {
        h.0
    }
}

impl std::ops::Deref for HarmonicPolynomial {
    type Target = Polynomial;
    fn deref(&self) -> &Polynomial {
        &self.0
    }
}

/// Shorthand for tests and examples: `poly(2, &[(&[2, 0], 1.0), (&[0, 2], -1.0)])`.
pub fn poly(n: usize, terms: &[(&[u32], f64)]) -> Polynomial {
    Polynomial::from_terms(n, terms.iter().map(|(e, c)| (e.to_vec(), *c))).expect("well-formed terms")
}
