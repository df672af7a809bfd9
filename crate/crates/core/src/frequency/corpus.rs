//! Seeded random harmonic polynomials.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::polynomial::{HarmonicPolynomial, Polynomial};

/// `(Re, Im)` of `(a·x + i b·x)^d`, harmonic whenever `|a| = |b|` and `a ⊥ b`.
pub fn complex_power(a: &[f64], b: &[f64], d: u32) -> (Polynomial, Polynomial) {
    let n = a.len();
    let lin = |c: &[f64]| {
        let mut p = Polynomial::zero(n);
        for (i, &ci) in c.iter().enumerate() {
            p = &p + &Polynomial::variable(n, i).scale(ci);
        }
        p
    };
    let (la, lb) = (lin(a), lin(b));
    let (mut re, mut im) = (Polynomial::constant(n, 1.0), Polynomial::zero(n));
    for _ in 0..d {
        let next_re = &(&re * &la) - &(&im * &lb);
        let next_im = &(&re * &lb) + &(&im * &la);
        re = next_re;
        im = next_im;
    }
    (re, im)
}

fn random_frame(rng: &mut ChaCha8Rng, n: usize) -> (Vec<f64>, Vec<f64>) {
    loop {
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        if na < 0.2 {
            continue;
        }
        let a: Vec<f64> = a.iter().map(|x| x / na).collect();
        let dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        let b: Vec<f64> = b.iter().zip(&a).map(|(y, x)| y - dot * x).collect();
        let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nb < 0.2 {
            continue;
        }
        return (a, b.iter().map(|x| x / nb).collect());
    }
}

/// Random nonconstant harmonic polynomial of degree ≤ `max_degree` in `n ≥ 2`
/// variables: a sum of `Re/Im (a·x + i b·x)^d` with random orthonormal frames.
pub fn random_harmonic(rng: &mut ChaCha8Rng, n: usize, max_degree: u32) -> HarmonicPolynomial {
    assert!(n >= 2 && max_degree >= 1);
    loop {
        let mut p = Polynomial::constant(n, rng.gen_range(-0.5..0.5));
        let terms = rng.gen_range(1..=4);
        for _ in 0..terms {
            let d = rng.gen_range(1..=max_degree);
            let (a, b) = random_frame(rng, n);
            let (re, im) = complex_power(&a, &b, d);
            p = &p + &re.scale(rng.gen_range(-1.0..1.0));
            p = &p + &im.scale(rng.gen_range(-1.0..1.0));
        }
        if p.degree() >= 1 {
            if let Ok(h) = HarmonicPolynomial::new(p) {
                return h;
            }
        }
    }
}

/// `count` polynomials alternating between `n = 2` and `n = 3`.
pub fn corpus(seed: u64, count: usize, max_degree: u32) -> Vec<HarmonicPolynomial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|i| random_harmonic(&mut rng, 2 + i % 2, max_degree)).collect()
}
