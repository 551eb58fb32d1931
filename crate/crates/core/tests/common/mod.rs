//! Independent reference formulas and seeded generators shared by the
//! integration suites. Nothing here calls into the library's numerics.

#![allow(dead_code)]

use normsip::space::{NormSpec, Vector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Which reference formula applies to a norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Kind {
    L1,
    P(f64),
    LInf,
}

impl Kind {
    pub fn spec(self) -> NormSpec {
        match self {
            Kind::L1 => NormSpec::lp(1.0).unwrap(),
            Kind::P(p) => NormSpec::lp(p).unwrap(),
            Kind::LInf => NormSpec::lp_inf(),
        }
    }

    pub fn label(self) -> String {
        match self {
            Kind::L1 => "l1".into(),
            Kind::P(p) => format!("l{p}"),
            Kind::LInf => "linf".into(),
        }
    }

    pub fn smooth(self) -> bool {
        matches!(self, Kind::P(_))
    }
}

pub const KINDS: [Kind; 5] = [
    Kind::L1,
    Kind::P(1.5),
    Kind::P(2.0),
    Kind::P(3.0),
    Kind::LInf,
];

/// Textbook norm, no rescaling.
pub fn norm(v: &[f64], k: Kind) -> f64 {
    match k {
        Kind::L1 => v.iter().map(|c| c.abs()).sum(),
        Kind::P(p) => v.iter().map(|c| c.abs().powf(p)).sum::<f64>().powf(1.0 / p),
        Kind::LInf => v.iter().fold(0.0f64, |m, c| m.max(c.abs())),
    }
}

/// `<x, y>_s` (`superior = true`) or `<x, y>_i` as `||y||` times the extreme
/// value of `<g, x>` over the subdifferential of the norm at `y`.
///
/// Ties in the max norm are taken as exact equality of magnitudes.
pub fn sip(x: &[f64], y: &[f64], k: Kind, superior: bool) -> f64 {
    let ny = norm(y, k);
    if ny == 0.0 {
        return 0.0;
    }
    let pick = |a: f64, b: f64| if superior { a.max(b) } else { a.min(b) };
    match k {
        Kind::P(p) => {
            // Gradient of ||.||_p at y scaled by ||y||: ||y||^(2-p) |y|^(p-1) sgn(y).
            let s: f64 = x
                .iter()
                .zip(y)
                .map(|(xk, yk)| yk.signum() * yk.abs().powf(p - 1.0) * xk)
                .sum();
            ny.powf(2.0 - p) * s
        }
        Kind::L1 => {
            let mut fixed = 0.0;
            let mut free = 0.0;
            for (xk, yk) in x.iter().zip(y) {
                if *yk == 0.0 {
                    free += xk.abs();
                } else {
                    fixed += yk.signum() * xk;
                }
            }
            ny * (fixed + if superior { free } else { -free })
        }
        Kind::LInf => {
            let g = x
                .iter()
                .zip(y)
                .filter(|(_, yk)| yk.abs() == ny)
                .map(|(xk, yk)| yk.signum() * xk)
                .reduce(pick)
                .expect("argmax set is nonempty");
            ny * g
        }
    }
}

pub fn ratio(xs: &[Vec<f64>], ps: &[f64], k: Kind) -> f64 {
    let d = xs[0].len();
    let mut mean = vec![0.0; d];
    for (x, p) in xs.iter().zip(ps) {
        for (m, c) in mean.iter_mut().zip(x) {
            *m += p * c;
        }
    }
    let mass: f64 = xs.iter().zip(ps).map(|(x, p)| p * norm(x, k)).sum();
    norm(&mean, k) / mass
}

pub fn vector(c: &[f64]) -> Vector {
    Vector::new(c.to_vec()).unwrap()
}

pub fn uniform_coords(rng: &mut ChaCha8Rng, d: usize, r: f64) -> Vec<f64> {
    (0..d).map(|_| rng.gen_range(-r..=r)).collect()
}

/// Random nonzero vector in `[-1, 1]^d`, optionally rescaled to unit norm.
pub fn nonzero(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v = uniform_coords(rng, d, 1.0);
        if v.iter().any(|c| c.abs() > 1e-3) {
            return v;
        }
    }
}

pub fn unit(rng: &mut ChaCha8Rng, d: usize, k: Kind) -> Vec<f64> {
    let v = nonzero(rng, d);
    let n = norm(&v, k);
    v.into_iter().map(|c| c / n).collect()
}

/// Coordinates on the grid `j / 8`, so zeros and exact ties are common.
pub fn grid(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d)
        .map(|_| rng.gen_range(-8i32..=8) as f64 / 8.0)
        .collect()
}

pub fn weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / s).collect()
}
