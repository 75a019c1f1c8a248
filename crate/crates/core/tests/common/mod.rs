//! Shared fixtures for the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use chowred::decomposition::PolySystem;
use chowred::parse::parse_poly;
use chowred::var::x_order;
use chowred::{QPoly, Rationals};

pub fn q(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn qq(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

pub fn xp(n: usize, s: &str) -> QPoly {
    parse_poly(&Rationals, &x_order(n), s).unwrap()
}

pub fn sys(n: usize, eqs: &[&str]) -> PolySystem {
    PolySystem::new(n, eqs.iter().map(|e| xp(n, e)).collect()).unwrap()
}

/// `a_0 + Σ a_j X_j` with rational coefficients.
pub fn linear(n: usize, a0: &BigRational, a: &[BigRational]) -> QPoly {
    let o = x_order(n);
    let mut p = QPoly::constant(&Rationals, &o, a0.clone());
    for (j, c) in a.iter().enumerate() {
        p = p.add(&QPoly::var_index(&Rationals, &o, j).scale(c));
    }
    p
}

pub fn product(n: usize, fs: &[QPoly]) -> QPoly {
    fs.iter().fold(QPoly::one(&Rationals, &x_order(n)), |acc, f| acc.mul(f))
}

/// Triangular system `Π_a (X_i - Σ_{j<i} c_ij X_j - a)` with its rational points.
pub struct Planted {
    pub sys: PolySystem,
    pub points: Vec<Vec<BigRational>>,
}

pub fn planted(rng: &mut ChaCha8Rng, fractional: bool) -> Planted {
    let n = rng.gen_range(1..=3usize);
    let mut counts = vec![1usize; n];
    let total_max = 6;
    for i in 0..n {
        let used: usize = counts.iter().product();
        let room = total_max / (used / counts[i]);
        counts[i] = rng.gen_range(1..=room.clamp(1, 3));
    }
    let mut eqs = Vec::new();
    let mut shifts: Vec<Vec<BigRational>> = Vec::new();
    let mut slopes: Vec<Vec<BigRational>> = Vec::new();
    for i in 0..n {
        let slope: Vec<BigRational> = (0..i).map(|_| q(rng.gen_range(-2..=2))).collect();
        let mut vals = BTreeSet::new();
        while vals.len() < counts[i] {
            let den = if fractional { rng.gen_range(1..=3) } else { 1 };
            vals.insert(qq(rng.gen_range(-6..=6), den));
        }
        let vals: Vec<BigRational> = vals.into_iter().collect();
        let factors: Vec<QPoly> = vals
            .iter()
            .map(|a| {
                let mut coef: Vec<BigRational> = slope.iter().map(|c| -c).collect();
                coef.push(q(1));
                coef.resize(n, q(0));
                linear(n, &-a, &coef)
            })
            .collect();
        eqs.push(product(n, &factors));
        shifts.push(vals);
        slopes.push(slope);
    }
    let mut points: Vec<Vec<BigRational>> = vec![Vec::new()];
    for i in 0..n {
        let mut next = Vec::new();
        for p in &points {
            for a in &shifts[i] {
                let mut v = a.clone();
                for (j, c) in slopes[i].iter().enumerate() {
                    v += c * &p[j];
                }
                let mut p2 = p.clone();
                p2.push(v);
                next.push(p2);
            }
        }
        points = next;
    }
    Planted {
        sys: PolySystem::new(n, eqs).unwrap(),
        points,
    }
}
