//! Exact coefficient fields: the rationals and prime fields of odd characteristic.

use std::fmt;
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{ChowError, Result};

/// Large prime used for modular images of rational data.
pub const IMAGE_PRIME: u64 = 2_305_843_009_213_693_951; // 2^61 - 1

pub trait Field: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    type Elem: Clone + fmt::Debug + PartialEq + Eq + Hash + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn add_assign(&self, a: &mut Self::Elem, b: &Self::Elem) {
        *a = self.add(a, b);
    }
    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }
    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }
    fn from_i64(&self, v: i64) -> Self::Elem;
    /// The element as a machine integer, when the field allows exact integer arithmetic on it.
    fn as_small_int(&self, _a: &Self::Elem) -> Option<i64> {
        None
    }
    fn from_i128(&self, v: i128) -> Self::Elem {
        self.from_bigint(&BigInt::from(v))
    }
    fn from_bigint(&self, v: &BigInt) -> Self::Elem;
    /// Parse from `a` or `a/b` decimal text.
    fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Result<Self::Elem>;
    /// 0 for the rationals.
    fn characteristic(&self) -> u64;
    /// Prime of the modular image map used for probabilistic certificates.
    fn image_modulus(&self) -> u64;
    /// Image in `F_q` with `q = image_modulus()`; `None` if a denominator vanishes.
    fn image(&self, a: &Self::Elem) -> Option<u64>;
    /// Scalar `s` making `s·coeffs` integral and primitive (1 over `F_p`).
    fn normalizer(&self, coeffs: &[&Self::Elem]) -> Self::Elem;
    /// Canonical text, parseable by `from_ratio`.
    fn format(&self, a: &Self::Elem) -> String;
    /// True when the text form needs a leading minus sign.
    fn is_negative_repr(&self, a: &Self::Elem) -> bool;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Hash)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn is_one(&self, a: &BigRational) -> bool {
        a.is_one()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        if a.is_integer() && b.is_integer() {
            return BigRational::from_integer(a.numer() + b.numer());
        }
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        if a.is_integer() && b.is_integer() {
            return BigRational::from_integer(a.numer() * b.numer());
        }
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn add_assign(&self, a: &mut BigRational, b: &BigRational) {
        if a.is_integer() && b.is_integer() {
            *a = BigRational::from_integer(a.numer() + b.numer());
        } else {
            *a += b;
        }
    }
    fn as_small_int(&self, a: &BigRational) -> Option<i64> {
        if a.is_integer() {
            a.numer().to_i64()
        } else {
            None
        }
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_bigint(&self, v: &BigInt) -> BigRational {
        BigRational::from_integer(v.clone())
    }
    fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Result<BigRational> {
        if den.is_zero() {
            return Err(ChowError::DivisionByZero);
        }
        Ok(BigRational::new(num.clone(), den.clone()))
    }
    fn characteristic(&self) -> u64 {
        0
    }
    fn image_modulus(&self) -> u64 {
        IMAGE_PRIME
    }
    fn image(&self, a: &BigRational) -> Option<u64> {
        let q = BigInt::from(IMAGE_PRIME);
        let n = a.numer().mod_floor(&q).to_u64()?;
        let d = a.denom().mod_floor(&q).to_u64()?;
        let di = inv_mod(d, IMAGE_PRIME)?;
        Some(mul_mod(n, di, IMAGE_PRIME))
    }
    fn normalizer(&self, coeffs: &[&BigRational]) -> BigRational {
        let mut den = BigInt::one();
        for c in coeffs {
            den = den.lcm(c.denom());
        }
        let mut g = BigInt::zero();
        for c in coeffs {
            g = g.gcd(&(c.numer() * (&den / c.denom())));
        }
        if g.is_zero() {
            return BigRational::one();
        }
        BigRational::new(den, g)
    }
    fn format(&self, a: &BigRational) -> String {
        let a = a.abs();
        if a.is_integer() {
            a.numer().to_string()
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }
    fn is_negative_repr(&self, a: &BigRational) -> bool {
        a.is_negative()
    }
}

/// `F_p` for an odd prime `p < 2^61`; elements are canonical residues.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p == 2 {
            return Err(ChowError::EvenPrime);
        }
        if p >= 1u64 << 61 || !is_prime(p) {
            return Err(ChowError::InvalidModulus(p));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn is_one(&self, a: &u64) -> bool {
        *a == 1
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, *b, self.p)
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        inv_mod(*a, self.p)
    }
    fn from_i64(&self, v: i64) -> u64 {
        (v as i128).rem_euclid(self.p as i128) as u64
    }
    fn from_bigint(&self, v: &BigInt) -> u64 {
        v.mod_floor(&BigInt::from(self.p)).to_u64().unwrap()
    }
    fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Result<u64> {
        let d = self.from_bigint(den);
        let di = self.inv(&d).ok_or(ChowError::NotPAdmissible { p: self.p })?;
        Ok(self.mul(&self.from_bigint(num), &di))
    }
    fn characteristic(&self) -> u64 {
        self.p
    }
    fn image_modulus(&self) -> u64 {
        self.p
    }
    fn image(&self, a: &u64) -> Option<u64> {
        Some(*a)
    }
    fn normalizer(&self, _coeffs: &[&u64]) -> u64 {
        1
    }
    fn format(&self, a: &u64) -> String {
        a.to_string()
    }
    fn is_negative_repr(&self, _a: &u64) -> bool {
        false
    }
}

pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    acc
}

pub fn inv_mod(a: u64, p: u64) -> Option<u64> {
    let (mut r0, mut r1) = (p as i128, (a % p) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    if r1 == 0 {
        return None;
    }
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(p as i128) as u64)
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for sp in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % sp == 0 {
            return n == sp;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Odd primes in `[lo, hi]`, ascending.
pub fn odd_primes_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(3)..=hi).filter(|&p| is_prime(p)).collect()
}
