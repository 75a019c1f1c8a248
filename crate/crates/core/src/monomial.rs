use std::cmp::Ordering;

/// Exponent vector with cached total degree. The derived order compares
/// total degree first, then exponents lexicographically (index 0 greatest),
/// which is the graded lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    deg: u32,
    exps: Box<[u16]>,
}

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial {
            deg: 0,
            exps: vec![0; nvars].into_boxed_slice(),
        }
    }

    pub fn from_exps(exps: Vec<u16>) -> Self {
        let deg = exps.iter().map(|&e| e as u32).sum();
        Monomial {
            deg,
            exps: exps.into_boxed_slice(),
        }
    }

    pub fn var(nvars: usize, i: usize, e: u16) -> Self {
        let mut m = Self::one(nvars);
        m.exps[i] = e;
        m.deg = e as u32;
        m
    }

    pub fn degree(&self) -> u32 {
        self.deg
    }

    pub fn exps(&self) -> &[u16] {
        &self.exps
    }

    pub fn exp(&self, i: usize) -> u16 {
        self.exps[i]
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn is_one(&self) -> bool {
        self.deg == 0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let exps: Box<[u16]> = self
            .exps
            .iter()
            .zip(other.exps.iter())
            .map(|(a, b)| a.checked_add(*b).expect("exponent overflow"))
            .collect();
        Monomial {
            deg: self.deg + other.deg,
            exps,
        }
    }

    /// Exponents as fields of `w` bits, variable 0 in the highest field.
    pub(crate) fn pack(&self, w: usize) -> u128 {
        self.exps.iter().fold(0u128, |acc, &e| (acc << w) | e as u128)
    }

    pub(crate) fn unpack(mut k: u128, w: usize, nvars: usize) -> Monomial {
        let mask = (1u128 << w) - 1;
        let mut exps = vec![0u16; nvars];
        for e in exps.iter_mut().rev() {
            *e = (k & mask) as u16;
            k >>= w;
        }
        Monomial::from_exps(exps)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.deg <= other.deg && self.exps.iter().zip(other.exps.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self.divides(other)`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        let exps: Box<[u16]> = other.exps.iter().zip(self.exps.iter()).map(|(a, b)| a - b).collect();
        Monomial {
            deg: other.deg - self.deg,
            exps,
        }
    }

    /// Copy with exponent `i` set to `e`.
    pub fn with_exp(&self, i: usize, e: u16) -> Monomial {
        let mut exps = self.exps.clone();
        let old = exps[i];
        exps[i] = e;
        Monomial {
            deg: self.deg - old as u32 + e as u32,
            exps,
        }
    }

    /// Sum of exponents over the listed positions.
    pub fn partial_degree(&self, idx: &[usize]) -> u32 {
        idx.iter().map(|&i| self.exps[i] as u32).sum()
    }
}

/// Graded lex comparison of raw exponent slices.
pub fn grlex_cmp(a: &[u16], b: &[u16]) -> Ordering {
    let da: u32 = a.iter().map(|&e| e as u32).sum();
    let db: u32 = b.iter().map(|&e| e as u32).sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_before_lex() {
        // order X1 > X2: X2^2 beats X1
        let x1 = Monomial::from_exps(vec![1, 0]);
        let x2sq = Monomial::from_exps(vec![0, 2]);
        assert!(x2sq > x1);
        // same degree: X1^2 > X1 X2
        assert!(Monomial::from_exps(vec![2, 0]) > Monomial::from_exps(vec![1, 1]));
    }

    #[test]
    fn divide_and_multiply() {
        let a = Monomial::from_exps(vec![1, 2, 0]);
        let b = Monomial::from_exps(vec![2, 3, 1]);
        assert!(a.divides(&b));
        assert_eq!(a.mul(&a.quotient_of(&b)), b);
    }
}
