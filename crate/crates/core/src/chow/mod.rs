//! Chow forms and the operations on them.

mod degree_d;
mod kronecker;
mod ops;

use std::fmt;

use serde::Serialize;

use crate::error::{ChowError, Result};
use crate::field::{Field, Rationals};
use crate::gcd::squarefree_in;
use crate::matrix::det_poly_matrix;
use crate::monomial::Monomial;
use crate::poly::Poly;
use crate::var::{char_order, chow_order, Order, Var};

pub use degree_d::{
    degree_d_chow_form, degree_d_chow_form_with, degree_d_generic, pseudo_companion, specialize_generic,
    DegreeDChowValue, DegreeDStrategy,
};
pub use kronecker::{kronecker_parametrization, rational_roots, Kronecker};
pub use ops::{
    equations_from_chow, generic_projection_chow, intersection_chow, proj_order, separate_chow,
    separate_hypersurface_chow, union_chow, weak_squarefree_part,
};

/// A Chow form in `blocks` blocks `U_i = (U_i,0..U_i,n)`. The constant form
/// stands for the empty set; it keeps its block count so the ring stays known.
#[derive(Clone, PartialEq)]
pub struct ChowForm<F: Field> {
    poly: Poly<F>,
    n: usize,
    blocks: usize,
    degree: u32,
}

impl<F: Field> fmt::Debug for ChowForm<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<F: Field> fmt::Display for ChowForm<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r: i64 = if self.is_empty() { -1 } else { self.blocks as i64 - 1 };
        write!(f, "chow{{n={}, r={}, D={}}} {}", self.n, r, self.degree, self.poly)
    }
}

/// Plain-text record of a Chow form.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ChowRecord {
    pub n: usize,
    pub r: i64,
    pub degree: u32,
    pub poly: String,
}

impl<F: Field> ChowForm<F> {
    /// Wraps a polynomial of the ring `chow_order(n, blocks)`; the degree is
    /// read off as the degree in block 0.
    pub fn new(poly: Poly<F>, n: usize, blocks: usize) -> Result<Self> {
        let order = chow_order(n, blocks);
        let poly = poly.with_order(&order)?;
        if poly.is_zero() {
            return Err(ChowError::ZeroPolynomial);
        }
        let b0: Vec<usize> = (0..=n).collect();
        let degree = poly.degree_in_set(&b0);
        Ok(ChowForm {
            poly,
            n,
            blocks,
            degree,
        })
    }

    pub fn empty(field: &F, n: usize, blocks: usize) -> Self {
        ChowForm {
            poly: Poly::one(field, &chow_order(n, blocks)),
            n,
            blocks,
            degree: 0,
        }
    }

    pub fn poly(&self) -> &Poly<F> {
        &self.poly
    }

    pub fn into_poly(self) -> Poly<F> {
        self.poly
    }

    pub fn field(&self) -> &F {
        self.poly.field()
    }

    pub fn ambient_n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_empty(&self) -> bool {
        self.poly.is_constant()
    }

    /// Dimension of the variety, `None` for the empty set.
    pub fn dimension(&self) -> Option<usize> {
        if self.is_empty() {
            None
        } else {
            Some(self.blocks - 1)
        }
    }

    pub fn order(&self) -> Order {
        chow_order(self.n, self.blocks)
    }

    /// Index of `U_i,j` in the ring.
    pub fn u(&self, i: usize, j: usize) -> usize {
        i * (self.n + 1) + j
    }

    pub fn block_indices(&self, i: usize) -> Vec<usize> {
        (0..=self.n).map(|j| self.u(i, j)).collect()
    }

    /// `U_0,0^D ... U_r,r^D`.
    pub fn normal_monomial(&self) -> Monomial {
        let mut e = vec![0u16; self.poly.nvars()];
        for i in 0..self.blocks {
            e[self.u(i, i)] = self.degree as u16;
        }
        Monomial::from_exps(e)
    }

    pub fn is_normal_position(&self) -> bool {
        match self.poly.lm() {
            Ok(m) => self.is_empty() || *m == self.normal_monomial(),
            Err(_) => false,
        }
    }

    pub fn is_normalized(&self) -> bool {
        self.is_normal_position() && self.poly.lc().map(|c| self.field().is_one(c)).unwrap_or(false)
    }

    /// Degree exactly `D` in every block, for every term.
    pub fn is_multihomogeneous(&self) -> bool {
        (0..self.blocks).all(|i| self.poly.is_homogeneous_in(&self.block_indices(i), self.degree))
    }

    /// `gcd(C, ∂C/∂U_0,0) = 1`.
    pub fn is_squarefree(&self) -> Result<bool> {
        if self.is_empty() {
            return Ok(true);
        }
        squarefree_in(&self.poly, 0)
    }

    /// Scale by a nonzero constant.
    pub fn scaled(&self, c: &F::Elem) -> Self {
        ChowForm {
            poly: self.poly.scale(c),
            ..self.clone()
        }
    }

    /// Monic representative under graded lex (canonical up-to-scalar form).
    pub fn monic(&self) -> Self {
        ChowForm {
            poly: self.poly.monic().expect("chow forms are nonzero"),
            ..self.clone()
        }
    }

    /// Equal up to a nonzero scalar.
    pub fn same_up_to_scalar(&self, other: &Self) -> bool {
        self.n == other.n
            && (self.blocks == other.blocks || (self.is_empty() && other.is_empty()))
            && self.poly.monic().ok().map(|p| p.into_terms()) == other.poly.monic().ok().map(|p| p.into_terms())
    }

    /// Exchange blocks `i` and `j`.
    pub fn swap_blocks(&self, i: usize, j: usize) -> Self {
        let terms = self.poly.terms().iter().map(|(m, c)| {
            let mut e = m.exps().to_vec();
            for k in 0..=self.n {
                e.swap(self.u(i, k), self.u(j, k));
            }
            (Monomial::from_exps(e), c.clone())
        });
        ChowForm {
            poly: Poly::from_terms(self.field(), &self.order(), terms),
            ..self.clone()
        }
    }

    pub fn record(&self) -> ChowRecord {
        ChowRecord {
            n: self.n,
            r: if self.is_empty() { -1 } else { self.blocks as i64 - 1 },
            degree: self.degree,
            poly: self.poly.to_string(),
        }
    }

    /// Parse `chow{n=.., r=.., D=..} <poly>`; `blocks` is used when `r = -1`.
    pub fn parse(field: &F, s: &str, blocks_if_empty: usize) -> Result<Self> {
        let err = |msg: &str| ChowError::Parse {
            line: 1,
            col: 1,
            msg: msg.to_string(),
        };
        let s = s.trim();
        let rest = s.strip_prefix("chow{").ok_or_else(|| err("expected `chow{` header"))?;
        let (hdr, body) = rest.split_once('}').ok_or_else(|| err("unterminated header"))?;
        let mut n = None;
        let mut r = None;
        for kv in hdr.split(',') {
            let (k, v) = kv.split_once('=').ok_or_else(|| err("bad header field"))?;
            let v: i64 = v.trim().parse().map_err(|_| err("bad header value"))?;
            match k.trim() {
                "n" => n = Some(v as usize),
                "r" => r = Some(v),
                "D" => {}
                _ => return Err(err("unknown header field")),
            }
        }
        let n = n.ok_or_else(|| err("missing n"))?;
        let r = r.ok_or_else(|| err("missing r"))?;
        let blocks = if r < 0 { blocks_if_empty } else { r as usize + 1 };
        let poly = crate::parse::parse_poly(field, &chow_order(n, blocks), body)?;
        ChowForm::new(poly, n, blocks)
    }
}

impl ChowForm<Rationals> {
    /// Integer, content-1 representative with positive leading coefficient.
    pub fn primitive(&self) -> Self {
        ChowForm {
            poly: self.poly.primitive().expect("chow forms are nonzero"),
            ..self.clone()
        }
    }
}

/// `∏_points (U_0,0 + x_1 U_0,1 + ... + x_n U_0,n)`.
pub fn chow_of_points<F: Field>(field: &F, n: usize, points: &[Vec<F::Elem>]) -> Result<ChowForm<F>> {
    for (i, p) in points.iter().enumerate() {
        if p.len() != n {
            return Err(ChowError::OrderMismatch("point has wrong length".into()));
        }
        if points[..i].contains(p) {
            return Err(ChowError::DuplicatePoint);
        }
    }
    let order = chow_order(n, 1);
    let mut acc = Poly::one(field, &order);
    for p in points {
        let mut lin = Poly::var_index(field, &order, 0);
        for (j, x) in p.iter().enumerate() {
            lin = lin.add(&Poly::var_index(field, &order, j + 1).scale(x));
        }
        acc = acc.mul(&lin);
    }
    ChowForm::new(acc, n, 1)
}

/// `det(U_i,j)` for `A^n`.
pub fn chow_ambient<F: Field>(field: &F, n: usize) -> ChowForm<F> {
    let order = chow_order(n, n + 1);
    let m: Vec<Vec<Poly<F>>> = (0..=n)
        .map(|i| (0..=n).map(|j| Poly::var(field, &order, &Var::U(i as u32, j as u32))).collect())
        .collect();
    let d = det_poly_matrix(&m, field, &order).expect("square");
    ChowForm::new(d, n, n + 1).expect("nonzero determinant")
}

pub fn normalize_chow<F: Field>(c: &ChowForm<F>) -> Result<ChowForm<F>> {
    if !c.is_normal_position() {
        return Err(ChowError::NotNormalPosition);
    }
    Ok(c.monic())
}

/// `(-1)^D C(v_0, ..., v_r)` with `v_i = (U_i,0 - T_i, U_i,1, ..., U_i,n)`, in
/// the ring `T0 > U0_0 > ... > U0_n > T1 > ...`.
pub fn characteristic_polynomial<F: Field>(c: &ChowForm<F>) -> Result<Poly<F>> {
    let f = c.field();
    let target = char_order(c.n, c.blocks);
    let assign: Vec<(usize, Poly<F>)> = (0..c.blocks)
        .map(|i| {
            let u = Poly::var(f, &target, &Var::U(i as u32, 0));
            let t = Poly::var(f, &target, &Var::T(i as u32));
            (c.u(i, 0), u.sub(&t))
        })
        .collect();
    let p = c.poly.substitute(&assign, &target)?;
    Ok(if c.degree % 2 == 1 { p.neg() } else { p })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;
    use crate::poly::QPoly;

    fn cf(s: &str, n: usize, blocks: usize) -> ChowForm<Rationals> {
        ChowForm::new(parse_poly(&Rationals, &chow_order(n, blocks), s).unwrap(), n, blocks).unwrap()
    }

    #[test]
    fn points_oracle() {
        let q = Rationals;
        let c = chow_of_points(&q, 1, &[vec![q.from_i64(2)]]).unwrap();
        assert_eq!(c, cf("U0_0 + 2*U0_1", 1, 1));
        let e = chow_of_points(&q, 1, &[]).unwrap();
        assert!(e.is_empty());
        let c = chow_of_points(&q, 1, &[vec![q.from_i64(1)], vec![q.from_i64(-1)]]).unwrap();
        assert_eq!(c, cf("U0_0^2 - U0_1^2", 1, 1));
        assert_eq!(
            chow_of_points(&q, 1, &[vec![q.from_i64(1)], vec![q.from_i64(1)]]),
            Err(ChowError::DuplicatePoint)
        );
    }

    #[test]
    fn ambient_and_normal_position() {
        let c = chow_ambient(&Rationals, 1);
        assert_eq!(c, cf("U0_0*U1_1 - U0_1*U1_0", 1, 2));
        assert!(c.is_normal_position());
        assert_eq!(c.degree(), 1);
        let c2 = chow_ambient(&Rationals, 2);
        assert_eq!(c2.poly().len(), 6);
        let line = cf("U0_0*U1_2 - U0_2*U1_0", 2, 2);
        assert!(!line.is_normal_position());
        assert_eq!(normalize_chow(&line), Err(ChowError::NotNormalPosition));
        assert_eq!(normalize_chow(&cf("2*U0_0 + 2*U0_1", 1, 1)).unwrap(), cf("U0_0 + U0_1", 1, 1));
        assert!(cf("U0_0^2 - 3*U0_1^2", 1, 1).is_normal_position());
    }

    #[test]
    fn characteristic_polynomials() {
        let c = cf("U0_0 + 2*U0_1", 1, 1);
        let o = char_order(1, 1);
        let p = characteristic_polynomial(&c).unwrap();
        assert_eq!(p, parse_poly(&Rationals, &o, "T0 - U0_0 - 2*U0_1").unwrap());
        let e = ChowForm::empty(&Rationals, 1, 1);
        assert!(characteristic_polynomial(&e).unwrap().is_one());
        let p = characteristic_polynomial(&chow_ambient(&Rationals, 1)).unwrap();
        let o2 = char_order(1, 2);
        let want: QPoly = parse_poly(&Rationals, &o2, "T0*U1_1 - U0_0*U1_1 + U0_1*U1_0 - U0_1*T1").unwrap();
        assert_eq!(p, want);
        let lm = p.lm().unwrap();
        assert_eq!(lm.exp(o2.idx(&Var::T(0))), 1);
        assert_eq!(lm.exp(o2.idx(&Var::U(1, 1))), 1);
    }

    #[test]
    fn header_roundtrip() {
        let c = chow_ambient(&Rationals, 2);
        let back = ChowForm::parse(&Rationals, &c.to_string(), 3).unwrap();
        assert_eq!(back, c);
        let e = ChowForm::empty(&Rationals, 2, 2);
        assert_eq!(e.to_string(), "chow{n=2, r=-1, D=0} 1");
        assert_eq!(ChowForm::parse(&Rationals, &e.to_string(), 2).unwrap(), e);
    }

    #[test]
    fn primitive_forms() {
        assert_eq!(cf("U0_0 + 1/2*U0_1", 1, 1).primitive(), cf("2*U0_0 + U0_1", 1, 1));
        assert_eq!(cf("-3*U0_0", 1, 1).primitive(), cf("U0_0", 1, 1));
        let c = cf("2*U0_0 + U0_1", 1, 1);
        assert_eq!(c.primitive(), c);
    }
}
