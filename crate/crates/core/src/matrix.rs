//! Determinants and small matrix helpers over polynomials and field scalars.

use crate::error::{ChowError, Result};
use crate::field::Field;
use crate::poly::Poly;
use crate::var::Order;

pub type PolyMatrix<F> = Vec<Vec<Poly<F>>>;

/// Exact determinant: cofactor expansion below 4×4, Bareiss otherwise.
pub fn det_poly_matrix<F: Field>(m: &PolyMatrix<F>, field: &F, order: &Order) -> Result<Poly<F>> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(ChowError::OrderMismatch("matrix is not square".into()));
    }
    match n {
        0 => Ok(Poly::one(field, order)),
        1 => Ok(m[0][0].clone()),
        2 | 3 => Ok(det_cofactor(m, field, order)),
        _ => det_bareiss(m, field, order),
    }
}

pub fn det_cofactor<F: Field>(m: &PolyMatrix<F>, field: &F, order: &Order) -> Poly<F> {
    let n = m.len();
    if n == 0 {
        return Poly::one(field, order);
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = Poly::zero(field, order);
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: PolyMatrix<F> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, p)| p.clone()).collect())
            .collect();
        let t = m[0][j].mul(&det_cofactor(&minor, field, order));
        acc = if j % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
    }
    acc
}

pub fn det_bareiss<F: Field>(m: &PolyMatrix<F>, field: &F, order: &Order) -> Result<Poly<F>> {
    let n = m.len();
    let mut a = m.clone();
    let mut prev = Poly::one(field, order);
    let mut negate = false;
    for k in 0..n.saturating_sub(1) {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    negate = !negate;
                }
                None => return Ok(Poly::zero(field, order)),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = a[i][j].mul(&a[k][k]).sub(&a[i][k].mul(&a[k][j]));
                a[i][j] = t.exact_div(&prev)?;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    Ok(if negate { d.neg() } else { d })
}

pub fn poly_mat_mul<F: Field>(a: &PolyMatrix<F>, b: &PolyMatrix<F>, field: &F, order: &Order) -> PolyMatrix<F> {
    let n = a.len();
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut acc = Poly::zero(field, order);
                    for t in 0..k {
                        if !a[i][t].is_zero() && !b[t][j].is_zero() {
                            acc = acc.add(&a[i][t].mul(&b[t][j]));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

// ---- scalar matrices ----

pub type Mat<E> = Vec<Vec<E>>;

pub fn identity<F: Field>(f: &F, n: usize) -> Mat<F::Elem> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { f.one() } else { f.zero() }).collect())
        .collect()
}

pub fn mat_mul<F: Field>(f: &F, a: &Mat<F::Elem>, b: &Mat<F::Elem>) -> Mat<F::Elem> {
    let n = a.len();
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    let mut out = vec![vec![f.zero(); m]; n];
    for i in 0..n {
        for t in 0..k {
            if f.is_zero(&a[i][t]) {
                continue;
            }
            for j in 0..m {
                if !f.is_zero(&b[t][j]) {
                    let p = f.mul(&a[i][t], &b[t][j]);
                    f.add_assign(&mut out[i][j], &p);
                }
            }
        }
    }
    out
}

pub fn mat_add_scaled<F: Field>(f: &F, acc: &mut Mat<F::Elem>, a: &Mat<F::Elem>, c: &F::Elem) {
    if f.is_zero(c) {
        return;
    }
    for (ra, rb) in acc.iter_mut().zip(a.iter()) {
        for (x, y) in ra.iter_mut().zip(rb.iter()) {
            if !f.is_zero(y) {
                let t = f.mul(y, c);
                f.add_assign(x, &t);
            }
        }
    }
}

/// Determinant by Gaussian elimination over the field.
pub fn det<F: Field>(f: &F, m: &Mat<F::Elem>) -> F::Elem {
    let n = m.len();
    let mut a = m.clone();
    let mut d = f.one();
    for k in 0..n {
        let piv = match (k..n).find(|&i| !f.is_zero(&a[i][k])) {
            Some(p) => p,
            None => return f.zero(),
        };
        if piv != k {
            a.swap(piv, k);
            d = f.neg(&d);
        }
        d = f.mul(&d, &a[k][k]);
        let inv = f.inv(&a[k][k]).unwrap();
        for i in k + 1..n {
            if f.is_zero(&a[i][k]) {
                continue;
            }
            let factor = f.mul(&a[i][k], &inv);
            for j in k..n {
                let t = f.mul(&factor, &a[k][j]);
                a[i][j] = f.sub(&a[i][j], &t);
            }
        }
    }
    d
}

/// Inverse by Gauss-Jordan; `SingularMatrix` if not invertible.
pub fn inverse<F: Field>(f: &F, m: &Mat<F::Elem>) -> Result<Mat<F::Elem>> {
    let n = m.len();
    let mut a: Mat<F::Elem> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { f.one() } else { f.zero() }));
            row
        })
        .collect();
    for k in 0..n {
        let piv = (k..n).find(|&i| !f.is_zero(&a[i][k])).ok_or(ChowError::SingularMatrix)?;
        a.swap(piv, k);
        let inv = f.inv(&a[k][k]).unwrap();
        for v in a[k].iter_mut() {
            *v = f.mul(v, &inv);
        }
        for i in 0..n {
            if i != k && !f.is_zero(&a[i][k]) {
                let factor = a[i][k].clone();
                for j in 0..2 * n {
                    let t = f.mul(&factor, &a[k][j]);
                    a[i][j] = f.sub(&a[i][j], &t);
                }
            }
        }
    }
    Ok(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn transpose<E: Clone>(m: &Mat<E>) -> Mat<E> {
    let n = m.len();
    let k = if n == 0 { 0 } else { m[0].len() };
    (0..k).map(|j| (0..n).map(|i| m[i][j].clone()).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rationals;
    use crate::parse::parse_poly;
    use crate::var::chow_order;

    #[test]
    fn two_by_two_chow_determinant() {
        let o = chow_order(1, 2);
        let p = |s: &str| parse_poly(&Rationals, &o, s).unwrap();
        let m = vec![vec![p("U0_0"), p("U0_1")], vec![p("U1_0"), p("U1_1")]];
        assert_eq!(det_poly_matrix(&m, &Rationals, &o).unwrap(), p("U0_0*U1_1 - U0_1*U1_0"));
        let id = vec![vec![p("1"), p("0")], vec![p("0"), p("1")]];
        assert_eq!(det_poly_matrix(&id, &Rationals, &o).unwrap(), p("1"));
        assert_eq!(det_poly_matrix(&vec![vec![p("U0_1")]], &Rationals, &o).unwrap(), p("U0_1"));
    }

    #[test]
    fn bareiss_matches_cofactor_on_four_by_four() {
        let o = chow_order(3, 4);
        let m: PolyMatrix<Rationals> = (0..4)
            .map(|i| (0..4).map(|j| parse_poly(&Rationals, &o, &format!("U{i}_{j}")).unwrap()).collect())
            .collect();
        let a = det_bareiss(&m, &Rationals, &o).unwrap();
        let b = det_cofactor(&m, &Rationals, &o);
        assert_eq!(a, b);
        assert_eq!(a.len(), 24);
    }

    #[test]
    fn scalar_inverse() {
        let f = Rationals;
        let m: Mat<_> = vec![vec![f.from_i64(2), f.from_i64(1)], vec![f.from_i64(7), f.from_i64(4)]];
        let inv = inverse(&f, &m).unwrap();
        assert_eq!(mat_mul(&f, &m, &inv), identity(&f, 2));
        assert_eq!(det(&f, &m), f.from_i64(1));
        let s: Mat<_> = vec![vec![f.from_i64(1), f.from_i64(2)], vec![f.from_i64(2), f.from_i64(4)]];
        assert_eq!(inverse(&f, &s), Err(ChowError::SingularMatrix));
    }
}
