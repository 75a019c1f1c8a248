//! Monic multivariate GCD.
//!
//! Subresultant PRS over `K[others][x]`, with cheap modular-image degree
//! bounds used to short-circuit coprime inputs and exact-divisor cases.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{ChowError, Result};
use crate::field::{inv_mod, mul_mod, Field};
use crate::poly::Poly;

/// The GCD with leading coefficient 1 under graded lex.
pub fn monic_gcd<F: Field>(a: &Poly<F>, b: &Poly<F>) -> Result<Poly<F>> {
    if a.is_zero() && b.is_zero() {
        return Err(ChowError::BothZero);
    }
    gcd_inner(a, b)?.monic()
}

/// Monic GCD of a list (zeros skipped); `BothZero` if all are zero.
pub fn monic_gcd_many<F: Field>(ps: &[Poly<F>]) -> Result<Poly<F>> {
    let mut g: Option<Poly<F>> = None;
    for p in ps {
        if p.is_zero() {
            continue;
        }
        g = Some(match g {
            None => p.clone(),
            Some(g) => gcd_inner(&g, p)?,
        });
        if g.as_ref().unwrap().is_constant() {
            break;
        }
    }
    g.ok_or(ChowError::BothZero)?.monic()
}

/// A GCD up to a unit.
pub(crate) fn gcd_inner<F: Field>(a: &Poly<F>, b: &Poly<F>) -> Result<Poly<F>> {
    if a.is_zero() {
        return Ok(b.clone());
    }
    if b.is_zero() {
        return Ok(a.clone());
    }
    let one = Poly::one(a.field(), a.order());
    if a.is_constant() || b.is_constant() {
        return Ok(one);
    }
    let (sa, sb) = (a.support(), b.support());
    let only_a: Vec<usize> = (0..sa.len()).filter(|&i| sa[i] && !sb[i]).collect();
    let only_b: Vec<usize> = (0..sa.len()).filter(|&i| sb[i] && !sa[i]).collect();
    if !only_a.is_empty() {
        let mut parts: Vec<Poly<F>> = a.split_by(&only_a).into_values().collect();
        parts.push(b.clone());
        return gcd_list(parts);
    }
    if !only_b.is_empty() {
        let mut parts: Vec<Poly<F>> = b.split_by(&only_b).into_values().collect();
        parts.push(a.clone());
        return gcd_list(parts);
    }
    let vars: Vec<usize> = (0..sa.len()).filter(|&i| sa[i]).collect();
    if vars.len() == 1 {
        return Ok(univariate_gcd(a, b, vars[0]));
    }
    let (da, db) = (a.degrees(), b.degrees());
    let bounds = image_degree_bounds(a, b, &vars);
    if let Some(x) = vars.iter().copied().find(|&x| bounds[x] == 0) {
        // gcd is free of x: gcd of all x-coefficients
        let mut parts = a.coeffs_in(x);
        parts.extend(b.coeffs_in(x));
        return gcd_list(parts);
    }
    if vars.iter().all(|&x| bounds[x] >= db[x]) {
        if let Ok(_q) = a.exact_div(b) {
            return Ok(b.clone());
        }
    }
    if vars.iter().all(|&x| bounds[x] >= da[x]) {
        if let Ok(_q) = b.exact_div(a) {
            return Ok(a.clone());
        }
    }
    let x = *vars
        .iter()
        .min_by_key(|&&x| (da[x].max(db[x]), da[x] + db[x]))
        .unwrap();
    prs_gcd(a, b, x)
}

fn gcd_list<F: Field>(mut parts: Vec<Poly<F>>) -> Result<Poly<F>> {
    parts.retain(|p| !p.is_zero());
    parts.sort_by_key(|p| (p.total_degree(), p.len()));
    let mut it = parts.into_iter();
    let mut g = it.next().ok_or(ChowError::BothZero)?;
    for p in it {
        if g.is_constant() {
            break;
        }
        g = gcd_inner(&g, &p)?;
    }
    if g.is_constant() {
        return Ok(Poly::one(g.field(), g.order()));
    }
    Ok(g)
}

/// Content with respect to `x`: gcd of the coefficients in `x`.
pub(crate) fn content_in<F: Field>(p: &Poly<F>, x: usize) -> Result<Poly<F>> {
    gcd_list(p.coeffs_in(x))
}

fn univariate_gcd<F: Field>(a: &Poly<F>, b: &Poly<F>, x: usize) -> Poly<F> {
    let f = a.field();
    let dense = |p: &Poly<F>| -> Vec<F::Elem> {
        let mut v = vec![f.zero(); p.degree_in(x) as usize + 1];
        for (m, c) in p.terms() {
            v[m.exp(x) as usize] = c.clone();
        }
        v
    };
    let (mut r0, mut r1) = (dense(a), dense(b));
    if r0.len() < r1.len() {
        std::mem::swap(&mut r0, &mut r1);
    }
    while !r1.is_empty() {
        let r = dense_rem(f, &r0, &r1);
        r0 = r1;
        r1 = r;
    }
    let lc_inv = f.inv(r0.last().unwrap()).unwrap();
    let coeffs: Vec<Poly<F>> = r0
        .iter()
        .map(|c| Poly::constant(f, a.order(), f.mul(c, &lc_inv)))
        .collect();
    Poly::from_coeffs(f, a.order(), x, &coeffs)
}

/// Remainder of dense univariate division; result trimmed (empty = 0).
pub(crate) fn dense_rem<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let inv = f.inv(&b[db]).unwrap();
    while r.len() > db {
        let top = r.len() - 1;
        let c = f.mul(&r[top], &inv);
        if !f.is_zero(&c) {
            let shift = top - db;
            for (i, bc) in b.iter().enumerate() {
                let t = f.mul(&c, bc);
                r[shift + i] = f.sub(&r[shift + i], &t);
            }
        }
        r.pop();
    }
    while r.last().map(|c| f.is_zero(c)).unwrap_or(false) {
        r.pop();
    }
    r
}

// ---- modular image degree bounds ----

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn rem_mod(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let inv = inv_mod(b[db], q).unwrap();
    while r.len() > db {
        let top = r.len() - 1;
        let c = mul_mod(r[top], inv, q);
        if c != 0 {
            let shift = top - db;
            for (i, &bc) in b.iter().enumerate() {
                let t = mul_mod(c, bc, q);
                r[shift + i] = (r[shift + i] + q - t) % q;
            }
        }
        r.pop();
    }
    trim(&mut r);
    r
}

fn gcd_degree_mod(a: Vec<u64>, b: Vec<u64>, q: u64) -> usize {
    let (mut r0, mut r1) = (a, b);
    if r0.len() < r1.len() {
        std::mem::swap(&mut r0, &mut r1);
    }
    while !r1.is_empty() {
        let r = rem_mod(&r0, &r1, q);
        r0 = r1;
        r1 = r;
    }
    r0.len().saturating_sub(1)
}

/// Per-variable upper bounds on `deg_x gcd(a, b)`, taken from univariate
/// images at random points of `F_q`. Falls back to `min(deg_x a, deg_x b)`.
fn image_degree_bounds<F: Field>(a: &Poly<F>, b: &Poly<F>, vars: &[usize]) -> Vec<u32> {
    let (da, db) = (a.degrees(), b.degrees());
    let mut bounds: Vec<u32> = da.iter().zip(db.iter()).map(|(x, y)| *x.min(y)).collect();
    let f = a.field();
    let q = f.image_modulus();
    let scale = |p: &Poly<F>| -> Option<Vec<(Vec<u16>, u64)>> {
        let cs: Vec<&F::Elem> = p.terms().iter().map(|t| &t.1).collect();
        let s = f.normalizer(&cs);
        let si = f.image(&s)?;
        p.terms()
            .iter()
            .map(|(m, c)| Some((m.exps().to_vec(), mul_mod(f.image(c)?, si, q))))
            .collect()
    };
    let (ia, ib) = match (scale(a), scale(b)) {
        (Some(x), Some(y)) => (x, y),
        _ => return bounds,
    };
    let seed = (a.len() as u64).wrapping_mul(0x9e37_79b9) ^ (b.len() as u64).wrapping_mul(0x85eb_ca6b) ^ a.nvars() as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tries = if q < 50 { 2 } else { 1 };
    for &x in vars {
        for _ in 0..tries {
            let point: Vec<u64> = (0..a.nvars()).map(|_| rng.gen_range(1..q)).collect();
            let ua = image_univariate(&ia, &point, x, da[x] as usize, q);
            let ub = image_univariate(&ib, &point, x, db[x] as usize, q);
            if ua.len() != da[x] as usize + 1 || ub.len() != db[x] as usize + 1 {
                continue;
            }
            let g = gcd_degree_mod(ua, ub, q) as u32;
            bounds[x] = bounds[x].min(g);
            break;
        }
    }
    bounds
}

fn image_univariate(terms: &[(Vec<u16>, u64)], point: &[u64], x: usize, deg: usize, q: u64) -> Vec<u64> {
    let mut out = vec![0u64; deg + 1];
    for (e, c) in terms {
        let mut t = *c;
        for (i, &k) in e.iter().enumerate() {
            if i != x && k > 0 {
                t = mul_mod(t, crate::field::pow_mod(point[i], k as u64, q), q);
            }
        }
        let k = e[x] as usize;
        out[k] = (out[k] + t) % q;
    }
    trim(&mut out);
    out
}

// ---- subresultant PRS ----

type UPoly<F> = Vec<Poly<F>>;

fn utrim<F: Field>(v: &mut UPoly<F>) {
    while v.last().map(|c| c.is_zero()).unwrap_or(false) {
        v.pop();
    }
}

/// `lc(b)^(deg a - deg b + 1) · a mod b`.
fn prem<F: Field>(a: &UPoly<F>, b: &UPoly<F>) -> UPoly<F> {
    let n = b.len() - 1;
    let lb = &b[n];
    let mut r = a.clone();
    let delta = a.len() - 1 - n;
    for k in (0..=delta).rev() {
        let top = r.get(n + k).cloned();
        for c in r.iter_mut() {
            *c = c.mul(lb);
        }
        if let Some(t) = top {
            if !t.is_zero() {
                for (i, bc) in b.iter().enumerate() {
                    let s = bc.mul(&t);
                    r[k + i] = r[k + i].sub(&s);
                }
            }
        }
        r.truncate(n + k);
    }
    utrim(&mut r);
    r
}

fn prs_gcd<F: Field>(a: &Poly<F>, b: &Poly<F>, x: usize) -> Result<Poly<F>> {
    let ca = content_in(a, x)?;
    let cb = content_in(b, x)?;
    let c = gcd_inner(&ca, &cb)?;
    let pa = a.exact_div(&ca)?;
    let pb = b.exact_div(&cb)?;
    let mut ua = pa.coeffs_in(x);
    let mut ub = pb.coeffs_in(x);
    if ua.len() < ub.len() {
        std::mem::swap(&mut ua, &mut ub);
    }
    let one = Poly::one(a.field(), a.order());
    let mut g = one.clone();
    let mut h = one.clone();
    loop {
        let delta = (ua.len() - ub.len()) as u32;
        let r = prem(&ua, &ub);
        if r.is_empty() {
            break;
        }
        if r.len() == 1 {
            return Ok(c);
        }
        let div = g.mul(&h.pow(delta));
        let r: UPoly<F> = r.iter().map(|t| t.exact_div(&div)).collect::<Result<_>>()?;
        ua = std::mem::replace(&mut ub, r);
        g = ua.last().unwrap().clone();
        h = match delta {
            0 => h,
            1 => g.clone(),
            _ => g.pow(delta).exact_div(&h.pow(delta - 1))?,
        };
    }
    let gb = Poly::from_coeffs(a.field(), a.order(), x, &ub);
    let cg = content_in(&gb, x)?;
    Ok(gb.exact_div(&cg)?.mul(&c))
}

/// True iff `gcd(p, ∂p/∂x_i) = 1` (or p does not depend on `x_i`).
pub fn squarefree_in<F: Field>(p: &Poly<F>, i: usize) -> Result<bool> {
    let d = p.derivative(i);
    if d.is_zero() {
        return Ok(!p.depends_on(i));
    }
    Ok(monic_gcd(p, &d)?.is_constant())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use crate::parse::parse_poly;
    use crate::poly::QPoly;
    use crate::var::{x_order, Order};

    fn q(s: &str, o: &Order) -> QPoly {
        parse_poly(&Rationals, o, s).unwrap()
    }

    #[test]
    fn spec_examples() {
        let o = x_order(2);
        assert_eq!(monic_gcd(&q("X1^2 - 1", &o), &q("X1 - 1", &o)).unwrap(), q("X1 - 1", &o));
        let f = q("3*X1*X2 + 6", &o);
        assert_eq!(monic_gcd(&f, &QPoly::zero(&Rationals, &o)).unwrap(), f.monic().unwrap());
        assert_eq!(
            monic_gcd(&q("2*X1*X2 + 2*X2", &o), &q("4*X1^2 - 4", &o)).unwrap(),
            q("X1 + 1", &o)
        );
        let z = QPoly::zero(&Rationals, &o);
        assert_eq!(monic_gcd(&z, &z), Err(ChowError::BothZero));
    }

    #[test]
    fn planted_factor_three_vars() {
        let o = x_order(3);
        let h = q("X1*X2 - X3^2 + 2", &o);
        let a = q("X1^2 + X2*X3 - 1", &o).mul(&h);
        let b = q("X1 - X2 + 5*X3", &o).mul(&h);
        assert_eq!(monic_gcd(&a, &b).unwrap(), h.monic().unwrap());
        let b2 = b.mul(&q("X1 - X2 + 5*X3", &o));
        assert_eq!(monic_gcd(&a.mul(&h), &b2.mul(&h)).unwrap(), h.square().monic().unwrap());
    }

    #[test]
    fn over_small_prime() {
        let f = PrimeField::new(3).unwrap();
        let o = x_order(2);
        let a = parse_poly(&f, &o, "X1^2*X2 + X2 + X1").unwrap();
        let h = parse_poly(&f, &o, "X1 + X2 + 1").unwrap();
        let g = monic_gcd(&a.mul(&h), &h.square()).unwrap();
        assert_eq!(g, h.monic().unwrap());
    }

    #[test]
    fn squarefree_detection() {
        let o = x_order(2);
        assert!(squarefree_in(&q("X1^2 - X2^2", &o), 0).unwrap());
        assert!(!squarefree_in(&q("X1^2*X2 + 2*X1*X2^2 + X2^3", &o), 0).unwrap());
        assert!(squarefree_in(&q("X2^2", &o), 0).unwrap());
    }
}
