//! Kronecker parametrization of a zero-dimensional Chow form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{ChowError, Result};
use crate::field::{Field, Rationals};
use crate::gcd::monic_gcd;
use crate::poly::Poly;
use crate::var::{Order, Var, VarOrder};

use super::ChowForm;

/// `Q(T) = C(T, α)` and `V_i(T) = ∂C/∂U_0,i (T, α)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Kronecker<F: Field> {
    pub alpha: Vec<i64>,
    pub q: Poly<F>,
    pub v: Vec<Poly<F>>,
}

impl<F: Field> Kronecker<F> {
    pub fn order(&self) -> &Order {
        self.q.order()
    }

    pub fn q_prime(&self) -> Poly<F> {
        self.q.derivative(0)
    }

    /// `(V_1(τ)/Q'(τ), ..., V_n(τ)/Q'(τ))`.
    pub fn point(&self, tau: &F::Elem) -> Result<Vec<F::Elem>> {
        let f = self.q.field();
        let den = self.q_prime().evaluate(std::slice::from_ref(tau));
        self.v
            .iter()
            .map(|vi| {
                f.div(&vi.evaluate(std::slice::from_ref(tau)), &den)
                    .ok_or(ChowError::DivisionByZero)
            })
            .collect()
    }
}

pub fn kronecker_parametrization<F: Field>(c: &ChowForm<F>, alpha: &[i64]) -> Result<Kronecker<F>> {
    if c.blocks() != 1 || alpha.len() != c.ambient_n() {
        return Err(ChowError::undefined("kronecker: expected a zero-dimensional form and n values"));
    }
    let f = c.field();
    let t_order = VarOrder::new(vec![Var::T(0)]);
    let t = Poly::var_index(f, &t_order, 0);
    let mut assign = vec![(c.u(0, 0), t)];
    for (j, a) in alpha.iter().enumerate() {
        assign.push((c.u(0, j + 1), Poly::from_i64(f, &t_order, *a)));
    }
    let q = c.poly().substitute(&assign, &t_order)?;
    if q.degree_in(0) != c.degree() {
        return Err(ChowError::DegenerateAlpha);
    }
    let g = monic_gcd(&q, &q.derivative(0))?;
    if !g.is_constant() {
        return Err(ChowError::DegenerateAlpha);
    }
    let v = (1..=c.ambient_n())
        .map(|j| c.poly().derivative(c.u(0, j)).substitute(&assign, &t_order))
        .collect::<Result<Vec<_>>>()?;
    Ok(Kronecker {
        alpha: alpha.to_vec(),
        q,
        v,
    })
}

fn small_divisors(v: &BigInt) -> Vec<BigInt> {
    // positive divisors by trial division; an unfactored cofactor is taken as prime
    let mut m = v.abs();
    let mut primes: Vec<(BigInt, u32)> = Vec::new();
    let mut p = BigInt::from(2u32);
    let limit = BigInt::from(1_000_000u32);
    while &p * &p <= m && p <= limit {
        let mut e = 0;
        while (&m % &p).is_zero() {
            m /= &p;
            e += 1;
        }
        if e > 0 {
            primes.push((p.clone(), e));
        }
        p += 1u32;
    }
    if m > BigInt::one() {
        primes.push((m, 1));
    }
    let mut out = vec![BigInt::one()];
    for (p, e) in primes {
        let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
        for d in &out {
            let mut pw = d.clone();
            for _ in 0..=e {
                next.push(pw.clone());
                pw *= &p;
            }
        }
        out = next;
    }
    out
}

/// Distinct rational roots of a univariate polynomial, sorted.
pub fn rational_roots(q: &Poly<Rationals>) -> Result<Vec<BigRational>> {
    if q.is_zero() {
        return Err(ChowError::ZeroPolynomial);
    }
    if q.nvars() != 1 {
        return Err(ChowError::OrderMismatch("rational_roots needs a univariate polynomial".into()));
    }
    let (_, prim) = q.content_and_primitive()?;
    let mut coeffs: Vec<BigInt> = vec![BigInt::zero(); prim.degree_in(0) as usize + 1];
    for (m, c) in prim.terms() {
        coeffs[m.exp(0) as usize] = c.to_integer();
    }
    let mut roots = Vec::new();
    let low = coeffs.iter().position(|c| !c.is_zero()).unwrap_or(0);
    if low > 0 {
        roots.push(BigRational::zero());
    }
    let coeffs = &coeffs[low..];
    if coeffs.len() > 1 {
        let a0 = &coeffs[0];
        let lc = coeffs.last().unwrap();
        let nums = small_divisors(a0);
        let dens = small_divisors(lc);
        for p in &nums {
            for d in &dens {
                if !p.gcd(d).is_one() {
                    continue;
                }
                for s in [p.clone(), -p.clone()] {
                    let r = BigRational::new(s, d.clone());
                    let mut acc = BigRational::zero();
                    for c in coeffs.iter().rev() {
                        acc = acc * &r + BigRational::from_integer(c.clone());
                    }
                    if acc.is_zero() {
                        roots.push(r);
                    }
                }
            }
        }
    }
    roots.sort();
    roots.dedup();
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chow::chow_of_points;

    fn cf(s: &str) -> ChowForm<Rationals> {
        let p = crate::parse::parse_poly(&Rationals, &crate::var::chow_order(1, 1), s).unwrap();
        ChowForm::new(p, 1, 1).unwrap()
    }

    fn q(v: i64) -> BigRational {
        BigRational::from_integer(v.into())
    }

    #[test]
    fn two_point_example() {
        let c = cf("U0_0^2 - U0_1^2");
        let k = kronecker_parametrization(&c, &[1]).unwrap();
        assert_eq!(k.q.to_string(), "T0^2 - 1");
        assert_eq!(k.v[0].to_string(), "-2");
        let roots = rational_roots(&k.q).unwrap();
        assert_eq!(roots, vec![q(-1), q(1)]);
        let pts: Vec<_> = roots.iter().map(|t| k.point(t).unwrap()[0].clone()).collect();
        assert_eq!(pts, vec![q(1), q(-1)]);
    }

    #[test]
    fn single_point_and_degenerate_alpha() {
        let c = cf("U0_0 + 2*U0_1");
        let k = kronecker_parametrization(&c, &[0]).unwrap();
        assert_eq!(k.q.to_string(), "T0");
        assert_eq!(k.point(&q(0)).unwrap(), vec![q(2)]);
        // the points (1,0) and (0,1) collide under α = (1,1)
        let pts = vec![vec![q(1), q(0)], vec![q(0), q(1)]];
        let c2 = chow_of_points(&Rationals, 2, &pts).unwrap();
        assert_eq!(kronecker_parametrization(&c2, &[1, 1]), Err(ChowError::DegenerateAlpha));
        assert!(kronecker_parametrization(&c2, &[1, 2]).is_ok());
    }

    #[test]
    fn roots_with_denominators() {
        let o = VarOrder::new(vec![Var::T(0)]);
        let p = crate::parse::parse_poly(&Rationals, &o, "6*T0^3 - 5*T0^2 + T0").unwrap();
        let r = rational_roots(&p).unwrap();
        assert_eq!(r, vec![q(0), BigRational::new(1.into(), 3.into()), BigRational::new(1.into(), 2.into())]);
    }
}
