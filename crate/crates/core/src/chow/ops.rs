use crate::error::{ChowError, Result};
use crate::field::Field;
use crate::gcd::{gcd_inner, monic_gcd};
use crate::poly::Poly;
use crate::var::{char_order, chow_order, x_order, Order, Var, VarOrder};

use super::{characteristic_polynomial, degree_d_chow_form, ChowForm};

/// `X1 > ... > Xn > ℓ_0,1 > ... > ℓ_{blocks-1},n`.
pub fn proj_order(n: usize, blocks: usize) -> Order {
    let mut v: Vec<Var> = (1..=n as u32).map(Var::X).collect();
    for i in 0..blocks as u32 {
        for j in 1..=n as u32 {
            v.push(Var::L(i, j));
        }
    }
    VarOrder::new(v)
}

fn check_same_ring<F: Field>(a: &ChowForm<F>, b: &ChowForm<F>) -> Result<()> {
    if a.n != b.n || a.blocks != b.blocks {
        return Err(ChowError::OrderMismatch(format!(
            "chow forms in different rings (n={}, blocks={}) vs (n={}, blocks={})",
            a.n, a.blocks, b.n, b.blocks
        )));
    }
    Ok(())
}

/// Chow form of `V1 ∪ V2`: `P / gcd(P, ∂P/∂U_0,0)` with `P = C1·C2`.
pub fn union_chow<F: Field>(c1: &ChowForm<F>, c2: &ChowForm<F>) -> Result<ChowForm<F>> {
    check_same_ring(c1, c2)?;
    let p = c1.poly.mul(&c2.poly);
    let q = monic_gcd(&p, &p.derivative(0)).map_err(|e| e.at("union"))?;
    let out = p.exact_div(&q).map_err(|e| e.at("union"))?;
    ChowForm::new(out, c1.n, c1.blocks)
}

/// `C(L_0, -ℓ_0,1, ..., -ℓ_0,n, ..., L_r, -ℓ_r,1, ...)` with `L_i = Σ_j ℓ_i,j X_j`.
pub fn generic_projection_chow<F: Field>(c: &ChowForm<F>) -> Result<Poly<F>> {
    let f = c.field();
    let target = proj_order(c.n, c.blocks);
    let mut assign = Vec::with_capacity(c.blocks * (c.n + 1));
    for i in 0..c.blocks as u32 {
        let mut li = Poly::zero(f, &target);
        for j in 1..=c.n as u32 {
            let l = Poly::var(f, &target, &Var::L(i, j));
            li = li.add(&l.mul(&Poly::var(f, &target, &Var::X(j))));
            assign.push((c.u(i as usize, j as usize), l.neg()));
        }
        assign.push((c.u(i as usize, 0), li));
    }
    c.poly.substitute(&assign, &target)
}

/// Coefficients of the generic projection with respect to the ℓ-monomials,
/// as polynomials in `X1..Xn`. Their common zero set is the variety.
pub fn equations_from_chow<F: Field>(c: &ChowForm<F>) -> Result<Vec<Poly<F>>> {
    let g = generic_projection_chow(c)?;
    let l_idx: Vec<usize> = (c.n..g.nvars()).collect();
    let xo = x_order(c.n);
    g.split_by(&l_idx)
        .into_values()
        .rev()
        .map(|p| p.with_order(&xo))
        .collect()
}

/// Splits the components of `C` into those inside `V(G)` and the rest.
/// `G` may involve `X1..Xn` and ℓ-variables; in the latter case the
/// ℓ-coefficients are processed one at a time.
pub fn separate_hypersurface_chow<F: Field>(c: &ChowForm<F>, g: &Poly<F>) -> Result<(ChowForm<F>, ChowForm<F>)> {
    let f = c.field();
    let (n, blocks) = (c.n, c.blocks);
    if g.is_zero() {
        return Err(ChowError::undefined("separate_hypersurface: G = 0"));
    }
    if c.is_empty() {
        return Ok((ChowForm::empty(f, n, blocks), c.clone()));
    }
    let p = characteristic_polynomial(c)?;
    let pn = p.normalized();
    let co = char_order(n, blocks);
    // (∂P/∂T0, -∂P/∂U0_1, ..., -∂P/∂U0_n)
    let mut grad = Vec::with_capacity(n + 1);
    grad.push(pn.derivative(co.idx(&Var::T(0))));
    for j in 1..=n as u32 {
        grad.push(pn.derivative(co.idx(&Var::U(0, j))).neg());
    }

    let x_idx: Vec<usize> = (1..=n as u32)
        .map(|j| g.order().index_of(&Var::X(j)))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| ChowError::OrderMismatch("G must live in a ring containing X1..Xn".into()))?;
    let other_idx: Vec<usize> = (0..g.nvars()).filter(|i| !x_idx.contains(i)).collect();
    let dx = g.degree_in_set(&x_idx);
    let mut hx = vec![Var::X(0)];
    hx.extend((1..=n as u32).map(Var::X));
    let ho = VarOrder::new(hx);
    let assign: Vec<(usize, Poly<F>)> = grad.into_iter().enumerate().collect();

    let mut q = pn.clone();
    for (_, gb) in g.split_by(&other_idx).into_iter().rev() {
        let gh = gb.normalized().with_order(&ho)?.homogenize(0, &(1..=n).collect::<Vec<_>>(), dx)?;
        let gp = gh.substitute(&assign, &co)?;
        q = gcd_inner(&q, &gp).map_err(|e| e.at("separate_hypersurface"))?;
        if q.is_constant() {
            break;
        }
    }
    let q = q.monic()?;
    let r = p.exact_div(&q).map_err(|e| e.at("separate_hypersurface"))?;
    Ok((strip_t(&q, n, blocks)?, strip_t(&r, n, blocks)?))
}

/// `(-1)^deg(·,T0) · (·)(T = 0)` back in the Chow ring.
fn strip_t<F: Field>(p: &Poly<F>, n: usize, blocks: usize) -> Result<ChowForm<F>> {
    let f = p.field();
    let co = p.order();
    let t_vals: Vec<(usize, F::Elem)> = (0..blocks as u32).map(|i| (co.idx(&Var::T(i)), f.zero())).collect();
    let dt0 = p.degree_in(co.idx(&Var::T(0)));
    let mut v = p.eval_vars(&t_vals);
    if dt0 % 2 == 1 {
        v = v.neg();
    }
    ChowForm::new(v.with_order(&chow_order(n, blocks))?, n, blocks)
}

/// Splits the components of `C` into those inside the variety of `D` and the rest.
pub fn separate_chow<F: Field>(c: &ChowForm<F>, d: &ChowForm<F>) -> Result<(ChowForm<F>, ChowForm<F>)> {
    if c.n != d.n {
        return Err(ChowError::OrderMismatch("ambient dimensions differ".into()));
    }
    if d.is_empty() {
        return Ok((ChowForm::empty(c.field(), c.n, c.blocks), c.clone()));
    }
    let gl = generic_projection_chow(d)?;
    if gl.is_zero() {
        // the variety of D is all of A^n
        return Ok((c.clone(), ChowForm::empty(c.field(), c.n, c.blocks)));
    }
    separate_hypersurface_chow(c, &gl)
}

/// `Q / (lc(Q) · gcd(Q, ∂Q/∂U_0,0))`.
pub fn weak_squarefree_part<F: Field>(q: &Poly<F>) -> Result<Poly<F>> {
    if q.is_zero() {
        return Err(ChowError::undefined("weak_squarefree_part: Q = 0"));
    }
    let g = monic_gcd(q, &q.derivative(0)).map_err(|e| e.at("weak_squarefree_part"))?;
    q.exact_div(&g).map_err(|e| e.at("weak_squarefree_part"))?.monic()
}

/// Chow form of `V ∩ V(F)` when the intersection is proper.
pub fn intersection_chow<F: Field>(c: &ChowForm<F>, fpoly: &Poly<F>) -> Result<ChowForm<F>> {
    if c.blocks < 2 {
        return Err(ChowError::undefined("intersection: dimension 0 input"));
    }
    if c.is_empty() {
        return Ok(ChowForm::empty(c.field(), c.n, c.blocks - 1));
    }
    let g = degree_d_chow_form(c, fpoly)?;
    let s = weak_squarefree_part(&g.poly)?;
    ChowForm::new(s, c.n, c.blocks - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chow::chow_ambient;
    use crate::field::Rationals;
    use crate::parse::parse_poly;
    use crate::poly::QPoly;

    fn cf(s: &str, n: usize, blocks: usize) -> ChowForm<Rationals> {
        ChowForm::new(parse_poly(&Rationals, &chow_order(n, blocks), s).unwrap(), n, blocks).unwrap()
    }

    fn xp(s: &str, n: usize) -> QPoly {
        parse_poly(&Rationals, &x_order(n), s).unwrap()
    }

    #[test]
    fn union_examples() {
        let a = cf("U0_0 + U0_1", 1, 1);
        let b = cf("U0_0 + 2*U0_1", 1, 1);
        assert_eq!(union_chow(&a, &b).unwrap(), cf("U0_0^2 + 3*U0_0*U0_1 + 2*U0_1^2", 1, 1));
        assert_eq!(union_chow(&a, &a).unwrap(), a);
        assert_eq!(union_chow(&a, &ChowForm::empty(&Rationals, 1, 1)).unwrap(), a);
    }

    #[test]
    fn projection_examples() {
        let g = generic_projection_chow(&cf("U0_0 + 2*U0_1", 1, 1)).unwrap();
        assert_eq!(g, parse_poly(&Rationals, &proj_order(1, 1), "L0_1*X1 - 2*L0_1").unwrap());
        assert!(generic_projection_chow(&chow_ambient(&Rationals, 1)).unwrap().is_zero());
        assert!(generic_projection_chow(&ChowForm::empty(&Rationals, 1, 1)).unwrap().is_one());
    }

    #[test]
    fn equations_examples() {
        assert_eq!(equations_from_chow(&cf("U0_0 + 2*U0_1", 1, 1)).unwrap(), vec![xp("X1 - 2", 1)]);
        assert_eq!(equations_from_chow(&ChowForm::empty(&Rationals, 1, 1)).unwrap(), vec![xp("1", 1)]);
        let eqs = equations_from_chow(&cf("U0_0*U1_2 - U0_2*U1_0", 2, 2)).unwrap();
        let monic: Vec<QPoly> = eqs.iter().map(|e| e.monic().unwrap()).collect();
        assert!(monic.iter().all(|e| *e == xp("X1", 2)));
        let q = Rationals;
        for (x1, x2, on) in [(0, 5, true), (0, -3, true), (1, 0, false), (2, 7, false)] {
            let pt = [q.from_i64(x1), q.from_i64(x2)];
            let all_zero = eqs.iter().all(|e| e.evaluate(&pt) == q.zero());
            assert_eq!(all_zero, on);
        }
    }

    #[test]
    fn separate_hypersurface_examples() {
        let c = cf("U0_0^2 + 3*U0_0*U0_1 + 2*U0_1^2", 1, 1);
        let (k, l) = separate_hypersurface_chow(&c, &xp("X1 - 1", 1)).unwrap();
        assert_eq!(k, cf("U0_0 + U0_1", 1, 1));
        assert_eq!(l, cf("U0_0 + 2*U0_1", 1, 1));
        let (k, l) = separate_hypersurface_chow(&c, &xp("X1 - 3", 1)).unwrap();
        assert!(k.is_empty() && k.poly().is_one());
        assert_eq!(l, c);
        let (k, l) = separate_hypersurface_chow(&c, &xp("1", 1)).unwrap();
        assert!(k.is_empty());
        assert_eq!(l, c);
    }

    #[test]
    fn separate_chow_examples() {
        let line = cf("U0_0*U1_2 - U0_2*U1_0", 2, 2);
        let (z, p) = separate_chow(&cf("U0_0", 2, 1), &line).unwrap();
        assert_eq!(z, cf("U0_0", 2, 1));
        assert!(p.is_empty());
        let c = cf("U0_0 + U0_1", 2, 1);
        let (z, p) = separate_chow(&c, &line).unwrap();
        assert!(z.is_empty());
        assert_eq!(p, c);
        let (z, p) = separate_chow(&c, &ChowForm::empty(&Rationals, 2, 2)).unwrap();
        assert!(z.is_empty());
        assert_eq!(p, c);
    }

    #[test]
    fn weak_squarefree_examples() {
        let o = chow_order(1, 1);
        let q = |s: &str| parse_poly(&Rationals, &o, s).unwrap();
        assert_eq!(
            weak_squarefree_part(&q("U0_1*U0_0^2 + 2*U0_0*U0_1^2 + U0_1^3")).unwrap(),
            q("U0_0 + U0_1")
        );
        assert_eq!(weak_squarefree_part(&q("U0_0^2 - U0_1^2")).unwrap(), q("U0_0^2 - U0_1^2"));
        assert!(weak_squarefree_part(&q("5")).unwrap().is_one());
    }

    #[test]
    fn intersection_examples() {
        let a = chow_ambient(&Rationals, 1);
        assert_eq!(intersection_chow(&a, &xp("X1 - 2", 1)).unwrap(), cf("U0_0 + 2*U0_1", 1, 1));
        assert_eq!(intersection_chow(&a, &xp("X1^2 - 1", 1)).unwrap(), cf("U0_0^2 - U0_1^2", 1, 1));
        assert_eq!(intersection_chow(&a, &xp("X1^2 + 1", 1)).unwrap(), cf("U0_0^2 + U0_1^2", 1, 1));
    }
}
