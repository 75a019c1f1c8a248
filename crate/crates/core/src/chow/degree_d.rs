//! Degree-d Chow forms `C_{d,V}[F]`.
//!
//! Three evaluation routes compute the same polynomial
//! `G = a^d det(F^h(M_0..M_n)) / det(M_0)^d`:
//! a symbolic route with `F`'s coefficients substituted up front, a
//! reference route with generic coefficients `V(α)`, and a pointwise route
//! that evaluates `G` on a lower-set grid and interpolates.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{ChowError, Result};
use crate::field::Field;
use crate::matrix::{self, det_poly_matrix, poly_mat_mul, Mat, PolyMatrix};
use crate::monomial::Monomial;
use crate::poly::Poly;
use crate::var::{chow_order, Order, Var};

use super::ChowForm;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegreeDStrategy {
    /// Symbolic for `D <= 1` or small characteristic, interpolation otherwise.
    Auto,
    Symbolic,
    Interpolation,
    /// Generic coefficients `V(α)`, specialized at the end. Tiny inputs only.
    Reference,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DegreeDChowValue<F: Field> {
    /// Polynomial in the blocks `U_0..U_{r-1}`.
    pub poly: Poly<F>,
    pub n: usize,
    pub blocks: usize,
    pub source_d: u32,
}

pub fn degree_d_chow_form<F: Field>(c: &ChowForm<F>, f: &Poly<F>) -> Result<DegreeDChowValue<F>> {
    degree_d_chow_form_with(c, f, DegreeDStrategy::Auto)
}

pub fn degree_d_chow_form_with<F: Field>(
    c: &ChowForm<F>,
    f: &Poly<F>,
    strategy: DegreeDStrategy,
) -> Result<DegreeDChowValue<F>> {
    if c.blocks < 2 {
        return Err(ChowError::undefined("degree_d: r = 0"));
    }
    if f.is_zero() {
        return Err(ChowError::undefined("degree_d: F = 0"));
    }
    let fx = f.with_order(&crate::var::x_order(c.n))?;
    let d = fx.total_degree();
    let (n, r) = (c.n, c.blocks - 1);
    let target = chow_order(n, r);
    if c.is_empty() {
        return Ok(DegreeDChowValue {
            poly: Poly::one(c.field(), &target),
            n,
            blocks: r,
            source_d: d,
        });
    }
    let strategy = match strategy {
        DegreeDStrategy::Auto => {
            let ch = c.field().characteristic();
            if c.degree <= 1 || (ch != 0 && ch < (1 << 20)) {
                DegreeDStrategy::Symbolic
            } else {
                DegreeDStrategy::Interpolation
            }
        }
        s => s,
    };
    let poly = match strategy {
        DegreeDStrategy::Symbolic => symbolic(c, &fx)?,
        DegreeDStrategy::Reference => {
            let g = degree_d_generic(c, d)?;
            specialize_generic(&g, &fx, n, r)?
        }
        _ => interpolate(c, &fx)?,
    };
    Ok(DegreeDChowValue {
        poly: poly.with_order(&target)?,
        n,
        blocks: r,
        source_d: d,
    })
}

/// `D×D` matrix with `a` on the subdiagonal and `-p_i` in the last column,
/// where `p_i` is the coefficient of `T^i` and `a = p_D`.
pub fn pseudo_companion<F: Field>(p: &Poly<F>, t: usize) -> Result<PolyMatrix<F>> {
    let coeffs = p.coeffs_in(t);
    let dd = coeffs.len() - 1;
    if dd == 0 {
        return Err(ChowError::ZeroLeadingCoefficient);
    }
    Ok(companion_from_coeffs(&coeffs, p.field(), p.order()))
}

fn companion_from_coeffs<F: Field>(coeffs: &[Poly<F>], field: &F, order: &Order) -> PolyMatrix<F> {
    let dd = coeffs.len() - 1;
    let a = &coeffs[dd];
    let mut m = vec![vec![Poly::zero(field, order); dd]; dd];
    for i in 0..dd {
        if i + 1 < dd {
            m[i + 1][i] = a.clone();
        }
        m[i][dd - 1] = coeffs[i].neg();
    }
    m
}

/// Coefficient data of the characteristic polynomial with respect to `T`.
struct CharData<F: Field> {
    ring: Order,
    t: usize,
    a: Poly<F>,
    pcoeffs: Vec<Poly<F>>,
    /// T-coefficient lists of `w_0 = ∂P/∂T` and `w_i = -∂P/∂U_r,i`.
    w: Vec<Vec<Poly<F>>>,
    dd: usize,
}

fn char_data<F: Field>(c: &ChowForm<F>, extra: &[Var]) -> Result<CharData<F>> {
    let f = c.field();
    let (n, r) = (c.n, c.blocks - 1);
    let mut ext = vec![Var::T(0)];
    ext.extend_from_slice(extra);
    let ring = c.order().extended(&ext);
    let t = ring.idx(&Var::T(0));
    let cr = c.poly.with_order(&ring)?;
    let shift = Poly::var_index(f, &ring, c.u(r, 0)).sub(&Poly::var_index(f, &ring, t));
    let mut p = cr.substitute(&[(c.u(r, 0), shift)], &ring)?;
    let dd = c.degree as usize;
    if dd % 2 == 1 {
        p = p.neg();
    }
    let pcoeffs = p.coeffs_in(t);
    if pcoeffs.len() != dd + 1 || pcoeffs[dd].is_zero() {
        return Err(ChowError::undefined("degree_d: leading coefficient in T vanishes"));
    }
    let a = pcoeffs[dd].clone();
    let mut w = Vec::with_capacity(n + 1);
    w.push(pad(p.derivative(t).coeffs_in(t), dd, f, &ring));
    for j in 1..=n {
        w.push(pad(p.derivative(c.u(r, j)).neg().coeffs_in(t), dd, f, &ring));
    }
    Ok(CharData {
        ring,
        t,
        a,
        pcoeffs,
        w,
        dd,
    })
}

fn pad<F: Field>(mut v: Vec<Poly<F>>, len: usize, f: &F, o: &Order) -> Vec<Poly<F>> {
    v.resize(len.max(v.len()), Poly::zero(f, o));
    v
}

/// `M_i = Σ_k w_i[k] a^(D-k) M_P^k`.
fn block_matrices<F: Field>(cd: &CharData<F>, field: &F) -> Vec<PolyMatrix<F>> {
    let o = &cd.ring;
    let dd = cd.dd;
    let mp = companion_from_coeffs(&cd.pcoeffs, field, o);
    let id: PolyMatrix<F> = (0..dd)
        .map(|i| (0..dd).map(|j| if i == j { Poly::one(field, o) } else { Poly::zero(field, o) }).collect())
        .collect();
    let mut mp_pow = vec![id];
    for k in 1..dd {
        let next = poly_mat_mul(&mp_pow[k - 1], &mp, field, o);
        mp_pow.push(next);
    }
    let mut a_pow = vec![Poly::one(field, o)];
    for k in 1..=dd {
        let next = a_pow[k - 1].mul(&cd.a);
        a_pow.push(next);
    }
    cd.w
        .iter()
        .map(|wi| {
            let mut m = vec![vec![Poly::zero(field, o); dd]; dd];
            for (k, ck) in wi.iter().enumerate() {
                if ck.is_zero() || k >= dd {
                    continue;
                }
                let s = ck.mul(&a_pow[dd - k]);
                for i in 0..dd {
                    for j in 0..dd {
                        if !mp_pow[k][i][j].is_zero() {
                            m[i][j] = m[i][j].add(&mp_pow[k][i][j].mul(&s));
                        }
                    }
                }
            }
            m
        })
        .collect()
}

/// `Σ_α coeff_α M_0^α0 ... M_n^αn` for commuting matrices.
fn eval_matrix_poly<F: Field>(
    terms: &[(Vec<u16>, Poly<F>)],
    ms: &[PolyMatrix<F>],
    field: &F,
    o: &Order,
) -> PolyMatrix<F> {
    let dd = ms[0].len();
    let maxe: Vec<u16> = (0..ms.len())
        .map(|i| terms.iter().map(|(e, _)| e[i]).max().unwrap_or(0))
        .collect();
    let id: PolyMatrix<F> = (0..dd)
        .map(|i| (0..dd).map(|j| if i == j { Poly::one(field, o) } else { Poly::zero(field, o) }).collect())
        .collect();
    let pows: Vec<Vec<PolyMatrix<F>>> = ms
        .iter()
        .zip(maxe.iter())
        .map(|(m, &e)| {
            let mut v = vec![id.clone()];
            for k in 1..=e as usize {
                let next = poly_mat_mul(&v[k - 1], m, field, o);
                v.push(next);
            }
            v
        })
        .collect();
    let mut acc = vec![vec![Poly::zero(field, o); dd]; dd];
    for (e, coeff) in terms {
        let mut prod: Option<PolyMatrix<F>> = None;
        for (i, &k) in e.iter().enumerate() {
            if k == 0 {
                continue;
            }
            prod = Some(match prod {
                None => pows[i][k as usize].clone(),
                Some(p) => poly_mat_mul(&p, &pows[i][k as usize], field, o),
            });
        }
        let prod = prod.unwrap_or_else(|| id.clone());
        for i in 0..dd {
            for j in 0..dd {
                if !prod[i][j].is_zero() {
                    acc[i][j] = acc[i][j].add(&prod[i][j].mul(coeff));
                }
            }
        }
    }
    acc
}

/// Homogenized terms of `F` over `(X0, X1..Xn)` with constant coefficients in `ring`.
fn homogenized_terms<F: Field>(fx: &Poly<F>, ring: &Order) -> Vec<(Vec<u16>, Poly<F>)> {
    let d = fx.total_degree() as u16;
    fx.terms()
        .iter()
        .map(|(m, c)| {
            let mut e = vec![d - m.degree() as u16];
            e.extend_from_slice(m.exps());
            (e, Poly::constant(fx.field(), ring, c.clone()))
        })
        .collect()
}

fn finish<F: Field>(c: &ChowForm<F>, g: Poly<F>) -> Result<Poly<F>> {
    let r = c.blocks - 1;
    let last = c.block_indices(r);
    if last.iter().any(|&i| g.depends_on(i)) {
        return Err(ChowError::undefined("degree_d: result depends on the last block"));
    }
    Ok(g)
}

fn core_formula<F: Field>(c: &ChowForm<F>, cd: &CharData<F>, terms: &[(Vec<u16>, Poly<F>)], d: u32) -> Result<Poly<F>> {
    let field = c.field();
    let o = &cd.ring;
    let ms = block_matrices(cd, field);
    let fm = eval_matrix_poly(terms, &ms, field, o);
    let det1 = det_poly_matrix(&fm, field, o)?;
    let det0 = det_poly_matrix(&ms[0], field, o)?;
    if det0.is_zero() {
        return Err(ChowError::undefined("degree_d: det(M0) = 0"));
    }
    let num = cd.a.pow(d).mul(&det1);
    let g = num
        .exact_div(&det0.pow(d))
        .map_err(|_| ChowError::undefined("degree_d: division not exact"))?;
    finish(c, g)
}

fn symbolic<F: Field>(c: &ChowForm<F>, fx: &Poly<F>) -> Result<Poly<F>> {
    let cd = char_data(c, &[])?;
    let d = fx.total_degree();
    let terms = homogenized_terms(fx, &cd.ring);
    if cd.dd == 1 {
        // 1×1 matrices: M_i = a·w_i and w_0 = a, so G = F^h(w_0, ..., w_n)
        let field = c.field();
        let w: Vec<Poly<F>> = cd.w.iter().map(|wi| wi[0].clone()).collect();
        debug_assert_eq!(w[0], cd.a);
        let mut g = Poly::zero(field, &cd.ring);
        let mut cache: HashMap<(usize, u16), Poly<F>> = HashMap::new();
        for (e, coeff) in &terms {
            let mut t = coeff.clone();
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    let pw = cache.entry((i, k)).or_insert_with(|| w[i].pow(k as u32));
                    t = t.mul(pw);
                }
            }
            g = g.add(&t);
        }
        let _ = cd.t;
        return finish(c, g);
    }
    core_formula(c, &cd, &terms, d)
}

fn v_vars(n: usize, d: u32) -> Vec<Vec<u16>> {
    // all α ∈ N^{n+1} with |α| = d, X0 exponent first
    fn rec(k: usize, left: u16, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if k == 0 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for e in (0..=left).rev() {
            cur.push(e);
            rec(k - 1, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, d as u16, &mut Vec::new(), &mut out);
    out
}

/// `C_{d,V}` with generic coefficients `V(α)`, `α = (α_0, ..., α_n)`.
/// Lives in `chow_order(n, r+1)` extended by `T0` and the `V` variables.
pub fn degree_d_generic<F: Field>(c: &ChowForm<F>, d: u32) -> Result<Poly<F>> {
    let alphas = v_vars(c.n, d);
    let vs: Vec<Var> = alphas.iter().map(|a| Var::V(a.iter().map(|&x| x as u32).collect())).collect();
    let cd = char_data(c, &vs)?;
    let terms: Vec<(Vec<u16>, Poly<F>)> = alphas
        .iter()
        .zip(vs.iter())
        .map(|(a, v)| (a.clone(), Poly::var(c.field(), &cd.ring, v)))
        .collect();
    core_formula(c, &cd, &terms, d)
}

/// Substitute `V(α) ↦` coefficient of `X^α` in the homogenization of `F`.
pub fn specialize_generic<F: Field>(g: &Poly<F>, fx: &Poly<F>, n: usize, r: usize) -> Result<Poly<F>> {
    let field = g.field();
    let d = fx.total_degree() as u16;
    let mut coeff: HashMap<Vec<u32>, F::Elem> = HashMap::new();
    for (m, c) in fx.terms() {
        let mut a = vec![(d - m.degree() as u16) as u32];
        a.extend(m.exps().iter().map(|&x| x as u32));
        coeff.insert(a, c.clone());
    }
    let vals: Vec<(usize, F::Elem)> = g
        .order()
        .vars()
        .iter()
        .enumerate()
        .filter_map(|(i, v)| match v {
            Var::V(a) => Some((i, coeff.get(a).cloned().unwrap_or_else(|| field.zero()))),
            _ => None,
        })
        .collect();
    g.eval_vars(&vals).with_order(&chow_order(n, r))
}

// ---- pointwise evaluation and lower-set interpolation ----

/// Polynomials of `C` and `∂C/∂U_r,j` specialized at `U_r = (c0 - T, c1, ..., cn)`,
/// as lists of (exponents over blocks 0..r-1, T-exponent, coefficient).
struct Specialized<F: Field> {
    polys: Vec<Vec<(Vec<u16>, usize, F::Elem)>>,
    dd: usize,
    sign_neg: bool,
}

fn specialize_last_block<F: Field>(c: &ChowForm<F>, scale: &F::Elem, cvals: &[F::Elem]) -> Result<Specialized<F>> {
    let f = c.field();
    let (n, r) = (c.n, c.blocks - 1);
    let ring = c.order().extended(&[Var::T(0)]);
    let t = ring.idx(&Var::T(0));
    let cr = c.poly.scale(scale).with_order(&ring)?;
    let mut assign = Vec::new();
    for j in 0..=n {
        let v = Poly::constant(f, &ring, cvals[j].clone());
        let v = if j == 0 { v.sub(&Poly::var_index(f, &ring, t)) } else { v };
        assign.push((c.u(r, j), v));
    }
    let nfront = r * (n + 1);
    let mut sources = vec![cr.clone()];
    for j in 1..=n {
        sources.push(cr.derivative(c.u(r, j)));
    }
    let mut polys = Vec::with_capacity(sources.len());
    for s in sources {
        let sp = s.substitute(&assign, &ring)?;
        polys.push(
            sp.terms()
                .iter()
                .map(|(m, co)| (m.exps()[..nfront].to_vec(), m.exp(t) as usize, co.clone()))
                .collect(),
        );
    }
    Ok(Specialized {
        polys,
        dd: c.degree as usize,
        sign_neg: c.degree % 2 == 1,
    })
}

fn eval_univariate<F: Field>(f: &F, terms: &[(Vec<u16>, usize, F::Elem)], pw: &[Vec<F::Elem>], len: usize) -> Vec<F::Elem> {
    let mut out = vec![f.zero(); len];
    for (e, k, c) in terms {
        let mut v = c.clone();
        for (i, &x) in e.iter().enumerate() {
            if x > 0 {
                v = f.mul(&v, &pw[i][x as usize]);
            }
        }
        if *k < len {
            f.add_assign(&mut out[*k], &v);
        }
    }
    out
}

/// `G(u)` for a point `u` of blocks `0..r-1`; `None` if `a` or `det(M0)` vanish.
fn eval_point<F: Field>(f: &F, sp: &Specialized<F>, fh: &[(Vec<u16>, F::Elem)], d: u32, u: &[F::Elem]) -> Option<F::Elem> {
    let dd = sp.dd;
    let maxe = 2 * dd + 2;
    let pw: Vec<Vec<F::Elem>> = u
        .iter()
        .map(|x| {
            let mut v = vec![f.one()];
            for k in 1..=maxe {
                let next = f.mul(&v[k - 1], x);
                v.push(next);
            }
            v
        })
        .collect();
    let sgn = |v: Vec<F::Elem>| -> Vec<F::Elem> {
        if sp.sign_neg {
            v.iter().map(|x| f.neg(x)).collect()
        } else {
            v
        }
    };
    let p = sgn(eval_univariate(f, &sp.polys[0], &pw, dd + 1));
    let a = p[dd].clone();
    if f.is_zero(&a) {
        return None;
    }
    // w_0 = dP/dT
    let mut w = Vec::with_capacity(sp.polys.len());
    w.push(
        (0..dd)
            .map(|k| f.mul(&p[k + 1], &f.from_i64(k as i64 + 1)))
            .collect::<Vec<_>>(),
    );
    for j in 1..sp.polys.len() {
        let v = sgn(eval_univariate(f, &sp.polys[j], &pw, dd + 1));
        w.push(v.iter().map(|x| f.neg(x)).collect());
    }
    let mut mp: Mat<F::Elem> = vec![vec![f.zero(); dd]; dd];
    for i in 0..dd {
        if i + 1 < dd {
            mp[i + 1][i] = a.clone();
        }
        mp[i][dd - 1] = f.neg(&p[i]);
    }
    let mut mp_pow = vec![matrix::identity(f, dd)];
    for k in 1..dd {
        let next = matrix::mat_mul(f, &mp_pow[k - 1], &mp);
        mp_pow.push(next);
    }
    let mut a_pow = vec![f.one()];
    for k in 1..=dd {
        let next = f.mul(&a_pow[k - 1], &a);
        a_pow.push(next);
    }
    let ms: Vec<Mat<F::Elem>> = w
        .iter()
        .map(|wi| {
            let mut m = vec![vec![f.zero(); dd]; dd];
            for k in 0..dd.min(wi.len()) {
                if f.is_zero(&wi[k]) {
                    continue;
                }
                let s = f.mul(&wi[k], &a_pow[dd - k]);
                matrix::mat_add_scaled(f, &mut m, &mp_pow[k], &s);
            }
            m
        })
        .collect();
    let det0 = matrix::det(f, &ms[0]);
    if f.is_zero(&det0) {
        return None;
    }
    let mut pows: Vec<Vec<Mat<F::Elem>>> = Vec::with_capacity(ms.len());
    for m in &ms {
        let mut v = vec![matrix::identity(f, dd)];
        for k in 1..=d as usize {
            let next = matrix::mat_mul(f, &v[k - 1], m);
            v.push(next);
        }
        pows.push(v);
    }
    let mut fm: Mat<F::Elem> = vec![vec![f.zero(); dd]; dd];
    for (e, coeff) in fh {
        let mut prod: Option<Mat<F::Elem>> = None;
        for (i, &k) in e.iter().enumerate() {
            if k > 0 {
                prod = Some(match prod {
                    None => pows[i][k as usize].clone(),
                    Some(pm) => matrix::mat_mul(f, &pm, &pows[i][k as usize]),
                });
            }
        }
        let prod = prod.unwrap_or_else(|| matrix::identity(f, dd));
        matrix::mat_add_scaled(f, &mut fm, &prod, coeff);
    }
    let det1 = matrix::det(f, &fm);
    let num = f.mul(&f.pow(&a, d as u64), &det1);
    f.div(&num, &f.pow(&det0, d as u64))
}

/// Multi-indices of `blocks` simplices of size `e` in `n` variables each.
fn lower_set(blocks: usize, n: usize, e: u16) -> Vec<Vec<u16>> {
    let mut simplex: Vec<Vec<u16>> = Vec::new();
    fn rec(k: usize, left: u16, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if k == 0 {
            out.push(cur.clone());
            return;
        }
        for x in 0..=left {
            cur.push(x);
            rec(k - 1, left - x, cur, out);
            cur.pop();
        }
    }
    rec(n, e, &mut Vec::new(), &mut simplex);
    let mut out: Vec<Vec<u16>> = vec![Vec::new()];
    for _ in 0..blocks {
        let mut next = Vec::with_capacity(out.len() * simplex.len());
        for o in &out {
            for s in &simplex {
                let mut v = o.clone();
                v.extend_from_slice(s);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

fn divided_differences<F: Field>(f: &F, vals: &[F::Elem], z: &[F::Elem]) -> Vec<F::Elem> {
    let mut line = vals.to_vec();
    let len = line.len() - 1;
    for lvl in 1..=len {
        for k in (lvl..=len).rev() {
            let num = f.sub(&line[k], &line[k - 1]);
            let den = f.sub(&z[k], &z[k - lvl]);
            line[k] = f.div(&num, &den).expect("distinct nodes");
        }
    }
    line
}

/// `Σ c_k ∏_{j<k}(x - z_j)` in monomial form, by Horner.
fn newton_to_monomial<F: Field>(f: &F, c: &[F::Elem], z: &[F::Elem]) -> Vec<F::Elem> {
    let len = c.len() - 1;
    let mut res: Vec<F::Elem> = vec![c[len].clone()];
    for k in (0..len).rev() {
        let mut next = vec![f.zero(); res.len() + 1];
        for (i, rc) in res.iter().enumerate() {
            f.add_assign(&mut next[i + 1], rc);
            let t2 = f.mul(rc, &z[k]);
            next[i] = f.sub(&next[i], &t2);
        }
        f.add_assign(&mut next[0], &c[k]);
        res = next;
    }
    res
}

fn interpolate<F: Field>(c: &ChowForm<F>, fx: &Poly<F>) -> Result<Poly<F>> {
    let f = c.field();
    let (n, r) = (c.n, c.blocks - 1);
    let d = fx.total_degree();
    let e = (d * c.degree) as u16;
    let fh: Vec<(Vec<u16>, F::Elem)> = fx
        .terms()
        .iter()
        .map(|(m, co)| {
            let mut ex = vec![d as u16 - m.degree() as u16];
            ex.extend_from_slice(m.exps());
            (ex, co.clone())
        })
        .collect();
    let m = r * n;
    let set = lower_set(r, n, e);
    let pos: HashMap<Vec<u16>, usize> = set.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    let seed = (c.poly.len() as u64) << 20 ^ (fx.len() as u64) << 8 ^ d as u64 ^ (n as u64) << 40;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let small = |rng: &mut ChaCha8Rng, lo: i64, hi: i64| f.from_i64(rng.gen_range(lo..=hi));
    // G(λC) = λ^d G(C); evaluating with integral coefficients is much cheaper
    let lam = c.poly.normalizer();
    let unscale = f.inv(&f.pow(&lam, d as u64)).ok_or(ChowError::DivisionByZero)?;

    for _attempt in 0..6 {
        let cvals: Vec<F::Elem> = (0..=n).map(|_| small(&mut rng, -40, 40)).collect();
        let sp = specialize_last_block(c, &lam, &cvals)?;
        let nodes: Vec<Vec<F::Elem>> = (0..m)
            .map(|_| {
                let off = rng.gen_range(-30..=30i64);
                (0..=e as i64).map(|k| f.from_i64(off + k)).collect()
            })
            .collect();
        let point = |idx: &[u16]| -> Vec<F::Elem> {
            let mut u = Vec::with_capacity(r * (n + 1));
            for b in 0..r {
                u.push(f.one());
                for j in 0..n {
                    let v = b * n + j;
                    u.push(nodes[v][idx[v] as usize].clone());
                }
            }
            u
        };
        let mut vals: Vec<F::Elem> = Vec::with_capacity(set.len());
        let mut ok = true;
        for s in &set {
            match eval_point(f, &sp, &fh, d, &point(s)) {
                Some(v) => vals.push(f.mul(&v, &unscale)),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        // divided differences in every dimension first, then the change to
        // the monomial basis; both act line by line inside the lower set
        for pass in 0..2 {
            for t in 0..m {
                let blk = t / n;
                let z = &nodes[t];
                for s in &set {
                    if s[t] != 0 {
                        continue;
                    }
                    let used: u16 = (blk * n..(blk + 1) * n).map(|v| s[v]).sum();
                    let len = (e - used) as usize;
                    let idx: Vec<usize> = (0..=len)
                        .map(|k| {
                            let mut key = s.clone();
                            key[t] = k as u16;
                            pos[&key]
                        })
                        .collect();
                    let line: Vec<F::Elem> = idx.iter().map(|&i| vals[i].clone()).collect();
                    let out = if pass == 0 {
                        divided_differences(f, &line, z)
                    } else {
                        newton_to_monomial(f, &line, z)
                    };
                    for (k, &i) in idx.iter().enumerate() {
                        vals[i] = out[k].clone();
                    }
                }
            }
        }
        let out_order = chow_order(n, r);
        let mut terms = Vec::new();
        for (s, v) in set.iter().zip(vals.iter()) {
            if f.is_zero(v) {
                continue;
            }
            let mut ex = vec![0u16; r * (n + 1)];
            for b in 0..r {
                let used: u16 = (0..n).map(|j| s[b * n + j]).sum();
                ex[b * (n + 1)] = e - used;
                for j in 0..n {
                    ex[b * (n + 1) + 1 + j] = s[b * n + j];
                }
            }
            terms.push((Monomial::from_exps(ex), v.clone()));
        }
        let g = Poly::from_terms(f, &out_order, terms);
        // check at random points with a different last block
        let cvals2: Vec<F::Elem> = (0..=n).map(|_| small(&mut rng, -50, 50)).collect();
        let sp2 = specialize_last_block(c, &lam, &cvals2)?;
        let mut checked = 0;
        for _ in 0..12 {
            if checked == 2 {
                break;
            }
            let u: Vec<F::Elem> = (0..r * (n + 1))
                .map(|i| {
                    let mut v = small(&mut rng, -60, 60);
                    if i % (n + 1) == 0 && f.is_zero(&v) {
                        v = f.one();
                    }
                    v
                })
                .collect();
            if let Some(direct) = eval_point(f, &sp2, &fh, d, &u) {
                if f.mul(&direct, &unscale) != g.evaluate(&u) {
                    return Err(ChowError::undefined("degree_d: interpolation check failed"));
                }
                checked += 1;
            }
        }
        if checked < 2 {
            continue;
        }
        return Ok(g);
    }
    Err(ChowError::undefined("degree_d: no admissible evaluation grid"))
}
