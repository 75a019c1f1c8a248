//! Sparse multivariate polynomials under the graded lexicographic order.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{ChowError, Result};
use crate::field::{Field, PrimeField, Rationals};
use crate::monomial::Monomial;
use crate::var::{Order, Var};

/// Terms are kept sorted in strictly descending monomial order with no zero
/// coefficients, so the first term is the leading term.
#[derive(Clone)]
pub struct Poly<F: Field> {
    field: F,
    order: Order,
    terms: Vec<(Monomial, F::Elem)>,
}

pub type QPoly = Poly<Rationals>;
pub type PPoly = Poly<PrimeField>;

impl<F: Field> PartialEq for Poly<F> {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.order, &other.order) || self.order == other.order) && self.terms == other.terms
    }
}

impl<F: Field> Eq for Poly<F> {}

impl<F: Field> fmt::Debug for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl<F: Field> fmt::Display for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parse::format_poly(self))
    }
}

impl<F: Field> Poly<F> {
    pub fn zero(field: &F, order: &Order) -> Self {
        Poly {
            field: field.clone(),
            order: order.clone(),
            terms: Vec::new(),
        }
    }

    pub fn constant(field: &F, order: &Order, c: F::Elem) -> Self {
        let mut p = Self::zero(field, order);
        if !field.is_zero(&c) {
            p.terms.push((Monomial::one(order.len()), c));
        }
        p
    }

    pub fn one(field: &F, order: &Order) -> Self {
        Self::constant(field, order, field.one())
    }

    pub fn from_i64(field: &F, order: &Order, c: i64) -> Self {
        Self::constant(field, order, field.from_i64(c))
    }

    pub fn var(field: &F, order: &Order, v: &Var) -> Self {
        Self::var_index(field, order, order.idx(v))
    }

    pub fn var_index(field: &F, order: &Order, i: usize) -> Self {
        Poly {
            field: field.clone(),
            order: order.clone(),
            terms: vec![(Monomial::var(order.len(), i, 1), field.one())],
        }
    }

    pub fn monomial(field: &F, order: &Order, m: Monomial, c: F::Elem) -> Self {
        let mut p = Self::zero(field, order);
        if !field.is_zero(&c) {
            p.terms.push((m, c));
        }
        p
    }

    /// Builds from arbitrary terms: combines duplicates, drops zeros, sorts.
    pub fn from_terms(field: &F, order: &Order, terms: impl IntoIterator<Item = (Monomial, F::Elem)>) -> Self {
        let mut map: HashMap<Monomial, F::Elem> = HashMap::new();
        for (m, c) in terms {
            debug_assert_eq!(m.nvars(), order.len());
            match map.get_mut(&m) {
                Some(acc) => field.add_assign(acc, &c),
                None => {
                    map.insert(m, c);
                }
            }
        }
        Self::from_map(field, order, map)
    }

    fn from_map(field: &F, order: &Order, map: HashMap<Monomial, F::Elem>) -> Self {
        let mut terms: Vec<(Monomial, F::Elem)> = map.into_iter().filter(|(_, c)| !field.is_zero(c)).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Poly {
            field: field.clone(),
            order: order.clone(),
            terms,
        }
    }

    /// Terms already sorted descending and nonzero.
    pub(crate) fn from_sorted(field: &F, order: &Order, terms: Vec<(Monomial, F::Elem)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 > w[1].0));
        Poly {
            field: field.clone(),
            order: order.clone(),
            terms,
        }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn order(&self) -> &Order {
        &self.order
    }

    pub fn nvars(&self) -> usize {
        self.order.len()
    }

    pub fn terms(&self) -> &[(Monomial, F::Elem)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(Monomial, F::Elem)> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn is_one(&self) -> bool {
        self.is_constant() && !self.is_zero() && self.field.is_one(&self.terms[0].1)
    }

    /// Constant term value (zero if absent).
    pub fn constant_term(&self) -> F::Elem {
        match self.terms.last() {
            Some((m, c)) if m.is_one() => c.clone(),
            _ => self.field.zero(),
        }
    }

    pub fn lead_term(&self) -> Result<(&Monomial, &F::Elem)> {
        self.terms.first().map(|(m, c)| (m, c)).ok_or(ChowError::ZeroPolynomial)
    }

    pub fn lm(&self) -> Result<&Monomial> {
        self.lead_term().map(|t| t.0)
    }

    pub fn lc(&self) -> Result<&F::Elem> {
        self.lead_term().map(|t| t.1)
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn total_degree(&self) -> u32 {
        self.terms.first().map(|t| t.0.degree()).unwrap_or(0)
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.iter().map(|(m, _)| m.exp(i) as u32).max().unwrap_or(0)
    }

    pub fn degree_in_var(&self, v: &Var) -> u32 {
        self.order.index_of(v).map(|i| self.degree_in(i)).unwrap_or(0)
    }

    /// Max over terms of the summed exponents at `idx`.
    pub fn degree_in_set(&self, idx: &[usize]) -> u32 {
        self.terms.iter().map(|(m, _)| m.partial_degree(idx)).max().unwrap_or(0)
    }

    pub fn degrees(&self) -> Vec<u32> {
        let mut d = vec![0u32; self.nvars()];
        for (m, _) in &self.terms {
            for (i, &e) in m.exps().iter().enumerate() {
                d[i] = d[i].max(e as u32);
            }
        }
        d
    }

    /// Which variables occur.
    pub fn support(&self) -> Vec<bool> {
        self.degrees().into_iter().map(|d| d > 0).collect()
    }

    pub fn depends_on(&self, i: usize) -> bool {
        self.terms.iter().any(|(m, _)| m.exp(i) > 0)
    }

    fn check_compat(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.order, &other.order) || self.order == other.order,
            "polynomials live in different variable orders"
        );
    }

    pub fn neg(&self) -> Self {
        Poly {
            field: self.field.clone(),
            order: self.order.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), self.field.neg(c))).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.merge(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.merge(other, true)
    }

    fn merge(&self, other: &Self, negate: bool) -> Self {
        self.check_compat(other);
        let f = &self.field;
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() || j < b.len() {
            let ord = if i == a.len() {
                std::cmp::Ordering::Less
            } else if j == b.len() {
                std::cmp::Ordering::Greater
            } else {
                a[i].0.cmp(&b[j].0)
            };
            match ord {
                std::cmp::Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    let c = if negate { f.neg(&b[j].1) } else { b[j].1.clone() };
                    out.push((b[j].0.clone(), c));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = if negate { f.sub(&a[i].1, &b[j].1) } else { f.add(&a[i].1, &b[j].1) };
                    if !f.is_zero(&c) {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Poly::from_sorted(f, &self.order, out)
    }

    /// The factor making the coefficients coprime integers (1 over `F_p`).
    pub fn normalizer(&self) -> F::Elem {
        let cs: Vec<&F::Elem> = self.terms.iter().map(|t| &t.1).collect();
        self.field.normalizer(&cs)
    }

    pub fn normalized(&self) -> Self {
        self.scale(&self.normalizer())
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        if self.field.is_zero(c) {
            return Self::zero(&self.field, &self.order);
        }
        Poly {
            field: self.field.clone(),
            order: self.order.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), self.field.mul(a, c))).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &F::Elem) -> Self {
        if self.field.is_zero(c) {
            return Self::zero(&self.field, &self.order);
        }
        Poly {
            field: self.field.clone(),
            order: self.order.clone(),
            terms: self.terms.iter().map(|(t, a)| (t.mul(m), self.field.mul(a, c))).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_compat(other);
        if self.is_zero() || other.is_zero() {
            return Self::zero(&self.field, &self.order);
        }
        if self.terms.len() == 1 {
            return other.mul_monomial(&self.terms[0].0, &self.terms[0].1);
        }
        if other.terms.len() == 1 {
            return self.mul_monomial(&other.terms[0].0, &other.terms[0].1);
        }
        let f = &self.field;
        let nv = self.nvars();
        let top = self.terms[0].0.degree() + other.terms[0].0.degree();
        let w = (32 - top.leading_zeros()).max(1) as usize;
        if nv * w <= 128 {
            // exponent fields of width w cannot carry into each other
            let pa: Vec<u128> = self.terms.iter().map(|(m, _)| m.pack(w)).collect();
            let pb: Vec<u128> = other.terms.iter().map(|(m, _)| m.pack(w)).collect();
            if let Some(p) = self.mul_small_int(other, &pa, &pb, w) {
                return p;
            }
            let mut map: HashMap<u128, F::Elem> = HashMap::with_capacity(self.terms.len() * other.terms.len() / 2 + 1);
            for (ka, (_, ca)) in pa.iter().zip(self.terms.iter()) {
                for (kb, (_, cb)) in pb.iter().zip(other.terms.iter()) {
                    let c = f.mul(ca, cb);
                    match map.get_mut(&(ka + kb)) {
                        Some(acc) => f.add_assign(acc, &c),
                        None => {
                            map.insert(ka + kb, c);
                        }
                    }
                }
            }
            let mut terms: Vec<(Monomial, F::Elem)> = map
                .into_iter()
                .filter(|(_, c)| !f.is_zero(c))
                .map(|(k, c)| (Monomial::unpack(k, w, nv), c))
                .collect();
            terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
            return Self::from_sorted(f, &self.order, terms);
        }
        let mut map: HashMap<Monomial, F::Elem> = HashMap::with_capacity(self.terms.len() * other.terms.len() / 2 + 1);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                let c = f.mul(ca, cb);
                match map.get_mut(&m) {
                    Some(acc) => f.add_assign(acc, &c),
                    None => {
                        map.insert(m, c);
                    }
                }
            }
        }
        Self::from_map(f, &self.order, map)
    }

    /// Packed product with `i128` accumulation; `None` if a coefficient is
    /// not a small integer or a sum overflows.
    fn mul_small_int(&self, other: &Self, pa: &[u128], pb: &[u128], w: usize) -> Option<Self> {
        let f = &self.field;
        let ca: Vec<i64> = self.terms.iter().map(|t| f.as_small_int(&t.1)).collect::<Option<_>>()?;
        let cb: Vec<i64> = other.terms.iter().map(|t| f.as_small_int(&t.1)).collect::<Option<_>>()?;
        let mut map: HashMap<u128, i128> = HashMap::with_capacity(pa.len() * pb.len() / 2 + 1);
        for (ka, a) in pa.iter().zip(ca.iter()) {
            for (kb, b) in pb.iter().zip(cb.iter()) {
                let c = *a as i128 * *b as i128;
                let e = map.entry(ka + kb).or_insert(0);
                *e = e.checked_add(c)?;
            }
        }
        let nv = self.nvars();
        let mut terms: Vec<(Monomial, F::Elem)> = map
            .into_iter()
            .filter(|(_, c)| *c != 0)
            .map(|(k, c)| (Monomial::unpack(k, w, nv), f.from_i128(c)))
            .collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Some(Self::from_sorted(f, &self.order, terms))
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = Self::one(&self.field, &self.order);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        acc
    }

    /// Scale so that the leading coefficient is 1.
    pub fn monic(&self) -> Result<Self> {
        let lc = self.lc()?;
        let inv = self.field.inv(lc).ok_or(ChowError::DivisionByZero)?;
        Ok(self.scale(&inv))
    }

    pub fn derivative(&self, i: usize) -> Self {
        let f = &self.field;
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.exp(i) > 0)
            .map(|(m, c)| {
                let e = m.exp(i);
                (m.with_exp(i, e - 1), f.mul(c, &f.from_i64(e as i64)))
            });
        Self::from_terms(f, &self.order, terms)
    }

    pub fn derivative_var(&self, v: &Var) -> Self {
        match self.order.index_of(v) {
            Some(i) => self.derivative(i),
            None => Self::zero(&self.field, &self.order),
        }
    }

    /// Same polynomial expressed in `target`; every occurring variable must exist there.
    pub fn with_order(&self, target: &Order) -> Result<Self> {
        if Arc::ptr_eq(&self.order, target) {
            return Ok(self.clone());
        }
        let map = self.var_map(target)?;
        let terms = self.terms.iter().map(|(m, c)| {
            let mut e = vec![0u16; target.len()];
            for (i, &x) in m.exps().iter().enumerate() {
                if x > 0 {
                    e[map[i].unwrap()] = x;
                }
            }
            (Monomial::from_exps(e), c.clone())
        });
        Ok(Self::from_terms(&self.field, target, terms))
    }

    fn var_map(&self, target: &Order) -> Result<Vec<Option<usize>>> {
        let deg = self.degrees();
        let mut map = Vec::with_capacity(self.nvars());
        for (i, v) in self.order.vars().iter().enumerate() {
            let t = target.index_of(v);
            if t.is_none() && deg[i] > 0 {
                return Err(ChowError::OrderMismatch(format!("variable {v} missing from target order")));
            }
            map.push(t);
        }
        Ok(map)
    }

    /// Simultaneous substitution of `assign` (variable index → polynomial in
    /// `target`); unassigned variables are carried over to `target` by name.
    pub fn substitute(&self, assign: &[(usize, Poly<F>)], target: &Order) -> Result<Self> {
        let f = &self.field;
        let mut sub: Vec<Option<&Poly<F>>> = vec![None; self.nvars()];
        for (i, p) in assign {
            if !(Arc::ptr_eq(p.order(), target) || **p.order() == **target) {
                return Err(ChowError::OrderMismatch("substitution value in wrong order".into()));
            }
            sub[*i] = Some(p);
        }
        let deg = self.degrees();
        let mut keep: Vec<Option<usize>> = vec![None; self.nvars()];
        for (i, v) in self.order.vars().iter().enumerate() {
            if sub[i].is_none() && deg[i] > 0 {
                keep[i] = Some(target.index_of(v).ok_or_else(|| {
                    ChowError::OrderMismatch(format!("variable {v} missing from target order"))
                })?);
            }
        }
        let mut powers: Vec<Vec<Poly<F>>> = vec![Vec::new(); self.nvars()];
        for i in 0..self.nvars() {
            if let Some(p) = sub[i] {
                let mut pw = vec![Poly::one(f, target)];
                for k in 1..=deg[i] as usize {
                    let next = pw[k - 1].mul(p);
                    pw.push(next);
                }
                powers[i] = pw;
            }
        }
        // Group terms by their substituted part to share products.
        let mut acc: HashMap<Monomial, F::Elem> = HashMap::new();
        let mut cache: HashMap<Vec<u16>, Poly<F>> = HashMap::new();
        for (m, c) in &self.terms {
            let key: Vec<u16> = (0..self.nvars()).map(|i| if sub[i].is_some() { m.exp(i) } else { 0 }).collect();
            let mut keep_e = vec![0u16; target.len()];
            for i in 0..self.nvars() {
                if let Some(t) = keep[i] {
                    keep_e[t] += m.exp(i);
                }
            }
            let keep_m = Monomial::from_exps(keep_e);
            let prod = cache.entry(key.clone()).or_insert_with(|| {
                let mut p = Poly::one(f, target);
                for (i, &e) in key.iter().enumerate() {
                    if e > 0 {
                        p = p.mul(&powers[i][e as usize]);
                    }
                }
                p
            });
            for (pm, pc) in &prod.terms {
                let mm = pm.mul(&keep_m);
                let cc = f.mul(pc, c);
                match acc.get_mut(&mm) {
                    Some(a) => f.add_assign(a, &cc),
                    None => {
                        acc.insert(mm, cc);
                    }
                }
            }
        }
        Ok(Self::from_map(f, target, acc))
    }

    /// Substitute field values for some variables; result stays in the same order.
    pub fn eval_vars(&self, values: &[(usize, F::Elem)]) -> Self {
        let f = &self.field;
        let mut val: Vec<Option<&F::Elem>> = vec![None; self.nvars()];
        for (i, v) in values {
            val[*i] = Some(v);
        }
        let deg = self.degrees();
        let pw: Vec<Vec<F::Elem>> = (0..self.nvars())
            .map(|i| match val[i] {
                Some(v) => {
                    let mut p = vec![f.one()];
                    for k in 1..=deg[i] as usize {
                        let next = f.mul(&p[k - 1], v);
                        p.push(next);
                    }
                    p
                }
                None => Vec::new(),
            })
            .collect();
        let terms = self.terms.iter().map(|(m, c)| {
            let mut c = c.clone();
            let mut e = m.exps().to_vec();
            for i in 0..e.len() {
                if val[i].is_some() && e[i] > 0 {
                    c = f.mul(&c, &pw[i][e[i] as usize]);
                    e[i] = 0;
                }
            }
            (Monomial::from_exps(e), c)
        });
        Self::from_terms(f, &self.order, terms)
    }

    /// Full evaluation at a point (one value per variable).
    pub fn evaluate(&self, point: &[F::Elem]) -> F::Elem {
        let f = &self.field;
        let deg = self.degrees();
        let pw: Vec<Vec<F::Elem>> = (0..self.nvars())
            .map(|i| {
                let mut p = vec![f.one()];
                for k in 1..=deg[i] as usize {
                    let next = f.mul(&p[k - 1], &point[i]);
                    p.push(next);
                }
                p
            })
            .collect();
        let mut acc = f.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    t = f.mul(&t, &pw[i][e as usize]);
                }
            }
            f.add_assign(&mut acc, &t);
        }
        acc
    }

    /// Coefficients with respect to variable `i`: entry `k` is the coefficient
    /// of `x_i^k` (with `x_i` removed), in the same order.
    pub fn coeffs_in(&self, i: usize) -> Vec<Poly<F>> {
        let d = self.degree_in(i) as usize;
        let mut buckets: Vec<Vec<(Monomial, F::Elem)>> = vec![Vec::new(); d + 1];
        for (m, c) in &self.terms {
            let e = m.exp(i) as usize;
            buckets[e].push((m.with_exp(i, 0), c.clone()));
        }
        buckets
            .into_iter()
            .map(|t| {
                // Removing one variable preserves relative order only within equal
                // exponents of it, which is what each bucket holds.
                let mut t = t;
                t.sort_unstable_by(|a, b| b.0.cmp(&a.0));
                Poly::from_sorted(&self.field, &self.order, t)
            })
            .collect()
    }

    /// Inverse of `coeffs_in`.
    pub fn from_coeffs(field: &F, order: &Order, i: usize, coeffs: &[Poly<F>]) -> Self {
        let mut terms = Vec::new();
        for (k, c) in coeffs.iter().enumerate() {
            for (m, a) in &c.terms {
                terms.push((m.with_exp(i, m.exp(i) + k as u16), a.clone()));
            }
        }
        Self::from_terms(field, order, terms)
    }

    /// Split by the exponents at `idx`: map from those exponents to the
    /// coefficient polynomial (with `idx` variables removed).
    pub fn split_by(&self, idx: &[usize]) -> BTreeMap<Vec<u16>, Poly<F>> {
        let mut groups: BTreeMap<Vec<u16>, Vec<(Monomial, F::Elem)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let key: Vec<u16> = idx.iter().map(|&i| m.exp(i)).collect();
            let mut e = m.exps().to_vec();
            for &i in idx {
                e[i] = 0;
            }
            groups.entry(key).or_default().push((Monomial::from_exps(e), c.clone()));
        }
        groups
            .into_iter()
            .map(|(k, mut t)| {
                t.sort_unstable_by(|a, b| b.0.cmp(&a.0));
                (k, Poly::from_sorted(&self.field, &self.order, t))
            })
            .collect()
    }

    /// Multiply each term by `fresh^(d - deg_vars(term))`.
    pub fn homogenize(&self, fresh: usize, vars: &[usize], d: u32) -> Result<Self> {
        if self.depends_on(fresh) {
            return Err(ChowError::OrderMismatch("homogenizing variable already present".into()));
        }
        let dv = self.degree_in_set(vars);
        if dv > d {
            return Err(ChowError::DegreeExceedsTarget { degree: dv, target: d });
        }
        let terms = self.terms.iter().map(|(m, c)| {
            let k = d - m.partial_degree(vars);
            (m.with_exp(fresh, k as u16), c.clone())
        });
        Ok(Self::from_terms(&self.field, &self.order, terms))
    }

    /// True iff every term has degree exactly `d` in the variables `idx`.
    pub fn is_homogeneous_in(&self, idx: &[usize], d: u32) -> bool {
        self.terms.iter().all(|(m, _)| m.partial_degree(idx) == d)
    }

    /// Exact quotient `self / b`.
    pub fn exact_div(&self, b: &Self) -> Result<Self> {
        self.check_compat(b);
        if b.is_zero() {
            return Err(ChowError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        let f = &self.field;
        let (blm, blc) = b.lead_term()?;
        let blc_inv = f.inv(blc).ok_or(ChowError::DivisionByZero)?;
        if b.terms.len() == 1 {
            let mut out = Vec::with_capacity(self.terms.len());
            for (m, c) in &self.terms {
                if !blm.divides(m) {
                    return Err(ChowError::NotDivisible);
                }
                out.push((blm.quotient_of(m), f.mul(c, &blc_inv)));
            }
            return Ok(Poly::from_sorted(f, &self.order, out));
        }
        let (da, db) = (self.degrees(), b.degrees());
        if da.iter().zip(db.iter()).any(|(x, y)| x < y) || self.total_degree() < b.total_degree() {
            return Err(ChowError::NotDivisible);
        }
        let mut rem: BTreeMap<Monomial, F::Elem> = self.terms.iter().cloned().collect();
        let mut quot = Vec::new();
        while let Some((m, c)) = rem.pop_last() {
            if !blm.divides(&m) {
                return Err(ChowError::NotDivisible);
            }
            let qm = blm.quotient_of(&m);
            let qc = f.mul(&c, &blc_inv);
            for (bm, bc) in b.terms.iter().skip(1) {
                let mm = bm.mul(&qm);
                let cc = f.mul(bc, &qc);
                match rem.get_mut(&mm) {
                    Some(a) => {
                        *a = f.sub(a, &cc);
                        if f.is_zero(a) {
                            rem.remove(&mm);
                        }
                    }
                    None => {
                        rem.insert(mm, f.neg(&cc));
                    }
                }
            }
            quot.push((qm, qc));
        }
        Ok(Poly::from_sorted(f, &self.order, quot))
    }

    /// Coefficient-wise map into another field.
    pub fn map_coeffs<G: Field>(&self, g: &G, mut h: impl FnMut(&F::Elem) -> Result<G::Elem>) -> Result<Poly<G>> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let v = h(c)?;
            if !g.is_zero(&v) {
                terms.push((m.clone(), v));
            }
        }
        Ok(Poly::from_sorted(g, &self.order, terms))
    }

    /// Image in `F_q` for `q = field.image_modulus()`; `None` if a denominator vanishes.
    pub fn image(&self) -> Option<Poly<PrimeField>> {
        let q = PrimeField::new(self.field.image_modulus()).ok()?;
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let v = self.field.image(c)?;
            if v != 0 {
                terms.push((m.clone(), v));
            }
        }
        Some(Poly::from_sorted(&q, &self.order, terms))
    }
}

impl Poly<Rationals> {
    /// `(c, P')` with `P = c·P'`, `P'` integral, content 1, positive lc.
    pub fn content_and_primitive(&self) -> Result<(BigRational, Self)> {
        let lc = self.lc()?;
        let mut den = BigInt::one();
        for (_, c) in &self.terms {
            den = den.lcm(c.denom());
        }
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            let v = c.numer() * (&den / c.denom());
            g = g.gcd(&v);
        }
        let mut content = BigRational::new(g, den);
        if lc.is_negative() {
            content = -content;
        }
        let inv = content.recip();
        Ok((content, self.scale(&inv)))
    }

    pub fn primitive(&self) -> Result<Self> {
        Ok(self.content_and_primitive()?.1)
    }

    /// `max(ln den, ln |coeffs of den·P|)` with `den` the minimal common denominator.
    pub fn height(&self) -> Result<f64> {
        if self.is_zero() {
            return Err(ChowError::ZeroPolynomial);
        }
        let mut den = BigInt::one();
        for (_, c) in &self.terms {
            den = den.lcm(c.denom());
        }
        let mut best = ln_bigint(&den);
        for (_, c) in &self.terms {
            let v = (c.numer() * (&den / c.denom())).abs();
            best = best.max(ln_bigint(&v));
        }
        Ok(best)
    }

    pub fn reduce_mod_p(&self, fp: &PrimeField) -> Result<Poly<PrimeField>> {
        let p = BigInt::from(fp.modulus());
        self.map_coeffs(fp, |c| {
            if (c.denom() % &p).is_zero() {
                return Err(ChowError::NotPAdmissible { p: fp.modulus() });
            }
            fp.from_ratio(c.numer(), c.denom())
        })
    }

    /// True when all coefficients are integers.
    pub fn is_integral(&self) -> bool {
        self.terms.iter().all(|(_, c)| c.is_integer())
    }
}

/// Natural log of |v| for a nonzero integer (0 for v = 0).
pub fn ln_bigint(v: &BigInt) -> f64 {
    if v.is_zero() {
        return 0.0;
    }
    let bits = v.bits();
    if bits < 1000 {
        let f: f64 = num_traits::ToPrimitive::to_f64(&v.abs()).unwrap();
        return f.ln();
    }
    let shift = bits - 60;
    let top: f64 = num_traits::ToPrimitive::to_f64(&(v.abs() >> shift)).unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;
    use crate::var::{chow_order, x_order, VarOrder};

    fn q(s: &str, o: &Order) -> QPoly {
        parse_poly(&Rationals, o, s).unwrap()
    }

    #[test]
    fn lead_terms() {
        let o = x_order(2);
        let p = q("X1 + X2^2", &o);
        assert_eq!(p.lm().unwrap().exps(), &[0, 2]);
        let p = q("3*X1*X2 - 5*X1^2", &o);
        let (m, c) = p.lead_term().unwrap();
        assert_eq!(m.exps(), &[2, 0]);
        assert_eq!(*c, Rationals.from_i64(-5));
        let o2 = chow_order(1, 2);
        let p = q("U0_0^2*U1_1^2", &o2);
        assert_eq!(p.lm().unwrap().exps(), &[2, 0, 0, 2]);
        assert_eq!(QPoly::zero(&Rationals, &o).lead_term().err(), Some(ChowError::ZeroPolynomial));
    }

    #[test]
    fn exact_division_examples() {
        let o = chow_order(1, 1);
        let a = q("U0_0^2 - U0_1^2", &o);
        let b = q("U0_0 + U0_1", &o);
        assert_eq!(a.exact_div(&b).unwrap(), q("U0_0 - U0_1", &o));
        assert_eq!(a.exact_div(&QPoly::one(&Rationals, &o)).unwrap(), a);
        let ox = x_order(1);
        assert_eq!(q("X1^2 + 1", &ox).exact_div(&q("X1", &ox)), Err(ChowError::NotDivisible));
        assert_eq!(a.exact_div(&QPoly::zero(&Rationals, &o)), Err(ChowError::DivisionByZero));
    }

    #[test]
    fn homogenize_examples() {
        let o = VarOrder::new(vec![Var::X(0), Var::X(1), Var::X(2)]);
        let p = q("X1^2 - 1", &o);
        assert_eq!(p.homogenize(0, &[1], 2).unwrap(), q("X1^2 - X0^2", &o));
        let p = q("X1 + X2", &o);
        assert_eq!(p.homogenize(0, &[1, 2], 1).unwrap(), p);
        let o2 = VarOrder::new(vec![Var::U(0, 1), Var::T(0), Var::TPrime]);
        let p = q("-U0_1", &o2);
        assert_eq!(p.homogenize(2, &[1], 1).unwrap(), q("-U0_1*Tp", &o2));
        assert!(matches!(q("X1^3", &o).homogenize(0, &[1], 2), Err(ChowError::DegreeExceedsTarget { .. })));
    }

    #[test]
    fn derivative_examples() {
        let o = VarOrder::new(vec![Var::T(0), Var::U(0, 0), Var::U(0, 1), Var::T(1), Var::U(1, 1)]);
        assert_eq!(q("U0_0^2", &o).derivative(1), q("2*U0_0", &o));
        assert!(q("U0_1", &o).derivative(1).is_zero());
        assert_eq!(q("T0*U1_1 - U0_1*T1", &o).derivative(0), q("U1_1", &o));
    }

    #[test]
    fn substitute_examples() {
        let o = VarOrder::new(vec![Var::T(0), Var::U(0, 0), Var::U(0, 1)]);
        let p = q("U0_0 + 2*U0_1", &o);
        let s = p.substitute(&[(1, q("U0_0 - T0", &o))], &o).unwrap();
        assert_eq!(s, q("U0_0 - T0 + 2*U0_1", &o));
        assert_eq!(p.substitute(&[], &o).unwrap(), p);
    }

    #[test]
    fn content_height_reduction() {
        let o = chow_order(1, 1);
        let (c, p) = q("U0_0 + 1/2*U0_1", &o).content_and_primitive().unwrap();
        assert_eq!(c, BigRational::new(1.into(), 2.into()));
        assert_eq!(p, q("2*U0_0 + U0_1", &o));
        let ox = x_order(1);
        let (c, p) = q("3/2*X1 + 3", &ox).content_and_primitive().unwrap();
        assert_eq!(c, BigRational::new(3.into(), 2.into()));
        assert_eq!(p, q("X1 + 2", &ox));
        let (c, p) = q("-X1", &ox).content_and_primitive().unwrap();
        assert_eq!(c, Rationals.from_i64(-1));
        assert_eq!(p, q("X1", &ox));
        assert!((q("7", &ox).height().unwrap() - 7f64.ln()).abs() < 1e-12);
        assert!((q("1/2*X1 + 3", &ox).height().unwrap() - 6f64.ln()).abs() < 1e-12);
        assert_eq!(q("X1 - 1", &ox).height().unwrap(), 0.0);
        let f3 = PrimeField::new(3).unwrap();
        let r = q("1/2*X1", &ox).reduce_mod_p(&f3).unwrap();
        assert_eq!(r.terms()[0].1, 2);
        let r = q("2*U0_0 + U0_1", &o).reduce_mod_p(&f3).unwrap();
        assert_eq!(r.terms().len(), 2);
        let f5 = PrimeField::new(5).unwrap();
        assert_eq!(q("1/5*X1", &ox).reduce_mod_p(&f5), Err(ChowError::NotPAdmissible { p: 5 }));
    }
}
