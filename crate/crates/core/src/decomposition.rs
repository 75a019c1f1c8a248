//! Equidimensional decomposition of `V(F1, ..., Fs)` through Chow forms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chow::{
    chow_ambient, intersection_chow, separate_chow, separate_hypersurface_chow, union_chow, ChowForm,
};
use crate::error::{ChowError, Result};
use crate::field::{Field, PrimeField, Rationals};
use crate::matrix::{self, Mat};
use crate::parse::parse_poly;
use crate::poly::{PPoly, Poly, QPoly};
use crate::var::x_order;

/// Integer polynomials in `X1..Xn`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolySystem {
    pub polys: Vec<QPoly>,
    pub n: usize,
}

impl PolySystem {
    /// Rational inputs are scaled by the lcm of their denominators.
    pub fn new(n: usize, polys: Vec<QPoly>) -> Result<Self> {
        if polys.is_empty() {
            return Err(ChowError::undefined("empty system"));
        }
        let xo = x_order(n);
        let mut out = Vec::with_capacity(polys.len());
        for p in polys {
            if p.is_zero() {
                return Err(ChowError::ZeroPolynomial);
            }
            out.push(clear_denominators(&p.with_order(&xo)?));
        }
        Ok(PolySystem { polys: out, n })
    }

    /// Same system with the equations in ascending total degree (stable).
    pub fn sorted_by_degree(&self) -> Self {
        let mut polys = self.polys.clone();
        polys.sort_by_key(|p| p.total_degree());
        PolySystem { polys, n: self.n }
    }

    /// `n = <int>` on the first line, then one polynomial per line.
    /// Blank lines and lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut polys = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match n {
                None => {
                    let bad = || ChowError::Parse {
                        line: ln + 1,
                        col: 1,
                        msg: "expected `n = <int>`".into(),
                    };
                    let (k, v) = line.split_once('=').ok_or_else(bad)?;
                    if k.trim() != "n" {
                        return Err(bad());
                    }
                    n = Some(v.trim().parse().map_err(|_| bad())?);
                }
                Some(n) => {
                    let p = parse_poly(&Rationals, &x_order(n), line).map_err(|e| match e {
                        ChowError::Parse { col, msg, .. } => ChowError::Parse { line: ln + 1, col, msg },
                        other => other,
                    })?;
                    polys.push(p);
                }
            }
        }
        let n = n.ok_or(ChowError::Parse {
            line: 1,
            col: 1,
            msg: "missing `n = <int>`".into(),
        })?;
        PolySystem::new(n, polys)
    }

    pub fn s(&self) -> usize {
        self.polys.len()
    }

    /// Maximal total degree, at least 1.
    pub fn d(&self) -> u32 {
        self.polys.iter().map(|p| p.total_degree()).max().unwrap_or(1).max(1)
    }

    /// Maximal logarithmic height.
    pub fn h(&self) -> f64 {
        self.polys.iter().map(|p| p.height().unwrap_or(0.0)).fold(0.0, f64::max)
    }

    pub fn reduce_mod_p(&self, fp: &PrimeField) -> Result<Vec<PPoly>> {
        self.polys.iter().map(|p| p.reduce_mod_p(fp)).collect()
    }
}

fn clear_denominators(p: &QPoly) -> QPoly {
    let l = p
        .terms()
        .iter()
        .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
    p.scale(&BigRational::from_integer(l))
}

/// Integer matrix `B`, its determinant `δ` and `A' = δ B^{-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformPair {
    pub b: Vec<Vec<BigInt>>,
    pub delta: BigInt,
    pub a_prime: Vec<Vec<BigInt>>,
}

impl TransformPair {
    pub fn identity(n: usize) -> Self {
        let id: Vec<Vec<BigInt>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
            .collect();
        TransformPair {
            b: id.clone(),
            delta: BigInt::one(),
            a_prime: id,
        }
    }

    /// `None` when `B` is singular.
    pub fn from_b(b: Vec<Vec<BigInt>>) -> Option<Self> {
        let q = Rationals;
        let bq: Mat<BigRational> = b
            .iter()
            .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
            .collect();
        let delta = matrix::det(&q, &bq).to_integer();
        if delta.is_zero() {
            return None;
        }
        let inv = matrix::inverse(&q, &bq).ok()?;
        let dq = BigRational::from_integer(delta.clone());
        let a_prime = inv.iter().map(|r| r.iter().map(|x| (x * &dq).to_integer()).collect()).collect();
        Some(TransformPair { b, delta, a_prime })
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    /// `A = A'/δ` over `field`; `None` if `δ` vanishes there.
    pub fn a_in<F: Field>(&self, field: &F) -> Option<Mat<F::Elem>> {
        let dinv = field.inv(&field.from_bigint(&self.delta))?;
        Some(
            self.a_prime
                .iter()
                .map(|r| r.iter().map(|x| field.mul(&field.from_bigint(x), &dinv)).collect())
                .collect(),
        )
    }

    /// `Ã = [1] ⊕ Aᵀ`, which carries Chow forms of the transformed system
    /// back to the original coordinates.
    pub fn back_matrix<F: Field>(&self, field: &F) -> Option<Mat<F::Elem>> {
        let a = self.a_in(field)?;
        let n = self.n();
        let mut m = matrix::identity(field, n + 1);
        for i in 0..n {
            for j in 0..n {
                m[i + 1][j + 1] = a[j][i].clone();
            }
        }
        Some(m)
    }
}

/// `F(A X)`.
pub fn transform_poly<F: Field>(p: &Poly<F>, a: &Mat<F::Elem>) -> Result<Poly<F>> {
    let f = p.field();
    let n = a.len();
    let xo = x_order(n);
    let assign: Vec<(usize, Poly<F>)> = (0..n)
        .map(|j| {
            let mut s = Poly::zero(f, &xo);
            for k in 0..n {
                s = s.add(&Poly::var_index(f, &xo, k).scale(&a[j][k]));
            }
            (j, s)
        })
        .collect();
    p.with_order(&xo)?.substitute(&assign, &xo)
}

/// Substitute `U_i ↦ M U_i` in every block.
pub fn apply_block_transform<F: Field>(c: &ChowForm<F>, m: &Mat<F::Elem>) -> Result<ChowForm<F>> {
    let f = c.field();
    let n = c.ambient_n();
    if m.len() != n + 1 || f.is_zero(&matrix::det(f, m)) {
        return Err(ChowError::SingularMatrix);
    }
    if c.is_empty() {
        return Ok(c.clone());
    }
    let o = c.order();
    let mut assign = Vec::with_capacity(c.blocks() * (n + 1));
    for i in 0..c.blocks() {
        for j in 0..=n {
            let mut s = Poly::zero(f, &o);
            for k in 0..=n {
                s = s.add(&Poly::var_index(f, &o, c.u(i, k)).scale(&m[j][k]));
            }
            assign.push((c.u(i, j), s));
        }
    }
    ChowForm::new(c.poly().substitute(&assign, &o)?, n, c.blocks())
}

/// Which intermediate form a trace entry holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Zero,
    Proper,
    D,
    R,
    S,
    Next,
}

#[derive(Clone, Debug)]
pub struct TraceEntry<F: Field> {
    pub i: usize,
    pub k: usize,
    pub l: Option<usize>,
    pub stage: Stage,
    pub form: ChowForm<F>,
}

impl<F: Field> std::fmt::Display for TraceEntry<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self.stage {
            Stage::Zero => "C_zero",
            Stage::Proper => "C_proper",
            Stage::D => "D",
            Stage::R => "R",
            Stage::S => "S",
            Stage::Next => "C",
        };
        match self.l {
            Some(l) => write!(f, "{name}[i={},k={},l={}] {}", self.i, self.k, l, self.form),
            None => write!(f, "{name}[i={},k={}] {}", self.i, self.k, self.form),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RawDecomposition<F: Field> {
    /// `C_{s,0}, ..., C_{s,n}`.
    pub forms: Vec<ChowForm<F>>,
    pub trace: Vec<TraceEntry<F>>,
    /// Every nonempty `R_{i,k}` was in normal position.
    pub normal_position: bool,
}

#[derive(Clone, Debug)]
pub struct DecompositionResult<F: Field> {
    /// Indexed by dimension; the Chow form of dimension `k` has `k+1` blocks.
    pub chow_forms: Vec<ChowForm<F>>,
    pub transform: TransformPair,
    pub trace: Vec<TraceEntry<F>>,
    pub attempts: usize,
}

/// The Chow-form double loop, run in the given coordinates.
pub fn decompose_chow_raw<F: Field>(field: &F, polys: &[Poly<F>], n: usize, keep_trace: bool) -> Result<RawDecomposition<F>> {
    let xo = x_order(n);
    let polys: Vec<Poly<F>> = polys.iter().map(|p| p.with_order(&xo)).collect::<Result<_>>()?;
    let mut cur: Vec<ChowForm<F>> = (0..n).map(|k| ChowForm::empty(field, n, k + 1)).collect();
    cur.push(chow_ambient(field, n));
    let mut trace = Vec::new();
    let mut normal = true;
    let mut log = |i, k, l, stage, form: &ChowForm<F>| {
        if keep_trace {
            trace.push(TraceEntry {
                i,
                k,
                l,
                stage,
                form: form.clone(),
            });
        }
    };
    for (i, fi) in polys.iter().enumerate() {
        let mut next: Vec<Option<ChowForm<F>>> = vec![None; n + 1];
        let mut r: Vec<Option<ChowForm<F>>> = vec![None; n + 1];
        let mut proper_above = ChowForm::empty(field, n, n + 2);
        for k in (0..=n).rev() {
            let loc = |what: &str| format!("i={i},k={k} {what}");
            let (zero, proper) = separate_hypersurface_chow(&cur[k], fi).map_err(|e| e.at(&loc("separate_hypersurface")))?;
            log(i, k, None, Stage::Zero, &zero);
            log(i, k, None, Stage::Proper, &proper);
            let d = intersection_chow(&proper_above, fi).map_err(|e| e.at(&loc("intersection")))?;
            log(i, k, None, Stage::D, &d);
            let rk = union_chow(&zero, &d).map_err(|e| e.at(&loc("union")))?;
            log(i, k, None, Stage::R, &rk);
            if !rk.is_empty() && !rk.is_normal_position() {
                normal = false;
            }
            let mut s = rk.clone();
            for l in (k + 1..=n).rev() {
                let rl = r[l].as_ref().expect("filled for larger k");
                s = separate_chow(&s, rl)
                    .map_err(|e| e.at(&format!("i={i},k={k},l={l} separate")))?
                    .1;
                log(i, k, Some(l), Stage::S, &s);
            }
            log(i, k, None, Stage::Next, &s);
            next[k] = Some(s);
            r[k] = Some(rk);
            proper_above = proper;
        }
        cur = next.into_iter().map(|c| c.expect("all dimensions visited")).collect();
    }
    Ok(RawDecomposition {
        forms: cur,
        trace,
        normal_position: normal,
    })
}

/// Entry bound `12 n^2 d^(2n+2)` for the change of coordinates, saturating.
pub fn transform_entry_bound(n: usize, d: u32) -> u64 {
    let mut v: u128 = 12 * (n as u128) * (n as u128);
    for _ in 0..(2 * n + 2) {
        v = v.saturating_mul(d as u128);
    }
    v.min(i64::MAX as u128) as u64
}

fn sample_b(rng: &mut ChaCha8Rng, n: usize, lo: i64, hi: i64, modulus: Option<u64>) -> TransformPair {
    loop {
        let b: Vec<Vec<BigInt>> = (0..n)
            .map(|_| (0..n).map(|_| BigInt::from(rng.gen_range(lo..=hi))).collect())
            .collect();
        if let Some(t) = TransformPair::from_b(b) {
            if let Some(p) = modulus {
                if (&t.delta % BigInt::from(p)).is_zero() {
                    continue;
                }
            }
            return t;
        }
    }
}

/// Random `B` with entries in `±12 n^2 d^(2n+2)` and the system `δ_i F_i(A X)`
/// with `A = B^{-1}` and `δ_i` the least common denominator.
pub fn random_general_position(sys: &PolySystem, seed: u64) -> Result<(PolySystem, TransformPair)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    general_position_from(sys, &mut rng, u64::MAX)
}

/// Entry radius for the given attempt: `8·4^(attempt-1)`, capped by the bound.
fn attempt_radius(sys: &PolySystem, attempt: usize) -> u64 {
    let widen = 8u64.saturating_mul(4u64.saturating_pow(attempt.saturating_sub(1) as u32));
    widen.min(transform_entry_bound(sys.n, sys.d()))
}

fn general_position_from(sys: &PolySystem, rng: &mut ChaCha8Rng, radius: u64) -> Result<(PolySystem, TransformPair)> {
    let bound = transform_entry_bound(sys.n, sys.d()).min(radius) as i64;
    let t = sample_b(rng, sys.n, -bound, bound, None);
    let a = t.a_in(&Rationals).expect("δ ≠ 0");
    let polys = sys
        .polys
        .iter()
        .map(|p| transform_poly(p, &a).map(|q| clear_denominators(&q)))
        .collect::<Result<Vec<_>>>()?;
    Ok((PolySystem { polys, n: sys.n }, t))
}

fn back_transform<F: Field>(field: &F, raw: RawDecomposition<F>, t: &TransformPair) -> Result<Vec<ChowForm<F>>> {
    let m = t.back_matrix(field).ok_or(ChowError::SingularMatrix)?;
    let mut out = Vec::with_capacity(raw.forms.len());
    for c in &raw.forms {
        let b = apply_block_transform(c, &m)?;
        if !b.is_multihomogeneous() || !b.is_squarefree()? {
            return Err(ChowError::undefined("output is not a squarefree multihomogeneous form"));
        }
        out.push(b);
    }
    Ok(out)
}

fn one_attempt<F: Field>(field: &F, polys: &[Poly<F>], n: usize, t: &TransformPair, trace: bool) -> Result<(Vec<ChowForm<F>>, Vec<TraceEntry<F>>)> {
    let raw = decompose_chow_raw(field, polys, n, trace)?;
    if !raw.normal_position {
        return Err(ChowError::undefined("an intermediate form is not in normal position"));
    }
    let tr = raw.trace.clone();
    Ok((back_transform(field, raw, t)?, tr))
}

fn retryable(e: &ChowError) -> bool {
    matches!(e, ChowError::Undefined { .. } | ChowError::SingularMatrix)
}

/// Decomposition over ℚ with random changes of coordinates.
pub fn decompose(sys: &PolySystem, seed: u64, max_retries: usize) -> Result<DecompositionResult<Rationals>> {
    decompose_traced(sys, seed, max_retries, false)
}

/// Equations are processed in ascending degree; trace indices refer to that order.
pub fn decompose_traced(sys: &PolySystem, seed: u64, max_retries: usize, trace: bool) -> Result<DecompositionResult<Rationals>> {
    let sys = &sys.sorted_by_degree();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = String::from("no attempt made");
    for attempt in 1..=max_retries {
        let (g, t) = general_position_from(sys, &mut rng, attempt_radius(sys, attempt))?;
        match one_attempt(&Rationals, &g.polys, sys.n, &t, trace) {
            Ok((chow_forms, trace)) => {
                return Ok(DecompositionResult {
                    chow_forms,
                    transform: t,
                    trace,
                    attempts: attempt,
                })
            }
            Err(e) if retryable(&e) => last = e.to_string(),
            Err(e) => return Err(e),
        }
    }
    Err(ChowError::RetriesExhausted {
        attempts: max_retries,
        last,
    })
}

/// Decomposition over `F_p` with transforms uniform in `F_p`.
pub fn decompose_mod_p(fp: &PrimeField, polys: &[PPoly], n: usize, seed: u64, max_retries: usize) -> Result<DecompositionResult<PrimeField>> {
    let mut polys = polys.to_vec();
    polys.sort_by_key(|q| q.total_degree());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = fp.modulus();
    let hi = (p - 1).min(i64::MAX as u64) as i64;
    let mut last = String::from("no attempt made");
    for attempt in 1..=max_retries {
        let t = sample_b(&mut rng, n, 0, hi, Some(p));
        let a = t.a_in(fp).expect("δ is a unit mod p");
        let g = polys.iter().map(|q| transform_poly(q, &a)).collect::<Result<Vec<_>>>()?;
        if g.iter().any(|q| q.is_zero()) {
            last = "a transformed equation vanishes".into();
            continue;
        }
        match one_attempt(fp, &g, n, &t, false) {
            Ok((chow_forms, trace)) => {
                return Ok(DecompositionResult {
                    chow_forms,
                    transform: t,
                    trace,
                    attempts: attempt,
                })
            }
            Err(e) if retryable(&e) => last = e.to_string(),
            Err(e) => return Err(e),
        }
    }
    Err(ChowError::RetriesExhausted {
        attempts: max_retries,
        last,
    })
}

/// Sum over dimensions of the degrees, for Bézout-type checks.
pub fn total_degree<F: Field>(forms: &[ChowForm<F>]) -> u32 {
    forms.iter().map(|c| c.degree()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chow::chow_of_points;
    use num_traits::Signed;
    use crate::var::chow_order;

    fn sys(n: usize, ps: &[&str]) -> PolySystem {
        let xo = x_order(n);
        PolySystem::new(n, ps.iter().map(|s| parse_poly(&Rationals, &xo, s).unwrap()).collect()).unwrap()
    }

    fn cf(s: &str, n: usize, blocks: usize) -> ChowForm<Rationals> {
        ChowForm::new(parse_poly(&Rationals, &chow_order(n, blocks), s).unwrap(), n, blocks).unwrap()
    }

    fn q(v: i64) -> BigRational {
        BigRational::from_integer(v.into())
    }

    #[test]
    fn parse_system_text() {
        let s = PolySystem::parse("n = 2\n# comment\nX1^2 - X2\n\n1/2*X1 + 3\n").unwrap();
        assert_eq!(s.s(), 2);
        assert_eq!(s.d(), 2);
        assert_eq!(s.polys[1], parse_poly(&Rationals, &x_order(2), "X1 + 6").unwrap());
        match PolySystem::parse("n = 1\nX1 +* 2") {
            Err(ChowError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(PolySystem::parse("X1"), Err(ChowError::Parse { line: 1, .. })));
    }

    #[test]
    fn block_transform_examples() {
        let f = Rationals;
        let c = cf("U0_0 + 2*U0_1", 1, 1);
        assert_eq!(apply_block_transform(&c, &matrix::identity(&f, 2)).unwrap(), c);
        let m = vec![vec![q(1), q(0)], vec![q(0), q(2)]];
        assert_eq!(apply_block_transform(&c, &m).unwrap(), cf("U0_0 + 4*U0_1", 1, 1));
        let m1 = vec![vec![q(1), q(2)], vec![q(3), q(-1)]];
        let m2 = vec![vec![q(2), q(0)], vec![q(1), q(1)]];
        let c2 = cf("U0_0^2 - U0_1^2", 1, 1);
        let lhs = apply_block_transform(&apply_block_transform(&c2, &m1).unwrap(), &m2).unwrap();
        // substitution composes as C((M1 M2) U)
        let rhs = apply_block_transform(&c2, &matrix::mat_mul(&f, &m1, &m2)).unwrap();
        assert_eq!(lhs, rhs);
        let sing = vec![vec![q(1), q(2)], vec![q(2), q(4)]];
        assert_eq!(apply_block_transform(&c, &sing), Err(ChowError::SingularMatrix));
    }

    #[test]
    fn raw_examples() {
        let f = Rationals;
        let s = sys(1, &["X1 - 1"]);
        let raw = decompose_chow_raw(&f, &s.polys, 1, true).unwrap();
        assert_eq!(raw.forms[0], cf("U0_0 + U0_1", 1, 1));
        assert!(raw.forms[1].is_empty());
        assert!(!raw.trace.is_empty());
        let e = decompose_chow_raw(&f, &sys(1, &["1"]).polys, 1, false).unwrap();
        assert!(e.forms.iter().all(|c| c.is_empty()));
    }

    #[test]
    fn general_position_entries() {
        assert_eq!(transform_entry_bound(2, 2), 3072);
        let s = sys(1, &["2*X1 - 1"]);
        let (g1, t1) = random_general_position(&s, 9).unwrap();
        let (g2, t2) = random_general_position(&s, 9).unwrap();
        assert_eq!((g1.clone(), t1.clone()), (g2, t2));
        let b = t1.b[0][0].clone();
        assert!(!b.is_zero() && b.abs() <= BigInt::from(transform_entry_bound(1, 1)));
        // F(X/b) cleared of denominators has its root at b/2
        let root = BigRational::new(b, 2.into());
        assert!(g1.polys[0].evaluate(&[root]).is_zero());
        assert!(g1.polys[0].is_integral());
    }

    #[test]
    fn decompose_examples() {
        let r = decompose(&sys(1, &["2*X1 - 1"]), 0, 8).unwrap();
        assert_eq!(r.chow_forms[0].primitive(), cf("2*U0_0 + U0_1", 1, 1));
        assert!(r.chow_forms[1].is_empty());

        let r = decompose(&sys(2, &["X1*X2"]), 0, 8).unwrap();
        let want = cf("U0_0*U1_2 - U0_2*U1_0", 2, 2).poly().mul(cf("U0_0*U1_1 - U0_1*U1_0", 2, 2).poly());
        assert!(r.chow_forms[1].same_up_to_scalar(&ChowForm::new(want, 2, 2).unwrap()));
        assert!(r.chow_forms[0].is_empty());
        assert!(r.chow_forms[2].is_empty());

        let r = decompose(&sys(1, &["X1", "X1 - 1"]), 0, 8).unwrap();
        assert!(r.chow_forms.iter().all(|c| c.is_empty()));
    }

    #[test]
    fn line_and_point() {
        let r = decompose(&sys(2, &["X1^2 - X1", "X1*X2"]), 3, 8).unwrap();
        let line = cf("U0_0*U1_2 - U0_2*U1_0", 2, 2);
        assert!(r.chow_forms[1].same_up_to_scalar(&line), "{}", r.chow_forms[1]);
        let pt = chow_of_points(&Rationals, 2, &[vec![q(1), q(0)]]).unwrap();
        assert!(r.chow_forms[0].same_up_to_scalar(&pt), "{}", r.chow_forms[0]);
    }

    #[test]
    fn mod_p_two_points() {
        let fp = PrimeField::new(7).unwrap();
        let s = sys(1, &["X1^2 - 2"]);
        let r = decompose_mod_p(&fp, &s.reduce_mod_p(&fp).unwrap(), 1, 0, 8).unwrap();
        let pts = chow_of_points(&fp, 1, &[vec![3], vec![4]]).unwrap();
        assert!(r.chow_forms[0].same_up_to_scalar(&pts));
    }
}
