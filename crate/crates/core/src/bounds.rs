//! Explicit height bounds (natural-log scale) for the integer whose prime
//! divisors contain every bad prime. Each lemma bound is assembled from the
//! intermediate estimates of its proof, never from an O-constant.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{ChowError, Result};

/// Relative slack added after every composed step, so that double rounding
/// cannot push a bound below its exact value.
const SLACK: f64 = 1.0 + 64.0 * f64::EPSILON;

/// `θ(x) = Σ_{p ≤ x} ln p < 1.01624 x` (Rosser–Schoenfeld).
const THETA: f64 = 1.01624;

fn up(x: f64) -> f64 {
    x * SLACK
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundParams {
    pub n: u32,
    pub s: u32,
    pub d: u32,
    pub h: f64,
}

impl BoundParams {
    pub fn new(n: u32, s: u32, d: u32, h: f64) -> Result<Self> {
        if n < 1 || s < 1 || d < 1 || !(h >= 1.0) || !h.is_finite() {
            return Err(ChowError::InvalidParameter(format!(
                "need n, s, d, h >= 1 (got n={n}, s={s}, d={d}, h={h})"
            )));
        }
        Ok(BoundParams { n, s, d, h })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Envelope {
    /// `D = 2 d^(n+1)`
    pub degree: f64,
    /// `H = 5 h n d^(n+1) ln(n+1)`
    pub height: f64,
    /// `H' = H + n^2 D ln d`
    pub height_prime: f64,
    /// `h' = h + n^2 d ln d`
    pub h_prime: f64,
}

pub fn envelope(p: &BoundParams) -> Envelope {
    let (n, d) = (p.n as f64, p.d as f64);
    let dn1 = d.powi(p.n as i32 + 1);
    let degree = 2.0 * dn1;
    let height = 5.0 * p.h * n * dn1 * (n + 1.0).ln();
    Envelope {
        degree,
        height,
        height_prime: height + n * n * degree * d.ln(),
        h_prime: p.h + n * n * d * d.ln(),
    }
}

/// Height of an integer outside of whose prime divisors the monic gcd of
/// `F` and `G` (in `s` variables) commutes with reduction.
pub fn gcd_reduction_bound(df: f64, hf: f64, dg: f64, hg: f64, s: f64) -> f64 {
    let per_var = (df + dg) * (df + dg).ln() + df * (hg + s * dg) + dg * (hf + s * df) + 2.0 * (s + 1.0).ln() * df * dg;
    up(s * per_var + 2.0 * hf + hg)
}

/// Height of the normalized Chow form of an `r`-dimensional set.
fn chow_height(h: f64, deg: f64, r: f64, n: f64) -> f64 {
    up(h + (r + 1.0) * (n + 2.0).ln() * deg)
}

/// `gcd(C_V, ∂C_V/∂U_0,0) = 1` survives reduction.
fn squarefree_bound(dv: f64, hv: f64, r: f64, n: f64) -> f64 {
    let hc = chow_height(hv, dv, r, n);
    let deg = (r + 1.0) * dv;
    gcd_reduction_bound(deg, hc, deg, hc + dv.ln(), (r + 1.0) * (n + 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum LemmaKind {
    SeparateH,
    Intersection,
    Union,
    Separate,
    ChowEval,
}

impl LemmaKind {
    pub const ALL: [LemmaKind; 5] = [
        LemmaKind::SeparateH,
        LemmaKind::Intersection,
        LemmaKind::Union,
        LemmaKind::Separate,
        LemmaKind::ChowEval,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            LemmaKind::SeparateH => "separate_h",
            LemmaKind::Intersection => "intersection",
            LemmaKind::Union => "union",
            LemmaKind::Separate => "separate",
            LemmaKind::ChowEval => "chow_eval",
        }
    }

    pub fn bound(&self, a: &LemmaArgs) -> f64 {
        match self {
            LemmaKind::SeparateH => separate_h_bound(a),
            LemmaKind::Intersection => intersection_bound(a),
            LemmaKind::Union => union_bound(a),
            LemmaKind::Separate => separate_bound(a),
            LemmaKind::ChowEval => chow_eval_bound(a),
        }
    }
}

impl fmt::Display for LemmaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LemmaKind {
    type Err = ChowError;
    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.chars().filter(|c| *c != '_' && *c != '-').collect::<String>().to_lowercase();
        LemmaKind::ALL
            .into_iter()
            .find(|k| k.name().replace('_', "") == key)
            .ok_or_else(|| ChowError::UnknownKind(s.to_string()))
    }
}

/// `V` has dimension `r`, degree `dv`, height `hv`. The second object is a
/// polynomial `F` of degree `d2`, height `h2` (SeparateH, Intersection,
/// ChowEval) or a set `W` of dimension `r2`, degree `d2`, height `h2`
/// (Union, Separate).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LemmaArgs {
    pub n: f64,
    pub r: f64,
    pub dv: f64,
    pub hv: f64,
    pub r2: f64,
    pub d2: f64,
    pub h2: f64,
}

impl LemmaArgs {
    /// Same dimension `r = n` on both sides.
    pub fn uniform(n: f64, dv: f64, hv: f64, d2: f64, h2: f64) -> Self {
        LemmaArgs {
            n,
            r: n,
            dv,
            hv,
            r2: n,
            d2,
            h2,
        }
    }
}

pub fn lemma_bound(kind: &str, args: &LemmaArgs) -> Result<f64> {
    Ok(kind.parse::<LemmaKind>()?.bound(args))
}

fn separate_h_bound(a: &LemmaArgs) -> f64 {
    let (n, r, dv, d, h) = (a.n, a.r, a.dv, a.d2, a.h2);
    let hc = chow_height(a.hv, dv, r, n);
    // denominators of C_V and G, leading coefficient of G'
    let d0 = up(hc + 2.0 * h);
    // P' and its partial derivatives, in (r+1)(n+2) variables
    let vars = (r + 1.0) * (n + 2.0);
    let dp = (r + 1.0) * dv;
    let hp = up(hc + r * dv);
    let hd = up(hp + dv.ln());
    // G'^h evaluated at the gradient of P'
    let dg = (r + 1.0) * d * dv;
    let hg = up(h + d * (hd + (n + 2.0).ln() + (vars + 1.0).ln() * dp));
    let d1 = gcd_reduction_bound(dp, hp, dg, hg, vars);
    up(d0 + d1 + squarefree_bound(dv, a.hv, r, n))
}

fn chow_eval_bound(a: &LemmaArgs) -> f64 {
    let hc = chow_height(a.hv, a.dv, a.r, a.n);
    up(hc + a.h2 + squarefree_bound(a.dv, a.hv, a.r, a.n))
}

fn intersection_bound(a: &LemmaArgs) -> f64 {
    let (n, r, dv, hv, d, h) = (a.n, a.r, a.dv, a.hv, a.d2, a.h2);
    let chow = chow_eval_bound(a);
    // leading coefficient of Q = C_{d,V}[F]
    let d1 = up(d * hv + h * dv + (r + 1.0) * (n + 1.0).ln() * d * dv);
    if r < 1.0 {
        return up(chow + d1);
    }
    // arithmetic Bézout for W = V ∩ V(F)
    let dw = d * dv;
    let hw = up(d * hv + h * dv + n * d * dv * (n + 1.0).ln());
    let d2 = up(THETA * dw);
    let d3 = squarefree_bound(dw, hw, r - 1.0, n);
    up(chow + d1 + d2 + d3)
}

fn union_bound(a: &LemmaArgs) -> f64 {
    let (n, r) = (a.n, a.r);
    let (d1, h1, d2, h2) = (a.dv, a.hv, a.d2, a.h2);
    let s = (r + 1.0) * (n + 1.0);
    let sum = d1 + d2;
    let hp = up(h1 + h2 + (r + 1.0) * (n + 2.0).ln() * sum + (s + 1.0).ln() * sum);
    let deg = (r + 1.0) * sum;
    let g0 = gcd_reduction_bound(deg, hp, deg, up(hp + sum.ln()), s);
    up(g0 + squarefree_bound(d1, h1, r, n) + squarefree_bound(d2, h2, r, n))
}

fn separate_bound(a: &LemmaArgs) -> f64 {
    let (n, r, rw) = (a.n, a.r, a.r2);
    let (dv, hv, dw, hw) = (a.dv, a.hv, a.d2, a.h2);
    let hcv = chow_height(hv, dv, r, n);
    let hcw = chow_height(hw, dw, rw, n);
    // generic projection of C_W: arguments of degree <= 2, height 0
    let t = (rw + 1.0) * (n + 1.0);
    let sa = (rw + 2.0) * n;
    let hgen = up(hcw + (rw + 1.0) * dw * ((t + 1.0).ln() + 2.0 * (sa + 1.0).ln()));
    let d0 = up(hcv + 2.0 * hgen);
    let ell = (rw + 1.0) * n;
    let vars_p = (r + 1.0) * (n + 2.0);
    let dp = (r + 1.0) * dv;
    let hp = up(hcv + r * dv);
    let hd = up(hp + dv.ln());
    // G'^h in X_0..X_n and the ℓ's, X's replaced by the gradient of P'
    let tg = n + 1.0 + ell;
    let sg = vars_p + ell;
    let deg_gen = dw + (rw + 1.0) * dw;
    let hg = up(hgen + deg_gen * (hd + (tg + 1.0).ln() + dp * (sg + 1.0).ln()));
    let dg = dw * dp + (rw + 1.0) * dw;
    let d1 = gcd_reduction_bound(dp, hp, dg, hg, sg);
    up(d0 + d1 + squarefree_bound(dv, hv, r, n))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Contribution {
    pub lemma: LemmaKind,
    pub i: u32,
    pub k: u32,
    pub l: Option<u32>,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub params: BoundParams,
    pub envelope: Envelope,
    pub contributions: Vec<Contribution>,
    /// `h(Δ_i)` bounds.
    pub subtotals: Vec<f64>,
    /// `h(δ)` for the change of coordinates.
    pub coordinate_change: f64,
    pub total: f64,
}

impl BoundReport {
    pub fn by_lemma(&self, kind: LemmaKind) -> f64 {
        self.contributions.iter().filter(|c| c.lemma == kind).map(|c| c.value).sum()
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.params;
        let e = &self.envelope;
        writeln!(f, "params        n={} s={} d={} h={}", p.n, p.s, p.d, p.h)?;
        writeln!(f, "envelope      D={:.6e} H={:.6e} H'={:.6e} h'={:.6e}", e.degree, e.height, e.height_prime, e.h_prime)?;
        for kind in [LemmaKind::SeparateH, LemmaKind::Intersection, LemmaKind::Union, LemmaKind::Separate] {
            let count = self.contributions.iter().filter(|c| c.lemma == kind).count();
            writeln!(f, "{:<13} {:.6e}  ({} terms)", kind.name(), self.by_lemma(kind), count)?;
        }
        writeln!(f, "{:<13} {:.6e}", "coordinates", self.coordinate_change)?;
        writeln!(f, "{:<13} {:.6e}", "constant", 2f64.ln())?;
        write!(f, "{:<13} {:.6e}", "total", self.total)
    }
}

/// Bound on `h(Δ')`: `ln 2 + Σ_i Σ_k [...] + h(δ)`.
pub fn total_bound(p: &BoundParams) -> BoundReport {
    let env = envelope(p);
    let n = p.n as f64;
    let d = p.d as f64;
    let dd = env.degree;
    let hh = env.height_prime;
    let hp = env.h_prime;
    let with_f = LemmaArgs::uniform(n, dd, hh, d, hp);
    let with_set = LemmaArgs::uniform(n, dd, hh, dd, hh);
    let sep_h = LemmaKind::SeparateH.bound(&with_f);
    let inter = LemmaKind::Intersection.bound(&with_f);
    let union = LemmaKind::Union.bound(&with_set);
    let sep = LemmaKind::Separate.bound(&with_set);

    let mut contributions = Vec::new();
    let mut subtotals = Vec::with_capacity(p.s as usize);
    for i in 0..p.s {
        let mut sub = 0.0;
        for k in 0..=p.n {
            for (lemma, value) in [(LemmaKind::SeparateH, sep_h), (LemmaKind::Intersection, inter), (LemmaKind::Union, union)] {
                contributions.push(Contribution { lemma, i, k, l: None, value });
                sub += value;
            }
            for l in k + 1..=p.n {
                contributions.push(Contribution {
                    lemma: LemmaKind::Separate,
                    i,
                    k,
                    l: Some(l),
                    value: sep,
                });
                sub += sep;
            }
        }
        subtotals.push(up(sub));
    }
    // h(det B) <= N ln N + Σ h_i with entries of height ln(12 n^2 d^(2n+2))
    let entry = 12f64.ln() + 2.0 * n.ln() + (2.0 * n + 2.0) * d.ln();
    let coordinate_change = up(n * n.ln() + n * entry);
    let total = up(2f64.ln() + subtotals.iter().sum::<f64>() + coordinate_change);
    BoundReport {
        params: *p,
        envelope: env,
        contributions,
        subtotals,
        coordinate_change,
        total,
    }
}

/// `n^14 s h d^(3n+4)`, the class of the main theorem.
pub fn class_scale(p: &BoundParams) -> f64 {
    (p.n as f64).powi(14) * p.s as f64 * p.h * (p.d as f64).powi(3 * p.n as i32 + 4)
}

/// Recorded constant with `total_bound <= CLASS_CONSTANT · class_scale` on the sweep grids.
pub const CLASS_CONSTANT: f64 = 2.0e3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SweepParam {
    N,
    S,
    D,
    H,
}

impl FromStr for SweepParam {
    type Err = ChowError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "n" => Ok(SweepParam::N),
            "s" => Ok(SweepParam::S),
            "d" => Ok(SweepParam::D),
            "h" => Ok(SweepParam::H),
            other => Err(ChowError::UnknownParam(other.to_string())),
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            SweepParam::N => "n",
            SweepParam::S => "s",
            SweepParam::D => "d",
            SweepParam::H => "h",
        };
        f.write_str(c)
    }
}

/// One row of the published comparison tables.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FixtureRow {
    pub sweep: SweepParam,
    pub params: BoundParams,
    pub a: f64,
}

pub const TABLES_FIXTURE: &str = include_str!("../data/tables_dandrea.txt");

pub fn parse_fixture(text: &str) -> Result<Vec<FixtureRow>> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: &str| ChowError::Parse {
            line: ln + 1,
            col: 1,
            msg: msg.to_string(),
        };
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 6 {
            return Err(err("expected: sweep n s d h A"));
        }
        let int = |s: &str| s.parse::<u32>().map_err(|_| err("bad integer"));
        let float = |s: &str| s.parse::<f64>().map_err(|_| err("bad number"));
        out.push(FixtureRow {
            sweep: f[0].parse()?,
            params: BoundParams::new(int(f[1])?, int(f[2])?, int(f[3])?, float(f[4])?)?,
            a: float(f[5])?,
        });
    }
    Ok(out)
}

pub fn fixture_rows() -> Vec<FixtureRow> {
    parse_fixture(TABLES_FIXTURE).expect("shipped fixture parses")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub a: Option<f64>,
    pub b: f64,
    pub ratio: Option<f64>,
}

fn with_value(fixed: &BoundParams, param: SweepParam, v: f64) -> Result<BoundParams> {
    let int = |v: f64| -> Result<u32> {
        if v.fract() != 0.0 || v < 1.0 || v > u32::MAX as f64 {
            return Err(ChowError::InvalidParameter(format!("{param} must be a positive integer, got {v}")));
        }
        Ok(v as u32)
    };
    let mut p = *fixed;
    match param {
        SweepParam::N => p.n = int(v)?,
        SweepParam::S => p.s = int(v)?,
        SweepParam::D => p.d = int(v)?,
        SweepParam::H => p.h = v,
    }
    BoundParams::new(p.n, p.s, p.d, p.h)
}

pub fn sweep(param: &str, values: &[f64], fixed: &BoundParams) -> Result<Vec<SweepRow>> {
    let param: SweepParam = param.parse()?;
    if values.is_empty() {
        return Err(ChowError::InvalidParameter("no sweep values".into()));
    }
    let fixtures = fixture_rows();
    values
        .iter()
        .map(|&v| {
            let p = with_value(fixed, param, v)?;
            let b = total_bound(&p).total;
            let a = fixtures.iter().find(|r| r.params == p).map(|r| r.a);
            Ok(SweepRow {
                value: v,
                a,
                b,
                ratio: a.map(|a| b / a),
            })
        })
        .collect()
}

/// `value  A  B  B/A`, with `-` where no published A exists.
pub fn format_sweep(param: &str, rows: &[SweepRow]) -> String {
    let opt = |x: Option<f64>| x.map(|v| format!("{v:.4e}")).unwrap_or_else(|| "-".into());
    let mut s = format!("{:>8}  {:>12}  {:>12}  {:>12}\n", param, "A", "B", "B/A");
    for r in rows {
        s.push_str(&format!("{:>8}  {:>12}  {:>12.4e}  {:>12}\n", r.value, opt(r.a), r.b, opt(r.ratio)));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn gcd_bound_examples() {
        let v = gcd_reduction_bound(2.0, 1.0, 2.0, 1.0, 2.0);
        let expect = 2.0 * (4.0 * 4f64.ln() + 10.0 + 10.0 + 8.0 * 3f64.ln()) + 3.0;
        assert!(close(v, expect, 1e-12));
        assert!(close(v, 71.67, 1e-3));
        assert!(close(gcd_reduction_bound(1.0, 0.0, 1.0, 0.0, 1.0), 2.0 + 4.0 * 2f64.ln(), 1e-12));
        let base = gcd_reduction_bound(2.0, 1.0, 2.0, 1.0, 2.0);
        assert!(gcd_reduction_bound(3.0, 1.0, 2.0, 1.0, 2.0) > base);
        assert!(gcd_reduction_bound(2.0, 1.5, 2.0, 1.0, 2.0) > base);
        assert!(gcd_reduction_bound(2.0, 1.0, 2.0, 1.0, 3.0) > base);
    }

    #[test]
    fn envelope_examples() {
        let e = envelope(&BoundParams::new(1, 1, 2, 1.0).unwrap());
        assert_eq!(e.degree, 8.0);
        assert!(close(e.height, 20.0 * 2f64.ln(), 1e-15));
        let e = envelope(&BoundParams::new(2, 1, 2, 1.0).unwrap());
        assert_eq!(e.degree, 16.0);
        assert!(close(e.height, 80.0 * 3f64.ln(), 1e-15));
        let e = envelope(&BoundParams::new(1, 1, 1, 1.0).unwrap());
        assert_eq!((e.degree, e.h_prime), (2.0, 1.0));
        assert!(BoundParams::new(0, 1, 1, 1.0).is_err());
    }

    #[test]
    fn kinds_parse_and_are_positive() {
        assert_eq!("separateH".parse::<LemmaKind>().unwrap(), LemmaKind::SeparateH);
        assert_eq!("chow_eval".parse::<LemmaKind>().unwrap(), LemmaKind::ChowEval);
        assert_eq!(lemma_bound("nope", &LemmaArgs::uniform(1.0, 1.0, 0.0, 1.0, 0.0)), Err(ChowError::UnknownKind("nope".into())));
        let ones = LemmaArgs::uniform(1.0, 1.0, 1.0, 1.0, 1.0);
        for k in LemmaKind::ALL {
            let v = k.bound(&ones);
            assert!(v.is_finite() && v >= 0.0, "{k}");
        }
    }

    #[test]
    fn total_bound_structure() {
        let p = BoundParams::new(1, 1, 1, 1.0).unwrap();
        let r = total_bound(&p);
        let sum: f64 = r.contributions.iter().map(|c| c.value).sum();
        assert!(r.total >= sum + r.coordinate_change);
        assert!(r.contributions.iter().all(|c| c.value > 0.0));
        // one separate term for (k=0, l=1)
        assert_eq!(r.contributions.iter().filter(|c| c.lemma == LemmaKind::Separate).count(), 1);
        let base = r.total;
        for q in [
            BoundParams::new(2, 1, 1, 1.0),
            BoundParams::new(1, 2, 1, 1.0),
            BoundParams::new(1, 1, 2, 1.0),
            BoundParams::new(1, 1, 1, 2.0),
        ] {
            assert!(total_bound(&q.unwrap()).total > base);
        }
    }

    #[test]
    fn sweep_uses_fixture() {
        let fixed = BoundParams::new(5, 5, 2, 10.0).unwrap();
        let rows = sweep("s", &[100.0, 7.0], &fixed).unwrap();
        assert_eq!(rows[0].a, Some(3.9717e8));
        assert_eq!(rows[1].a, None);
        assert!(rows[0].b > rows[1].b);
        assert_eq!(sweep("q", &[1.0], &fixed), Err(ChowError::UnknownParam("q".into())));
        assert_eq!(fixture_rows().len(), 22);
    }
}
