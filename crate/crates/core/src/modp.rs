//! Good and bad primes: reductions of the primitive rational Chow forms
//! against a decomposition of the reduced system over `F_p`.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::chow::{chow_ambient, ChowForm, ChowRecord};
use crate::decomposition::{decompose, decompose_mod_p, PolySystem};
use crate::error::{ChowError, Result};
use crate::field::{is_prime, PrimeField, Rationals};

pub const DEFAULT_RETRIES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PrimeStatus {
    Good,
    Bad,
    Indeterminate,
}

impl fmt::Display for PrimeStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PrimeStatus::Good => "Good",
            PrimeStatus::Bad => "Bad",
            PrimeStatus::Indeterminate => "Indeterminate",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    /// Good: the reductions, which are also Chow forms over `F_p`.
    Matched(Vec<ChowForm<PrimeField>>),
    /// The reduction and the `F_p` form of dimension `k` differ.
    Mismatch {
        k: usize,
        reduced: ChowForm<PrimeField>,
        modular: ChowForm<PrimeField>,
    },
    /// The reduction of the dimension-`k` form is not a Chow form.
    NotChow {
        k: usize,
        reduced: ChowForm<PrimeField>,
        reason: String,
    },
    /// Indeterminate: where the `F_p` decomposition gave up.
    Failure(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct PrimeVerdict {
    pub p: u64,
    pub status: PrimeStatus,
    pub witness: Witness,
}

impl PrimeVerdict {
    /// Dimension named by a `Bad` witness.
    pub fn witness_dim(&self) -> Option<usize> {
        match &self.witness {
            Witness::Mismatch { k, .. } | Witness::NotChow { k, .. } => Some(*k),
            _ => None,
        }
    }

    pub fn record(&self) -> VerdictRecord {
        let (dim, reduced, modular, note) = match &self.witness {
            Witness::Matched(v) => (None, v.iter().map(|c| c.record()).collect(), Vec::new(), None),
            Witness::Mismatch { k, reduced, modular } => {
                (Some(*k), vec![reduced.record()], vec![modular.record()], None)
            }
            Witness::NotChow { k, reduced, reason } => (Some(*k), vec![reduced.record()], Vec::new(), Some(reason.clone())),
            Witness::Failure(s) => (None, Vec::new(), Vec::new(), Some(s.clone())),
        };
        VerdictRecord {
            p: self.p,
            status: self.status,
            dimension: dim,
            reduced,
            modular,
            note,
        }
    }
}

/// `p status [witness-dim]`
impl fmt::Display for PrimeVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.p, self.status)?;
        if let Some(k) = self.witness_dim() {
            write!(f, " {k}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct VerdictRecord {
    pub p: u64,
    pub status: PrimeStatus,
    pub dimension: Option<usize>,
    pub reduced: Vec<ChowRecord>,
    pub modular: Vec<ChowRecord>,
    pub note: Option<String>,
}

/// Primitive Chow forms `C_0..C_n` of the system over ℚ.
pub fn rational_forms(sys: &PolySystem, seed: u64, retries: usize) -> Result<Vec<ChowForm<Rationals>>> {
    Ok(decompose(sys, seed, retries)?
        .chow_forms
        .iter()
        .map(|c| c.primitive())
        .collect())
}

pub fn check_prime(sys: &PolySystem, p: u64, seed: u64) -> Result<PrimeVerdict> {
    let forms = rational_forms(sys, seed, DEFAULT_RETRIES)?;
    check_prime_against(sys, &forms, p, seed, DEFAULT_RETRIES)
}

fn reduce_form(c: &ChowForm<Rationals>, fp: &PrimeField) -> Result<ChowForm<PrimeField>> {
    if c.is_empty() {
        return Ok(ChowForm::empty(fp, c.ambient_n(), c.blocks()));
    }
    ChowForm::new(c.poly().reduce_mod_p(fp)?, c.ambient_n(), c.blocks())
}

/// Why the reduction of `c` fails to be a Chow form, if it does.
fn non_chow_reason(c: &ChowForm<Rationals>, r: &ChowForm<PrimeField>) -> Result<Option<String>> {
    if r.poly().total_degree() != c.poly().total_degree() {
        return Ok(Some("degree drops".into()));
    }
    if !r.is_multihomogeneous() {
        return Ok(Some("not multihomogeneous".into()));
    }
    if !r.is_squarefree()? {
        return Ok(Some("not squarefree".into()));
    }
    Ok(None)
}

/// Classification of `p` given the primitive forms over ℚ.
pub fn check_prime_against(
    sys: &PolySystem,
    forms: &[ChowForm<Rationals>],
    p: u64,
    seed: u64,
    retries: usize,
) -> Result<PrimeVerdict> {
    let fp = PrimeField::new(p)?;
    let n = sys.n;
    let mut reduced = Vec::with_capacity(forms.len());
    for (k, c) in forms.iter().enumerate() {
        let r = reduce_form(c, &fp)?;
        if let Some(reason) = non_chow_reason(c, &r)? {
            return Ok(PrimeVerdict {
                p,
                status: PrimeStatus::Bad,
                witness: Witness::NotChow { k, reduced: r, reason },
            });
        }
        reduced.push(r);
    }

    // equations vanishing mod p do not cut anything
    let polys: Vec<_> = sys
        .reduce_mod_p(&fp)?
        .into_iter()
        .filter(|q| !q.is_zero())
        .collect();
    let modular = if polys.is_empty() {
        let mut v: Vec<_> = (0..n).map(|k| ChowForm::empty(&fp, n, k + 1)).collect();
        v.push(chow_ambient(&fp, n));
        v
    } else {
        match decompose_mod_p(&fp, &polys, n, seed, retries) {
            Ok(r) => r.chow_forms,
            Err(ChowError::RetriesExhausted { last, .. }) => {
                return Ok(PrimeVerdict {
                    p,
                    status: PrimeStatus::Indeterminate,
                    witness: Witness::Failure(last),
                })
            }
            Err(e) => return Err(e),
        }
    };

    for (k, (r, m)) in reduced.iter().zip(modular.iter()).enumerate() {
        if !r.same_up_to_scalar(m) {
            return Ok(PrimeVerdict {
                p,
                status: PrimeStatus::Bad,
                witness: Witness::Mismatch {
                    k,
                    reduced: r.clone(),
                    modular: m.clone(),
                },
            });
        }
    }
    Ok(PrimeVerdict {
        p,
        status: PrimeStatus::Good,
        witness: Witness::Matched(reduced),
    })
}

/// Verdicts for every odd prime `p ≤ p_max`, ascending. `workers = None`
/// uses the available parallelism.
pub fn scan_primes(sys: &PolySystem, p_max: u64, seed: u64, workers: Option<usize>) -> Result<Vec<PrimeVerdict>> {
    let forms = rational_forms(sys, seed, DEFAULT_RETRIES)?;
    let primes: Vec<u64> = (3..=p_max).filter(|&p| is_prime(p)).collect();
    let run = || -> Result<Vec<PrimeVerdict>> {
        primes
            .par_iter()
            .map(|&p| check_prime_against(sys, &forms, p, seed, DEFAULT_RETRIES))
            .collect()
    };
    match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| ChowError::undefined(format!("worker pool: {e}")))?
            .install(run),
        None => run(),
    }
}

/// `Σ ln p` over the `Bad` verdicts is at most `b`.
pub fn certify_against_bound(verdicts: &[PrimeVerdict], b: f64) -> bool {
    bad_log_sum(verdicts) <= b
}

pub fn bad_log_sum(verdicts: &[PrimeVerdict]) -> f64 {
    verdicts
        .iter()
        .filter(|v| v.status == PrimeStatus::Bad)
        .map(|v| (v.p as f64).ln())
        .sum()
}
