//! Variable identifiers and interned variable orders.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

/// A polynomial variable. Index conventions follow the text names:
/// `X1`, `U0_1`, `T0`, `Tp`, `L0_1`, `V2_0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    /// `X0` is the homogenizing variable.
    X(u32),
    U(u32, u32),
    T(u32),
    TPrime,
    L(u32, u32),
    V(Vec<u32>),
}

impl Var {
    /// Sort key for the canonical order: U/T blocks interleaved
    /// (T_i before U_i,0..n), then X, then T', then ℓ, then V.
    fn canonical_key(&self) -> (u8, u32, u32, u32, Vec<u32>) {
        match self {
            Var::T(i) => (0, *i, 0, 0, vec![]),
            Var::U(i, j) => (0, *i, 1, *j, vec![]),
            Var::X(k) => (1, *k, 0, 0, vec![]),
            Var::TPrime => (2, 0, 0, 0, vec![]),
            Var::L(i, j) => (3, *i, *j, 0, vec![]),
            Var::V(a) => (4, 0, 0, 0, a.clone()),
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X(k) => write!(f, "X{k}"),
            Var::U(i, j) => write!(f, "U{i}_{j}"),
            Var::T(i) => write!(f, "T{i}"),
            Var::TPrime => write!(f, "Tp"),
            Var::L(i, j) => write!(f, "L{i}_{j}"),
            Var::V(a) => {
                write!(f, "V")?;
                for (k, e) in a.iter().enumerate() {
                    if k > 0 {
                        write!(f, "_")?;
                    }
                    write!(f, "{e}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::str::FromStr for Var {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let num = |t: &str| t.parse::<u32>().map_err(|_| format!("bad variable `{s}`"));
        let pair = |t: &str| -> std::result::Result<(u32, u32), String> {
            let (a, b) = t.split_once('_').ok_or_else(|| format!("bad variable `{s}`"))?;
            Ok((num(a)?, num(b)?))
        };
        if s == "Tp" {
            return Ok(Var::TPrime);
        }
        let (head, rest) = s.split_at(1.min(s.len()));
        match head {
            "X" => Ok(Var::X(num(rest)?)),
            "T" => Ok(Var::T(num(rest)?)),
            "U" => pair(rest).map(|(i, j)| Var::U(i, j)),
            "L" => pair(rest).map(|(i, j)| Var::L(i, j)),
            "V" => rest
                .split('_')
                .map(num)
                .collect::<std::result::Result<Vec<_>, _>>()
                .map(Var::V),
            _ => Err(format!("unknown variable `{s}`")),
        }
    }
}

/// Ordered variable list; index 0 is the greatest variable.
#[derive(Debug)]
pub struct VarOrder {
    vars: Vec<Var>,
    index: HashMap<Var, usize>,
}

impl PartialEq for VarOrder {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars
    }
}

impl Eq for VarOrder {}

pub type Order = Arc<VarOrder>;

fn interner() -> &'static Mutex<HashMap<Vec<Var>, Order>> {
    static CELL: OnceLock<Mutex<HashMap<Vec<Var>, Order>>> = OnceLock::new();
    CELL.get_or_init(|| Mutex::new(HashMap::new()))
}

impl VarOrder {
    /// Interned order over `vars` (must be distinct).
    pub fn new(vars: Vec<Var>) -> Order {
        let mut table = interner().lock().unwrap();
        if let Some(o) = table.get(&vars) {
            return o.clone();
        }
        let index = vars.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect::<HashMap<_, _>>();
        assert_eq!(index.len(), vars.len(), "duplicate variable in order");
        let o = Arc::new(VarOrder {
            vars: vars.clone(),
            index,
        });
        table.insert(vars, o.clone());
        o
    }

    /// Order over `vars` sorted canonically.
    pub fn canonical(mut vars: Vec<Var>) -> Order {
        vars.sort_by_key(|v| v.canonical_key());
        vars.dedup();
        Self::new(vars)
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn var(&self, i: usize) -> &Var {
        &self.vars[i]
    }

    pub fn index_of(&self, v: &Var) -> Option<usize> {
        self.index.get(v).copied()
    }

    /// Position of `v`; panics if absent.
    pub fn idx(&self, v: &Var) -> usize {
        self.index_of(v)
            .unwrap_or_else(|| panic!("variable {v} not in order"))
    }

    /// This order with `extra` appended (skipping those already present).
    pub fn extended(&self, extra: &[Var]) -> Order {
        let mut vars = self.vars.clone();
        for v in extra {
            if !self.index.contains_key(v) {
                vars.push(v.clone());
            }
        }
        Self::new(vars)
    }
}

/// `X1 > ... > Xn`.
pub fn x_order(n: usize) -> Order {
    VarOrder::new((1..=n as u32).map(Var::X).collect())
}

/// Chow ring with `blocks` blocks `U_i,0..n`.
pub fn chow_order(n: usize, blocks: usize) -> Order {
    let mut v = Vec::with_capacity(blocks * (n + 1));
    for i in 0..blocks as u32 {
        for j in 0..=n as u32 {
            v.push(Var::U(i, j));
        }
    }
    VarOrder::new(v)
}

/// Characteristic-polynomial ring `T0 > U0_0 > ... > U0_n > T1 > ...`.
pub fn char_order(n: usize, blocks: usize) -> Order {
    let mut v = Vec::with_capacity(blocks * (n + 2));
    for i in 0..blocks as u32 {
        v.push(Var::T(i));
        for j in 0..=n as u32 {
            v.push(Var::U(i, j));
        }
    }
    VarOrder::new(v)
}
