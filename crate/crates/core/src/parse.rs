//! Text form of polynomials: `3*X1^2*X2 - 1/2*U0_1 + 5`.

use num_bigint::BigInt;

use crate::error::{ChowError, Result};
use crate::field::Field;
use crate::monomial::Monomial;
use crate::poly::Poly;
use crate::var::{Order, Var, VarOrder};

pub fn format_poly<F: Field>(p: &Poly<F>) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let f = p.field();
    let mut out = String::new();
    for (k, (m, c)) in p.terms().iter().enumerate() {
        let neg = f.is_negative_repr(c);
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let cs = f.format(c);
        let mut factors: Vec<String> = Vec::new();
        for (i, &e) in m.exps().iter().enumerate() {
            match e {
                0 => {}
                1 => factors.push(p.order().var(i).to_string()),
                _ => factors.push(format!("{}^{}", p.order().var(i), e)),
            }
        }
        if factors.is_empty() {
            out.push_str(&cs);
        } else {
            if cs != "1" {
                out.push_str(&cs);
                out.push('*');
            }
            out.push_str(&factors.join("*"));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
}

fn tokenize(s: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    let err = |col: usize, msg: String| ChowError::Parse { line: 1, col, msg };
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        match c {
            '+' => out.push((Tok::Plus, col)),
            '-' => out.push((Tok::Minus, col)),
            '*' => out.push((Tok::Star, col)),
            '/' => out.push((Tok::Slash, col)),
            '^' => out.push((Tok::Caret, col)),
            d if d.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let t: String = chars[start..i].iter().collect();
                out.push((Tok::Num(t.parse().unwrap()), col));
                continue;
            }
            a if a.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), col));
                continue;
            }
            other => return Err(err(col, format!("unexpected character `{other}`"))),
        }
        i += 1;
    }
    Ok(out)
}

/// One term: sign, numerator, denominator, and variable powers.
struct RawTerm {
    neg: bool,
    num: BigInt,
    den: BigInt,
    vars: Vec<(Var, u16)>,
}

fn parse_raw(s: &str) -> Result<Vec<RawTerm>> {
    let toks = tokenize(s)?;
    let end_col = s.chars().count() + 1;
    let err = |col: usize, msg: &str| ChowError::Parse {
        line: 1,
        col,
        msg: msg.to_string(),
    };
    let mut pos = 0;
    let mut terms = Vec::new();
    if toks.is_empty() {
        return Err(err(1, "empty polynomial"));
    }
    loop {
        let mut neg = false;
        while let Some((t @ (Tok::Plus | Tok::Minus), _)) = toks.get(pos) {
            if *t == Tok::Minus {
                neg = !neg;
            }
            pos += 1;
        }
        let mut term = RawTerm {
            neg,
            num: BigInt::from(1),
            den: BigInt::from(1),
            vars: Vec::new(),
        };
        loop {
            match toks.get(pos) {
                Some((Tok::Num(n), _)) => {
                    term.num *= n;
                    pos += 1;
                    if let Some((Tok::Slash, c)) = toks.get(pos) {
                        match toks.get(pos + 1) {
                            Some((Tok::Num(d), dc)) => {
                                if d == &BigInt::from(0) {
                                    return Err(err(*dc, "zero denominator"));
                                }
                                term.den *= d;
                                pos += 2;
                            }
                            _ => return Err(err(*c + 1, "expected denominator")),
                        }
                    }
                }
                Some((Tok::Ident(name), c)) => {
                    let v: Var = name.parse().map_err(|m: String| err(*c, &m))?;
                    pos += 1;
                    let mut e: u16 = 1;
                    if let Some((Tok::Caret, cc)) = toks.get(pos) {
                        match toks.get(pos + 1) {
                            Some((Tok::Num(n), nc)) => {
                                e = n.try_into().map_err(|_| err(*nc, "exponent too large"))?;
                                pos += 2;
                            }
                            _ => return Err(err(*cc + 1, "expected exponent")),
                        }
                    }
                    term.vars.push((v, e));
                }
                Some((_, c)) => return Err(err(*c, "expected number or variable")),
                None => return Err(err(end_col, "unexpected end of input")),
            }
            match toks.get(pos) {
                Some((Tok::Star, _)) => pos += 1,
                _ => break,
            }
        }
        terms.push(term);
        match toks.get(pos) {
            None => break,
            Some((Tok::Plus | Tok::Minus, _)) => {}
            Some((_, c)) => return Err(err(*c, "expected `+` or `-`")),
        }
    }
    Ok(terms)
}

/// Parse into a given variable order.
pub fn parse_poly<F: Field>(field: &F, order: &Order, s: &str) -> Result<Poly<F>> {
    let raw = parse_raw(s)?;
    let mut terms = Vec::with_capacity(raw.len());
    for t in raw {
        let mut e = vec![0u16; order.len()];
        for (v, k) in &t.vars {
            let i = order.index_of(v).ok_or_else(|| ChowError::Parse {
                line: 1,
                col: 1,
                msg: format!("variable {v} not in the ring"),
            })?;
            e[i] += k;
        }
        let num = if t.neg { -t.num } else { t.num };
        terms.push((Monomial::from_exps(e), field.from_ratio(&num, &t.den)?));
    }
    Ok(Poly::from_terms(field, order, terms))
}

/// Variables occurring in `s`.
pub fn vars_in(s: &str) -> Result<Vec<Var>> {
    let mut out = Vec::new();
    for t in parse_raw(s)? {
        for (v, _) in t.vars {
            if !out.contains(&v) {
                out.push(v);
            }
        }
    }
    Ok(out)
}

/// Parse with the canonical order over the variables that occur.
pub fn parse_poly_infer<F: Field>(field: &F, s: &str) -> Result<Poly<F>> {
    let order = VarOrder::canonical(vars_in(s)?);
    parse_poly(field, &order, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use crate::var::x_order;

    #[test]
    fn roundtrip_text() {
        let o = x_order(3);
        for s in ["3*X1^2*X2 - 1/2*X3 + 5", "-X1", "0", "X1*X2*X3 + 7/3"] {
            let p = parse_poly(&Rationals, &o, s).unwrap();
            let again = parse_poly(&Rationals, &o, &p.to_string()).unwrap();
            assert_eq!(p, again);
        }
        let p = parse_poly(&Rationals, &o, " 2 * X1 ^ 2 -  X1^2 ").unwrap();
        assert_eq!(p.to_string(), "X1^2");
    }

    #[test]
    fn prime_field_text() {
        let f = PrimeField::new(7).unwrap();
        let p = parse_poly(&f, &x_order(1), "X1 - 1/2").unwrap();
        assert_eq!(p.to_string(), "X1 + 3");
    }

    #[test]
    fn errors_carry_columns() {
        let o = x_order(1);
        match parse_poly(&Rationals, &o, "X1 + * 2") {
            Err(ChowError::Parse { col, .. }) => assert_eq!(col, 6),
            other => panic!("{other:?}"),
        }
        assert!(parse_poly(&Rationals, &o, "X1 + ").is_err());
        assert!(parse_poly(&Rationals, &o, "X2").is_err());
    }

    #[test]
    fn infer_order() {
        let p = parse_poly_infer(&Rationals, "U1_1*T0 - U0_0").unwrap();
        let names: Vec<String> = p.order().vars().iter().map(|v| v.to_string()).collect();
        assert_eq!(names, ["T0", "U0_0", "U1_1"]);
    }
}
