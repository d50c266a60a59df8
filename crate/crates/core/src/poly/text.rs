//! Text grammar: `126*x0^5*x1^4 + 252*x0^6*x1^2*x2 - 1/2*x4^9`.

use rug::{Integer, Rational};

use super::{HomogPoly, Monomial, PolyError};
use crate::scalar::{parse_rational, Scalar};

/// Parses a homogeneous polynomial. The variable count is `nvars` when given,
/// otherwise one more than the largest index seen.
pub fn parse_poly(s: &str, nvars: Option<usize>) -> Result<HomogPoly, PolyError> {
    let src: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if src.is_empty() {
        return Err(PolyError::Parse("empty input".into()));
    }
    let mut raw: Vec<(Vec<(usize, u32)>, Rational)> = Vec::new();
    let bytes = src.as_bytes();
    let mut pos = 0;
    let mut first = true;
    while pos < bytes.len() {
        let mut sign = 1;
        match bytes[pos] {
            b'+' => pos += 1,
            b'-' => {
                sign = -1;
                pos += 1
            }
            _ if first => {}
            c => return Err(PolyError::Parse(format!("expected + or - at {pos}, got {:?}", c as char))),
        }
        first = false;
        let end = bytes[pos..]
            .iter()
            .position(|&c| c == b'+' || c == b'-')
            .map_or(bytes.len(), |k| pos + k);
        let term = &src[pos..end];
        if term.is_empty() {
            return Err(PolyError::Parse(format!("empty term at {pos}")));
        }
        let (vars, c) = parse_term(term)?;
        raw.push((vars, c * Rational::from(sign)));
        pos = end;
    }
    let max_var = raw
        .iter()
        .flat_map(|(v, _)| v.iter().map(|(i, _)| *i + 1))
        .max()
        .unwrap_or(1);
    let n = match nvars {
        Some(n) if n < max_var => {
            return Err(PolyError::Parse(format!(
                "variable x{} out of range for {} variables",
                max_var - 1,
                n
            )))
        }
        Some(n) => n,
        None => max_var,
    };
    let mut degree = None;
    let mut terms = Vec::with_capacity(raw.len());
    for (vars, c) in raw {
        let mut e = vec![0u32; n];
        for (i, k) in vars {
            e[i] += k;
        }
        let m = Monomial(e);
        match degree {
            None => degree = Some(m.degree()),
            Some(d) if d != m.degree() => return Err(PolyError::NotHomogeneous),
            _ => {}
        }
        terms.push((m, Scalar::Rational(c)));
    }
    HomogPoly::from_terms(n, degree.unwrap_or(0), terms)
}

fn parse_term(term: &str) -> Result<(Vec<(usize, u32)>, Rational), PolyError> {
    let mut coeff = Rational::from(1);
    let mut vars = Vec::new();
    for factor in term.split('*') {
        if factor.is_empty() {
            return Err(PolyError::Parse(format!("empty factor in {term:?}")));
        }
        if let Some(rest) = factor.strip_prefix('x') {
            let (idx, exp) = match rest.split_once('^') {
                Some((i, e)) => (i, e),
                None => (rest, "1"),
            };
            let i: usize = idx
                .parse()
                .map_err(|_| PolyError::Parse(format!("bad variable {factor:?}")))?;
            let e: u32 = exp
                .parse()
                .map_err(|_| PolyError::Parse(format!("bad exponent {factor:?}")))?;
            vars.push((i, e));
        } else {
            let c = parse_rational(factor).map_err(|e| PolyError::Parse(e.to_string()))?;
            coeff *= c;
        }
    }
    Ok((vars, coeff))
}

fn monomial_text(m: &Monomial) -> String {
    m.0.iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| if e == 1 { format!("x{i}") } else { format!("x{i}^{e}") })
        .collect::<Vec<_>>()
        .join("*")
}

/// Largest monomial first. Non-rational coefficients are bracketed.
pub(super) fn format_poly(p: &HomogPoly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (m, c)) in p.terms().rev().enumerate() {
        let mono = monomial_text(m);
        let (neg, body) = match c {
            Scalar::Rational(r) => {
                let neg = *r < 0;
                let a = Rational::from(r.abs_ref());
                let body = if a == 1 && !mono.is_empty() {
                    mono.clone()
                } else {
                    let num = if *a.denom() == Integer::from(1) {
                        a.numer().to_string()
                    } else {
                        format!("{}/{}", a.numer(), a.denom())
                    };
                    if mono.is_empty() {
                        num
                    } else {
                        format!("{num}*{mono}")
                    }
                };
                (neg, body)
            }
            other => {
                let body = if mono.is_empty() {
                    format!("({other})")
                } else {
                    format!("({other})*{mono}")
                };
                (false, body)
            }
        };
        match (k, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(&body);
    }
    out
}
