//! Sparse homogeneous polynomials, linear forms and parametrized curve paths.
//!
//! Dual forms (apolarity operators) use the same type; which side a polynomial
//! lives on is decided by argument position.

mod text;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use rug::{Integer, Rational};
use thiserror::Error;

use crate::linalg::Matrix;
use crate::scalar::cyclotomic::{gcd_u32, lcm};
use crate::scalar::{factorial, Cyclotomic, CyclotomicField, Exactness, Scalar};

pub use text::parse_poly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("variable count mismatch: {0} vs {1}")]
    VarMismatch(usize, usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("zero linear form")]
    ZeroLinearForm,
}

/// Exponent vector. Ordered by total degree, then lexicographically, so the
/// largest monomial of degree d is x0^d.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn unit(nvars: usize, i: usize) -> Monomial {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    /// d! / ∏ e_i!
    pub fn multinomial(&self) -> Integer {
        let mut r = factorial(self.degree());
        for &e in &self.0 {
            if e > 1 {
                r.div_exact_mut(&factorial(e));
            }
        }
        r
    }

    /// ∏ e_i!
    pub fn factorial_product(&self) -> Integer {
        let mut r = Integer::from(1);
        for &e in &self.0 {
            if e > 1 {
                r *= factorial(e);
            }
        }
        r
    }

    pub fn add(&self, o: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    /// self - o when o divides self.
    pub fn checked_sub(&self, o: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&o.0) {
            if b > a {
                return None;
            }
            out.push(a - b);
        }
        Some(Monomial(out))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

/// All monomials of a given degree, largest first (x0^d, x0^{d-1}x1, …).
pub fn monomials(nvars: usize, degree: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; nvars];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        let n = cur.len();
        if i + 1 == n {
            cur[i] = left;
            out.push(Monomial(cur.clone()));
            return;
        }
        for e in (0..=left).rev() {
            cur[i] = e;
            rec(i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    if nvars == 0 {
        if degree == 0 {
            out.push(Monomial(Vec::new()));
        }
        return out;
    }
    rec(0, degree, &mut cur, &mut out);
    out
}

/// C(nvars - 1 + degree, degree).
pub fn monomial_count(nvars: usize, degree: u32) -> usize {
    if nvars == 0 {
        return (degree == 0) as usize;
    }
    Integer::from(Integer::binomial_u(nvars as u32 - 1 + degree, degree))
        .to_usize()
        .expect("monomial count overflow")
}

/// Monomials of one degree together with their positions.
#[derive(Clone, Debug)]
pub struct MonomialBasis {
    pub nvars: usize,
    pub degree: u32,
    pub list: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl MonomialBasis {
    pub fn new(nvars: usize, degree: u32) -> Self {
        let list = monomials(nvars, degree);
        let index = list
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        MonomialBasis {
            nvars,
            degree,
            list,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }
}

#[derive(Clone, PartialEq)]
pub struct HomogPoly {
    nvars: usize,
    degree: u32,
    terms: BTreeMap<Monomial, Scalar>,
}

impl HomogPoly {
    pub fn zero(nvars: usize, degree: u32) -> Self {
        HomogPoly {
            nvars,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Scalar) -> Self {
        let mut p = HomogPoly::zero(nvars, 0);
        p.add_term(Monomial(vec![0; nvars]), c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut p = HomogPoly::zero(nvars, 1);
        p.add_term(Monomial::unit(nvars, i), Scalar::one());
        p
    }

    pub fn monomial(m: Monomial, c: Scalar) -> Self {
        let mut p = HomogPoly::zero(m.0.len(), m.degree());
        p.add_term(m, c);
        p
    }

    /// Builds from (exponents, coefficient) pairs, merging repeats.
    pub fn from_terms(
        nvars: usize,
        degree: u32,
        terms: impl IntoIterator<Item = (Monomial, Scalar)>,
    ) -> Result<Self, PolyError> {
        let mut p = HomogPoly::zero(nvars, degree);
        for (m, c) in terms {
            if m.0.len() != nvars {
                return Err(PolyError::VarMismatch(m.0.len(), nvars));
            }
            if m.degree() != degree {
                return Err(PolyError::NotHomogeneous);
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    /// Coefficients listed against a monomial basis.
    pub fn from_vector(basis: &MonomialBasis, v: &[Scalar]) -> Self {
        let mut p = HomogPoly::zero(basis.nvars, basis.degree);
        for (m, c) in basis.list.iter().zip(v) {
            if !c.is_zero() {
                p.terms.insert(m.clone(), c.clone());
            }
        }
        p
    }

    pub fn from_rational_vector(basis: &MonomialBasis, v: &[Rational]) -> Self {
        let mut p = HomogPoly::zero(basis.nvars, basis.degree);
        for (m, c) in basis.list.iter().zip(v) {
            if *c != 0 {
                p.terms.insert(m.clone(), Scalar::Rational(c.clone()));
            }
        }
        p
    }

    pub fn num_vars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(m.degree(), self.degree);
        match self.terms.get_mut(&m) {
            Some(v) => {
                let s = v.add(&c);
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    /// Worst exactness among the coefficients.
    pub fn exactness(&self) -> Exactness {
        self.terms
            .values()
            .map(|c| c.exactness())
            .max()
            .unwrap_or(Exactness::Rational)
    }

    pub fn is_rational(&self) -> bool {
        self.terms.values().all(|c| matches!(c, Scalar::Rational(_)))
    }

    pub fn vector(&self, basis: &MonomialBasis) -> Vec<Scalar> {
        basis.list.iter().map(|m| self.coeff(m)).collect()
    }

    pub fn rational_vector(&self, basis: &MonomialBasis) -> Option<Vec<Rational>> {
        let mut out = vec![Rational::new(); basis.len()];
        for (m, c) in &self.terms {
            let i = basis.index_of(m)?;
            out[i] = c.to_rational()?;
        }
        Some(out)
    }

    fn check_same(&self, o: &HomogPoly) -> Result<(), PolyError> {
        if self.nvars != o.nvars {
            return Err(PolyError::VarMismatch(self.nvars, o.nvars));
        }
        if self.degree != o.degree && !self.is_zero() && !o.is_zero() {
            return Err(PolyError::DegreeMismatch(format!(
                "{} vs {}",
                self.degree, o.degree
            )));
        }
        Ok(())
    }

    pub fn add(&self, o: &HomogPoly) -> Result<HomogPoly, PolyError> {
        self.check_same(o)?;
        let mut out = if self.is_zero() { o.clone() } else { self.clone() };
        if !self.is_zero() {
            for (m, c) in &o.terms {
                out.add_term(m.clone(), c.clone());
            }
        }
        Ok(out)
    }

    pub fn sub(&self, o: &HomogPoly) -> Result<HomogPoly, PolyError> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> HomogPoly {
        self.scale(&Scalar::from_i64(-1))
    }

    pub fn scale(&self, c: &Scalar) -> HomogPoly {
        let mut out = HomogPoly::zero(self.nvars, self.degree);
        if c.is_zero() {
            return out;
        }
        for (m, v) in &self.terms {
            out.terms.insert(m.clone(), v.mul(c));
        }
        out
    }

    pub fn mul(&self, o: &HomogPoly) -> Result<HomogPoly, PolyError> {
        if self.nvars != o.nvars {
            return Err(PolyError::VarMismatch(self.nvars, o.nvars));
        }
        let mut acc: HashMap<Monomial, Scalar> = HashMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                let m = a.add(b);
                let v = ca.mul(cb);
                match acc.get_mut(&m) {
                    Some(x) => *x = x.add(&v),
                    None => {
                        acc.insert(m, v);
                    }
                }
            }
        }
        let mut out = HomogPoly::zero(self.nvars, self.degree + o.degree);
        for (m, c) in acc {
            if !c.is_zero() {
                out.terms.insert(m, c);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> HomogPoly {
        let mut out = HomogPoly::constant(self.nvars, Scalar::one());
        for _ in 0..e {
            out = out.mul(self).expect("same variables");
        }
        out
    }

    /// ∂f/∂x_i (plain derivative, no normalization).
    pub fn derivative(&self, i: usize) -> HomogPoly {
        let mut out = HomogPoly::zero(self.nvars, self.degree.saturating_sub(1));
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut mm = m.clone();
            mm.0[i] -= 1;
            out.terms.insert(mm, c.scale_rational(&Rational::from(e)));
        }
        out
    }

    /// Σ_i w_i ∂f/∂x_i for a rational direction w.
    pub fn directional_derivative(&self, w: &[Rational]) -> HomogPoly {
        let mut acc: HashMap<Monomial, Scalar> = HashMap::new();
        for (m, c) in &self.terms {
            for (i, wi) in w.iter().enumerate() {
                let e = m.0[i];
                if e == 0 || *wi == 0 {
                    continue;
                }
                let mut mm = m.clone();
                mm.0[i] -= 1;
                let v = c.scale_rational(&Rational::from(wi * e));
                match acc.get_mut(&mm) {
                    Some(x) => *x = x.add(&v),
                    None => {
                        acc.insert(mm, v);
                    }
                }
            }
        }
        let mut out = HomogPoly::zero(self.nvars, self.degree.saturating_sub(1));
        for (m, c) in acc {
            if !c.is_zero() {
                out.terms.insert(m, c);
            }
        }
        out
    }

    pub fn evaluate(&self, point: &[Scalar]) -> Scalar {
        let mut acc = Scalar::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t = t.mul(&x.pow(e));
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    pub fn evaluate_rational(&self, point: &[Rational]) -> Option<Rational> {
        let mut acc = Rational::new();
        for (m, c) in &self.terms {
            let mut t = c.to_rational()?;
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t *= Rational::from(rug::ops::Pow::pow(x, e as i32));
                }
            }
            acc += t;
        }
        Some(acc)
    }

    /// Largest coefficient magnitude, as f64.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.abs_f64()).fold(0.0, f64::max)
    }

    /// Variables that occur in some term.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.nvars)
            .filter(|&i| self.terms.keys().any(|m| m.0[i] > 0))
            .collect()
    }

    /// Re-embeds into more variables, or drops unused trailing ones.
    pub fn with_nvars(&self, nvars: usize) -> Result<HomogPoly, PolyError> {
        let mut out = HomogPoly::zero(nvars, self.degree);
        for (m, c) in &self.terms {
            let mut e = m.0.clone();
            if nvars < self.nvars {
                if e[nvars..].iter().any(|&x| x > 0) {
                    return Err(PolyError::VarMismatch(self.nvars, nvars));
                }
                e.truncate(nvars);
            } else {
                e.resize(nvars, 0);
            }
            out.terms.insert(Monomial(e), c.clone());
        }
        Ok(out)
    }
}

impl fmt::Debug for HomogPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for HomogPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&text::format_poly(self))
    }
}

/// A nonzero form of degree one, stored by its coefficient vector.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearForm {
    coeffs: Vec<Scalar>,
}

impl LinearForm {
    pub fn new(coeffs: Vec<Scalar>) -> Result<Self, PolyError> {
        if coeffs.iter().all(|c| c.is_zero()) {
            return Err(PolyError::ZeroLinearForm);
        }
        Ok(LinearForm { coeffs })
    }

    pub fn from_rationals(v: &[Rational]) -> Result<Self, PolyError> {
        LinearForm::new(v.iter().cloned().map(Scalar::Rational).collect())
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn num_vars(&self) -> usize {
        self.coeffs.len()
    }

    pub fn to_poly(&self) -> HomogPoly {
        let n = self.coeffs.len();
        let mut p = HomogPoly::zero(n, 1);
        for (i, c) in self.coeffs.iter().enumerate() {
            p.add_term(Monomial::unit(n, i), c.clone());
        }
        p
    }

    pub fn exactness(&self) -> Exactness {
        self.coeffs
            .iter()
            .map(|c| c.exactness())
            .max()
            .unwrap_or(Exactness::Rational)
    }

    /// Whether two forms define the same point (exact test).
    pub fn proportional(&self, o: &LinearForm) -> bool {
        let n = self.coeffs.len();
        for i in 0..n {
            for j in i + 1..n {
                let a = self.coeffs[i].mul(&o.coeffs[j]);
                let b = self.coeffs[j].mul(&o.coeffs[i]);
                if a != b {
                    return false;
                }
            }
        }
        // both nonzero, so all 2x2 minors vanishing means proportional,
        // unless supports differ in a single coordinate
        (0..n).all(|i| self.coeffs[i].is_zero() == o.coeffs[i].is_zero())
    }
}

/// Expands ℓ^d with exact multinomial coefficients.
pub fn power_of_linear(l: &LinearForm, d: u32) -> HomogPoly {
    sum_of_powers(&[(Scalar::one(), l.clone())], d)
}

/// Σ λ_i ℓ_i^d, accumulated monomial by monomial. Terms that form complete
/// Galois orbits over Q are summed through field traces.
pub fn sum_of_powers(terms: &[(Scalar, LinearForm)], d: u32) -> HomogPoly {
    let n = terms.first().map_or(0, |t| t.1.num_vars());
    let basis = monomials(n, d);
    let mut acc: Vec<Scalar> = vec![Scalar::zero(); basis.len()];
    let multinom: Vec<Rational> = basis.iter().map(|m| Rational::from(m.multinomial())).collect();
    let (singles, orbits) = galois_orbits(terms);
    let (rational, general): (Vec<usize>, Vec<usize>) = singles.into_iter().partition(|&t| {
        let (lambda, l) = &terms[t];
        lambda.as_rational().is_some() && l.coeffs.iter().all(|c| c.as_rational().is_some())
    });
    if !rational.is_empty() {
        for (k, v) in rational_power_sum(terms, &rational, &basis, d).into_iter().enumerate() {
            if v != 0 {
                acc[k] = acc[k].add(&Scalar::Rational(v));
            }
        }
    }
    for &t in &general {
        let (lambda, l) = &terms[t];
        let powers = power_table(&l.coeffs, d, Scalar::one(), |a, b| a.mul(b));
        let zero_vars: Vec<bool> = l.coeffs.iter().map(|c| c.is_zero()).collect();
        for (k, m) in basis.iter().enumerate() {
            if m.0.iter().zip(&zero_vars).any(|(&e, &z)| z && e > 0) {
                continue;
            }
            let mut t = lambda.scale_rational(&multinom[k]);
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = t.mul(&powers[i][e as usize]);
                }
            }
            acc[k] = acc[k].add(&t);
        }
    }
    for orbit in &orbits {
        for (k, v) in orbit_power_sum(terms, orbit, &basis, d).into_iter().enumerate() {
            if v != 0 {
                acc[k] = acc[k].add(&Scalar::Rational(v));
            }
        }
    }
    let mut out = HomogPoly::zero(n, d);
    for (m, c) in basis.into_iter().zip(acc) {
        if !c.is_zero() {
            out.terms.insert(m, c);
        }
    }
    out
}

/// Σ λ ℓ^d over rational terms, in integers over one common denominator.
fn rational_power_sum(terms: &[(Scalar, LinearForm)], idx: &[usize], basis: &[Monomial], d: u32) -> Vec<Rational> {
    // ℓ = v / D with v integral, so λ ℓ^d = (λ / D^d) v^d
    let mut scaled: Vec<(Rational, Vec<Integer>)> = Vec::with_capacity(idx.len());
    for &t in idx {
        let (lambda, l) = &terms[t];
        let coeffs: Vec<&Rational> = l.coeffs.iter().map(|c| c.as_rational().unwrap()).collect();
        let den = coeffs.iter().fold(Integer::from(1), |acc, c| acc.lcm(c.denom()));
        let v: Vec<Integer> = coeffs
            .iter()
            .map(|c| Integer::from(c.numer() * Integer::from(&den / c.denom())))
            .collect();
        let lam = Rational::from(lambda.as_rational().unwrap() / Rational::from(rug::ops::Pow::pow(den, d)));
        scaled.push((lam, v));
    }
    let common = scaled.iter().fold(Integer::from(1), |acc, (l, _)| acc.lcm(l.denom()));
    let mut acc = vec![Integer::new(); basis.len()];
    for (lam, v) in &scaled {
        let a = Integer::from(lam.numer() * Integer::from(&common / lam.denom()));
        let powers = power_table(v, d, Integer::from(1), |x, y| Integer::from(x * y));
        for (k, m) in basis.iter().enumerate() {
            if m.0.iter().zip(v).any(|(&e, c)| e > 0 && *c == 0) {
                continue;
            }
            let mut w = Integer::from(1);
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    w *= &powers[i][e as usize];
                }
            }
            acc[k] += w * &a;
        }
    }
    basis
        .iter()
        .zip(acc)
        .map(|(m, x)| Rational::from((x * m.multinomial(), common.clone())))
        .collect()
}

/// Σ over a Galois orbit of λ ℓ^d, one trace per monomial.
fn orbit_power_sum(terms: &[(Scalar, LinearForm)], orbit: &GaloisOrbit, basis: &[Monomial], d: u32) -> Vec<Rational> {
    let field = &orbit.field;
    let (lambda, l) = &terms[orbit.representative];
    let lift = |s: &Scalar| match s {
        Scalar::Rational(r) => Cyclotomic::from_rational(field, r),
        Scalar::Cyclotomic(c) => c.lift(field),
        Scalar::Complex(_) => unreachable!("orbits are exact"),
    };
    let lam = lift(lambda);
    let coeffs: Vec<Cyclotomic> = l.coeffs.iter().map(lift).collect();
    let den = coeffs.iter().fold(Integer::from(1), |acc, c| acc.lcm(c.denominator()));
    let v: Vec<Vec<Integer>> = coeffs
        .iter()
        .map(|c| {
            let s = Integer::from(&den / c.denominator());
            c.numerator().iter().map(|x| Integer::from(x * &s)).collect()
        })
        .collect();
    let mut one = vec![Integer::new(); field.degree()];
    one[0] = Integer::from(1);
    let powers = power_table(&v, d, one.clone(), |x, y| field.mul_integer(x, y));
    let zero_vars: Vec<bool> = coeffs.iter().map(|c| c.is_zero()).collect();
    let total_den = Integer::from(lam.denominator() * rug::ops::Pow::pow(den, d)) * orbit.stabilizer as u32;
    basis
        .iter()
        .map(|m| {
            if m.0.iter().zip(&zero_vars).any(|(&e, &z)| z && e > 0) {
                return Rational::new();
            }
            let mut w: Option<Vec<Integer>> = None;
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    w = Some(match w {
                        None => powers[i][e as usize].clone(),
                        Some(x) => field.mul_integer(&x, &powers[i][e as usize]),
                    });
                }
            }
            let w = w.unwrap_or_else(|| one.clone());
            let tr = field.trace_product_integer(lam.numerator(), &w);
            Rational::from((tr * m.multinomial(), total_den.clone()))
        })
        .collect()
}

fn power_table<T: Clone>(coeffs: &[T], d: u32, one: T, mul: impl Fn(&T, &T) -> T) -> Vec<Vec<T>> {
    coeffs
        .iter()
        .map(|c| {
            let mut v = Vec::with_capacity(d as usize + 1);
            v.push(one.clone());
            for e in 1..=d as usize {
                let next = mul(&v[e - 1], c);
                v.push(next);
            }
            v
        })
        .collect()
}

struct GaloisOrbit {
    representative: usize,
    field: Arc<CyclotomicField>,
    /// |Gal| / orbit size.
    stabilizer: usize,
}

fn conjugate(s: &Scalar, k: u32) -> Scalar {
    match s {
        Scalar::Cyclotomic(c) => Scalar::from(c.galois(k % c.order())),
        other => other.clone(),
    }
}

/// Splits terms into singles and complete Galois orbits.
fn galois_orbits(terms: &[(Scalar, LinearForm)]) -> (Vec<usize>, Vec<GaloisOrbit>) {
    let mut singles = Vec::new();
    let mut orbits = Vec::new();
    let mut used = vec![false; terms.len()];
    for i in 0..terms.len() {
        if used[i] {
            continue;
        }
        let (lambda, l) = &terms[i];
        let entries = || std::iter::once(lambda).chain(l.coeffs.iter());
        if entries().any(|s| matches!(s, Scalar::Complex(_))) {
            used[i] = true;
            singles.push(i);
            continue;
        }
        let order = entries().fold(1u32, |acc, s| match s {
            Scalar::Cyclotomic(c) => lcm(acc, c.order()),
            _ => acc,
        });
        if order <= 2 {
            used[i] = true;
            singles.push(i);
            continue;
        }
        let units: Vec<u32> = (1..order).filter(|k| gcd_u32(*k, order) == 1).collect();
        let mut members: Vec<usize> = Vec::new();
        let mut complete = true;
        for &k in &units {
            let lam = conjugate(lambda, k);
            let form: Vec<Scalar> = l.coeffs.iter().map(|c| conjugate(c, k)).collect();
            let hit = (i..terms.len()).find(|&j| {
                !used[j] && terms[j].0 == lam && terms[j].1.coeffs == form
            });
            match hit {
                Some(j) => {
                    if !members.contains(&j) {
                        members.push(j);
                    }
                }
                None => {
                    complete = false;
                    break;
                }
            }
        }
        if !complete || units.len() % members.len() != 0 {
            used[i] = true;
            singles.push(i);
            continue;
        }
        for &j in &members {
            used[j] = true;
        }
        orbits.push(GaloisOrbit {
            representative: i,
            field: CyclotomicField::new(order),
            stabilizer: units.len() / members.len(),
        });
    }
    (singles, orbits)
}

/// Normalized contraction g ∘ f: a dual monomial X^α acts as ∂^α / a!, where
/// a = deg g. With this choice g ∘ ℓ^d = C(d, a) · g(ℓ) · ℓ^{d-a}.
pub fn apolar_apply(g: &HomogPoly, f: &HomogPoly) -> Result<HomogPoly, PolyError> {
    if g.nvars != f.nvars {
        return Err(PolyError::VarMismatch(g.nvars, f.nvars));
    }
    if g.degree > f.degree {
        return Err(PolyError::DegreeMismatch(format!(
            "dual degree {} exceeds {}",
            g.degree, f.degree
        )));
    }
    let a_fact = factorial(g.degree);
    let mut acc: HashMap<Monomial, Scalar> = HashMap::new();
    for (alpha, gc) in &g.terms {
        for (beta, fc) in &f.terms {
            let Some(rest) = beta.checked_sub(alpha) else {
                continue;
            };
            // β!/(β-α)!
            let mut falling = Integer::from(1);
            for (b, r) in beta.0.iter().zip(&rest.0) {
                for k in (r + 1)..=*b {
                    falling *= k;
                }
            }
            let w = Rational::from((falling, a_fact.clone()));
            let v = gc.mul(fc).scale_rational(&w);
            match acc.get_mut(&rest) {
                Some(x) => *x = x.add(&v),
                None => {
                    acc.insert(rest, v);
                }
            }
        }
    }
    let mut out = HomogPoly::zero(f.nvars, f.degree - g.degree);
    for (m, c) in acc {
        if !c.is_zero() {
            out.terms.insert(m, c);
        }
    }
    Ok(out)
}

/// A polynomial path c(t) = Σ_j t^j p_j in the affine cone over P^m.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvePath {
    pub points: Vec<Vec<Rational>>,
}

impl CurvePath {
    pub fn new(points: Vec<Vec<Rational>>) -> Result<Self, PolyError> {
        if points.is_empty() || points[0].iter().all(|c| *c == 0) {
            return Err(PolyError::ZeroLinearForm);
        }
        let n = points[0].len();
        if points.iter().any(|p| p.len() != n) {
            return Err(PolyError::VarMismatch(n, 0));
        }
        Ok(CurvePath { points })
    }

    /// Constant path at one point.
    pub fn point(p: Vec<Rational>) -> Result<Self, PolyError> {
        CurvePath::new(vec![p])
    }

    pub fn num_vars(&self) -> usize {
        self.points[0].len()
    }

    /// Polynomial degree of the path in t.
    pub fn path_degree(&self) -> usize {
        self.points.len() - 1
    }

    pub fn support(&self) -> &[Rational] {
        &self.points[0]
    }

    /// Truncation to the first k vectors.
    pub fn truncate(&self, k: usize) -> CurvePath {
        CurvePath {
            points: self.points[..k.max(1).min(self.points.len())].to_vec(),
        }
    }

    pub fn eval(&self, t: &Rational) -> Vec<Rational> {
        let n = self.num_vars();
        let mut out = vec![Rational::new(); n];
        let mut tp = Rational::from(1);
        for p in &self.points {
            for (o, c) in out.iter_mut().zip(p) {
                *o += Rational::from(c * &tp);
            }
            tp *= t;
        }
        out
    }

    /// Σ_k α^{e-k} β^k p_k, the homogenized path at [α:β], e = path degree.
    pub fn eval_homog(&self, alpha: &Scalar, beta: &Scalar) -> Vec<Scalar> {
        let e = self.path_degree() as u32;
        let n = self.num_vars();
        let mut out = vec![Scalar::zero(); n];
        for (k, p) in self.points.iter().enumerate() {
            let w = alpha.pow(e - k as u32).mul(&beta.pow(k as u32));
            if w.is_zero() {
                continue;
            }
            for (o, c) in out.iter_mut().zip(p) {
                if *c != 0 {
                    *o = o.add(&w.scale_rational(c));
                }
            }
        }
        out
    }

    /// Applies x ↦ M x to the ambient coordinates of every path vector.
    pub fn map_points(&self, m: &[Vec<Rational>]) -> CurvePath {
        CurvePath {
            points: self
                .points
                .iter()
                .map(|p| crate::linalg::mat_vec_rational(m, p))
                .collect(),
        }
    }
}

/// Coefficient of t^j in (c(t)·x)^d, as a polynomial in x (no j! factor).
pub fn jet_coefficient(c: &CurvePath, j: usize, d: u32) -> HomogPoly {
    jets(c, d, j + 1).pop().expect("at least one jet")
}

/// The first `count` jets of (c(t)·x)^d: t-coefficients 0..count-1.
pub fn jets(c: &CurvePath, d: u32, count: usize) -> Vec<HomogPoly> {
    let n = c.num_vars();
    let basis = monomials(n, d);
    jets_in_basis(c, d, count, &basis)
        .into_iter()
        .map(|v| {
            let mut p = HomogPoly::zero(n, d);
            for (m, x) in basis.iter().zip(v) {
                if x != 0 {
                    p.terms.insert(m.clone(), Scalar::Rational(x));
                }
            }
            p
        })
        .collect()
}

/// Jets as rational coefficient vectors against the given monomial list.
pub fn jets_in_basis(c: &CurvePath, d: u32, count: usize, basis: &[Monomial]) -> Vec<Vec<Rational>> {
    let n = c.num_vars();
    // coordinate polynomials c_i(t), truncated to `count` terms
    let coord: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            (0..count)
                .map(|k| c.points.get(k).map_or_else(Rational::new, |p| p[i].clone()))
                .collect()
        })
        .collect();
    let trunc_mul = |a: &[Rational], b: &[Rational]| -> Vec<Rational> {
        let mut out = vec![Rational::new(); count];
        for (i, x) in a.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.iter().enumerate().take(count - i) {
                if *y != 0 {
                    out[i + j] += Rational::from(x * y);
                }
            }
        }
        out
    };
    let mut powers: Vec<Vec<Vec<Rational>>> = Vec::with_capacity(n);
    for ci in &coord {
        let mut v = Vec::with_capacity(d as usize + 1);
        let mut one = vec![Rational::new(); count];
        one[0] = Rational::from(1);
        v.push(one);
        for e in 1..=d as usize {
            let next = trunc_mul(&v[e - 1], ci);
            v.push(next);
        }
        powers.push(v);
    }
    let mut out = vec![vec![Rational::new(); basis.len()]; count];
    for (k, m) in basis.iter().enumerate() {
        let mut prod: Option<Vec<Rational>> = None;
        let mut dead = false;
        for (i, &e) in m.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let p = &powers[i][e as usize];
            if p.iter().all(|x| *x == 0) {
                dead = true;
                break;
            }
            prod = Some(match prod {
                None => p.clone(),
                Some(q) => trunc_mul(&q, p),
            });
        }
        if dead {
            continue;
        }
        let prod = prod.unwrap_or_else(|| {
            let mut one = vec![Rational::new(); count];
            one[0] = Rational::from(1);
            one
        });
        let mult = Rational::from(m.multinomial());
        for (j, v) in prod.into_iter().enumerate() {
            if v != 0 {
                out[j][k] = Rational::from(&v * &mult);
            }
        }
    }
    out
}

/// f ∘ M: substitutes x_i ↦ Σ_j M[i][j] y_j. M may be rectangular: rows index
/// the variables of f, columns the new variables.
pub fn substitute_linear(f: &HomogPoly, m: &Matrix) -> Result<HomogPoly, PolyError> {
    if m.rows() != f.nvars {
        return Err(PolyError::VarMismatch(m.rows(), f.nvars));
    }
    let new_n = m.cols();
    let forms: Vec<HomogPoly> = (0..m.rows())
        .map(|i| {
            let mut p = HomogPoly::zero(new_n, 1);
            for j in 0..new_n {
                p.add_term(Monomial::unit(new_n, j), m.get(i, j).clone());
            }
            p
        })
        .collect();
    let terms: Vec<(&[u32], &Scalar)> = f.terms.iter().map(|(k, v)| (k.0.as_slice(), v)).collect();
    let mut out = horner(&terms, 0, f.degree, &forms, new_n);
    out.degree = f.degree;
    Ok(out)
}

fn mul_linear(p: &HomogPoly, l: &HomogPoly) -> HomogPoly {
    let mut acc: HashMap<Monomial, Scalar> = HashMap::with_capacity(p.len() * 2);
    for (a, ca) in &p.terms {
        for (b, cb) in &l.terms {
            let m = a.add(b);
            let v = ca.mul(cb);
            match acc.get_mut(&m) {
                Some(x) => *x = x.add(&v),
                None => {
                    acc.insert(m, v);
                }
            }
        }
    }
    let mut out = HomogPoly::zero(p.nvars, p.degree + 1);
    for (m, c) in acc {
        if !c.is_zero() {
            out.terms.insert(m, c);
        }
    }
    out
}

// Horner scheme in the variable `k`: groups terms by their exponent of x_k.
fn horner(terms: &[(&[u32], &Scalar)], k: usize, deg: u32, forms: &[HomogPoly], n: usize) -> HomogPoly {
    if terms.is_empty() {
        return HomogPoly::zero(n, deg);
    }
    if k == forms.len() {
        let mut c = Scalar::zero();
        for (_, v) in terms {
            c = c.add(v);
        }
        return HomogPoly::constant(n, c);
    }
    let mut groups: BTreeMap<u32, Vec<(&[u32], &Scalar)>> = BTreeMap::new();
    for (e, c) in terms {
        groups.entry(e[k]).or_default().push((e, c));
    }
    let top = *groups.keys().next_back().unwrap();
    let mut acc: Option<HomogPoly> = None;
    for e in (0..=top).rev() {
        let sub = groups
            .get(&e)
            .map(|g| horner(g, k + 1, deg - e, forms, n))
            .unwrap_or_else(|| HomogPoly::zero(n, deg - e));
        acc = Some(match acc {
            None => sub,
            Some(a) => {
                let mut shifted = mul_linear(&a, &forms[k]);
                shifted.degree = deg - e;
                let mut s = sub;
                s.degree = deg - e;
                for (m, c) in shifted.terms {
                    s.add_term(m, c);
                }
                s
            }
        });
    }
    let mut out = acc.unwrap();
    out.degree = deg;
    out
}
