//! Dense univariate polynomials over Q, with numeric root finding and
//! exact rational root extraction.

use std::fmt;

use rug::float::Constant;
use rug::{Float, Integer, Rational};

use crate::scalar::BigComplex;

/// Coefficients lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatPoly {
    coeffs: Vec<Rational>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| *c == 0) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        RatPoly::new(coeffs.iter().map(|c| Rational::from(*c)).collect())
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        RatPoly::new(vec![c])
    }

    /// ∏ (x - r) over the given roots.
    pub fn from_roots(roots: &[Rational]) -> Self {
        let mut p = RatPoly::constant(Rational::from(1));
        for r in roots {
            p = p.mul(&RatPoly::new(vec![Rational::from(-r), Rational::from(1)]));
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn scale(&self, c: &Rational) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|a| Rational::from(a * c)).collect())
    }

    pub fn monic(&self) -> RatPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.leading().recip())
    }

    pub fn add(&self, o: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        RatPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        RatPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn mul(&self, o: &RatPoly) -> RatPoly {
        if self.is_zero() || o.is_zero() {
            return RatPoly::zero();
        }
        let mut out = vec![Rational::new(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += Rational::from(a * b);
            }
        }
        RatPoly::new(out)
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn divrem(&self, d: &RatPoly) -> (RatPoly, RatPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead_inv = d.leading().recip();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (RatPoly::zero(), self.clone());
        }
        let mut q = vec![Rational::new(); rem.len() - dd];
        for i in (0..q.len()).rev() {
            let c = Rational::from(&rem[i + dd] * &lead_inv);
            if c != 0 {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    rem[i + j] -= Rational::from(&c * dc);
                }
            }
            q[i] = c;
        }
        rem.truncate(dd);
        (RatPoly::new(q), RatPoly::new(rem))
    }

    pub fn derivative(&self) -> RatPoly {
        RatPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| Rational::from(c * i as u32))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    /// Monic gcd (zero when both inputs are zero).
    pub fn gcd(&self, o: &RatPoly) -> RatPoly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Returns (g, s, t) with s·self + t·o = g, where g is a gcd (not normalized).
    pub fn ext_gcd(&self, o: &RatPoly) -> (RatPoly, RatPoly, RatPoly) {
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (RatPoly::constant(Rational::from(1)), RatPoly::zero());
        let (mut t0, mut t1) = (RatPoly::zero(), RatPoly::constant(Rational::from(1)));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let s2 = s0.sub(&q.mul(&s1));
            let t2 = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
            t0 = t1;
            t1 = t2;
        }
        (r0, s0, t0)
    }

    /// True when the polynomial has no repeated roots over the algebraic closure.
    pub fn is_squarefree(&self) -> bool {
        match self.degree() {
            None => false,
            Some(0) => true,
            Some(_) => self.gcd(&self.derivative()).degree() == Some(0),
        }
    }

    /// self / gcd(self, self').
    pub fn squarefree_part(&self) -> RatPoly {
        if self.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        self.divrem(&g).0.monic()
    }

    /// Yun's square-free factorization: pairs (factor, multiplicity).
    pub fn squarefree_factorization(&self) -> Vec<(RatPoly, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let fp = f.derivative();
        let mut a = f.gcd(&fp);
        let mut b = f.divrem(&a).0;
        let mut c = fp.divrem(&a).0;
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        loop {
            let g = b.gcd(&d);
            if g.degree().unwrap_or(0) > 0 {
                out.push((g.clone(), i));
            }
            b = b.divrem(&g).0;
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            c = d.divrem(&g).0;
            d = c.sub(&b.derivative());
            i += 1;
            a = a.divrem(&g).0;
        }
        let _ = a;
        out
    }

    /// All complex roots (with multiplicity) by Aberth–Ehrlich iteration.
    pub fn complex_roots(&self, prec: u32) -> Vec<BigComplex> {
        let coeffs: Vec<BigComplex> = self
            .coeffs
            .iter()
            .map(|c| BigComplex::from_rational(c, prec))
            .collect();
        aberth(&coeffs, prec)
    }

    /// Distinct rational roots whose denominators stay below `max_den`.
    pub fn rational_roots(&self, max_den: &Integer, prec: u32) -> Vec<Rational> {
        let deg = match self.degree() {
            None | Some(0) => return Vec::new(),
            Some(d) => d,
        };
        let sf = self.squarefree_part();
        let mut out: Vec<Rational> = Vec::new();
        // x = 0 and linear factors are handled without numerics
        if deg == 1 {
            return vec![Rational::from(-self.coeff(0) / self.coeff(1))];
        }
        let mut work = sf;
        if work.coeff(0) == 0 {
            out.push(Rational::new());
            work = work.divrem(&RatPoly::from_i64(&[0, 1])).0;
        }
        if work.degree().unwrap_or(0) == 0 {
            return out;
        }
        if work.degree() == Some(1) {
            out.push(Rational::from(-work.coeff(0) / work.coeff(1)));
            return out;
        }
        let tol = Float::with_val(prec, Float::i_exp(1, -((prec / 3) as i32)));
        for z in work.complex_roots(prec) {
            let scale = Float::with_val(prec, z.re.abs_ref()) + 1u32;
            if Float::with_val(prec, z.im.abs_ref()) > Float::with_val(prec, &tol * &scale) {
                continue;
            }
            if let Some(r) = rationalize(&z.re, max_den, prec) {
                if work.eval(&r) == 0 && !out.contains(&r) {
                    out.push(r);
                }
            }
        }
        out.sort();
        out
    }

    /// Numeric value at a complex point.
    pub fn eval_complex(&self, z: &BigComplex) -> BigComplex {
        let prec = z.prec();
        let mut acc = BigComplex::zero(prec);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(z).add(&BigComplex::from_rational(c, prec));
        }
        acc
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if *c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", c)?,
                1 => write!(f, "{}*x", c)?,
                _ => write!(f, "{}*x^{}", c, i)?,
            }
        }
        Ok(())
    }
}

/// Best rational approximation of `x` by continued fractions, accepted only when
/// it agrees with `x` to roughly a third of the working precision.
pub fn rationalize(x: &Float, max_den: &Integer, prec: u32) -> Option<Rational> {
    let tol = Float::with_val(prec, Float::i_exp(1, -((prec / 3) as i32)))
        * (Float::with_val(prec, x.abs_ref()) + 1u32);
    let (mut h0, mut h1) = (Integer::from(0), Integer::from(1));
    let (mut k0, mut k1) = (Integer::from(1), Integer::from(0));
    let mut rem = x.clone();
    for _ in 0..200 {
        let a = rem.clone().floor();
        let ai = a.to_integer()?;
        let h2 = Integer::from(&ai * &h1) + &h0;
        let k2 = Integer::from(&ai * &k1) + &k0;
        if k2 > *max_den {
            return None;
        }
        let approx = Float::with_val(prec, &h2) / Float::with_val(prec, &k2);
        if Float::with_val(prec, &approx - x).abs() <= tol {
            return Some(Rational::from((h2, k2)));
        }
        let frac = Float::with_val(prec, &rem - &a);
        if frac.is_zero() {
            return None;
        }
        rem = Float::with_val(prec, frac.recip_ref());
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
    }
    None
}

/// Aberth–Ehrlich simultaneous root iteration for complex coefficients (lowest first).
pub fn aberth(coeffs: &[BigComplex], prec: u32) -> Vec<BigComplex> {
    let mut c: Vec<BigComplex> = coeffs.to_vec();
    while c.last().is_some_and(|z| z.is_zero()) {
        c.pop();
    }
    if c.len() < 2 {
        return Vec::new();
    }
    let n = c.len() - 1;
    let lead = c[n].clone();
    let lead_abs = lead.abs();
    // Cauchy bound for the initial circle
    let mut radius = Float::with_val(prec, 0);
    for z in &c[..n] {
        let r = z.abs() / &lead_abs;
        if r > radius {
            radius = r;
        }
    }
    radius += 1u32;
    let two_pi = Float::with_val(prec, Constant::Pi) * 2u32;
    let mut roots: Vec<BigComplex> = (0..n)
        .map(|k| {
            let ang = Float::with_val(prec, &two_pi * (k as u32)) / (n as u32) + 0.4f64;
            let (s, co) = ang.sin_cos(Float::new(prec));
            BigComplex::new(co * &radius, s * &radius)
        })
        .collect();
    let deriv: Vec<BigComplex> = (1..=n)
        .map(|i| c[i].scale(&Float::with_val(prec, i as u32)))
        .collect();
    let horner = |cs: &[BigComplex], z: &BigComplex| {
        let mut acc = BigComplex::zero(prec);
        for a in cs.iter().rev() {
            acc = acc.mul(z).add(a);
        }
        acc
    };
    let eps = Float::with_val(prec, Float::i_exp(1, -(prec as i32 - 16)));
    let mut done = vec![false; n];
    for _ in 0..(200 + 20 * n) {
        let mut all = true;
        for k in 0..n {
            if done[k] {
                continue;
            }
            let z = roots[k].clone();
            let pz = horner(&c, &z);
            if pz.is_zero() {
                done[k] = true;
                continue;
            }
            let dz = horner(&deriv, &z);
            let ratio = match pz.div(&dz) {
                Some(r) => r,
                None => {
                    roots[k] = z.add(&BigComplex::from_f64(1e-3, 1e-3, prec));
                    all = false;
                    continue;
                }
            };
            let mut sum = BigComplex::zero(prec);
            for (j, w) in roots.iter().enumerate() {
                if j != k {
                    if let Some(t) = z.sub(w).inv() {
                        sum = sum.add(&t);
                    }
                }
            }
            let one = BigComplex::from_f64(1.0, 0.0, prec);
            let denom = one.sub(&ratio.mul(&sum));
            let step = ratio.div(&denom).unwrap_or(ratio);
            let new = z.sub(&step);
            let size = Float::with_val(prec, new.abs()) + 1u32;
            if step.abs() <= Float::with_val(prec, &eps * &size) {
                done[k] = true;
            } else {
                all = false;
            }
            roots[k] = new;
        }
        if all {
            break;
        }
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn division_and_gcd() {
        let a = RatPoly::from_roots(&[q(1, 1), q(2, 1), q(-3, 2)]);
        let b = RatPoly::from_roots(&[q(2, 1), q(5, 1)]);
        assert_eq!(a.gcd(&b), RatPoly::from_roots(&[q(2, 1)]));
        let (qt, r) = a.divrem(&b);
        assert_eq!(qt.mul(&b).add(&r), a);
    }

    #[test]
    fn ext_gcd_identity() {
        let a = RatPoly::from_i64(&[1, 0, 3, 1]);
        let b = RatPoly::from_i64(&[-2, 1, 1]);
        let (g, s, t) = a.ext_gcd(&b);
        assert_eq!(s.mul(&a).add(&t.mul(&b)), g);
    }

    #[test]
    fn squarefree_structure() {
        let p = RatPoly::from_roots(&[q(1, 1), q(1, 1), q(1, 1), q(2, 1), q(2, 1), q(3, 1)]);
        assert!(!p.is_squarefree());
        let fact = p.squarefree_factorization();
        let mults: Vec<usize> = fact.iter().map(|(_, m)| *m).collect();
        assert_eq!(mults, vec![1, 2, 3]);
        assert!(RatPoly::from_roots(&[q(1, 3), q(2, 7)]).is_squarefree());
    }

    #[test]
    fn rational_roots_found_and_irrational_skipped() {
        // (x - 3/7)(x + 22/5)(x^2 - 2)
        let p = RatPoly::from_roots(&[q(3, 7), q(-22, 5)]).mul(&RatPoly::from_i64(&[-2, 0, 1]));
        let roots = p.rational_roots(&Integer::from(1_000_000), 256);
        assert_eq!(roots, vec![q(-22, 5), q(3, 7)]);
    }

    #[test]
    fn aberth_finds_roots_of_unity() {
        let p = RatPoly::from_i64(&[-1, 0, 0, 0, 0, 1]);
        let roots = p.complex_roots(128);
        assert_eq!(roots.len(), 5);
        for z in roots {
            let v = p.eval_complex(&z);
            assert!(v.abs() < 1e-30);
        }
    }
}
