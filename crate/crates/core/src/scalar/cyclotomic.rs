//! Exact arithmetic in cyclotomic fields Q(ζ_n).
//!
//! Elements live in the power basis 1, ζ, …, ζ^{φ(n)-1}, reduced modulo the
//! n-th cyclotomic polynomial. Internally an element is an integer vector over a
//! common positive denominator kept in lowest terms, so equal elements of the
//! same field have identical representations.

use std::fmt;
use std::sync::Arc;

use rug::{Float, Integer, Rational};

use super::complex::BigComplex;
use crate::univariate::RatPoly;

/// The field Q(ζ_n) with its reduction table.
#[derive(Debug)]
pub struct CyclotomicField {
    order: u32,
    degree: usize,
    // powers[k] = ζ^k in the power basis, stored sparsely, for 0 <= k < n
    powers: Vec<Vec<(usize, Integer)>>,
    modulus: Vec<Integer>,
    // traces[k] = Tr(ζ^k) for 0 <= k < 2·degree
    traces: Vec<Integer>,
}

impl CyclotomicField {
    pub fn new(order: u32) -> Arc<Self> {
        assert!(order >= 1, "cyclotomic order must be positive");
        let modulus = cyclotomic_polynomial(order);
        let degree = modulus.len() - 1;
        let n = order as usize;
        let mut powers = Vec::with_capacity(n);
        let mut cur = vec![Integer::new(); degree];
        cur[0] = Integer::from(1);
        for _ in 0..n {
            powers.push(
                cur.iter()
                    .enumerate()
                    .filter(|(_, c)| **c != 0)
                    .map(|(i, c)| (i, c.clone()))
                    .collect(),
            );
            let top = cur[degree - 1].clone();
            for i in (1..degree).rev() {
                cur[i] = cur[i - 1].clone();
            }
            cur[0] = Integer::new();
            if top != 0 {
                for (i, c) in modulus.iter().take(degree).enumerate() {
                    cur[i] -= Integer::from(&top * c);
                }
            }
        }
        let traces = (0..2 * degree.max(1))
            .map(|k| Integer::from(ramanujan_sum(order, k as u32)))
            .collect();
        Arc::new(CyclotomicField {
            order,
            degree,
            powers,
            modulus,
            traces,
        })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// φ(n), the dimension over Q.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficients of Φ_n, lowest degree first.
    pub fn modulus(&self) -> &[Integer] {
        &self.modulus
    }

    /// Product of two integer coordinate vectors, reduced but not normalized.
    pub fn mul_integer(&self, a: &[Integer], b: &[Integer]) -> Vec<Integer> {
        let phi = self.degree;
        let mut prod = vec![Integer::new(); 2 * phi - 1];
        for (i, x) in a.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if *y != 0 {
                    prod[i + j] += Integer::from(x * y);
                }
            }
        }
        let mut num: Vec<Integer> = prod[..phi].to_vec();
        for (k, c) in prod.iter().enumerate().skip(phi) {
            if *c != 0 {
                self.fold(k, c, &mut num);
            }
        }
        num
    }

    /// Tr(a·b) for integer coordinate vectors.
    pub fn trace_product_integer(&self, a: &[Integer], b: &[Integer]) -> Integer {
        let t = &self.traces;
        let mut acc = Integer::new();
        for (i, x) in a.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            let mut inner = Integer::new();
            for (j, y) in b.iter().enumerate() {
                if *y != 0 && t[i + j] != 0 {
                    inner += Integer::from(y * &t[i + j]);
                }
            }
            if inner != 0 {
                acc += inner * x;
            }
        }
        acc
    }

    fn fold(&self, k: usize, c: &Integer, out: &mut [Integer]) {
        if k < self.degree {
            out[k] += c;
            return;
        }
        for (t, p) in &self.powers[k % self.order as usize] {
            out[*t] += Integer::from(c * p);
        }
    }
}

/// Φ_n with integer coefficients, lowest degree first.
pub fn cyclotomic_polynomial(n: u32) -> Vec<Integer> {
    let mut num = vec![Integer::new(); n as usize + 1];
    num[0] = Integer::from(-1);
    num[n as usize] = Integer::from(1);
    for k in 1..n {
        if n % k == 0 {
            let den = cyclotomic_polynomial(k);
            num = exact_monic_div(&num, &den);
        }
    }
    num
}

fn exact_monic_div(num: &[Integer], den: &[Integer]) -> Vec<Integer> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let qlen = num.len() - dn;
    let mut q = vec![Integer::new(); qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dn].clone();
        if c != 0 {
            for (j, dc) in den.iter().enumerate() {
                rem[i + j] -= Integer::from(&c * dc);
            }
        }
        q[i] = c;
    }
    debug_assert!(rem.iter().all(|c| *c == 0));
    q
}

/// An element of Q(ζ_n).
#[derive(Clone)]
pub struct Cyclotomic {
    field: Arc<CyclotomicField>,
    num: Vec<Integer>,
    den: Integer,
}

impl Cyclotomic {
    fn normalized(field: Arc<CyclotomicField>, mut num: Vec<Integer>, mut den: Integer) -> Self {
        if den < 0 {
            den = -den;
            for c in num.iter_mut() {
                *c = Integer::from(-&*c);
            }
        }
        let mut g = den.clone();
        for c in &num {
            if g == 1 {
                break;
            }
            if *c != 0 {
                g = g.gcd(c);
            }
        }
        if num.iter().all(|c| *c == 0) {
            return Cyclotomic {
                field,
                num,
                den: Integer::from(1),
            };
        }
        if g != 1 {
            for c in num.iter_mut() {
                c.div_exact_mut(&g);
            }
            den.div_exact_mut(&g);
        }
        Cyclotomic { field, num, den }
    }

    pub fn zero(field: &Arc<CyclotomicField>) -> Self {
        Cyclotomic {
            field: field.clone(),
            num: vec![Integer::new(); field.degree],
            den: Integer::from(1),
        }
    }

    pub fn from_rational(field: &Arc<CyclotomicField>, r: &Rational) -> Self {
        let mut num = vec![Integer::new(); field.degree];
        num[0] = r.numer().clone();
        Cyclotomic {
            field: field.clone(),
            num,
            den: r.denom().clone(),
        }
    }

    /// ζ_n^k.
    pub fn root_of_unity(field: &Arc<CyclotomicField>, k: i64) -> Self {
        let idx = k.rem_euclid(field.order as i64) as usize;
        let mut num = vec![Integer::new(); field.degree];
        for (t, p) in &field.powers[idx] {
            num[*t] = p.clone();
        }
        Cyclotomic {
            field: field.clone(),
            num,
            den: Integer::from(1),
        }
    }

    /// The element Σ poly[k] ζ^k for a polynomial of any length.
    pub fn from_poly(field: &Arc<CyclotomicField>, poly: &[Rational]) -> Self {
        let mut den = Integer::from(1);
        for c in poly {
            if *c.denom() != 1 {
                den.lcm_mut(c.denom());
            }
        }
        let mut num = vec![Integer::new(); field.degree];
        for (k, c) in poly.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            let scaled = Integer::from(c.numer() * Integer::from(&den / c.denom()));
            field.fold(k, &scaled, &mut num);
        }
        Cyclotomic::normalized(field.clone(), num, den)
    }

    /// Builds an element from power-basis coefficients of length φ(n).
    pub fn from_coeffs(field: &Arc<CyclotomicField>, coeffs: &[Rational]) -> Option<Self> {
        if coeffs.len() != field.degree {
            return None;
        }
        Some(Cyclotomic::from_poly(field, coeffs))
    }

    pub fn field(&self) -> &Arc<CyclotomicField> {
        &self.field
    }

    pub fn order(&self) -> u32 {
        self.field.order
    }

    /// Power-basis coefficients as rationals.
    pub fn coeffs(&self) -> Vec<Rational> {
        self.num
            .iter()
            .map(|c| Rational::from((c.clone(), self.den.clone())))
            .collect()
    }

    /// Integer coordinates over the common denominator.
    pub fn numerator(&self) -> &[Integer] {
        &self.num
    }

    pub fn denominator(&self) -> &Integer {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|c| *c == 0)
    }

    /// The rational value, when the element lies in Q.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.num[1..].iter().all(|c| *c == 0) {
            Some(Rational::from((self.num[0].clone(), self.den.clone())))
        } else {
            None
        }
    }

    /// Re-expresses the element in Q(ζ_L) for a multiple L of the current order.
    pub fn lift(&self, target: &Arc<CyclotomicField>) -> Self {
        assert!(target.order % self.field.order == 0);
        if target.order == self.field.order {
            return Cyclotomic {
                field: target.clone(),
                num: self.num.clone(),
                den: self.den.clone(),
            };
        }
        let step = (target.order / self.field.order) as usize;
        let mut num = vec![Integer::new(); target.degree];
        for (j, c) in self.num.iter().enumerate() {
            if *c != 0 {
                target.fold(j * step, c, &mut num);
            }
        }
        Cyclotomic::normalized(target.clone(), num, self.den.clone())
    }

    /// Brings two elements into a common field.
    pub fn unify(a: &Cyclotomic, b: &Cyclotomic) -> (Cyclotomic, Cyclotomic) {
        if a.field.order == b.field.order {
            return (a.clone(), b.clone());
        }
        let l = lcm(a.field.order, b.field.order);
        let field = if l == a.field.order {
            a.field.clone()
        } else if l == b.field.order {
            b.field.clone()
        } else {
            CyclotomicField::new(l)
        };
        (a.lift(&field), b.lift(&field))
    }

    fn combine(&self, other: &Cyclotomic, sign: i32) -> Cyclotomic {
        if self.field.order != other.field.order {
            let (a, b) = Cyclotomic::unify(self, other);
            return a.combine(&b, sign);
        }
        let num = if self.den == other.den {
            self.num
                .iter()
                .zip(&other.num)
                .map(|(x, y)| if sign > 0 { Integer::from(x + y) } else { Integer::from(x - y) })
                .collect::<Vec<_>>()
        } else {
            self.num
                .iter()
                .zip(&other.num)
                .map(|(x, y)| {
                    let l = Integer::from(x * &other.den);
                    let r = Integer::from(y * &self.den);
                    if sign > 0 {
                        l + r
                    } else {
                        l - r
                    }
                })
                .collect()
        };
        let den = if self.den == other.den {
            self.den.clone()
        } else {
            Integer::from(&self.den * &other.den)
        };
        Cyclotomic::normalized(self.field.clone(), num, den)
    }

    pub fn add(&self, other: &Cyclotomic) -> Cyclotomic {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &Cyclotomic) -> Cyclotomic {
        self.combine(other, -1)
    }

    pub fn neg(&self) -> Cyclotomic {
        Cyclotomic {
            field: self.field.clone(),
            num: self.num.iter().map(|c| Integer::from(-c)).collect(),
            den: self.den.clone(),
        }
    }

    pub fn scale(&self, r: &Rational) -> Cyclotomic {
        let num = self.num.iter().map(|c| Integer::from(c * r.numer())).collect();
        Cyclotomic::normalized(self.field.clone(), num, Integer::from(&self.den * r.denom()))
    }

    pub fn mul(&self, other: &Cyclotomic) -> Cyclotomic {
        if self.field.order != other.field.order {
            let (a, b) = Cyclotomic::unify(self, other);
            return a.mul(&b);
        }
        let phi = self.field.degree;
        let mut prod = vec![Integer::new(); 2 * phi - 1];
        for (i, x) in self.num.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in other.num.iter().enumerate() {
                if *y == 0 {
                    continue;
                }
                prod[i + j] += Integer::from(x * y);
            }
        }
        let mut num: Vec<Integer> = prod[..phi].to_vec();
        for (k, c) in prod.iter().enumerate().skip(phi) {
            if *c != 0 {
                self.field.fold(k, c, &mut num);
            }
        }
        Cyclotomic::normalized(self.field.clone(), num, Integer::from(&self.den * &other.den))
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against Φ_n.
    pub fn inv(&self) -> Option<Cyclotomic> {
        if self.is_zero() {
            return None;
        }
        if let Some(r) = self.as_rational() {
            return Some(Cyclotomic::from_rational(&self.field, &r.recip()));
        }
        let a = RatPoly::new(self.num.iter().map(|c| Rational::from(c.clone())).collect());
        let m = RatPoly::new(self.field.modulus.iter().map(|c| Rational::from(c.clone())).collect());
        let (g, s, _) = a.ext_gcd(&m);
        // Φ_n is irreducible, so the gcd is a nonzero constant
        debug_assert_eq!(g.degree(), Some(0));
        let scale = Rational::from(self.den.clone()) / g.coeff(0).clone();
        let s = s.scale(&scale);
        Some(Cyclotomic::from_poly(&self.field, s.coeffs()))
    }

    pub fn div(&self, other: &Cyclotomic) -> Option<Cyclotomic> {
        other.inv().map(|i| self.mul(&i))
    }

    pub fn pow(&self, e: u32) -> Cyclotomic {
        let mut result = Cyclotomic::from_rational(&self.field, &Rational::from(1));
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// The Galois automorphism ζ ↦ ζ^k (k coprime to n).
    /// Trace down to Q.
    pub fn trace(&self) -> Rational {
        let mut acc = Integer::new();
        for (c, t) in self.num.iter().zip(&self.field.traces) {
            if *c != 0 && *t != 0 {
                acc += Integer::from(c * t);
            }
        }
        Rational::from((acc, self.den.clone()))
    }

    /// Tr(self · other) without forming the product. Cheap when one side is
    /// much taller than the other.
    pub fn trace_of_product(&self, other: &Cyclotomic) -> Rational {
        if self.field.order != other.field.order {
            let (a, b) = Cyclotomic::unify(self, other);
            return a.trace_of_product(&b);
        }
        let t = &self.field.traces;
        let mut acc = Integer::new();
        for (i, x) in self.num.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            let mut inner = Integer::new();
            for (j, y) in other.num.iter().enumerate() {
                if *y != 0 && t[i + j] != 0 {
                    inner += Integer::from(y * &t[i + j]);
                }
            }
            if inner != 0 {
                acc += inner * x;
            }
        }
        Rational::from((acc, Integer::from(&self.den * &other.den)))
    }

    pub fn galois(&self, k: u32) -> Cyclotomic {
        let n = self.field.order as u64;
        let mut num = vec![Integer::new(); self.field.degree];
        for (j, c) in self.num.iter().enumerate() {
            if *c != 0 {
                let e = ((j as u64) * (k as u64) % n) as usize;
                self.field.fold(e, c, &mut num);
            }
        }
        Cyclotomic::normalized(self.field.clone(), num, self.den.clone())
    }

    pub fn to_complex(&self, prec: u32) -> BigComplex {
        let n = self.field.order;
        let mut acc = BigComplex::zero(prec);
        for (j, c) in self.num.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            let angle = Float::with_val(prec, rug::float::Constant::Pi) * 2u32 * (j as u32) / n;
            let (s, co) = angle.sin_cos(Float::new(prec));
            let cf = Float::with_val(prec, c) / Float::with_val(prec, &self.den);
            acc = acc.add(&BigComplex::new(co * &cf, s * &cf));
        }
        acc
    }

    /// Bit size of the representation, used as a pivot height.
    pub fn height_bits(&self) -> u64 {
        self.num.iter().map(|c| c.significant_bits() as u64).sum::<u64>()
            + self.den.significant_bits() as u64
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = Cyclotomic::unify(self, other);
        a.den == b.den && a.num == b.num
    }
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, c) in self.coeffs().iter().enumerate() {
            if *c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match j {
                0 => write!(f, "{}", c)?,
                1 => write!(f, "({})*z", c)?,
                _ => write!(f, "({})*z^{}", c, j)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " [z = zeta_{}]", self.field.order)
    }
}

/// Tr(ζ_n^k) over Q, the Ramanujan sum c_n(k).
pub fn ramanujan_sum(n: u32, k: u32) -> i64 {
    let g = gcd_u32(k % n, n).max(1);
    let g = if k % n == 0 { n } else { g };
    let q = n / g;
    mobius(q) * (euler_phi(n) / euler_phi(q)) as i64
}

fn mobius(mut n: u32) -> i64 {
    let mut sign = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

pub fn gcd_u32(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd_u32(b, a % b)
    }
}

pub fn lcm(a: u32, b: u32) -> u32 {
    a / gcd_u32(a, b) * b
}

/// Euler's totient.
pub fn euler_phi(n: u32) -> u32 {
    (1..=n).filter(|k| gcd_u32(*k, n) == 1).count() as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn cyclotomic_polynomials_small() {
        let p = |v: Vec<i64>| v.into_iter().map(Integer::from).collect::<Vec<_>>();
        assert_eq!(cyclotomic_polynomial(1), p(vec![-1, 1]));
        assert_eq!(cyclotomic_polynomial(2), p(vec![1, 1]));
        assert_eq!(cyclotomic_polynomial(3), p(vec![1, 1, 1]));
        assert_eq!(cyclotomic_polynomial(4), p(vec![1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(6), p(vec![1, -1, 1]));
        assert_eq!(cyclotomic_polynomial(12), p(vec![1, 0, -1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(14).len() as u32 - 1, euler_phi(14));
    }

    #[test]
    fn traces_match_conjugate_sums() {
        for n in [3u32, 5, 7, 8, 12, 14] {
            let k = CyclotomicField::new(n);
            let a = Cyclotomic::from_coeffs(&k, &(0..k.degree()).map(|i| q(i as i64 * 3 - 2, 5)).collect::<Vec<_>>()).unwrap();
            let b = Cyclotomic::root_of_unity(&k, 3).add(&Cyclotomic::from_rational(&k, &q(1, 2)));
            let units: Vec<u32> = (1..n).filter(|j| gcd_u32(*j, n) == 1).collect();
            let sum = |x: &Cyclotomic| {
                units.iter().fold(Cyclotomic::zero(&k), |acc, &j| acc.add(&x.galois(j)))
            };
            assert_eq!(sum(&a).as_rational(), Some(a.trace()));
            assert_eq!(sum(&a.mul(&b)).as_rational(), Some(a.trace_of_product(&b)));
        }
    }

    #[test]
    fn roots_of_unity_multiply() {
        let k = CyclotomicField::new(7);
        let z = Cyclotomic::root_of_unity(&k, 1);
        assert_eq!(z.pow(7).as_rational(), Some(q(1, 1)));
        let mut s = Cyclotomic::zero(&k);
        for j in 0..7 {
            s = s.add(&Cyclotomic::root_of_unity(&k, j));
        }
        assert!(s.is_zero());
    }

    #[test]
    fn inverse_round_trip() {
        let k = CyclotomicField::new(14);
        let a = Cyclotomic::from_poly(&k, &[q(3, 2), q(-1, 1), Rational::new(), q(5, 7)]);
        let inv = a.inv().unwrap();
        assert_eq!(a.mul(&inv).as_rational(), Some(q(1, 1)));
    }

    #[test]
    fn lifting_between_fields() {
        let k3 = CyclotomicField::new(3);
        let k4 = CyclotomicField::new(4);
        let w = Cyclotomic::root_of_unity(&k3, 1);
        let i = Cyclotomic::root_of_unity(&k4, 1);
        let prod = w.mul(&i);
        assert_eq!(prod.order(), 12);
        assert_eq!(prod.pow(12).as_rational(), Some(q(1, 1)));
        assert_ne!(prod.pow(6).as_rational(), Some(q(1, 1)));
    }

    #[test]
    fn galois_conjugate_of_sqrt_minus_three() {
        // ω - ω² = √-3 and ζ -> ζ² flips its sign
        let k = CyclotomicField::new(3);
        let s = Cyclotomic::root_of_unity(&k, 1).sub(&Cyclotomic::root_of_unity(&k, 2));
        assert_eq!(s.galois(2), s.neg());
        assert_eq!(s.mul(&s).as_rational(), Some(q(-3, 1)));
    }

    #[test]
    fn denominators_stay_reduced() {
        let k = CyclotomicField::new(5);
        let a = Cyclotomic::from_poly(&k, &[q(1, 6), q(1, 3)]);
        let b = a.add(&a).add(&a);
        assert_eq!(b.coeffs()[0], q(1, 2));
        assert_eq!(b.coeffs()[1], q(1, 1));
        assert_eq!(b.scale(&q(2, 1)).den, Integer::from(1));
    }

    #[test]
    fn numeric_embedding() {
        let k = CyclotomicField::new(4);
        let i = Cyclotomic::root_of_unity(&k, 1).to_complex(128);
        assert!(i.re.clone().abs() < 1e-30);
        assert!((i.im.clone() - 1u32).abs() < 1e-30);
    }
}
