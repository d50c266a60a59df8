//! The coefficient universe: rationals, cyclotomic numbers and big complex floats.
//!
//! Mixed arithmetic promotes upward (rational, then cyclotomic, then complex).
//! Cyclotomic results that happen to be rational are demoted back so that
//! equality and printing stay canonical.

pub mod complex;
pub mod cyclotomic;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

pub use complex::{BigComplex, DEFAULT_PRECISION, MIN_PRECISION};
pub use cyclotomic::{euler_phi, Cyclotomic, CyclotomicField};
pub use rug::{Integer, Rational};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("cannot parse rational {0:?}")]
    BadRational(String),
    #[error("division by zero")]
    DivisionByZero,
}

/// Which part of the coefficient tower a value lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Exactness {
    Rational,
    Cyclotomic,
    Numeric,
}

impl Exactness {
    pub fn as_str(&self) -> &'static str {
        match self {
            Exactness::Rational => "rational",
            Exactness::Cyclotomic => "cyclotomic",
            Exactness::Numeric => "numeric",
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Exactness::Numeric)
    }
}

impl fmt::Display for Exactness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug)]
pub enum Scalar {
    Rational(Rational),
    Cyclotomic(Cyclotomic),
    Complex(BigComplex),
}

impl Scalar {
    pub fn zero() -> Scalar {
        Scalar::Rational(Rational::new())
    }

    pub fn one() -> Scalar {
        Scalar::Rational(Rational::from(1))
    }

    pub fn from_i64(v: i64) -> Scalar {
        Scalar::Rational(Rational::from(v))
    }

    pub fn from_frac(n: i64, d: i64) -> Scalar {
        Scalar::Rational(Rational::from((n, d)))
    }

    pub fn exactness(&self) -> Exactness {
        match self {
            Scalar::Rational(_) => Exactness::Rational,
            Scalar::Cyclotomic(_) => Exactness::Cyclotomic,
            Scalar::Complex(_) => Exactness::Numeric,
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Scalar::Complex(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => *r == 0,
            Scalar::Cyclotomic(c) => c.is_zero(),
            Scalar::Complex(z) => z.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Scalar::Rational(r) if *r == 1)
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Rational(r) => Some(r),
            _ => None,
        }
    }

    pub fn to_rational(&self) -> Option<Rational> {
        match self {
            Scalar::Rational(r) => Some(r.clone()),
            Scalar::Cyclotomic(c) => c.as_rational(),
            Scalar::Complex(_) => None,
        }
    }

    pub fn to_complex(&self, prec: u32) -> BigComplex {
        match self {
            Scalar::Rational(r) => BigComplex::from_rational(r, prec),
            Scalar::Cyclotomic(c) => c.to_complex(prec),
            Scalar::Complex(z) => z.clone(),
        }
    }

    /// Magnitude as an f64, for diagnostics and residuals.
    pub fn abs_f64(&self) -> f64 {
        match self {
            Scalar::Rational(r) => r.to_f64().abs(),
            other => other.to_complex(DEFAULT_PRECISION).abs().to_f64(),
        }
    }

    /// Bit size used to break pivot ties.
    pub fn height_bits(&self) -> u64 {
        match self {
            Scalar::Rational(r) => {
                (r.numer().significant_bits() + r.denom().significant_bits()) as u64
            }
            Scalar::Cyclotomic(c) => c.height_bits(),
            Scalar::Complex(z) => z.prec() as u64,
        }
    }

    fn demote(c: Cyclotomic) -> Scalar {
        match c.as_rational() {
            Some(r) => Scalar::Rational(r),
            None => Scalar::Cyclotomic(c),
        }
    }

    fn complex_prec(a: &Scalar, b: &Scalar) -> u32 {
        let pa = match a {
            Scalar::Complex(z) => z.prec(),
            _ => 0,
        };
        let pb = match b {
            Scalar::Complex(z) => z.prec(),
            _ => 0,
        };
        pa.max(pb)
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(Rational::from(a + b)),
            (Scalar::Cyclotomic(a), Scalar::Cyclotomic(b)) => Scalar::demote(a.add(b)),
            (Scalar::Cyclotomic(a), Scalar::Rational(b))
            | (Scalar::Rational(b), Scalar::Cyclotomic(a)) => {
                Scalar::demote(a.add(&Cyclotomic::from_rational(a.field(), b)))
            }
            _ => {
                let p = Scalar::complex_prec(self, other);
                Scalar::Complex(self.to_complex(p).add(&other.to_complex(p)))
            }
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(Rational::from(-a)),
            Scalar::Cyclotomic(a) => Scalar::Cyclotomic(a.neg()),
            Scalar::Complex(z) => Scalar::Complex(z.neg()),
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(Rational::from(a * b)),
            (Scalar::Cyclotomic(a), Scalar::Cyclotomic(b)) => Scalar::demote(a.mul(b)),
            (Scalar::Cyclotomic(a), Scalar::Rational(b))
            | (Scalar::Rational(b), Scalar::Cyclotomic(a)) => Scalar::demote(a.scale(b)),
            _ => {
                let p = Scalar::complex_prec(self, other);
                Scalar::Complex(self.to_complex(p).mul(&other.to_complex(p)))
            }
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        match self {
            Scalar::Rational(a) => Some(Scalar::Rational(Rational::from(a.recip_ref()))),
            Scalar::Cyclotomic(a) => a.inv().map(Scalar::demote),
            Scalar::Complex(z) => z.inv().map(Scalar::Complex),
        }
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        other
            .inv()
            .map(|i| self.mul(&i))
            .ok_or(ScalarError::DivisionByZero)
    }

    pub fn pow(&self, e: u32) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(Rational::from(rug::ops::Pow::pow(a, e as i32))),
            Scalar::Cyclotomic(a) => Scalar::demote(a.pow(e)),
            Scalar::Complex(z) => Scalar::Complex(z.pow(e)),
        }
    }

    pub fn scale_rational(&self, r: &Rational) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(Rational::from(a * r)),
            Scalar::Cyclotomic(a) => Scalar::demote(a.scale(r)),
            Scalar::Complex(z) => {
                let f = rug::Float::with_val(z.prec(), r);
                Scalar::Complex(z.scale(&f))
            }
        }
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::Rational(r)
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::from_i64(v)
    }
}

impl From<Cyclotomic> for Scalar {
    fn from(c: Cyclotomic) -> Self {
        Scalar::demote(c)
    }
}

impl From<BigComplex> for Scalar {
    fn from(z: BigComplex) -> Self {
        Scalar::Complex(z)
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => a == b,
            (Scalar::Complex(_), _) | (_, Scalar::Complex(_)) => {
                let p = Scalar::complex_prec(self, other);
                self.to_complex(p) == other.to_complex(p)
            }
            _ => self.sub(other).is_zero(),
        }
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &'a Scalar) -> Scalar {
        Scalar::add(self, rhs)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &'a Scalar) -> Scalar {
        Scalar::sub(self, rhs)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &'a Scalar) -> Scalar {
        Scalar::mul(self, rhs)
    }
}

impl<'a> Neg for &'a Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(self)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => write!(f, "{}", r),
            Scalar::Cyclotomic(c) => write!(f, "{}", c),
            Scalar::Complex(z) => write!(f, "{}", z),
        }
    }
}

impl FromStr for Scalar {
    type Err = ScalarError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_rational(s).map(Scalar::Rational)
    }
}

/// Parses `p`, `p/q` or a terminating decimal such as `-1.25`.
pub fn parse_rational(s: &str) -> Result<Rational, ScalarError> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || ScalarError::BadRational(s.to_string());
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((whole, frac)) = t.split_once('.') {
        if t.contains('/') || frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = whole.starts_with('-');
        let w = Integer::from_str(if whole.is_empty() || whole == "-" || whole == "+" {
            "0"
        } else {
            whole
        })
        .map_err(|_| bad())?;
        let fnum = Integer::from_str(frac).map_err(|_| bad())?;
        let scale = Integer::from(Integer::u_pow_u(10, frac.len() as u32));
        let mut r = Rational::from(w.abs()) + Rational::from((fnum, scale));
        if neg {
            r = -r;
        }
        return Ok(r);
    }
    let r = Rational::from_str(&t).map_err(|_| bad())?;
    if *r.denom() == 0 {
        return Err(bad());
    }
    Ok(r)
}

/// `p/q` always, including `0/1` and `5/1`.
pub fn rational_to_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn binomial(n: u32, k: u32) -> Integer {
    if k > n {
        return Integer::new();
    }
    Integer::from(Integer::binomial_u(n, k))
}

pub fn factorial(n: u32) -> Integer {
    Integer::from(Integer::factorial(n))
}
