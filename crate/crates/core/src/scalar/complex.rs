//! Complex numbers over MPFR floats.

use std::fmt;

use rug::{Float, Rational};

/// Smallest mantissa we accept for numeric work.
pub const MIN_PRECISION: u32 = 64;
pub const DEFAULT_PRECISION: u32 = 256;

#[derive(Clone, Debug, PartialEq)]
pub struct BigComplex {
    pub re: Float,
    pub im: Float,
}

impl BigComplex {
    pub fn new(re: Float, im: Float) -> Self {
        BigComplex { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        BigComplex {
            re: Float::new(prec),
            im: Float::new(prec),
        }
    }

    pub fn from_rational(r: &Rational, prec: u32) -> Self {
        BigComplex {
            re: Float::with_val(prec, r),
            im: Float::new(prec),
        }
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        BigComplex {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, o: &BigComplex) -> BigComplex {
        let p = self.prec().max(o.prec());
        BigComplex {
            re: Float::with_val(p, &self.re + &o.re),
            im: Float::with_val(p, &self.im + &o.im),
        }
    }

    pub fn sub(&self, o: &BigComplex) -> BigComplex {
        let p = self.prec().max(o.prec());
        BigComplex {
            re: Float::with_val(p, &self.re - &o.re),
            im: Float::with_val(p, &self.im - &o.im),
        }
    }

    pub fn neg(&self) -> BigComplex {
        BigComplex {
            re: Float::with_val(self.prec(), -&self.re),
            im: Float::with_val(self.prec(), -&self.im),
        }
    }

    pub fn mul(&self, o: &BigComplex) -> BigComplex {
        let p = self.prec().max(o.prec());
        let re = Float::with_val(p, &self.re * &o.re) - Float::with_val(p, &self.im * &o.im);
        let im = Float::with_val(p, &self.re * &o.im) + Float::with_val(p, &self.im * &o.re);
        BigComplex { re, im }
    }

    pub fn scale(&self, r: &Float) -> BigComplex {
        let p = self.prec();
        BigComplex {
            re: Float::with_val(p, &self.re * r),
            im: Float::with_val(p, &self.im * r),
        }
    }

    pub fn norm_sqr(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.square_ref()) + Float::with_val(p, self.im.square_ref())
    }

    pub fn abs(&self) -> Float {
        self.norm_sqr().sqrt()
    }

    pub fn conj(&self) -> BigComplex {
        BigComplex {
            re: self.re.clone(),
            im: Float::with_val(self.prec(), -&self.im),
        }
    }

    pub fn inv(&self) -> Option<BigComplex> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        let c = self.conj();
        Some(BigComplex {
            re: c.re / &n,
            im: c.im / &n,
        })
    }

    pub fn div(&self, o: &BigComplex) -> Option<BigComplex> {
        o.inv().map(|i| self.mul(&i))
    }

    pub fn pow(&self, e: u32) -> BigComplex {
        let mut result = BigComplex::from_f64(1.0, 0.0, self.prec());
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

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({} + {}i)",
            self.re.to_string_radix(10, Some(30)),
            self.im.to_string_radix(10, Some(30))
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_operations() {
        let a = BigComplex::from_f64(1.0, 2.0, 256);
        let b = BigComplex::from_f64(-3.0, 0.5, 256);
        let q = a.mul(&b).div(&b).unwrap();
        assert!(q.sub(&a).abs() < 1e-70);
        assert_eq!(a.pow(2), a.mul(&a));
        assert!(BigComplex::zero(64).inv().is_none());
    }
}
