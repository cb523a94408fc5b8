//! Exact complex rationals, the coefficient field of every symbolic object.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

/// A complex number with arbitrary-precision rational real and imaginary
/// parts. Closed under +, -, *, and / by a nonzero divisor; equality is
/// exact.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl CRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        CRational { re, im }
    }

    pub fn zero() -> Self {
        CRational::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        CRational::new(BigRational::one(), BigRational::zero())
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        CRational::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        CRational::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    /// p/q as a real rational. Panics if `q == 0`.
    pub fn from_ratio(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        CRational::new(
            BigRational::new(BigInt::from(p), BigInt::from(q)),
            BigRational::zero(),
        )
    }

    pub fn from_real(re: BigRational) -> Self {
        CRational::new(re, BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Self {
        CRational::new(self.re.clone(), -self.im.clone())
    }

    /// |z|^2 = z * conj(z), a real rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(CRational::new(&self.re / &n, -&self.im / &n))
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = CRational::one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        CRational::new(&self.re * r, &self.im * r)
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl Default for CRational {
    fn default() -> Self {
        CRational::zero()
    }
}

/// n! as a BigInt; used by the pseudounitary normalization constants.
pub fn factorial(n: i64) -> BigInt {
    assert!(n >= 0, "factorial of a negative integer");
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    acc
}

/// The rational n/2, for half-integer bookkeeping with doubled indices.
pub fn half(n: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(2))
}

/// An exact rational from a plain integer.
pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Add for &CRational {
    type Output = CRational;
    fn add(self, rhs: &CRational) -> CRational {
        CRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &CRational {
    type Output = CRational;
    fn sub(self, rhs: &CRational) -> CRational {
        CRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &CRational {
    type Output = CRational;
    fn mul(self, rhs: &CRational) -> CRational {
        CRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Div for &CRational {
    type Output = CRational;
    fn div(self, rhs: &CRational) -> CRational {
        let inv = rhs.inv().expect("division by zero");
        self * &inv
    }
}

impl Neg for &CRational {
    type Output = CRational;
    fn neg(self) -> CRational {
        CRational::new(-self.re.clone(), -self.im.clone())
    }
}

impl Neg for CRational {
    type Output = CRational;
    fn neg(self) -> CRational {
        CRational::new(-self.re, -self.im)
    }
}

impl AddAssign<&CRational> for CRational {
    fn add_assign(&mut self, rhs: &CRational) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for CRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", fmt_rational(&self.re));
        }
        if self.re.is_zero() {
            return write!(f, "{}*i", fmt_rational(&self.im));
        }
        let sign = if self.im.is_negative() { "-" } else { "+" };
        write!(
            f,
            "{}{}{}*i",
            fmt_rational(&self.re),
            sign,
            fmt_rational(&self.im.abs())
        )
    }
}

impl fmt::Debug for CRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_ops() {
        let a = CRational::from_ratio(3, 2);
        let b = &CRational::i() * &CRational::from_int(2);
        let prod = &a * &b;
        assert_eq!(prod, CRational::new(rat(0), half(6)));
        let quot = &prod / &b;
        assert_eq!(quot, a);
        assert!(CRational::zero().inv().is_none());
    }

    #[test]
    fn conjugation() {
        let z = CRational::new(half(1), half(3));
        let n = &z * &z.conj();
        assert!(n.is_real());
        assert_eq!(n.re, z.norm_sqr());
    }

    #[test]
    fn display_is_canonical() {
        assert_eq!(CRational::from_ratio(-3, 6).to_string(), "-1/2");
        assert_eq!(CRational::i().to_string(), "1*i");
        assert_eq!(
            CRational::new(rat(1), -half(1)).to_string(),
            "1-1/2*i"
        );
    }
}
