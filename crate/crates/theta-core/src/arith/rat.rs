//! Arbitrary-precision rationals.
//!
//! Thin wrapper over `num::BigRational` fixing the canonical form (reduced,
//! positive denominator, handled by `num`) and the serialization "p/q".

use std::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

use super::scalar::Scalar;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(BigRational);

impl Rat {
    pub fn int(n: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    /// `n/d`; panics if `d == 0`.
    pub fn frac(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        Rat(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_big(n: BigInt, d: BigInt) -> Self {
        assert!(!d.is_zero(), "zero denominator");
        Rat(BigRational::new(n, d))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn to_i64(&self) -> Option<i64> {
        if !self.is_integer() {
            return None;
        }
        i64::try_from(self.0.numer().clone()).ok()
    }

    pub fn abs(&self) -> Self {
        Rat(self.0.abs())
    }

    pub fn pow_i(&self, e: i64) -> Self {
        if e >= 0 {
            Rat(num::pow::pow(self.0.clone(), e as usize))
        } else {
            let inv = self.try_inv().expect("zero base with negative exponent");
            inv.pow_i(-e)
        }
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl Scalar for Rat {
    fn zero() -> Self {
        Rat(BigRational::zero())
    }

    fn one() -> Self {
        Rat(BigRational::one())
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn add(&self, other: &Self) -> Self {
        Rat(&self.0 + &other.0)
    }

    fn sub(&self, other: &Self) -> Self {
        Rat(&self.0 - &other.0)
    }

    fn mul(&self, other: &Self) -> Self {
        Rat(&self.0 * &other.0)
    }

    fn neg(&self) -> Self {
        Rat(-self.0.clone())
    }

    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }

    fn from_int(n: i64) -> Self {
        Rat::int(n)
    }

    fn div_int(&self, n: i64) -> Self {
        assert!(n != 0, "division by zero");
        Rat(&self.0 / BigRational::from_integer(BigInt::from(n)))
    }

    fn try_inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Rat(self.0.recip()))
        }
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_reduction() {
        assert_eq!(Rat::frac(2, 4), Rat::frac(1, 2));
        assert_eq!(Rat::frac(1, -2), Rat::frac(-1, 2));
        assert_eq!(Rat::frac(-4, -2), Rat::int(2));
    }

    #[test]
    fn display_form() {
        assert_eq!(Rat::frac(3, 4).to_string(), "3/4");
        assert_eq!(Rat::frac(-3, 4).to_string(), "-3/4");
        assert_eq!(Rat::int(-7).to_string(), "-7");
    }

    #[test]
    fn field_ops() {
        let a = Rat::frac(2, 3);
        let b = Rat::frac(-1, 6);
        assert_eq!(a.add(&b), Rat::frac(1, 2));
        assert_eq!(a.mul(&b), Rat::frac(-1, 9));
        assert_eq!(a.try_inv().unwrap(), Rat::frac(3, 2));
        assert_eq!(Rat::int(0).try_inv(), None);
        assert_eq!(a.div_int(2), Rat::frac(1, 3));
        assert_eq!(a.pow_i(-2), Rat::frac(9, 4));
    }
}
