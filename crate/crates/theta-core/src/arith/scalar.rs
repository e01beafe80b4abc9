//! The scalar interface shared by all coefficient rings.
//!
//! Everything downstream (series, sparse matrices, operator series) is generic
//! over `Scalar`. The trait models a commutative ring with exact division by
//! nonzero integers; `try_inv` exposes the partial multiplicative inverse
//! (total on the fraction fields, constants-only on polynomial rings).

use std::fmt;

use super::rat::Rat;

pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_int(n: i64) -> Self;
    /// Embedding of the prime field; every coefficient ring here contains it.
    fn from_rat(r: &Rat) -> Self;
    /// Exact division by a nonzero integer. Panics on zero divisor.
    fn div_int(&self, n: i64) -> Self;
    fn try_inv(&self) -> Option<Self>;
    fn to_json(&self) -> serde_json::Value;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }
}

/// Binomial coefficient `C(top, k)` with arbitrary integer top, as in the
/// Taylor expansion of `(z+c)^top`.
pub fn binom<S: Scalar>(top: i64, k: u32) -> S {
    let mut r = S::one();
    for t in 1..=k as i64 {
        r = r.mul(&S::from_int(top - t + 1)).div_int(t);
    }
    r
}

pub fn int_pow<S: Scalar>(base: &S, k: u32) -> S {
    let mut r = S::one();
    for _ in 0..k {
        r = r.mul(base);
    }
    r
}

/// `(-1)^k`.
pub fn sign<S: Scalar>(k: i64) -> S {
    if k.rem_euclid(2) == 0 {
        S::one()
    } else {
        S::one().neg()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::Rat;

    #[test]
    fn binom_negative_top() {
        // C(-2, 3) = (-2)(-3)(-4)/6 = -4
        assert_eq!(binom::<Rat>(-2, 3), Rat::int(-4));
        assert_eq!(binom::<Rat>(5, 2), Rat::int(10));
        assert_eq!(binom::<Rat>(3, 0), Rat::int(1));
        assert_eq!(binom::<Rat>(3, 5), Rat::int(0));
    }
}
