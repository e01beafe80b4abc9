//! Rational functions in the quantum parameter q, exact form.
//!
//! A value is num/den with num an integer Laurent polynomial in q and den an
//! ordinary integer polynomial. Canonical form: den has nonzero constant term
//! and positive leading coefficient, gcd(num, den) = 1 in Q[q] after shifting
//! the numerator's q-power unit out, and num and den share no integer content.
//! Structural equality is then semantic equality.

use std::collections::BTreeMap;
use std::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, Zero};

use super::rat::Rat;
use super::scalar::Scalar;

/// Dense integer polynomial, no trailing zeros; empty means 0.
type ZPoly = Vec<BigInt>;

fn zp_trim(mut p: ZPoly) -> ZPoly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn zp_content(p: &ZPoly) -> BigInt {
    let mut g = BigInt::zero();
    for c in p {
        g = g.gcd(c);
    }
    g
}

/// Exact polynomial division; panics if not exact.
fn zp_div_exact(a: &ZPoly, b: &ZPoly) -> ZPoly {
    assert!(!b.is_empty(), "division by zero polynomial");
    if a.is_empty() {
        return vec![];
    }
    let mut rem: Vec<BigRational> = a.iter().map(|c| BigRational::from_integer(c.clone())).collect();
    let bq: Vec<BigRational> = b.iter().map(|c| BigRational::from_integer(c.clone())).collect();
    let mut quot = vec![BigRational::zero(); a.len().saturating_sub(b.len()) + 1];
    let db = bq.len() - 1;
    let lead = bq[db].clone();
    let mut dr = rem.len() as i64 - 1;
    while dr >= db as i64 {
        let c = &rem[dr as usize] / &lead;
        let shift = dr as usize - db;
        quot[shift] = c.clone();
        for j in 0..=db {
            let t = &c * &bq[j];
            rem[shift + j] = &rem[shift + j] - t;
        }
        while dr >= 0 && rem[dr as usize].is_zero() {
            dr -= 1;
        }
    }
    assert!(rem.iter().all(|c| c.is_zero()), "inexact polynomial division");
    let out: ZPoly = quot
        .into_iter()
        .map(|c| {
            assert!(c.is_integer(), "inexact polynomial division (non-integer quotient)");
            c.numer().clone()
        })
        .collect();
    zp_trim(out)
}

/// Primitive gcd in Z[q], positive leading coefficient. gcd(0, b) = |b| primitive.
fn zp_gcd(a: &ZPoly, b: &ZPoly) -> ZPoly {
    if a.is_empty() {
        return zp_primitive(b.clone());
    }
    if b.is_empty() {
        return zp_primitive(a.clone());
    }
    let mut x: Vec<BigRational> = a.iter().map(|c| BigRational::from_integer(c.clone())).collect();
    let mut y: Vec<BigRational> = b.iter().map(|c| BigRational::from_integer(c.clone())).collect();
    loop {
        if y.iter().all(|c| c.is_zero()) {
            break;
        }
        // x mod y
        let dy = y.iter().rposition(|c| !c.is_zero()).unwrap();
        let lead = y[dy].clone();
        let mut dx = x.iter().rposition(|c| !c.is_zero());
        while let Some(d) = dx {
            if d < dy {
                break;
            }
            let c = &x[d] / &lead;
            let shift = d - dy;
            for j in 0..=dy {
                let t = &c * &y[j];
                x[shift + j] = &x[shift + j] - t;
            }
            dx = x.iter().rposition(|c| !c.is_zero());
        }
        std::mem::swap(&mut x, &mut y);
    }
    // x is the gcd over Q; clear denominators and primitivize.
    let mut den_lcm = BigInt::one();
    for c in &x {
        if !c.is_zero() {
            den_lcm = den_lcm.lcm(c.denom());
        }
    }
    let ints: ZPoly = zp_trim(
        x.iter()
            .map(|c| (c * BigRational::from_integer(den_lcm.clone())).numer().clone())
            .collect(),
    );
    zp_primitive(ints)
}

fn zp_primitive(p: ZPoly) -> ZPoly {
    if p.is_empty() {
        return p;
    }
    let mut c = zp_content(&p);
    if p.last().unwrap().is_negative() {
        c = -c;
    }
    p.into_iter().map(|x| x / &c).collect()
}

/// Integer Laurent polynomial in q.
pub type Laurent = BTreeMap<i64, BigInt>;

fn lp_clean(mut m: Laurent) -> Laurent {
    m.retain(|_, v| !v.is_zero());
    m
}

fn lp_mul(a: &Laurent, b: &Laurent) -> Laurent {
    let mut out: Laurent = BTreeMap::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e = out.entry(ea + eb).or_insert_with(BigInt::zero);
            *e += ca * cb;
        }
    }
    lp_clean(out)
}

fn lp_add(a: &Laurent, b: &Laurent) -> Laurent {
    let mut out = a.clone();
    for (e, c) in b {
        let v = out.entry(*e).or_insert_with(BigInt::zero);
        *v += c;
    }
    lp_clean(out)
}

fn lp_from_zpoly(p: &ZPoly, shift: i64) -> Laurent {
    let mut out = BTreeMap::new();
    for (i, c) in p.iter().enumerate() {
        if !c.is_zero() {
            out.insert(i as i64 + shift, c.clone());
        }
    }
    out
}

fn lp_to_zpoly(m: &Laurent) -> (ZPoly, i64) {
    if m.is_empty() {
        return (vec![], 0);
    }
    let v = *m.keys().next().unwrap();
    let top = *m.keys().next_back().unwrap();
    let mut p = vec![BigInt::zero(); (top - v + 1) as usize];
    for (e, c) in m {
        p[(e - v) as usize] = c.clone();
    }
    (p, v)
}

#[derive(Clone, PartialEq, Eq)]
pub struct QRat {
    num: Laurent,
    den: ZPoly,
}

impl QRat {
    fn make(num: Laurent, den: Laurent) -> Self {
        assert!(!den.is_empty(), "zero denominator");
        if num.is_empty() {
            return QRat { num: BTreeMap::new(), den: vec![BigInt::one()] };
        }
        let (dpoly, dv) = lp_to_zpoly(&den);
        let (npoly, nv_raw) = lp_to_zpoly(&num);
        // num/(q^dv * dpoly): the q-power unit moves into the numerator.
        let nv = nv_raw - dv;
        // q-power units cancel between numerator and denominator; the
        // denominator keeps nonzero constant term, the numerator keeps q^nv'.
        let g = zp_gcd(&npoly, &dpoly);
        let mut n = zp_div_exact(&npoly, &g);
        let mut d = zp_div_exact(&dpoly, &g);
        let dc = zp_content(&d);
        let nc = zp_content(&n);
        let c = dc.gcd(&nc);
        let mut scale = c;
        if d.last().unwrap().is_negative() {
            scale = -scale;
        }
        if !scale.is_one() {
            n = n.into_iter().map(|x| x / &scale).collect();
            d = d.into_iter().map(|x| x / &scale).collect();
        }
        QRat { num: lp_from_zpoly(&n, nv), den: d }
    }

    pub fn q_pow(e: i64) -> Self {
        let mut num = BTreeMap::new();
        num.insert(e, BigInt::one());
        QRat { num, den: vec![BigInt::one()] }
    }

    pub fn q() -> Self {
        Self::q_pow(1)
    }

    /// Laurent polynomial Σ cᵢ q^{eᵢ} from (exponent, coefficient) pairs.
    pub fn laurent(terms: &[(i64, i64)]) -> Self {
        let mut num: Laurent = BTreeMap::new();
        for (e, c) in terms {
            let v = num.entry(*e).or_insert_with(BigInt::zero);
            *v += BigInt::from(*c);
        }
        QRat { num: lp_clean(num), den: vec![BigInt::one()] }
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.len() == 1 && self.den[0].is_one()
    }

    pub fn num_terms(&self) -> &Laurent {
        &self.num
    }

    pub fn den_poly(&self) -> &ZPoly {
        &self.den
    }

    /// q ↦ q⁻¹ (the bar involution on coefficients).
    pub fn bar(&self) -> Self {
        self.subst_pow(-1)
    }

    /// q ↦ q^s; s must be nonzero so the map stays injective.
    pub fn subst_pow(&self, s: i64) -> Self {
        assert!(s != 0, "substitution power must be nonzero");
        let num: Laurent = self.num.iter().map(|(e, c)| (e * s, c.clone())).collect();
        let den: Laurent = self
            .den
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i as i64 * s, c.clone()))
            .collect();
        QRat::make(lp_clean(num), lp_clean(den))
    }

    pub fn pow_i(&self, e: i64) -> Self {
        if e < 0 {
            return self.try_inv().expect("zero base with negative exponent").pow_i(-e);
        }
        let mut r = QRat::one();
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }
}

fn fmt_laurent(m: &Laurent, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if m.is_empty() {
        return write!(f, "0");
    }
    let mut first = true;
    for (e, c) in m.iter().rev() {
        let neg = c.is_negative();
        let mag = c.abs();
        if first {
            if neg {
                write!(f, "-")?;
            }
            first = false;
        } else if neg {
            write!(f, " - ")?;
        } else {
            write!(f, " + ")?;
        }
        let unit_coeff = mag.is_one();
        match (*e, unit_coeff) {
            (0, _) => write!(f, "{}", mag)?,
            (1, true) => write!(f, "q")?,
            (1, false) => write!(f, "{}*q", mag)?,
            (_, true) => write!(f, "q^{}", e)?,
            (_, false) => write!(f, "{}*q^{}", mag, e)?,
        }
    }
    Ok(())
}

impl fmt::Display for QRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            return fmt_laurent(&self.num, f);
        }
        write!(f, "(")?;
        fmt_laurent(&self.num, f)?;
        write!(f, ")/(")?;
        fmt_laurent(&lp_from_zpoly(&self.den, 0), f)?;
        write!(f, ")")
    }
}

impl fmt::Debug for QRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl Scalar for QRat {
    fn zero() -> Self {
        QRat { num: BTreeMap::new(), den: vec![BigInt::one()] }
    }

    fn one() -> Self {
        QRat::q_pow(0)
    }

    fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    fn add(&self, other: &Self) -> Self {
        let da = lp_from_zpoly(&self.den, 0);
        let db = lp_from_zpoly(&other.den, 0);
        let num = lp_add(&lp_mul(&self.num, &db), &lp_mul(&other.num, &da));
        QRat::make(num, lp_mul(&da, &db))
    }

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    fn mul(&self, other: &Self) -> Self {
        let da = lp_from_zpoly(&self.den, 0);
        let db = lp_from_zpoly(&other.den, 0);
        QRat::make(lp_mul(&self.num, &other.num), lp_mul(&da, &db))
    }

    fn neg(&self) -> Self {
        QRat {
            num: self.num.iter().map(|(e, c)| (*e, -c.clone())).collect(),
            den: self.den.clone(),
        }
    }

    fn from_int(n: i64) -> Self {
        if n == 0 {
            return Self::zero();
        }
        let mut num = BTreeMap::new();
        num.insert(0, BigInt::from(n));
        QRat { num, den: vec![BigInt::one()] }
    }

    fn from_rat(r: &Rat) -> Self {
        let mut num = BTreeMap::new();
        num.insert(0, r.numer().clone());
        QRat::make(num, [(0, r.denom().clone())].into_iter().collect())
    }

    fn div_int(&self, n: i64) -> Self {
        assert!(n != 0, "division by zero");
        let mut den: Laurent = BTreeMap::new();
        den.insert(0, BigInt::from(n));
        QRat::make(self.num.clone(), lp_mul(&lp_from_zpoly(&self.den, 0), &den))
    }

    fn try_inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(QRat::make(lp_from_zpoly(&self.den, 0), self.num.clone()))
    }

    fn to_json(&self) -> serde_json::Value {
        let num: Vec<serde_json::Value> = self
            .num
            .iter()
            .map(|(e, c)| serde_json::json!([e, c.to_string()]))
            .collect();
        let den: Vec<serde_json::Value> = self
            .den
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| serde_json::json!([e, c.to_string()]))
            .collect();
        serde_json::json!({ "num": num, "den": den })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> QRat {
        QRat::q()
    }

    #[test]
    fn unit_folding() {
        // 1/q has denominator 1 in canonical form (unit folded into numerator).
        let inv = q().try_inv().unwrap();
        assert_eq!(inv, QRat::q_pow(-1));
        assert!(inv.is_polynomial());
    }

    #[test]
    fn gcd_reduction() {
        // (q^4 - 1)/(q^2 - 1) = q^2 + 1
        let n = QRat::laurent(&[(4, 1), (0, -1)]);
        let d = QRat::laurent(&[(2, 1), (0, -1)]);
        let r = n.mul(&d.try_inv().unwrap());
        assert_eq!(r, QRat::laurent(&[(2, 1), (0, 1)]));
    }

    #[test]
    fn content_reduction() {
        // (2q + 2)/2 = q + 1, (2q)/(4q^2+2) canonicalizes to q/(2q^2+1)
        let two_q_two = QRat::laurent(&[(1, 2), (0, 2)]);
        assert_eq!(two_q_two.div_int(2), QRat::laurent(&[(1, 1), (0, 1)]));
        let r = QRat::laurent(&[(1, 2)])
            .mul(&QRat::laurent(&[(2, 4), (0, 2)]).try_inv().unwrap());
        let expect = QRat::laurent(&[(1, 1)])
            .mul(&QRat::laurent(&[(2, 2), (0, 1)]).try_inv().unwrap());
        assert_eq!(r, expect);
    }

    #[test]
    fn sign_normalization() {
        // 1/(−q+1): denominator leading coefficient must become positive.
        let r = QRat::laurent(&[(1, -1), (0, 1)]).try_inv().unwrap();
        assert_eq!(r.den_poly().last().unwrap(), &BigInt::from(1));
        // r = -1/(q-1); r*(q-1) = -1
        assert_eq!(r.mul(&QRat::laurent(&[(1, 1), (0, -1)])), QRat::from_int(-1));
    }

    #[test]
    fn field_identities() {
        let a = QRat::laurent(&[(3, 1), (-2, 5)]);
        let b = QRat::laurent(&[(1, 1), (0, -1)]);
        let ab = a.mul(&b);
        assert_eq!(ab.mul(&b.try_inv().unwrap()), a);
        assert_eq!(a.sub(&a), QRat::zero());
        assert_eq!(a.add(&b).sub(&b), a);
    }

    #[test]
    fn bar_involution() {
        let a = QRat::laurent(&[(2, 1), (0, -3)]);
        assert_eq!(a.bar().bar(), a);
        // bar(q^2 - 3) = q^-2 - 3
        assert_eq!(a.bar(), QRat::laurent(&[(-2, 1), (0, -3)]));
    }

    #[test]
    fn denominator_with_pole_at_zero() {
        // 1/(q - q^-1) = q/(q^2 - 1)
        let d = QRat::laurent(&[(1, 1), (-1, -1)]);
        let r = d.try_inv().unwrap();
        assert_eq!(r.num_terms(), QRat::laurent(&[(1, 1)]).num_terms());
        assert_eq!(
            r.den_poly(),
            &vec![BigInt::from(-1), BigInt::from(0), BigInt::from(1)]
        );
        assert_eq!(r.mul(&d), QRat::one());
    }
}
