//! Sparse polynomials in the formal parameters a, b, w, z over a scalar ring.
//!
//! The variables are fixed: spectral parameters a, b and the operator-series
//! arguments w, z. Exponents are nonnegative; inverting is possible only for
//! constants, which is all the series layer ever asks of a polynomial ring.

use std::collections::BTreeMap;
use std::fmt;

use super::scalar::Scalar;

pub const NVARS: usize = 4;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Var {
    A = 0,
    B = 1,
    W = 2,
    Z = 3,
}

impl Var {
    pub fn name(self) -> &'static str {
        ["a", "b", "w", "z"][self as usize]
    }
}

pub type Mono = [u16; NVARS];

const UNIT: Mono = [0; NVARS];

#[derive(Clone, PartialEq, Eq)]
pub struct MPoly<K: Scalar> {
    terms: BTreeMap<Mono, K>,
}

impl<K: Scalar> MPoly<K> {
    pub fn scalar(c: K) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(UNIT, c);
        }
        MPoly { terms }
    }

    pub fn var(v: Var) -> Self {
        let mut mono = UNIT;
        mono[v as usize] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(mono, K::one());
        MPoly { terms }
    }

    pub fn var_pow(v: Var, e: u16) -> Self {
        let mut mono = UNIT;
        mono[v as usize] = e;
        let mut terms = BTreeMap::new();
        terms.insert(mono, K::one());
        MPoly { terms }
    }

    pub fn term(mono: Mono, c: K) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(mono, c);
        }
        MPoly { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &K)> {
        self.terms.iter()
    }

    pub fn coeff(&self, mono: &Mono) -> K {
        self.terms.get(mono).cloned().unwrap_or_else(K::zero)
    }

    pub fn constant_part(&self) -> K {
        self.coeff(&UNIT)
    }

    /// Some(c) iff the polynomial is the constant c.
    pub fn as_scalar(&self) -> Option<K> {
        if self.terms.is_empty() {
            return Some(K::zero());
        }
        if self.terms.len() == 1 {
            if let Some(c) = self.terms.get(&UNIT) {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn degree(&self, v: Var) -> Option<u16> {
        self.terms.keys().map(|m| m[v as usize]).max()
    }

    pub fn mul_var_pow(&self, v: Var, e: u16) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut m2 = *m;
                m2[v as usize] += e;
                (m2, c.clone())
            })
            .collect();
        MPoly { terms }
    }

    /// Substitute a scalar for one variable.
    pub fn subst(&self, v: Var, value: &K) -> Self {
        let mut out = Self::scalar(K::zero());
        for (m, c) in &self.terms {
            let e = m[v as usize];
            let mut m2 = *m;
            m2[v as usize] = 0;
            let c2 = c.mul(&super::scalar::int_pow(value, e as u32));
            out = out.add(&MPoly::term(m2, c2));
        }
        out
    }

    /// Substitute a polynomial for one variable.
    pub fn subst_poly(&self, v: Var, value: &MPoly<K>) -> Self {
        let mut out = Self::scalar(K::zero());
        for (m, c) in &self.terms {
            let e = m[v as usize];
            let mut m2 = *m;
            m2[v as usize] = 0;
            let mut t = MPoly::term(m2, c.clone());
            for _ in 0..e {
                t = t.mul(value);
            }
            out = out.add(&t);
        }
        out
    }

    pub fn map_coeffs<L: Scalar>(&self, f: impl Fn(&K) -> L) -> MPoly<L> {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let c2 = f(c);
            if !c2.is_zero() {
                terms.insert(*m, c2);
            }
        }
        MPoly { terms }
    }

    /// Collect coefficients of powers of `v` (as polynomials in the rest).
    pub fn coeffs_of(&self, v: Var) -> BTreeMap<u16, MPoly<K>> {
        let mut out: BTreeMap<u16, MPoly<K>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m[v as usize];
            let mut m2 = *m;
            m2[v as usize] = 0;
            let entry = out.entry(e).or_insert_with(|| MPoly::scalar(K::zero()));
            *entry = entry.add(&MPoly::term(m2, c.clone()));
        }
        out.retain(|_, p| !p.is_zero());
        out
    }
}

impl<K: Scalar> fmt::Display for MPoly<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if *m == UNIT {
                write!(f, "{}", c)?;
            } else {
                write!(f, "({})", c)?;
                for (i, e) in m.iter().enumerate() {
                    match e {
                        0 => {}
                        1 => write!(f, "*{}", ["a", "b", "w", "z"][i])?,
                        _ => write!(f, "*{}^{}", ["a", "b", "w", "z"][i], e)?,
                    }
                }
            }
        }
        Ok(())
    }
}

impl<K: Scalar> fmt::Debug for MPoly<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl<K: Scalar> Scalar for MPoly<K> {
    fn zero() -> Self {
        MPoly { terms: BTreeMap::new() }
    }

    fn one() -> Self {
        Self::scalar(K::one())
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            match terms.get_mut(m) {
                Some(v) => {
                    *v = v.add(c);
                    if v.is_zero() {
                        terms.remove(m);
                    }
                }
                None => {
                    terms.insert(*m, c.clone());
                }
            }
        }
        MPoly { terms }
    }

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    fn mul(&self, other: &Self) -> Self {
        let mut terms: BTreeMap<Mono, K> = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let mut m = *m1;
                for i in 0..NVARS {
                    m[i] += m2[i];
                }
                let c = c1.mul(c2);
                match terms.get_mut(&m) {
                    Some(v) => *v = v.add(&c),
                    None => {
                        terms.insert(m, c);
                    }
                }
            }
        }
        terms.retain(|_, v| !v.is_zero());
        MPoly { terms }
    }

    fn neg(&self) -> Self {
        MPoly {
            terms: self.terms.iter().map(|(m, c)| (*m, c.neg())).collect(),
        }
    }

    fn from_int(n: i64) -> Self {
        Self::scalar(K::from_int(n))
    }

    fn from_rat(r: &super::rat::Rat) -> Self {
        Self::scalar(K::from_rat(r))
    }

    fn div_int(&self, n: i64) -> Self {
        MPoly {
            terms: self.terms.iter().map(|(m, c)| (*m, c.div_int(n))).collect(),
        }
    }

    fn try_inv(&self) -> Option<Self> {
        self.as_scalar().and_then(|c| c.try_inv()).map(Self::scalar)
    }

    fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(m, c)| serde_json::json!([m.to_vec(), c.to_json()]))
            .collect();
        serde_json::json!(terms)
    }
}
