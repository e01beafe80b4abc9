//! ℓ-weights in factored form: signed multisets of prefundamental factors.
//!
//! A factor at node i with parameter a contributes z−a (additive side) or
//! 1−za (multiplicative side) to the i-th component. Products are multiset
//! unions with cancellation, so inverses are exact.

use crate::arith::{QRat, Rat, Scalar};
use crate::cartan::Coweight;
use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Side {
    /// Factors Ψ_{i,a} with component z − a; parameters shift additively.
    Yangian,
    /// Factors Ψ_{i,a} with component 1 − za; parameters scale.
    Quantum,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LWeight<S: Scalar> {
    side: Side,
    rank: usize,
    num: Vec<(usize, S)>,
    den: Vec<(usize, S)>,
}

fn sort_factors<S: Scalar>(v: &mut [(usize, S)]) {
    v.sort_by(|a, b| (a.0, format!("{}", a.1)).cmp(&(b.0, format!("{}", b.1))));
}

impl<S: Scalar> LWeight<S> {
    pub fn one(side: Side, rank: usize) -> Self {
        LWeight { side, rank, num: vec![], den: vec![] }
    }

    /// Prefundamental factor Ψ_{i,a}.
    pub fn prefund(side: Side, rank: usize, i: usize, a: S) -> Self {
        assert!(i < rank, "node out of range");
        LWeight { side, rank, num: vec![(i, a)], den: vec![] }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn num_factors(&self) -> &[(usize, S)] {
        &self.num
    }

    pub fn den_factors(&self) -> &[(usize, S)] {
        &self.den
    }

    pub fn inv(&self) -> Self {
        LWeight {
            side: self.side,
            rank: self.rank,
            num: self.den.clone(),
            den: self.num.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert!(self.side == other.side && self.rank == other.rank, "mismatched weights");
        let mut num = self.num.clone();
        num.extend(other.num.iter().cloned());
        let mut den = self.den.clone();
        den.extend(other.den.iter().cloned());
        // cancel exact matches
        let mut kept_den: Vec<(usize, S)> = Vec::new();
        for f in den {
            if let Some(pos) = num.iter().position(|g| *g == f) {
                num.remove(pos);
            } else {
                kept_den.push(f);
            }
        }
        sort_factors(&mut num);
        sort_factors(&mut kept_den);
        LWeight { side: self.side, rank: self.rank, num, den: kept_den }
    }

    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 { self.inv() } else { self.clone() };
        let mut out = Self::one(self.side, self.rank);
        for _ in 0..e.abs() {
            out = out.mul(&base);
        }
        out
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    /// Coweight from component degrees.
    pub fn coweight(&self) -> Coweight {
        let mut v = vec![0i64; self.rank];
        for (i, _) in &self.num {
            v[*i] += 1;
        }
        for (i, _) in &self.den {
            v[*i] -= 1;
        }
        Coweight(v)
    }

    /// Parameters of the node-i numerator factors.
    pub fn node_params(&self, i: usize) -> Vec<S> {
        self.num.iter().filter(|(j, _)| *j == i).map(|(_, a)| a.clone()).collect()
    }

    pub fn node_den_params(&self, i: usize) -> Vec<S> {
        self.den.iter().filter(|(j, _)| *j == i).map(|(_, a)| a.clone()).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let ser = |v: &[(usize, S)]| {
            v.iter()
                .map(|(i, a)| serde_json::json!([i, a.to_json()]))
                .collect::<Vec<_>>()
        };
        serde_json::json!({
            "side": match self.side { Side::Yangian => "yangian", Side::Quantum => "quantum" },
            "num": ser(&self.num),
            "den": ser(&self.den),
        })
    }
}

impl LWeight<Rat> {
    /// Substitute z ↦ z − a: parameters move by a.
    pub fn tau_shift(&self, a: &Rat) -> Self {
        assert!(self.side == Side::Yangian, "additive shift needs the additive side");
        let mv = |v: &[(usize, Rat)]| v.iter().map(|(i, b)| (*i, b.add(a))).collect();
        let mut out = LWeight { side: self.side, rank: self.rank, num: mv(&self.num), den: mv(&self.den) };
        sort_factors(&mut out.num);
        sort_factors(&mut out.den);
        out
    }
}

impl LWeight<QRat> {
    /// Substitute z ↦ z·a⁻¹: parameters divide by a.
    pub fn tau_shift(&self, a: &QRat) -> Result<Self> {
        assert!(self.side == Side::Quantum, "multiplicative shift needs the multiplicative side");
        let ainv = a
            .try_inv()
            .ok_or_else(|| Error::NotInvertible("shift by zero parameter".into()))?;
        let mv = |v: &[(usize, QRat)]| v.iter().map(|(i, b)| (*i, b.mul(&ainv))).collect();
        let mut out = LWeight { side: self.side, rank: self.rank, num: mv(&self.num), den: mv(&self.den) };
        sort_factors(&mut out.num);
        sort_factors(&mut out.den);
        Ok(out)
    }
}

/// Eigenvalue of the s-th Drinfeld–Cartan mode on the highest vector of the
/// module with polynomial highest weight p: for p_i(z) = Π_t (1 − z c_t),
/// λ_{i,s} = (c₁^s + … + c_k^s)/(s(q⁻¹ − q)).
pub fn lambda_eigen(p: &LWeight<QRat>, i: usize, s: i64) -> Result<QRat> {
    if !p.is_polynomial() {
        return Err(Error::Invalid("eigenvalue formula needs a polynomial weight".into()));
    }
    if s <= 0 {
        return Err(Error::Invalid("mode index must be positive".into()));
    }
    let mut sum = QRat::zero();
    for c in p.node_params(i) {
        sum = sum.add(&c.pow_i(s));
    }
    let denom = QRat::q_pow(-1).sub(&QRat::q()).mul(&QRat::from_int(s));
    Ok(sum.mul(&denom.try_inv().expect("q⁻¹ − q is invertible")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn psi(a: i64) -> LWeight<Rat> {
        LWeight::prefund(Side::Yangian, 1, 0, Rat::int(a))
    }

    #[test]
    fn product_cancellation_and_coweight() {
        let e = psi(2).mul(&psi(5));
        assert_eq!(e.coweight(), Coweight(vec![2]));
        let f = e.mul(&psi(5).inv());
        assert_eq!(f, psi(2));
        assert_eq!(f.mul(&f.inv()), LWeight::one(Side::Yangian, 1));
        assert_eq!(f.mul(&f.inv()).coweight(), Coweight(vec![0]));
    }

    #[test]
    fn product_commutes_and_associates() {
        let a = psi(1);
        let b = psi(3).inv();
        let c = psi(1).mul(&psi(7));
        assert_eq!(a.mul(&b), b.mul(&a));
        assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
    }

    #[test]
    fn additive_shift() {
        let e = psi(2).mul(&psi(-1));
        let shifted = e.tau_shift(&Rat::int(3));
        assert_eq!(shifted, psi(5).mul(&psi(2)));
    }

    #[test]
    fn multiplicative_shift() {
        let e = LWeight::prefund(Side::Quantum, 1, 0, QRat::q_pow(2));
        let shifted = e.tau_shift(&QRat::q_pow(4)).unwrap();
        assert_eq!(shifted, LWeight::prefund(Side::Quantum, 1, 0, QRat::q_pow(-2)));
    }

    #[test]
    fn eigenvalue_power_sums() {
        let one = LWeight::one(Side::Quantum, 1);
        assert!(lambda_eigen(&one, 0, 1).unwrap().is_zero());

        let p1 = LWeight::prefund(Side::Quantum, 1, 0, QRat::one());
        let l1 = lambda_eigen(&p1, 0, 1).unwrap();
        // 1/(q⁻¹ − q)
        let expect = QRat::q_pow(-1).sub(&QRat::q()).try_inv().unwrap();
        assert_eq!(l1, expect);

        // doubled factor at s = 2 collapses to the same value
        let p2 = p1.mul(&p1);
        assert_eq!(lambda_eigen(&p2, 0, 2).unwrap(), expect);

        let bad = p1.inv();
        assert!(lambda_eigen(&bad, 0, 1).is_err());
    }
}
