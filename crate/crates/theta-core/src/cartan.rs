//! Finite-type Cartan data: Cartan matrices with symmetrizers, root-lattice
//! vectors, coweights, and the symmetric quantum Cartan matrix.
//!
//! The highest root is computed by closing the simple roots under the simple
//! reflections rather than read from a table, so the derived invariants
//! (κ in particular) cannot drift from the matrix conventions.

use std::collections::BTreeSet;
use std::fmt;

use crate::arith::{linalg, qnum, QRat, Rat, Scalar, SpMat};
use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Family {
    pub fn from_letter(c: char) -> Result<Self> {
        match c.to_ascii_uppercase() {
            'A' => Ok(Family::A),
            'B' => Ok(Family::B),
            'C' => Ok(Family::C),
            'D' => Ok(Family::D),
            'E' => Ok(Family::E),
            'F' => Ok(Family::F),
            'G' => Ok(Family::G),
            other => Err(Error::Invalid(format!("unknown type letter {:?}", other))),
        }
    }

    pub fn letter(self) -> char {
        match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
            Family::E => 'E',
            Family::F => 'F',
            Family::G => 'G',
        }
    }
}

/// Element of the root lattice in simple-root coordinates.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct RootVec(pub Vec<i64>);

impl RootVec {
    pub fn zero(rank: usize) -> Self {
        RootVec(vec![0; rank])
    }

    pub fn simple(rank: usize, i: usize) -> Self {
        let mut v = vec![0; rank];
        v[i] = 1;
        RootVec(v)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn height(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn is_positive(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }

    pub fn is_negative(&self) -> bool {
        self.0.iter().all(|&c| c <= 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.rank(), other.rank());
        RootVec(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.rank(), other.rank());
        RootVec(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Self {
        RootVec(self.0.iter().map(|a| -a).collect())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self.0)
    }
}

/// Coweight, stored through its pairings n_i = ⟨μ, α_i⟩.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Coweight(pub Vec<i64>);

impl Coweight {
    pub fn zero(rank: usize) -> Self {
        Coweight(vec![0; rank])
    }

    /// Fundamental coweight ϖ_j∨: ⟨ϖ_j∨, α_i⟩ = δ_ij.
    pub fn fundamental(rank: usize, j: usize) -> Self {
        let mut v = vec![0; rank];
        v[j] = 1;
        Coweight(v)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn pairing(&self, i: usize) -> i64 {
        self.0[i]
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.rank(), other.rank());
        Coweight(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn neg(&self) -> Self {
        Coweight(self.0.iter().map(|a| -a).collect())
    }

    pub fn is_dominant(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }

    pub fn is_antidominant(&self) -> bool {
        self.0.iter().all(|&c| c <= 0)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self.0)
    }
}

impl fmt::Display for Coweight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

#[derive(Clone, Debug)]
pub struct CartanDatum {
    family: Family,
    rank: usize,
    c: Vec<Vec<i64>>,
    d: Vec<i64>,
    theta: Vec<i64>,
}

impl CartanDatum {
    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn cartan(&self, i: usize, j: usize) -> i64 {
        self.c[i][j]
    }

    pub fn sym(&self, i: usize) -> i64 {
        self.d[i]
    }

    /// (α_i, α_j) = d_i c_ij.
    pub fn b(&self, i: usize, j: usize) -> i64 {
        self.d[i] * self.c[i][j]
    }

    /// d_ij = (α_i, α_j)/2, a half-integer.
    pub fn d_shift(&self, i: usize, j: usize) -> Rat {
        Rat::frac(self.b(i, j), 2)
    }

    /// (ρ, α_i) = d_i.
    pub fn rho_pairing(&self, i: usize) -> i64 {
        self.d[i]
    }

    /// Highest root in simple-root coordinates.
    pub fn theta(&self) -> RootVec {
        RootVec(self.theta.clone())
    }

    /// Bilinear form on the root lattice.
    pub fn form(&self, beta: &RootVec, gamma: &RootVec) -> i64 {
        assert_eq!(beta.rank(), self.rank);
        assert_eq!(gamma.rank(), self.rank);
        let mut s = 0;
        for i in 0..self.rank {
            for j in 0..self.rank {
                s += beta.0[i] * gamma.0[j] * self.b(i, j);
            }
        }
        s
    }

    /// κ = (θ, θ + 2ρ)/4.
    pub fn kappa(&self) -> Rat {
        let theta = self.theta();
        let tt = self.form(&theta, &theta);
        let trho: i64 = (0..self.rank).map(|i| self.theta[i] * self.d[i]).sum();
        Rat::frac(tt + 2 * trho, 4)
    }

    /// ⟨β, α_i∨⟩ = Σ_j c_ij β_j.
    pub fn coroot_pairing(&self, i: usize, beta: &RootVec) -> i64 {
        (0..self.rank).map(|j| self.c[i][j] * beta.0[j]).sum()
    }

    /// All roots, by reflection closure of the simple roots.
    pub fn roots(&self) -> Vec<RootVec> {
        let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
        let mut queue: Vec<RootVec> = (0..self.rank).map(|i| RootVec::simple(self.rank, i)).collect();
        for r in &queue {
            seen.insert(r.0.clone());
        }
        while let Some(beta) = queue.pop() {
            for i in 0..self.rank {
                let t = self.coroot_pairing(i, &beta);
                let mut refl = beta.clone();
                refl.0[i] -= t;
                if seen.insert(refl.0.clone()) {
                    queue.push(refl);
                }
            }
        }
        seen.into_iter().map(RootVec).collect()
    }

    pub fn positive_roots(&self) -> Vec<RootVec> {
        self.roots().into_iter().filter(|r| r.is_positive()).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "type": format!("{}{}", self.family.letter(), self.rank),
            "cartan": self.c,
            "sym": self.d,
            "theta": self.theta,
            "kappa": self.kappa().to_json(),
        })
    }
}

pub fn build_cartan(family: Family, rank: usize) -> Result<CartanDatum> {
    let bad = |msg: &str| Err(Error::Invalid(format!("{}{}: {}", family.letter(), rank, msg)));
    let (c, d): (Vec<Vec<i64>>, Vec<i64>) = match family {
        Family::A => {
            if rank < 1 {
                return bad("rank must be at least 1");
            }
            (chain(rank, &[]), vec![1; rank])
        }
        Family::B => {
            if rank < 2 {
                return bad("rank must be at least 2");
            }
            // short last root: the (n-1, n) edge carries c = -1 / -2
            let mut c = chain(rank, &[]);
            c[rank - 1][rank - 2] = -2;
            let mut d = vec![2; rank];
            d[rank - 1] = 1;
            (c, d)
        }
        Family::C => {
            if rank < 2 {
                return bad("rank must be at least 2");
            }
            // long last root
            let mut c = chain(rank, &[]);
            c[rank - 2][rank - 1] = -2;
            let mut d = vec![1; rank];
            d[rank - 1] = 2;
            (c, d)
        }
        Family::D => {
            if rank < 3 {
                return bad("rank must be at least 3");
            }
            // chain on 0..rank-2, fork: both rank-2 and rank-1 attach to rank-3
            let mut c = vec![vec![0; rank]; rank];
            for (i, row) in c.iter_mut().enumerate() {
                row[i] = 2;
            }
            for i in 0..rank - 2 {
                c[i][i + 1] = -1;
                c[i + 1][i] = -1;
            }
            c[rank - 2][rank - 1] = 0;
            c[rank - 1][rank - 2] = 0;
            c[rank - 3][rank - 1] = -1;
            c[rank - 1][rank - 3] = -1;
            (c, vec![1; rank])
        }
        Family::E => {
            if !(6..=8).contains(&rank) {
                return bad("rank must be 6, 7, or 8");
            }
            // chain 0-2-3-4-..., extra node 1 attached to node 3
            let mut c = vec![vec![0; rank]; rank];
            for (i, row) in c.iter_mut().enumerate() {
                row[i] = 2;
            }
            let link = |a: usize, b: usize, c: &mut Vec<Vec<i64>>| {
                c[a][b] = -1;
                c[b][a] = -1;
            };
            link(0, 2, &mut c);
            link(2, 3, &mut c);
            link(3, 4, &mut c);
            link(4, 5, &mut c);
            if rank >= 7 {
                link(5, 6, &mut c);
            }
            if rank == 8 {
                link(6, 7, &mut c);
            }
            link(1, 3, &mut c);
            (c, vec![1; rank])
        }
        Family::F => {
            if rank != 4 {
                return bad("rank must be 4");
            }
            let c = vec![
                vec![2, -1, 0, 0],
                vec![-1, 2, -1, 0],
                vec![0, -2, 2, -1],
                vec![0, 0, -1, 2],
            ];
            (c, vec![2, 2, 1, 1])
        }
        Family::G => {
            if rank != 2 {
                return bad("rank must be 2");
            }
            (vec![vec![2, -3], vec![-1, 2]], vec![1, 3])
        }
    };
    for i in 0..rank {
        assert_eq!(c[i][i], 2);
        for j in 0..rank {
            assert_eq!(d[i] * c[i][j], d[j] * c[j][i], "symmetrizability at ({},{})", i, j);
        }
    }
    let g = d.iter().fold(0i64, |a, &x| num::integer::gcd(a, x));
    assert_eq!(g, 1, "symmetrizers must be coprime");

    let mut datum = CartanDatum { family, rank, c, d, theta: vec![] };
    let positive = datum.positive_roots();
    let top = positive
        .iter()
        .max_by_key(|r| r.height())
        .expect("nonempty root system")
        .clone();
    assert_eq!(
        positive.iter().filter(|r| r.height() == top.height()).count(),
        1,
        "highest root must be unique"
    );
    datum.theta = top.0;
    Ok(datum)
}

fn chain(rank: usize, _extra: &[(usize, usize)]) -> Vec<Vec<i64>> {
    let mut c = vec![vec![0; rank]; rank];
    for (i, row) in c.iter_mut().enumerate() {
        row[i] = 2;
    }
    for i in 0..rank.saturating_sub(1) {
        c[i][i + 1] = -1;
        c[i + 1][i] = -1;
    }
    c
}

/// Symmetric quantum Cartan matrix B(q) with entries [b_ij]_q.
pub fn quantum_cartan(cd: &CartanDatum) -> SpMat<QRat> {
    let n = cd.rank();
    SpMat::from_entries(
        n,
        n,
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter_map(|(i, j)| {
            let v = qnum::qint_sym(cd.b(i, j));
            if v.is_zero() {
                None
            } else {
                Some((i, j, v))
            }
        }),
    )
}

/// B̃(q) = B(q)⁻¹.
pub fn inverse_quantum_cartan(cd: &CartanDatum) -> Result<SpMat<QRat>> {
    linalg::invert(&quantum_cartan(cd))
}

/// Entrywise q ↦ q^s.
pub fn eval_at_pow(m: &SpMat<QRat>, s: i64) -> SpMat<QRat> {
    m.map(|v| v.subst_pow(s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_one_datum() {
        let cd = build_cartan(Family::A, 1).unwrap();
        assert_eq!(cd.cartan(0, 0), 2);
        assert_eq!(cd.sym(0), 1);
        assert_eq!(cd.b(0, 0), 2);
        assert_eq!(cd.theta(), RootVec(vec![1]));
        assert_eq!(cd.kappa(), Rat::int(1));
    }

    #[test]
    fn simply_laced_kappa_is_half_coxeter() {
        for (rank, h) in [(2usize, 3i64), (3, 4), (4, 5)] {
            let cd = build_cartan(Family::A, rank).unwrap();
            assert_eq!(cd.kappa(), Rat::frac(h, 2));
        }
        let e8 = build_cartan(Family::E, 8).unwrap();
        assert_eq!(e8.kappa(), Rat::int(15));
    }

    #[test]
    fn root_counts() {
        let count = |f, r| build_cartan(f, r).unwrap().roots().len();
        assert_eq!(count(Family::A, 2), 6);
        assert_eq!(count(Family::B, 3), 18);
        assert_eq!(count(Family::C, 3), 18);
        assert_eq!(count(Family::D, 4), 24);
        assert_eq!(count(Family::G, 2), 12);
        assert_eq!(count(Family::F, 4), 48);
        assert_eq!(count(Family::E, 6), 72);
    }

    #[test]
    fn symmetrized_c2() {
        let cd = build_cartan(Family::C, 2).unwrap();
        assert_eq!(cd.sym(0), 1);
        assert_eq!(cd.sym(1), 2);
        assert_eq!(cd.b(0, 1), cd.b(1, 0));
        assert_eq!(cd.b(0, 1), -2);
    }

    #[test]
    fn highest_root_dominance() {
        // θ + α_i is never a root
        for (f, r) in [(Family::B, 2), (Family::G, 2), (Family::D, 4), (Family::F, 4)] {
            let cd = build_cartan(f, r).unwrap();
            let roots: std::collections::BTreeSet<_> = cd.roots().into_iter().collect();
            let theta = cd.theta();
            assert!(roots.contains(&theta));
            for i in 0..cd.rank() {
                let up = theta.add(&RootVec::simple(cd.rank(), i));
                assert!(!roots.contains(&up));
            }
        }
    }

    #[test]
    fn pairing_bilinearity() {
        let cd = build_cartan(Family::F, 4).unwrap();
        let beta = RootVec(vec![1, -2, 0, 3]);
        let gamma = RootVec(vec![0, 1, 1, -1]);
        let alpha = RootVec::simple(4, 2);
        assert_eq!(
            cd.form(&alpha, &beta.add(&gamma)),
            cd.form(&alpha, &beta) + cd.form(&alpha, &gamma)
        );
        assert_eq!(cd.form(&beta, &gamma), cd.form(&gamma, &beta));
    }

    #[test]
    fn quantum_cartan_inverse_rank_one() {
        let cd = build_cartan(Family::A, 1).unwrap();
        let btilde = inverse_quantum_cartan(&cd).unwrap();
        // 1/[2]_q
        let expect = qnum::qint_sym(2).try_inv().unwrap();
        assert_eq!(btilde.get(0, 0), expect);
        // evaluation at q → q²
        let at2 = eval_at_pow(&btilde, 2);
        assert_eq!(at2.get(0, 0), qnum::qint_sym_at_pow(2, 2).try_inv().unwrap());
    }

    #[test]
    fn quantum_cartan_inverse_rank_two() {
        let cd = build_cartan(Family::A, 2).unwrap();
        let b = quantum_cartan(&cd);
        let btilde = inverse_quantum_cartan(&cd).unwrap();
        assert_eq!(b.mul(&btilde), SpMat::identity(2));
        // [2]_q/[3]_q in the corner
        let expect = qnum::qint_sym(2).mul(&qnum::qint_sym(3).try_inv().unwrap());
        assert_eq!(btilde.get(0, 0), expect);
    }

    #[test]
    fn coweight_basics() {
        let w = Coweight::fundamental(2, 0);
        assert!(w.is_dominant());
        assert!(w.neg().is_antidominant());
        assert_eq!(w.add(&w.neg()), Coweight::zero(2));
        assert_eq!(w.pairing(0), 1);
        assert_eq!(w.pairing(1), 0);
    }

    #[test]
    fn rootvec_cones() {
        let b = RootVec(vec![1, 0, 2]);
        assert!(b.is_positive());
        assert!(!b.is_negative());
        assert!(b.neg().is_negative());
        assert_eq!(b.height(), 3);
        assert!(!b.sub(&RootVec(vec![0, 1, 0])).is_positive());
    }
}
