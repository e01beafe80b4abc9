//! Normal ordering for the rank-one shifted current algebra.
//!
//! Generators are the modes x⁻_n, ξ_p, x⁺_n. A word is canonical when the
//! x⁻ block comes first with weakly decreasing modes, then the ξ block with
//! ascending indices, then the x⁺ block with weakly increasing modes. The
//! rewriting system moves any word onto canonical form using the defining
//! relations; commutators [ξ_p, x±_n] and [x±_a, x±_b] are expanded by
//! memoized recursions grounded in the shift truncation ξ_p = 0 for
//! p < −shift−1 and ξ_{−shift−1} = 1.

use std::collections::{BTreeMap, HashMap};

use crate::arith::{Rat, Scalar};

/// One generator mode. Variant order matches the canonical block order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum Gen {
    Xm(i64),
    Xi(i64),
    Xp(i64),
}

impl Gen {
    pub fn mode(&self) -> i64 {
        match self {
            Gen::Xm(n) | Gen::Xi(n) | Gen::Xp(n) => *n,
        }
    }

    fn class(&self) -> u8 {
        match self {
            Gen::Xm(_) => 0,
            Gen::Xi(_) => 1,
            Gen::Xp(_) => 2,
        }
    }
}

pub type Word = Vec<Gen>;

/// Finite ℚ-linear combination of words.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct FreeEl {
    pub terms: BTreeMap<Word, Rat>,
}

impl FreeEl {
    pub fn zero() -> Self {
        FreeEl::default()
    }

    pub fn word(w: Word, c: Rat) -> Self {
        let mut el = FreeEl::zero();
        el.add_word(w, c);
        el
    }

    pub fn add_word(&mut self, w: Word, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(e) => {
                *e = e.add(&c);
                if e.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_word(w.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return FreeEl::zero();
        }
        FreeEl {
            terms: self.terms.iter().map(|(w, v)| (w.clone(), v.mul(c))).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// #x⁺ − #x⁻ over every word; None when words disagree (only possible for
    /// inputs that were not produced by `normal_order`).
    pub fn weight(&self) -> Option<i64> {
        let mut it = self.terms.keys().map(|w| {
            w.iter()
                .map(|g| match g.class() {
                    0 => -1,
                    2 => 1,
                    _ => 0,
                })
                .sum::<i64>()
        });
        let first = it.next()?;
        it.all(|v| v == first).then_some(first)
    }
}

/// Normal-ordering result; `lost` records that terms with x±-modes above the
/// cap were dropped, so the element is only exact within the window.
#[derive(Clone, PartialEq, Debug)]
pub struct Reduced {
    pub el: FreeEl,
    pub lost: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Strategy {
    First,
    Last,
}

/// Rewriting context for one shift. `shift` is the pairing ⟨μ, α∨⟩ fixing
/// the ξ truncation; `mode_cap` bounds the retained x±-modes.
pub struct Pbw {
    shift: i64,
    mode_cap: i64,
    cp: HashMap<(i64, i64), Reduced>,
    cm: HashMap<(i64, i64), Reduced>,
    bp: HashMap<(i64, i64), Reduced>,
    bm: HashMap<(i64, i64), Reduced>,
}

enum Fate {
    Keep(Word),
    Zero,
    Lost,
}

impl Pbw {
    pub fn new(shift: i64, mode_cap: i64) -> Self {
        assert!(mode_cap >= 0, "mode cap must be nonnegative");
        Pbw {
            shift,
            mode_cap,
            cp: HashMap::new(),
            cm: HashMap::new(),
            bp: HashMap::new(),
            bm: HashMap::new(),
        }
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn mode_cap(&self) -> i64 {
        self.mode_cap
    }

    fn unit_index(&self) -> i64 {
        -self.shift - 1
    }

    /// Strip unit ξ's, kill vanishing ξ's, drop capped x±-modes.
    fn fate(&self, w: &[Gen]) -> Fate {
        let unit = self.unit_index();
        let mut out = Vec::with_capacity(w.len());
        for g in w {
            match g {
                Gen::Xi(p) if *p < unit => return Fate::Zero,
                Gen::Xi(p) if *p == unit => {}
                Gen::Xm(n) | Gen::Xp(n) if *n > self.mode_cap => return Fate::Lost,
                g => out.push(*g),
            }
        }
        Fate::Keep(out)
    }

    fn descent_at(w: &[Gen], i: usize) -> bool {
        let (a, b) = (w[i], w[i + 1]);
        if a.class() > b.class() {
            return true;
        }
        if a.class() < b.class() {
            return false;
        }
        match a {
            Gen::Xm(m) => m < b.mode(),
            Gen::Xi(p) => p > b.mode(),
            Gen::Xp(m) => m > b.mode(),
        }
    }

    /// [ξ_p, x⁺_n] in canonical form.
    fn c_plus(&mut self, p: i64, n: i64) -> Reduced {
        if p <= self.unit_index() {
            return Reduced { el: FreeEl::zero(), lost: false };
        }
        if let Some(r) = self.cp.get(&(p, n)) {
            return r.clone();
        }
        let mut el = FreeEl::zero();
        let mut lost = false;
        let up = self.c_plus(p - 1, n + 1);
        el = el.add(&up.el);
        lost |= up.lost;
        let down = self.c_plus(p - 1, n);
        el = el.add(&down.el.scale(&Rat::int(-1)));
        lost |= down.lost;
        let mid = if p - 1 == self.unit_index() {
            vec![Gen::Xp(n)]
        } else {
            vec![Gen::Xi(p - 1), Gen::Xp(n)]
        };
        match self.fate(&mid) {
            Fate::Keep(w) => el.add_word(w, Rat::int(2)),
            Fate::Zero => {}
            Fate::Lost => lost = true,
        }
        let r = Reduced { el, lost };
        self.cp.insert((p, n), r.clone());
        r
    }

    /// [ξ_p, x⁻_n] in canonical form.
    fn c_minus(&mut self, p: i64, n: i64) -> Reduced {
        if p <= self.unit_index() {
            return Reduced { el: FreeEl::zero(), lost: false };
        }
        if let Some(r) = self.cm.get(&(p, n)) {
            return r.clone();
        }
        let mut el = FreeEl::zero();
        let mut lost = false;
        let up = self.c_minus(p - 1, n + 1);
        el = el.add(&up.el);
        lost |= up.lost;
        let down = self.c_minus(p - 1, n);
        el = el.add(&down.el.scale(&Rat::int(-1)));
        lost |= down.lost;
        let mid = if p - 1 == self.unit_index() {
            vec![Gen::Xm(n)]
        } else {
            vec![Gen::Xm(n), Gen::Xi(p - 1)]
        };
        match self.fate(&mid) {
            Fate::Keep(w) => el.add_word(w, Rat::int(-2)),
            Fate::Zero => {}
            Fate::Lost => lost = true,
        }
        let r = Reduced { el, lost };
        self.cm.insert((p, n), r.clone());
        r
    }

    /// [x⁺_a, x⁺_b] for a ≥ b, canonical.
    fn b_plus(&mut self, a: i64, b: i64) -> Reduced {
        debug_assert!(a >= b);
        if a == b {
            return Reduced { el: FreeEl::zero(), lost: false };
        }
        if let Some(r) = self.bp.get(&(a, b)) {
            return r.clone();
        }
        let r = if a == b + 1 {
            match self.fate(&[Gen::Xp(b), Gen::Xp(b)]) {
                Fate::Keep(w) => Reduced { el: FreeEl::word(w, Rat::int(1)), lost: false },
                Fate::Zero => unreachable!(),
                Fate::Lost => Reduced { el: FreeEl::zero(), lost: true },
            }
        } else {
            let up = self.b_plus(a - 1, b + 1);
            let down = self.b_plus(a - 1, b);
            let mut el = up.el.add(&down.el);
            let mut lost = up.lost || down.lost;
            match self.fate(&[Gen::Xp(b), Gen::Xp(a - 1)]) {
                Fate::Keep(w) => el.add_word(w, Rat::int(2)),
                Fate::Zero => unreachable!(),
                Fate::Lost => lost = true,
            }
            Reduced { el, lost }
        };
        self.bp.insert((a, b), r.clone());
        r
    }

    /// [x⁻_a, x⁻_b] for a ≥ b, canonical.
    fn b_minus(&mut self, a: i64, b: i64) -> Reduced {
        debug_assert!(a >= b);
        if a == b {
            return Reduced { el: FreeEl::zero(), lost: false };
        }
        if let Some(r) = self.bm.get(&(a, b)) {
            return r.clone();
        }
        let r = if a == b + 1 {
            match self.fate(&[Gen::Xm(b), Gen::Xm(b)]) {
                Fate::Keep(w) => Reduced { el: FreeEl::word(w, Rat::int(-1)), lost: false },
                Fate::Zero => unreachable!(),
                Fate::Lost => Reduced { el: FreeEl::zero(), lost: true },
            }
        } else {
            let up = self.b_minus(a - 1, b + 1);
            let down = self.b_minus(a - 1, b);
            let mut el = up.el.add(&down.el);
            let mut lost = up.lost || down.lost;
            match self.fate(&[Gen::Xm(a - 1), Gen::Xm(b)]) {
                Fate::Keep(w) => el.add_word(w, Rat::int(-2)),
                Fate::Zero => unreachable!(),
                Fate::Lost => lost = true,
            }
            Reduced { el, lost }
        };
        self.bm.insert((a, b), r.clone());
        r
    }

    /// Rewrite one descent; returns the replacement of the two-generator
    /// segment as a linear combination.
    fn resolve(&mut self, a: Gen, b: Gen) -> Reduced {
        match (a, b) {
            (Gen::Xi(p), Gen::Xm(n)) => {
                // ξ_p x⁻_n = x⁻_n ξ_p + [ξ_p, x⁻_n]
                let mut r = self.c_minus(p, n);
                r.el.add_word(vec![Gen::Xm(n), Gen::Xi(p)], Rat::int(1));
                r
            }
            (Gen::Xp(m), Gen::Xm(n)) => {
                // x⁺_m x⁻_n = x⁻_n x⁺_m + ξ_{m+n}
                let mut el = FreeEl::word(vec![Gen::Xm(n), Gen::Xp(m)], Rat::int(1));
                match self.fate(&[Gen::Xi(m + n)]) {
                    Fate::Keep(w) => el.add_word(w, Rat::int(1)),
                    Fate::Zero => {}
                    Fate::Lost => unreachable!("ξ indices are not capped"),
                }
                Reduced { el, lost: false }
            }
            (Gen::Xp(m), Gen::Xi(p)) => {
                // x⁺_m ξ_p = ξ_p x⁺_m − [ξ_p, x⁺_m]
                let mut r = self.c_plus(p, m);
                r.el = r.el.scale(&Rat::int(-1));
                r.el.add_word(vec![Gen::Xi(p), Gen::Xp(m)], Rat::int(1));
                r
            }
            (Gen::Xm(m), Gen::Xm(n)) => {
                // ascending pair: x⁻_m x⁻_n = x⁻_n x⁻_m − [x⁻_n, x⁻_m]
                debug_assert!(m < n);
                let mut r = self.b_minus(n, m);
                r.el = r.el.scale(&Rat::int(-1));
                r.el.add_word(vec![Gen::Xm(n), Gen::Xm(m)], Rat::int(1));
                r
            }
            (Gen::Xi(p), Gen::Xi(q)) => {
                debug_assert!(p > q);
                Reduced { el: FreeEl::word(vec![Gen::Xi(q), Gen::Xi(p)], Rat::int(1)), lost: false }
            }
            (Gen::Xp(m), Gen::Xp(n)) => {
                // descending pair: x⁺_m x⁺_n = x⁺_n x⁺_m + [x⁺_m, x⁺_n]
                debug_assert!(m > n);
                let mut r = self.b_plus(m, n);
                r.el.add_word(vec![Gen::Xp(n), Gen::Xp(m)], Rat::int(1));
                r
            }
            _ => unreachable!("not a descent"),
        }
    }

    fn reduce(&mut self, word: &[Gen], strategy: Strategy) -> Reduced {
        let mut out = FreeEl::zero();
        let mut lost = false;
        let mut agenda: Vec<(Word, Rat)> = Vec::new();
        match self.fate(word) {
            Fate::Keep(w) => agenda.push((w, Rat::int(1))),
            Fate::Zero => {}
            Fate::Lost => lost = true,
        }
        while let Some((w, c)) = agenda.pop() {
            let pos = match strategy {
                Strategy::First => (0..w.len().saturating_sub(1)).find(|&i| Self::descent_at(&w, i)),
                Strategy::Last => (0..w.len().saturating_sub(1)).rev().find(|&i| Self::descent_at(&w, i)),
            };
            let Some(i) = pos else {
                out.add_word(w, c);
                continue;
            };
            let seg = self.resolve(w[i], w[i + 1]);
            lost |= seg.lost;
            for (mid, mc) in &seg.el.terms {
                let mut nw = Vec::with_capacity(w.len() + mid.len());
                nw.extend_from_slice(&w[..i]);
                nw.extend_from_slice(mid);
                nw.extend_from_slice(&w[i + 2..]);
                match self.fate(&nw) {
                    Fate::Keep(nw) => agenda.push((nw, c.mul(mc))),
                    Fate::Zero => {}
                    Fate::Lost => lost = true,
                }
            }
        }
        Reduced { el: out, lost }
    }

    /// Canonical form of a word, with window bookkeeping.
    pub fn normal_order(&mut self, word: &[Gen]) -> Reduced {
        self.reduce(word, Strategy::First)
    }

    /// Same rewriting applied at the rightmost descent instead; used to
    /// witness confluence.
    pub fn normal_order_rightmost(&mut self, word: &[Gen]) -> Reduced {
        self.reduce(word, Strategy::Last)
    }

    pub fn is_canonical(w: &[Gen]) -> bool {
        (0..w.len().saturating_sub(1)).all(|i| !Self::descent_at(w, i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn no(shift: i64, word: &[Gen]) -> FreeEl {
        Pbw::new(shift, 64).normal_order(word).el
    }

    #[test]
    fn basic_swap_produces_cartan_mode() {
        // x⁺₀ x⁻₀ = x⁻₀ x⁺₀ + ξ₀ at shift 0
        let got = no(0, &[Gen::Xp(0), Gen::Xm(0)]);
        let mut want = FreeEl::zero();
        want.add_word(vec![Gen::Xm(0), Gen::Xp(0)], Rat::int(1));
        want.add_word(vec![Gen::Xi(0)], Rat::int(1));
        assert_eq!(got, want);
    }

    #[test]
    fn unit_mode_is_stripped() {
        let got = no(0, &[Gen::Xi(-1), Gen::Xm(0)]);
        assert_eq!(got, FreeEl::word(vec![Gen::Xm(0)], Rat::int(1)));
        assert!(no(0, &[Gen::Xi(-2), Gen::Xm(0)]).is_zero());
    }

    #[test]
    fn weight_zero_bracket_hits_unit() {
        // [ξ₀, x⁺_n] = 2x⁺_n at shift 0, so x⁺₃ξ₀ = ξ₀x⁺₃ − 2x⁺₃
        let got = no(0, &[Gen::Xp(3), Gen::Xi(0)]);
        let mut want = FreeEl::word(vec![Gen::Xi(0), Gen::Xp(3)], Rat::int(1));
        want.add_word(vec![Gen::Xp(3)], Rat::int(-2));
        assert_eq!(got, want);
    }

    #[test]
    fn same_block_straightening() {
        // x⁺₁ x⁺₀ = x⁺₀ x⁺₁ + (x⁺₀)²
        let got = no(0, &[Gen::Xp(1), Gen::Xp(0)]);
        let mut want = FreeEl::word(vec![Gen::Xp(0), Gen::Xp(1)], Rat::int(1));
        want.add_word(vec![Gen::Xp(0), Gen::Xp(0)], Rat::int(1));
        assert_eq!(got, want);

        // x⁻₀ x⁻₁ = x⁻₁ x⁻₀ + (x⁻₀)²
        let got = no(0, &[Gen::Xm(0), Gen::Xm(1)]);
        let mut want = FreeEl::word(vec![Gen::Xm(1), Gen::Xm(0)], Rat::int(1));
        want.add_word(vec![Gen::Xm(0), Gen::Xm(0)], Rat::int(1));
        assert_eq!(got, want);
    }

    #[test]
    fn mode_cap_marks_lost() {
        let mut pbw = Pbw::new(0, 2);
        // ξ₂ x⁻₂ straightens into modes up to 2+2+... beyond the cap of 2
        let r = pbw.normal_order(&[Gen::Xi(2), Gen::Xm(2)]);
        assert!(r.lost);
        // everything kept stays within the cap
        for w in r.el.terms.keys() {
            assert!(w.iter().all(|g| matches!(g, Gen::Xi(_)) || g.mode() <= 2));
        }
    }

    #[test]
    fn jacobi_on_mixed_triple() {
        // associativity of the normal form: reduce (ab)c and a(bc) products
        // by normal-ordering the concatenation in both bracketing orders
        let a = [Gen::Xp(1)];
        let b = [Gen::Xi(1)];
        let c = [Gen::Xm(2)];
        let mut pbw = Pbw::new(0, 64);
        let abc: Vec<Gen> = a.iter().chain(&b).chain(&c).copied().collect();
        let left = pbw.normal_order(&abc);
        let right = pbw.normal_order_rightmost(&abc);
        assert_eq!(left, right);
    }

    #[test]
    fn rewriting_confluence_on_random_words() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_cafe);
        for trial in 0..1000 {
            let shift = [-1, 0, 1][rng.gen_range(0..3)];
            let len = rng.gen_range(1..=5);
            let word: Vec<Gen> = (0..len)
                .map(|_| match rng.gen_range(0..3) {
                    0 => Gen::Xm(rng.gen_range(0..=3)),
                    1 => Gen::Xi(rng.gen_range((-shift - 1)..=3)),
                    _ => Gen::Xp(rng.gen_range(0..=3)),
                })
                .collect();
            let mut pbw = Pbw::new(shift, 64);
            let first = pbw.normal_order(&word);
            let last = pbw.normal_order_rightmost(&word);
            assert_eq!(first, last, "trial {} diverged on {:?} (shift {})", trial, word, shift);
            assert!(!first.lost, "cap 64 should not truncate short words");
            for w in first.el.terms.keys() {
                assert!(Pbw::is_canonical(w), "non-canonical output {:?}", w);
            }
            let in_weight: i64 = word
                .iter()
                .map(|g| match g {
                    Gen::Xm(_) => -1,
                    Gen::Xp(_) => 1,
                    Gen::Xi(_) => 0,
                })
                .sum();
            if !first.el.is_zero() {
                assert_eq!(first.el.weight(), Some(in_weight));
            }
        }
    }
}
