//! Concrete modules over the rank-one shifted current algebra.
//!
//! A module is stored as one sparse matrix per generator on a finite basis,
//! graded by lowering depth (0 is the top). Action matrices are exact on the
//! columns they keep; a column whose image leaves the window (depth overflow
//! or generator mode above the cap) is recorded in a per-table lost set, and
//! every check walks supports through those sets before trusting a product.
//!
//! Constructors cover the universal highest-weight module on a mode-capped
//! basis, its irreducible quotient by the radical of the contravariant form,
//! the two-dimensional evaluation module, one-dimensional modules of
//! polynomial highest weight, the negative prefundamental module, spectral
//! deformation, shift-embedding pullbacks, and tensor products.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;

use super::pbw::{Gen, Pbw, Word};
use crate::arith::linalg::{self, Solve};
use crate::arith::opseries::OpSeries;
use crate::arith::rat::Rat;
use crate::arith::scalar::{binom, int_pow, Scalar};
use crate::arith::series::{SVar, Series};
use crate::arith::sparse::SpMat;
use crate::error::{Error, Result};
use crate::lweight::{LWeight, Side};
use crate::window::Window;

/// Action tables of the rank-one shifted current algebra on a finite graded basis.
#[derive(Clone, Debug)]
pub struct YModule<S: Scalar> {
    shift: i64,
    window: Window,
    grading: Vec<i64>,
    tables: BTreeMap<Gen, SpMat<S>>,
    lost: BTreeMap<Gen, BTreeSet<usize>>,
}

impl<S: Scalar> YModule<S> {
    pub fn new(shift: i64, window: Window, grading: Vec<i64>) -> Self {
        assert!(!grading.is_empty(), "empty basis");
        assert_eq!(grading[0], 0, "index 0 must be the top");
        YModule {
            shift,
            window,
            grading,
            tables: BTreeMap::new(),
            lost: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.grading.len()
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn grading(&self) -> &[i64] {
        &self.grading
    }

    /// Index p with ξ_p = 1; lower ξ's vanish.
    pub fn xi_unit_index(&self) -> i64 {
        -self.shift - 1
    }

    pub fn set_table(&mut self, g: Gen, m: SpMat<S>, lost: BTreeSet<usize>) {
        assert_eq!((m.rows(), m.cols()), (self.dim(), self.dim()), "table shape");
        if let Gen::Xi(p) = g {
            assert!(p > self.xi_unit_index(), "unit and lower ξ's stay virtual");
        }
        self.tables.insert(g, m);
        self.lost.insert(g, lost);
    }

    pub fn has_table(&self, g: Gen) -> bool {
        if let Gen::Xi(p) = g {
            if p <= self.xi_unit_index() {
                return true;
            }
        }
        self.tables.contains_key(&g)
    }

    /// Action matrix; ξ at the unit index is the identity, below it zero.
    pub fn act(&self, g: Gen) -> SpMat<S> {
        if let Gen::Xi(p) = g {
            let unit = self.xi_unit_index();
            if p < unit {
                return SpMat::zero(self.dim(), self.dim());
            }
            if p == unit {
                return SpMat::identity(self.dim());
            }
        }
        self.tables
            .get(&g)
            .unwrap_or_else(|| panic!("no table for {g:?}"))
            .clone()
    }

    pub fn lost_cols(&self, g: Gen) -> BTreeSet<usize> {
        self.lost.get(&g).cloned().unwrap_or_default()
    }

    /// Largest mode n with both x⁻_n and x⁺_n tabulated.
    pub fn x_mode_max(&self) -> i64 {
        let max_of = |want_minus: bool| {
            self.tables
                .keys()
                .filter_map(|g| match g {
                    Gen::Xm(n) if want_minus => Some(*n),
                    Gen::Xp(n) if !want_minus => Some(*n),
                    _ => None,
                })
                .max()
        };
        match (max_of(true), max_of(false)) {
            (Some(a), Some(b)) => a.min(b),
            _ => -1,
        }
    }

    /// Largest tabulated ξ index (at least the unit index).
    pub fn xi_mode_max(&self) -> i64 {
        self.tables
            .keys()
            .filter_map(|g| match g {
                Gen::Xi(p) => Some(*p),
                _ => None,
            })
            .max()
            .unwrap_or(self.xi_unit_index())
    }

    /// x⁻(z) = Σ_n x⁻_n z^{-n-1} up to the tabulated modes.
    pub fn xm_series(&self) -> OpSeries<S> {
        self.current_series(|n| Gen::Xm(n), 0, self.x_mode_max())
    }

    pub fn xp_series(&self) -> OpSeries<S> {
        self.current_series(|n| Gen::Xp(n), 0, self.x_mode_max())
    }

    /// ξ(z) = Σ_p ξ_p z^{-p-1} from the unit term up to the tabulated indexes.
    pub fn xi_series(&self) -> OpSeries<S> {
        self.current_series(|p| Gen::Xi(p), self.xi_unit_index(), self.xi_mode_max())
    }

    fn current_series(&self, gen: impl Fn(i64) -> Gen, lo: i64, hi: i64) -> OpSeries<S> {
        let n = self.dim();
        OpSeries::from_terms(
            SVar::ZInv,
            n,
            n,
            hi + 1,
            (lo..=hi).map(|m| (m + 1, self.act(gen(m)))),
        )
    }

    pub fn map_scalars<T: Scalar>(&self, f: impl Fn(&S) -> T) -> YModule<T> {
        YModule {
            shift: self.shift,
            window: self.window,
            grading: self.grading.clone(),
            tables: self.tables.iter().map(|(g, m)| (*g, m.map(&f))).collect(),
            lost: self.lost.clone(),
        }
    }

    /// Columns whose images under the whole chain (applied right to left)
    /// never touch a lost column of any factor.
    pub fn chain_safe(&self, chain: &[Gen]) -> BTreeSet<usize> {
        let mut safe = BTreeSet::new();
        'col: for j in 0..self.dim() {
            let mut supp: BTreeSet<usize> = [j].into();
            for g in chain.iter().rev() {
                if let Some(l) = self.lost.get(g) {
                    if supp.iter().any(|s| l.contains(s)) {
                        continue 'col;
                    }
                }
                let t = self.act(*g);
                let mut next = BTreeSet::new();
                for ((r, c), _) in t.iter() {
                    if supp.contains(c) {
                        next.insert(*r);
                    }
                }
                supp = next;
                if supp.is_empty() {
                    break;
                }
            }
            safe.insert(j);
        }
        safe
    }

    fn eval_chain(&self, chain: &[Gen]) -> SpMat<S> {
        let mut acc = SpMat::identity(self.dim());
        for g in chain {
            acc = acc.mul(&self.act(*g));
        }
        acc
    }

    /// Signed sum of generator chains must vanish on every window-safe column.
    fn residual_zero(&self, label: &str, terms: &[(i64, Vec<Gen>)]) -> Result<()> {
        let mut safe: Option<BTreeSet<usize>> = None;
        for (_, chain) in terms {
            let s = self.chain_safe(chain);
            safe = Some(match safe {
                None => s,
                Some(prev) => prev.intersection(&s).copied().collect(),
            });
        }
        let safe = safe.unwrap_or_default();
        let mut acc = SpMat::zero(self.dim(), self.dim());
        for (c, chain) in terms {
            acc = acc.add(&self.eval_chain(chain).scale(&S::from_int(*c)));
        }
        for ((i, j), v) in acc.iter() {
            if safe.contains(j) && !v.is_zero() {
                return Err(Error::Inconsistent(format!(
                    "{label}: nonzero residual at ({i}, {j})"
                )));
            }
        }
        Ok(())
    }

    /// Verify the defining relations on all window-safe columns, plus grading
    /// consistency of every stored table.
    pub fn check_relations(&self) -> Result<()> {
        for (g, t) in &self.tables {
            let delta = match g {
                Gen::Xm(_) => -1,
                Gen::Xi(_) => 0,
                Gen::Xp(_) => 1,
            };
            for ((r, c), _) in t.iter() {
                if self.grading[*r] != self.grading[*c] + delta {
                    return Err(Error::Inconsistent(format!(
                        "{g:?} breaks the grading at ({r}, {c})"
                    )));
                }
            }
        }
        let xmax = self.x_mode_max();
        let ximax = self.xi_mode_max();
        let unit = self.xi_unit_index();
        let xi_lo = unit + 1;
        for p in xi_lo..=ximax {
            for q in (p + 1)..=ximax {
                self.residual_zero(
                    &format!("[ξ_{p}, ξ_{q}]"),
                    &[(1, vec![Gen::Xi(p), Gen::Xi(q)]), (-1, vec![Gen::Xi(q), Gen::Xi(p)])],
                )?;
            }
        }
        for m in 0..=xmax {
            for n in 0..=xmax {
                if m + n > ximax {
                    continue;
                }
                self.residual_zero(
                    &format!("[x⁺_{m}, x⁻_{n}] = ξ_{}", m + n),
                    &[
                        (1, vec![Gen::Xp(m), Gen::Xm(n)]),
                        (-1, vec![Gen::Xm(n), Gen::Xp(m)]),
                        (-1, vec![Gen::Xi(m + n)]),
                    ],
                )?;
            }
        }
        let signed: [(i64, fn(i64) -> Gen); 2] = [(1, Gen::Xp), (-1, Gen::Xm)];
        for (sign, x) in signed {
            let tag = if sign == 1 { "x⁺" } else { "x⁻" };
            for p in (unit - 1)..ximax {
                for n in 0..xmax {
                    self.residual_zero(
                        &format!("[ξ_{}, {tag}_{n}] shift step", p + 1),
                        &[
                            (1, vec![Gen::Xi(p + 1), x(n)]),
                            (-1, vec![x(n), Gen::Xi(p + 1)]),
                            (-1, vec![Gen::Xi(p), x(n + 1)]),
                            (1, vec![x(n + 1), Gen::Xi(p)]),
                            (-sign, vec![Gen::Xi(p), x(n)]),
                            (-sign, vec![x(n), Gen::Xi(p)]),
                        ],
                    )?;
                }
            }
            for m in 0..xmax {
                for n in 0..xmax {
                    self.residual_zero(
                        &format!("[{tag}_{}, {tag}_{n}] degree step", m + 1),
                        &[
                            (1, vec![x(m + 1), x(n)]),
                            (-1, vec![x(n), x(m + 1)]),
                            (-1, vec![x(m), x(n + 1)]),
                            (1, vec![x(n + 1), x(m)]),
                            (-sign, vec![x(m), x(n)]),
                            (-sign, vec![x(n), x(m)]),
                        ],
                    )?;
                }
            }
        }
        Ok(())
    }
}

/// Multisets of modes in 0..=cap with at most `depth` parts, each written as a
/// weakly decreasing vector, ordered by (size, lexicographic).
pub fn bounded_multisets(depth: usize, cap: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for size in 0..=depth {
        out.extend(multisets_exact(size, cap));
    }
    out
}

fn multisets_exact(size: usize, cap: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(size);
    fn go(size: usize, max: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for m in 0..=max {
            cur.push(m);
            go(size, m, cur, out);
            cur.pop();
        }
    }
    go(size, cap, &mut cur, &mut out);
    out.sort();
    out
}

/// Number of multisets of exactly `size` values from 0..=cap, by the
/// stars-and-bars recurrence.
pub fn bounded_multiset_count(size: usize, cap: i64) -> u64 {
    let mut dp = vec![0u64; size + 1];
    dp[0] = 1;
    for _ in 0..=cap {
        for k in 1..=size {
            dp[k] += dp[k - 1];
        }
    }
    dp[size]
}

/// Diagonal ξ eigenvalues on a highest-weight vector, expanded at z = ∞.
#[derive(Clone)]
struct XiEigen {
    unit: i64,
    vals: BTreeMap<i64, Rat>,
}

impl XiEigen {
    fn at(&self, p: i64) -> Rat {
        if p < self.unit {
            return Rat::zero();
        }
        if p == self.unit {
            return Rat::one();
        }
        self.vals
            .get(&p)
            .cloned()
            .unwrap_or_else(|| panic!("ξ eigenvalue at index {p} not tabulated"))
    }
}

fn xi_eigen(f: &LWeight<Rat>, p_max: i64) -> Result<XiEigen> {
    assert_eq!(f.rank(), 1, "rank one only");
    assert_eq!(f.side(), Side::Yangian, "additive parameters expected");
    let unit = -f.coweight().0[0] - 1;
    let order = p_max + 2;
    let z_minus = |a: &Rat| {
        let mut s = Series::monomial(SVar::ZInv, -1, Rat::one());
        s = s.add(&Series::monomial(SVar::ZInv, 0, a.neg()));
        s
    };
    let mut s = Series::one(SVar::ZInv).truncate(order);
    for (_, a) in f.num_factors() {
        s = s.mul(&z_minus(a));
    }
    for (_, b) in f.den_factors() {
        s = s.mul(&z_minus(b).truncate(order).inv()?);
    }
    let s = s.truncate(order);
    if !s.coeff(unit + 1).sub(&Rat::one()).is_zero() {
        return Err(Error::Inconsistent(
            "leading ξ eigenvalue is not 1; coweight mismatch".into(),
        ));
    }
    let mut vals = BTreeMap::new();
    for p in unit..=p_max {
        vals.insert(p, s.coeff(p + 1));
    }
    Ok(XiEigen { unit, vals })
}

/// Combination of canonical lowering monomials; `lost` records that some
/// contribution was dropped for exceeding the mode cap, so the kept terms,
/// while individually exact, do not tell the whole story.
struct Expansion {
    terms: Vec<(Vec<i64>, Rat)>,
    lost: bool,
}

type ExpRef = Rc<Expansion>;

/// Action of generators on lowering monomials applied to a highest weight
/// vector. Normal ordering is only ever invoked on two-letter words; longer
/// words are handled by composing memoized columns. An uncapped expander is
/// exact; a capped one discards monomials with a mode above the cap (flagging
/// them), which keeps intermediate supports inside the capped basis.
struct Expander {
    pbw: Pbw,
    eigen: XiEigen,
    mode_cap: i64,
    rewrite_memo: HashMap<(Gen, i64), Vec<(Word, Rat)>>,
    straight_memo: HashMap<(i64, Vec<i64>), ExpRef>,
    expand_memo: HashMap<(Gen, Vec<i64>), ExpRef>,
}

impl Expander {
    fn new(shift: i64, eigen: XiEigen, mode_cap: i64) -> Self {
        Expander {
            pbw: Pbw::new(shift, i64::MAX / 4),
            eigen,
            mode_cap,
            rewrite_memo: HashMap::new(),
            straight_memo: HashMap::new(),
            expand_memo: HashMap::new(),
        }
    }

    fn uncapped(shift: i64, eigen: XiEigen) -> Self {
        Self::new(shift, eigen, i64::MAX / 4)
    }

    /// Canonical form of the two-letter word g·x⁻_m.
    fn rewrite2(&mut self, g: Gen, m: i64) -> Vec<(Word, Rat)> {
        if let Some(hit) = self.rewrite_memo.get(&(g, m)) {
            return hit.clone();
        }
        let red = self.pbw.normal_order(&[g, Gen::Xm(m)]);
        debug_assert!(!red.lost, "uncapped reduction cannot lose terms");
        let out: Vec<(Word, Rat)> = red.el.terms.into_iter().collect();
        self.rewrite_memo.insert((g, m), out.clone());
        out
    }

    /// x⁻_n applied to a weakly decreasing monomial, straightened back into
    /// the canonical basis. Corrections only move mode pairs closer together,
    /// so the recursion descends in the sum of squared modes. Every monomial
    /// in the whole engine is created here, which makes this the one place
    /// the mode cap is enforced.
    fn straighten(&mut self, n: i64, w: &[i64]) -> ExpRef {
        if w.is_empty() || n >= w[0] {
            if n > self.mode_cap {
                return Rc::new(Expansion { terms: Vec::new(), lost: true });
            }
            let mut out = Vec::with_capacity(w.len() + 1);
            out.push(n);
            out.extend_from_slice(w);
            return Rc::new(Expansion {
                terms: vec![(out, Rat::one())],
                lost: false,
            });
        }
        let key = (n, w.to_vec());
        if let Some(hit) = self.straight_memo.get(&key) {
            return hit.clone();
        }
        let rw = self.rewrite2(Gen::Xm(n), w[0]);
        let out = self.combine(rw, &w[1..]);
        self.straight_memo.insert(key, out.clone());
        out
    }

    /// g applied to a canonical monomial acting on the highest weight vector,
    /// as a combination of canonical monomials.
    fn expand(&mut self, g: Gen, w: &[i64]) -> ExpRef {
        if let Gen::Xm(n) = g {
            return self.straighten(n, w);
        }
        if w.is_empty() {
            let terms = match g {
                Gen::Xp(_) => Vec::new(),
                Gen::Xi(p) => {
                    let v = self.eigen.at(p);
                    if v.is_zero() {
                        Vec::new()
                    } else {
                        vec![(Vec::new(), v)]
                    }
                }
                Gen::Xm(_) => unreachable!(),
            };
            return Rc::new(Expansion { terms, lost: false });
        }
        let key = (g, w.to_vec());
        if let Some(hit) = self.expand_memo.get(&key) {
            return hit.clone();
        }
        let rw = self.rewrite2(g, w[0]);
        let out = self.combine(rw, &w[1..]);
        self.expand_memo.insert(key, out.clone());
        out
    }

    /// Apply each canonical rewrite word to the remaining monomial, letters
    /// right to left, and merge. Raising and diagonal letters only occur
    /// rightmost in the rewrite of g·x⁻_m, so the recursive expand always
    /// sees a strictly shorter monomial.
    fn combine(&mut self, rewrite: Vec<(Word, Rat)>, rest: &[i64]) -> ExpRef {
        let mut acc: BTreeMap<Vec<i64>, Rat> = BTreeMap::new();
        let mut lost = false;
        for (cw, c) in rewrite {
            let mut layer = vec![(rest.to_vec(), c)];
            for letter in cw.iter().rev() {
                let mut next = Vec::new();
                for (u, k) in layer {
                    let sub = match letter {
                        Gen::Xm(e) => self.straighten(*e, &u),
                        _ => self.expand(*letter, &u),
                    };
                    lost |= sub.lost;
                    for (v, c2) in &sub.terms {
                        next.push((v.clone(), k.mul(c2)));
                    }
                }
                layer = next;
            }
            for (v, k) in layer {
                merge_term(&mut acc, v, k);
            }
        }
        Rc::new(Expansion {
            terms: acc.into_iter().collect(),
            lost,
        })
    }
}

fn merge_term(acc: &mut BTreeMap<Vec<i64>, Rat>, v: Vec<i64>, k: Rat) {
    if k.is_zero() {
        return;
    }
    match acc.get_mut(&v) {
        Some(old) => {
            *old = old.add(&k);
            if old.is_zero() {
                acc.remove(&v);
            }
        }
        None => {
            acc.insert(v, k);
        }
    }
}

fn table_gens(cap: i64, unit: i64) -> Vec<Gen> {
    let mut gens: Vec<Gen> = (0..=cap).map(Gen::Xm).collect();
    gens.extend((0..=cap).map(Gen::Xp));
    gens.extend(((unit + 1)..=(2 * cap)).map(Gen::Xi));
    gens
}

/// Sparse action table stored column-wise while a module is under
/// construction, with a lost flag per column.
struct ColTable {
    cols: Vec<Vec<(usize, Rat)>>,
    lost: Vec<bool>,
}

impl ColTable {
    fn zero(dim: usize) -> Self {
        ColTable {
            cols: vec![Vec::new(); dim],
            lost: vec![false; dim],
        }
    }

    /// Apply to a sparse vector; trips the lost flag on contact with a lost
    /// column.
    fn apply(&self, v: &SpVec) -> SpVec {
        let mut acc: BTreeMap<usize, Rat> = BTreeMap::new();
        let mut lost = v.lost;
        for (i, c) in &v.terms {
            if self.lost[*i] {
                lost = true;
            }
            for (r, a) in &self.cols[*i] {
                merge_at(&mut acc, *r, c.mul(a));
            }
        }
        SpVec {
            terms: acc.into_iter().collect(),
            lost,
        }
    }

    fn into_mat(self, dim: usize) -> (SpMat<Rat>, BTreeSet<usize>) {
        let mut mat = SpMat::zero(dim, dim);
        for (j, col) in self.cols.iter().enumerate() {
            for (r, v) in col {
                mat.add_to(*r, j, v);
            }
        }
        let lost = self
            .lost
            .iter()
            .enumerate()
            .filter_map(|(j, &l)| l.then_some(j))
            .collect();
        (mat, lost)
    }
}

#[derive(Clone)]
struct SpVec {
    terms: Vec<(usize, Rat)>,
    lost: bool,
}

impl SpVec {
    fn unit(i: usize) -> Self {
        SpVec {
            terms: vec![(i, Rat::one())],
            lost: false,
        }
    }

    fn add(&self, other: &Self) -> Self {
        let mut acc: BTreeMap<usize, Rat> = BTreeMap::new();
        for (i, c) in self.terms.iter().chain(&other.terms) {
            merge_at(&mut acc, *i, c.clone());
        }
        SpVec {
            terms: acc.into_iter().collect(),
            lost: self.lost || other.lost,
        }
    }

    fn sub(&self, other: &Self) -> Self {
        let neg = SpVec {
            terms: other.terms.iter().map(|(i, c)| (*i, c.neg())).collect(),
            lost: other.lost,
        };
        self.add(&neg)
    }
}

fn merge_at(acc: &mut BTreeMap<usize, Rat>, i: usize, v: Rat) {
    if v.is_zero() {
        return;
    }
    match acc.get_mut(&i) {
        Some(old) => {
            *old = old.add(&v);
            if old.is_zero() {
                acc.remove(&i);
            }
        }
        None => {
            acc.insert(i, v);
        }
    }
}

/// Universal highest-weight module of the given weight on the mode-capped
/// monomial basis. A column is marked lost when some contribution to its
/// image fell outside the window during reduction; kept columns are exact.
///
/// Lowering tables come from straightening; the diagonal family is then
/// built upward with the shift relation as a matrix identity, and raising
/// tables follow from the mixed-bracket relation. Only two-letter words ever
/// touch the rewriting engine.
pub fn verma(f: &LWeight<Rat>, window: &Window) -> Result<YModule<Rat>> {
    let cap = window.mode_cap;
    let depth = window.depth;
    let shift = f.coweight().0[0];
    let unit = -shift - 1;
    let eigen = xi_eigen(f, cap * (depth as i64 + 2) + 4)?;
    let mut ex = Expander::new(shift, eigen.clone(), cap);
    let basis = bounded_multisets(depth, cap);
    let dim = basis.len();
    let index: HashMap<Vec<i64>, usize> =
        basis.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
    let suffix: Vec<usize> = basis
        .iter()
        .map(|w| if w.is_empty() { 0 } else { index[&w[1..].to_vec()] })
        .collect();
    let grading = basis.iter().map(|w| -(w.len() as i64)).collect();

    let mut xm: Vec<ColTable> = Vec::new();
    for n in 0..=cap {
        let mut t = ColTable::zero(dim);
        for (j, w) in basis.iter().enumerate() {
            if w.len() == depth {
                t.lost[j] = true;
                continue;
            }
            let exp = ex.straighten(n, w);
            debug_assert!(!exp.lost, "insertion below the cap cannot overflow");
            t.cols[j] = exp
                .terms
                .iter()
                .map(|(u, c)| (index[u], c.clone()))
                .collect();
        }
        xm.push(t);
    }

    // ξ_{p+1} column at x⁻_m·w' from the ξ_p tables:
    //   ξ_{p+1} x⁻_m = x⁻_m ξ_{p+1} + [ξ_p, x⁻_{m+1}] - ξ_p x⁻_m - x⁻_m ξ_p
    let mut xi: Vec<ColTable> = Vec::new();
    for p in (unit + 1)..=(2 * cap) {
        let mut t = ColTable::zero(dim);
        let prev = xi.last();
        let apply_prev = |v: &SpVec| match prev {
            Some(tbl) => tbl.apply(v),
            None => v.clone(),
        };
        for (j, w) in basis.iter().enumerate() {
            if w.is_empty() {
                let v = eigen.at(p);
                if !v.is_zero() {
                    t.cols[j] = vec![(0, v)];
                }
                continue;
            }
            let m = w[0] as usize;
            let jp = suffix[j];
            let e = SpVec::unit(jp);
            let carried = xm[m].apply(&SpVec {
                terms: t.cols[jp].clone(),
                lost: t.lost[jp],
            });
            let prev_e = apply_prev(&e);
            let mut col = carried
                .sub(&apply_prev(&xm[m].apply(&e)))
                .sub(&xm[m].apply(&prev_e));
            if prev.is_some() {
                // [ξ_p, x⁻_{m+1}] vanishes identically at the unit index
                if m as i64 + 1 > cap {
                    col.lost = true;
                } else {
                    let bracket = apply_prev(&xm[m + 1].apply(&e))
                        .sub(&xm[m + 1].apply(&prev_e));
                    col = col.add(&bracket);
                }
            }
            t.cols[j] = col.terms;
            t.lost[j] = col.lost;
        }
        xi.push(t);
    }

    // x⁺_n column at x⁻_m·w': x⁺_n x⁻_m = x⁻_m x⁺_n + ξ_{n+m}
    let mut xp: Vec<ColTable> = Vec::new();
    for n in 0..=cap {
        let mut t = ColTable::zero(dim);
        for (j, w) in basis.iter().enumerate() {
            if w.is_empty() {
                continue;
            }
            let m = w[0] as usize;
            let jp = suffix[j];
            let carried = xm[m].apply(&SpVec {
                terms: t.cols[jp].clone(),
                lost: t.lost[jp],
            });
            let q = n + m as i64;
            let diag = if q < unit {
                SpVec { terms: Vec::new(), lost: false }
            } else if q == unit {
                SpVec::unit(jp)
            } else {
                let tbl = &xi[(q - unit - 1) as usize];
                SpVec {
                    terms: tbl.cols[jp].clone(),
                    lost: tbl.lost[jp],
                }
            };
            let col = carried.add(&diag);
            t.cols[j] = col.terms;
            t.lost[j] = col.lost;
        }
        xp.push(t);
    }

    let mut module = YModule::new(shift, *window, grading);
    for (n, t) in xm.into_iter().enumerate() {
        let (mat, lost) = t.into_mat(dim);
        module.set_table(Gen::Xm(n as i64), mat, lost);
    }
    for (i, t) in xi.into_iter().enumerate() {
        let (mat, lost) = t.into_mat(dim);
        module.set_table(Gen::Xi(unit + 1 + i as i64), mat, lost);
    }
    for (n, t) in xp.into_iter().enumerate() {
        let (mat, lost) = t.into_mat(dim);
        module.set_table(Gen::Xp(n as i64), mat, lost);
    }
    Ok(module)
}

/// Contravariant pairings of lowering monomials, memoized across a whole
/// quotient construction. Modes are not capped here, so the values are exact.
struct PairingTable {
    ex: Expander,
    pair_memo: HashMap<(Vec<i64>, Vec<i64>), Rat>,
}

impl PairingTable {
    fn new(shift: i64, eigen: XiEigen) -> Self {
        PairingTable {
            ex: Expander::uncapped(shift, eigen),
            pair_memo: HashMap::new(),
        }
    }

    fn expand(&mut self, g: Gen, w: &[i64]) -> ExpRef {
        let out = self.ex.expand(g, w);
        debug_assert!(!out.lost, "uncapped expansion cannot lose terms");
        out
    }

    /// ⟨b_w, b_v⟩ under the contravariant form with ⟨top, top⟩ = 1.
    fn pair(&mut self, w: &[i64], v: &[i64]) -> Rat {
        if w.len() != v.len() {
            return Rat::zero();
        }
        if w.is_empty() {
            return Rat::one();
        }
        let key = (w.to_vec(), v.to_vec());
        if let Some(hit) = self.pair_memo.get(&key) {
            return hit.clone();
        }
        let terms = self.expand(Gen::Xp(v[0]), w);
        let mut acc = Rat::zero();
        for (u, c) in &terms.terms {
            acc = acc.add(&c.mul(&self.pair(u, &v[1..])));
        }
        self.pair_memo.insert(key, acc.clone());
        acc
    }
}

/// Irreducible quotient of the highest-weight module: the radical of the
/// contravariant form is removed depth by depth, and actions are projected
/// back through the form.
pub fn irreducible(f: &LWeight<Rat>, window: &Window) -> Result<YModule<Rat>> {
    let cap = window.mode_cap;
    let depth = window.depth;
    let shift = f.coweight().0[0];
    let unit = -shift - 1;
    let eigen = xi_eigen(f, 2 * cap * (depth as i64 + 1) + 4)?;
    let mut pt = PairingTable::new(shift, eigen);
    let mut retained: Vec<Vec<Vec<i64>>> = Vec::new();
    let mut gram_ret: Vec<SpMat<Rat>> = Vec::new();
    for d in 0..=depth {
        let words = multisets_exact(d, cap);
        let n = words.len();
        let mut g = SpMat::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                let v = pt.pair(&words[i], &words[j]);
                if !v.is_zero() {
                    g.set(i, j, v);
                }
            }
        }
        if g != g.transpose() {
            return Err(Error::Inconsistent("contravariant form is not symmetric".into()));
        }
        let piv = linalg::column_pivots(&g)?;
        retained.push(piv.iter().map(|&c| words[c].clone()).collect());
        gram_ret.push(g.select(&piv, &piv));
    }
    let mut offsets = Vec::with_capacity(depth + 2);
    let mut words_global: Vec<Vec<i64>> = Vec::new();
    let mut grading: Vec<i64> = Vec::new();
    for (d, words) in retained.iter().enumerate() {
        offsets.push(words_global.len());
        words_global.extend(words.iter().cloned());
        grading.extend(std::iter::repeat_n(-(d as i64), words.len()));
    }
    let dim = words_global.len();
    let mut module = YModule::new(shift, *window, grading);
    for g in table_gens(cap, unit) {
        let mut mat = SpMat::zero(dim, dim);
        let mut lost = BTreeSet::new();
        for (j, w) in words_global.iter().enumerate() {
            let d = w.len();
            let dt = match g {
                Gen::Xm(_) => d + 1,
                Gen::Xi(_) => d,
                Gen::Xp(_) => {
                    if d == 0 {
                        continue;
                    }
                    d - 1
                }
            };
            if dt > depth {
                lost.insert(j);
                continue;
            }
            let terms = pt.expand(g, w);
            let rhs: Vec<Rat> = retained[dt]
                .iter()
                .map(|bw| {
                    let mut acc = Rat::zero();
                    for (u, c) in &terms.terms {
                        acc = acc.add(&c.mul(&pt.pair(bw, u)));
                    }
                    acc
                })
                .collect();
            match linalg::solve(&gram_ret[dt], &rhs)? {
                Solve::Unique(gamma) => {
                    for (i, val) in gamma.into_iter().enumerate() {
                        if !val.is_zero() {
                            mat.add_to(offsets[dt] + i, j, &val);
                        }
                    }
                }
                _ => {
                    return Err(Error::Inconsistent(
                        "form is degenerate on the retained basis".into(),
                    ))
                }
            }
        }
        module.set_table(g, mat, lost);
    }
    Ok(module)
}

/// Two-dimensional evaluation module with parameter a: x⁺ maps the lower
/// basis vector to the top, ξ_p acts by a^p (1, -1) for p ≥ 0.
pub fn two_dim<S: Scalar>(a: &S, window: &Window) -> YModule<S> {
    let cap = window.mode_cap;
    let mut module = YModule::new(0, *window, vec![0, -1]);
    for n in 0..=cap {
        let an = int_pow(a, n as u32);
        module.set_table(Gen::Xm(n), SpMat::single(2, 2, 1, 0, an.clone()), BTreeSet::new());
        module.set_table(Gen::Xp(n), SpMat::single(2, 2, 0, 1, an), BTreeSet::new());
    }
    for p in 0..=(2 * cap) {
        let ap = int_pow(a, p as u32);
        let m = SpMat::from_entries(2, 2, [(0, 0, ap.clone()), (1, 1, ap.neg())]);
        module.set_table(Gen::Xi(p), m, BTreeSet::new());
    }
    module
}

/// (z - r_0)(z - r_1)··· as coefficients of ascending powers of z.
fn poly_from_roots<S: Scalar>(roots: &[S]) -> Vec<S> {
    let mut c = vec![S::one()];
    for r in roots {
        let mut next = vec![S::zero(); c.len() + 1];
        for (k, v) in c.iter().enumerate() {
            next[k + 1] = next[k + 1].add(v);
            next[k] = next[k].sub(&r.mul(v));
        }
        c = next;
    }
    c
}

/// One-dimensional module with ξ(z) the monic polynomial with the given roots.
pub fn one_dim<S: Scalar>(roots: &[S], window: &Window) -> YModule<S> {
    let cap = window.mode_cap;
    let d = roots.len() as i64;
    let coeffs = poly_from_roots(roots);
    let mut module = YModule::new(d, *window, vec![0]);
    for n in 0..=cap {
        module.set_table(Gen::Xm(n), SpMat::zero(1, 1), BTreeSet::new());
        module.set_table(Gen::Xp(n), SpMat::zero(1, 1), BTreeSet::new());
    }
    for p in -d..=(2 * cap) {
        let mut m = SpMat::zero(1, 1);
        if p < 0 {
            let v = coeffs[(-p - 1) as usize].clone();
            if !v.is_zero() {
                m.set(0, 0, v);
            }
        }
        module.set_table(Gen::Xi(p), m, BTreeSet::new());
    }
    module
}

fn rdiv(a: &Rat, b: i64) -> Rat {
    a.mul(&Rat::int(b).try_inv().expect("nonzero divisor"))
}

/// Negative prefundamental module: the irreducible quotient of highest weight
/// 1/z, with one-dimensional weight spaces v_0, v_1, ..., v_depth and the
/// normalization x⁻_0 v_k = (k+1) v_{k+1}.
///
/// All tables follow from that seed row by the defining relations; the shape
/// is validated against the quotient construction in tests.
pub fn neg_prefund(window: &Window) -> YModule<Rat> {
    let k_max = window.depth;
    let cap = window.mode_cap;
    assert!(cap >= 1, "mode cap below 1 leaves ξ underdetermined");
    let caps = cap as usize;
    // cm[n][k]: coefficient of x⁻_n from v_k to v_{k+1}
    let mut cm = vec![vec![Rat::zero(); k_max.max(1)]; caps + 1];
    for k in 0..k_max {
        cm[0][k] = Rat::int(k as i64 + 1);
    }
    for k in 0..k_max.saturating_sub(1) {
        let kk = k as i64;
        // bracket of the two lowest modes: [x⁻_1, x⁻_0] = -(x⁻_0)²
        cm[1][k + 1] = rdiv(
            &cm[1][k].mul(&Rat::int(kk + 2)).sub(&Rat::int((kk + 1) * (kk + 2))),
            kk + 1,
        );
    }
    for m in 1..caps {
        for k in 0..k_max.saturating_sub(1) {
            let kk = k as i64;
            let mut rhs = cm[m + 1][k].mul(&Rat::int(kk + 2));
            rhs = rhs.add(&cm[1][k].mul(&cm[m][k + 1]));
            rhs = rhs.sub(&cm[m][k].mul(&cm[1][k + 1]));
            rhs = rhs.sub(&cm[m][k + 1].mul(&Rat::int(kk + 1)));
            rhs = rhs.sub(&cm[m][k].mul(&Rat::int(kk + 2)));
            cm[m + 1][k + 1] = rdiv(&rhs, kk + 1);
        }
    }
    // cp[m][k]: coefficient of x⁺_m from v_k to v_{k-1}; index 0 unused
    let mut cp = vec![vec![Rat::zero(); k_max + 1]; caps + 1];
    for k in 1..=k_max {
        cp[0][k] = Rat::one();
    }
    for k in 2..=k_max {
        cp[1][k] = cp[1][k - 1].sub(&Rat::one());
    }
    for m in 1..caps {
        for k in 2..=k_max {
            let swap = cp[1][k].mul(&cp[m][k - 1]).sub(&cp[m][k].mul(&cp[1][k - 1]));
            let sym = cp[m][k - 1].add(&cp[m][k]);
            cp[m + 1][k] = cp[m + 1][k - 1].sub(&swap).sub(&sym);
        }
    }
    // e[p][k]: diagonal ξ_p eigenvalue on v_k; e[0] is the unit row
    let ximax = (2 * cap) as usize;
    let mut e = vec![vec![Rat::zero(); k_max + 1]; ximax + 1];
    for k in 0..=k_max {
        e[0][k] = Rat::one();
    }
    for p in 0..ximax {
        for k in 0..k_max {
            let kk = k as i64;
            let step = e[p][k + 1].sub(&e[p][k]);
            let v = e[p + 1][k]
                .add(&rdiv(&cm[1][k].mul(&step), kk + 1))
                .sub(&e[p][k + 1])
                .sub(&e[p][k]);
            e[p + 1][k + 1] = v;
        }
    }
    let dim = k_max + 1;
    let grading = (0..dim).map(|k| -(k as i64)).collect();
    let mut module = YModule::new(-1, *window, grading);
    for (n, row) in cm.iter().enumerate() {
        let mut mat = SpMat::zero(dim, dim);
        for (k, v) in row.iter().enumerate().take(k_max) {
            if !v.is_zero() {
                mat.set(k + 1, k, v.clone());
            }
        }
        module.set_table(Gen::Xm(n as i64), mat, [k_max].into());
    }
    for (m, row) in cp.iter().enumerate() {
        let mut mat = SpMat::zero(dim, dim);
        for (k, v) in row.iter().enumerate().skip(1) {
            if !v.is_zero() {
                mat.set(k - 1, k, v.clone());
            }
        }
        module.set_table(Gen::Xp(m as i64), mat, BTreeSet::new());
    }
    for (p, row) in e.iter().enumerate().skip(1) {
        let mut mat = SpMat::zero(dim, dim);
        for (k, v) in row.iter().enumerate() {
            if !v.is_zero() {
                mat.set(k, k, v.clone());
            }
        }
        module.set_table(Gen::Xi(p as i64), mat, BTreeSet::new());
    }
    module
}

fn lost_union(a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> BTreeSet<usize> {
    a.union(b).copied().collect()
}

/// Lost columns of a composition: apply `inner` first, then anything whose
/// support meets `outer_lost`.
fn lost_mul<S: Scalar>(
    outer_lost: &BTreeSet<usize>,
    inner: &SpMat<S>,
    inner_lost: &BTreeSet<usize>,
) -> BTreeSet<usize> {
    let mut out = inner_lost.clone();
    for ((r, c), _) in inner.iter() {
        if outer_lost.contains(r) {
            out.insert(*c);
        }
    }
    out
}

fn kron_lost(la: &BTreeSet<usize>, da: usize, db: usize, lb: &BTreeSet<usize>) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for &ja in la {
        for jb in 0..db {
            out.insert(ja * db + jb);
        }
    }
    for ja in 0..da {
        for &jb in lb {
            out.insert(ja * db + jb);
        }
    }
    out
}

/// Operator tables paired with their lost columns, for building derived
/// tables by arithmetic while tracking window leakage.
#[derive(Clone)]
struct Tracked<S: Scalar> {
    m: SpMat<S>,
    lost: BTreeSet<usize>,
}

impl<S: Scalar> Tracked<S> {
    fn add(&self, other: &Self) -> Self {
        Tracked {
            m: self.m.add(&other.m),
            lost: lost_union(&self.lost, &other.lost),
        }
    }

    fn mul(&self, other: &Self) -> Self {
        Tracked {
            m: self.m.mul(&other.m),
            lost: lost_mul(&self.lost, &other.m, &other.lost),
        }
    }

    fn commutator(&self, other: &Self) -> Self {
        let ab = self.mul(other);
        let ba = other.mul(self);
        Tracked {
            m: ab.m.sub(&ba.m),
            lost: lost_union(&ab.lost, &ba.lost),
        }
    }

    fn scale(&self, c: &S) -> Self {
        Tracked {
            m: self.m.scale(c),
            lost: self.lost.clone(),
        }
    }
}

/// Tensor product of two unshifted modules under the current coproduct:
/// x⁻_0, x⁺_0, ξ_0 are primitive, the first nontrivial ξ term mixes the
/// factors, and all higher modes follow by bracketing.
pub fn tensor<S: Scalar>(a: &YModule<S>, b: &YModule<S>) -> Result<YModule<S>> {
    if a.shift() != 0 || b.shift() != 0 {
        return Err(Error::Invalid("tensor factors must be unshifted".into()));
    }
    let cap = a.x_mode_max().min(b.x_mode_max());
    if cap < 1 || a.xi_mode_max() < 1 || b.xi_mode_max() < 1 {
        return Err(Error::Invalid("tensor factors need modes up to 1".into()));
    }
    let (da, db) = (a.dim(), b.dim());
    let dim = da * db;
    let grading: Vec<i64> = (0..dim)
        .map(|j| a.grading()[j / db] + b.grading()[j % db])
        .collect();
    let lift_a = |g: Gen| Tracked {
        m: a.act(g).kron(&SpMat::identity(db)),
        lost: kron_lost(&a.lost_cols(g), da, db, &BTreeSet::new()),
    };
    let lift_b = |g: Gen| Tracked {
        m: SpMat::identity(da).kron(&b.act(g)),
        lost: kron_lost(&BTreeSet::new(), da, db, &b.lost_cols(g)),
    };
    let pair_ab = |ga: Gen, gb: Gen| Tracked {
        m: a.act(ga).kron(&b.act(gb)),
        lost: kron_lost(&a.lost_cols(ga), da, db, &b.lost_cols(gb)),
    };
    let primitive = |g: Gen| lift_a(g).add(&lift_b(g));
    let mut xm = vec![primitive(Gen::Xm(0))];
    let mut xp = vec![primitive(Gen::Xp(0))];
    let xi0 = primitive(Gen::Xi(0));
    let xi1 = primitive(Gen::Xi(1))
        .add(&pair_ab(Gen::Xi(0), Gen::Xi(0)))
        .add(&pair_ab(Gen::Xm(0), Gen::Xp(0)).scale(&S::from_int(-2)));
    let half = S::from_int(2).try_inv().expect("2 must be invertible");
    for n in 0..cap as usize {
        let p = xi1
            .commutator(&xp[n])
            .add(&xi0.mul(&xp[n]).scale(&S::from_int(-1)))
            .add(&xp[n].mul(&xi0).scale(&S::from_int(-1)))
            .scale(&half);
        xp.push(p);
        let m = xi1
            .commutator(&xm[n])
            .add(&xi0.mul(&xm[n]))
            .add(&xm[n].mul(&xi0))
            .scale(&half.neg());
        xm.push(m);
    }
    let mut xi = vec![xi0, xi1];
    for p in 2..=(2 * cap) {
        let hi = p.min(cap) as usize;
        let lo = (p - p.min(cap)) as usize;
        xi.push(xp[hi].commutator(&xm[lo]));
    }
    let window = Window {
        order: a.window().order.min(b.window().order),
        depth: a.window().depth + b.window().depth,
        mode_cap: cap,
    };
    let mut module = YModule::new(0, window, grading);
    for (n, t) in xm.into_iter().enumerate() {
        module.set_table(Gen::Xm(n as i64), t.m, t.lost);
    }
    for (n, t) in xp.into_iter().enumerate() {
        module.set_table(Gen::Xp(n as i64), t.m, t.lost);
    }
    for (p, t) in xi.into_iter().enumerate() {
        module.set_table(Gen::Xi(p as i64), t.m, t.lost);
    }
    Ok(module)
}

/// Solve for the coefficient of the x⁻⊗x⁺ mixing term in the coproduct's
/// first nontrivial ξ component, using that [Δx⁺_1, Δx⁻_0] = Δξ_1 on the
/// square of the two-dimensional module. The residual is affine in the
/// coefficient; its unique zero is the production constant.
pub fn coproduct_mixed_constant(window: &Window) -> Result<Rat> {
    let m = two_dim(&Rat::zero(), window);
    let (da, db) = (m.dim(), m.dim());
    let lift_a = |g: Gen| m.act(g).kron(&SpMat::identity(db));
    let lift_b = |g: Gen| SpMat::identity(da).kron(&m.act(g));
    let primitive = |g: Gen| lift_a(g).add(&lift_b(g));
    let residual = |c: &Rat| {
        let xm0 = primitive(Gen::Xm(0));
        let xp0 = primitive(Gen::Xp(0));
        let xi0 = primitive(Gen::Xi(0));
        let xi1 = primitive(Gen::Xi(1))
            .add(&m.act(Gen::Xi(0)).kron(&m.act(Gen::Xi(0))))
            .add(&m.act(Gen::Xm(0)).kron(&m.act(Gen::Xp(0))).scale(c));
        let xp1 = xi1
            .commutator(&xp0)
            .sub(&xi0.mul(&xp0))
            .sub(&xp0.mul(&xi0))
            .scale(&rdiv(&Rat::one(), 2));
        xp1.commutator(&xm0).sub(&xi1)
    };
    let r0 = residual(&Rat::zero());
    let r1 = residual(&Rat::one()).sub(&r0);
    let mut c: Option<Rat> = None;
    for ((i, j), v) in r1.iter() {
        let cand = r0.get(*i, *j).neg().mul(&v.try_inv().ok_or_else(|| {
            Error::NotInvertible("degenerate residual entry".into())
        })?);
        match &c {
            None => c = Some(cand),
            Some(prev) if prev.sub(&cand).is_zero() => {}
            _ => return Err(Error::Inconsistent("mixing term is overdetermined".into())),
        }
    }
    let c = c.ok_or_else(|| Error::Inconsistent("residual does not see the mixing term".into()))?;
    if !r0.add(&r1.scale(&c)).is_zero() {
        return Err(Error::Inconsistent("no consistent mixing coefficient".into()));
    }
    Ok(c)
}

/// Which side the one-dimensional factor of a tensor product sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OneDimSide {
    Left,
    Right,
}

/// Tensor with a one-dimensional module of the given polynomial weight,
/// realized as a twist: ξ(z) picks up the polynomial, and the lowering
/// (right factor) or raising (left factor) current is multiplied by it with
/// negative powers of z kept.
pub fn tensor_one_dim<S: Scalar>(
    m: &YModule<S>,
    roots: &[S],
    side: OneDimSide,
) -> Result<YModule<S>> {
    let d = roots.len() as i64;
    if d == 0 {
        return Ok(m.clone());
    }
    let coeffs = poly_from_roots(roots);
    // e_j multiplies z^{d-j}
    let ej = |j: i64| coeffs[(d - j) as usize].clone();
    let cap = m.x_mode_max();
    let ximax = m.xi_mode_max();
    if cap < d {
        return Err(Error::Invalid("mode cap too small for this twist".into()));
    }
    let shift = m.shift() + d;
    let mut module = YModule::new(shift, *m.window(), m.grading().to_vec());
    let twist = |gen: fn(i64) -> Gen, n: i64| {
        let mut acc = SpMat::zero(m.dim(), m.dim());
        let mut lost = BTreeSet::new();
        for j in 0..=d {
            let c = ej(j);
            if c.is_zero() {
                continue;
            }
            acc = acc.add(&m.act(gen(n + d - j)).scale(&c));
            lost = lost_union(&lost, &m.lost_cols(gen(n + d - j)));
        }
        (acc, lost)
    };
    for n in 0..=(cap - d) {
        let (tm, tl) = match side {
            OneDimSide::Right => twist(Gen::Xm, n),
            OneDimSide::Left => twist(Gen::Xp, n),
        };
        match side {
            OneDimSide::Right => module.set_table(Gen::Xm(n), tm, tl),
            OneDimSide::Left => module.set_table(Gen::Xp(n), tm, tl),
        }
    }
    for n in 0..=cap {
        match side {
            OneDimSide::Right => module.set_table(Gen::Xp(n), m.act(Gen::Xp(n)), m.lost_cols(Gen::Xp(n))),
            OneDimSide::Left => module.set_table(Gen::Xm(n), m.act(Gen::Xm(n)), m.lost_cols(Gen::Xm(n))),
        }
    }
    let new_unit = -shift - 1;
    for p in (new_unit + 1)..=(ximax - d) {
        let (tm, tl) = twist(Gen::Xi, p);
        module.set_table(Gen::Xi(p), tm, tl);
    }
    Ok(module)
}

impl<S: Scalar> YModule<S> {
    /// Spectral deformation: every mode p is replaced by the binomial sum
    /// Σ_n C(p, n) w^n X_{p-n}, shifting the argument of all currents by w.
    pub fn deform(&self, w: &S) -> YModule<S> {
        let unit = self.xi_unit_index();
        let mut out = YModule::new(self.shift, self.window, self.grading.clone());
        let max_span = self
            .tables
            .keys()
            .map(|g| match g {
                Gen::Xm(n) | Gen::Xp(n) => *n,
                Gen::Xi(p) => p - unit,
            })
            .max()
            .unwrap_or(0)
            .max(0) as usize;
        let mut wpow = vec![S::one()];
        for _ in 0..max_span {
            wpow.push(wpow.last().unwrap().mul(w));
        }
        for (g, _) in self.tables.iter() {
            let (lo, p0) = match g {
                Gen::Xm(n) | Gen::Xp(n) => (0i64, *n),
                Gen::Xi(p) => (unit, *p),
            };
            let mut acc = SpMat::zero(self.dim(), self.dim());
            let mut lost = BTreeSet::new();
            for t in lo..=p0 {
                let k = (p0 - t) as usize;
                let c: S = binom(p0, k as u32);
                let term = match g {
                    Gen::Xm(_) => Gen::Xm(t),
                    Gen::Xp(_) => Gen::Xp(t),
                    Gen::Xi(_) => Gen::Xi(t),
                };
                acc = acc.add(&self.act(term).scale(&c.mul(&wpow[k])));
                lost = lost_union(&lost, &self.lost_cols(term));
            }
            out.set_table(*g, acc, lost);
        }
        out
    }

    /// Pull back along the shift embedding that raises the x⁻ and ξ mode
    /// indexes by one; the resulting module lives one coweight step up.
    pub fn restrict_minus(&self) -> YModule<S> {
        self.restrict(true)
    }

    /// Mirror pullback raising the x⁺ and ξ modes.
    pub fn restrict_plus(&self) -> YModule<S> {
        self.restrict(false)
    }

    fn restrict(&self, minus: bool) -> YModule<S> {
        let mut out = YModule::new(self.shift + 1, self.window, self.grading.clone());
        let cap = self.x_mode_max();
        let ximax = self.xi_mode_max();
        for n in 0..=cap {
            let (shifted, kept) = if minus {
                (Gen::Xm(n), Gen::Xp(n))
            } else {
                (Gen::Xp(n), Gen::Xm(n))
            };
            if n < cap {
                let src = if minus { Gen::Xm(n + 1) } else { Gen::Xp(n + 1) };
                out.set_table(shifted, self.act(src), self.lost_cols(src));
            }
            out.set_table(kept, self.act(kept), self.lost_cols(kept));
        }
        let new_unit = -(self.shift + 1) - 1;
        for p in (new_unit + 1)..=(ximax - 1) {
            out.set_table(Gen::Xi(p), self.act(Gen::Xi(p + 1)), self.lost_cols(Gen::Xi(p + 1)));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn win(order: i64, depth: usize, cap: i64) -> Window {
        Window::new(order, depth).with_mode_cap(cap)
    }

    fn inv_prefund_weight() -> LWeight<Rat> {
        LWeight::prefund(Side::Yangian, 1, 0, Rat::zero()).inv()
    }

    #[test]
    fn multiset_count_matches_enumeration() {
        for cap in 0..5 {
            for size in 0..6 {
                assert_eq!(
                    bounded_multiset_count(size, cap),
                    multisets_exact(size, cap).len() as u64
                );
            }
        }
    }

    #[test]
    fn highest_weight_module_dimensions_and_relations() {
        let f = inv_prefund_weight();
        let w = win(8, 3, 3);
        let m = verma(&f, &w).unwrap();
        let expected: usize = (0..=3).map(|k| bounded_multiset_count(k, 3) as usize).sum();
        assert_eq!(m.dim(), expected);
        assert_eq!(m.shift(), -1);
        m.check_relations().unwrap();
    }

    #[test]
    fn quotient_of_inverse_prefund_weight_is_a_chain() {
        let f = inv_prefund_weight();
        let m = irreducible(&f, &win(8, 4, 2)).unwrap();
        assert_eq!(m.dim(), 5);
        assert_eq!(m.grading(), &[0, -1, -2, -3, -4]);
        m.check_relations().unwrap();
        // the retained basis is (x⁻_0)^k ω, so x⁻_0 has unit subdiagonal
        // entries and x⁺_0 counts the depth
        for k in 0..4usize {
            assert_eq!(m.act(Gen::Xm(0)).get(k + 1, k), Rat::one());
            assert_eq!(m.act(Gen::Xp(0)).get(k, k + 1), Rat::int(k as i64 + 1));
        }
    }

    #[test]
    fn chain_module_matches_quotient_up_to_rescaling() {
        let w = win(8, 4, 2);
        let a = neg_prefund(&w);
        a.check_relations().unwrap();
        let b = irreducible(&inv_prefund_weight(), &w).unwrap();
        // a: x⁻_0 v_k = (k+1) v_{k+1}; b: x⁻_0 b_k = b_{k+1}; so b_k = k! v_k
        let mut d = vec![Rat::one()];
        for k in 1..=4i64 {
            d.push(d.last().unwrap().mul(&Rat::int(k)));
        }
        let conj = |m: &SpMat<Rat>| {
            let mut out = SpMat::zero(5, 5);
            for ((i, j), v) in m.iter() {
                out.set(*i, *j, v.mul(&d[*i]).mul(&d[*j].try_inv().unwrap()));
            }
            out
        };
        for g in [Gen::Xm(1), Gen::Xm(2), Gen::Xp(0), Gen::Xp(1), Gen::Xi(1), Gen::Xi(2)] {
            let lhs = conj(&b.act(g));
            let rhs = a.act(g);
            let cols: Vec<usize> = (0..5)
                .filter(|j| !a.lost_cols(g).contains(j) && !b.lost_cols(g).contains(j))
                .collect();
            let all: Vec<usize> = (0..5).collect();
            assert_eq!(lhs.select(&all, &cols), rhs.select(&all, &cols), "{g:?}");
        }
    }

    #[test]
    fn chain_module_small_tables() {
        let m = neg_prefund(&win(8, 5, 3));
        m.check_relations().unwrap();
        // frozen values derived from the defining relations by hand
        for k in 0..5 {
            assert_eq!(m.act(Gen::Xm(0)).get(k + 1, k), Rat::int(k as i64 + 1));
            let kk = k as i64 + 1;
            assert_eq!(m.act(Gen::Xi(1)).get(k + 1, k + 1), Rat::int(-2 * kk));
            assert_eq!(m.act(Gen::Xi(2)).get(k + 1, k + 1), Rat::int(kk * (3 * kk - 1)));
        }
        assert_eq!(m.act(Gen::Xm(1)).get(2, 1), Rat::int(-2));
        assert_eq!(m.act(Gen::Xp(1)).get(2, 3), Rat::int(-2));
    }

    #[test]
    fn evaluation_module_relations_and_weight() {
        let w = win(8, 2, 4);
        let m = two_dim(&Rat::int(3), &w);
        m.check_relations().unwrap();
        // top channel of ξ(z) expands (z - 2)/(z - 3)
        let top = m.xi_series().entry(0, 0);
        let num = Series::monomial(SVar::ZInv, -1, Rat::one())
            .add(&Series::monomial(SVar::ZInv, 0, Rat::int(-2)));
        let den = Series::monomial(SVar::ZInv, -1, Rat::one())
            .add(&Series::monomial(SVar::ZInv, 0, Rat::int(-3)));
        let expect = num.mul(&den.truncate(top.order()).inv().unwrap());
        assert!(top.sub(&expect.truncate(top.order())).is_zero_known());
    }

    #[test]
    fn deformation_shifts_roots_and_matches_direct_table() {
        let w = win(8, 2, 3);
        let d = one_dim(&[Rat::int(2), Rat::int(5)], &w).deform(&Rat::int(3));
        let direct = one_dim(&[Rat::int(5), Rat::int(8)], &w);
        for p in -2..=6 {
            assert_eq!(d.act(Gen::Xi(p)), direct.act(Gen::Xi(p)), "ξ_{p}");
        }
        let a = two_dim(&Rat::int(2), &w);
        let b = two_dim(&Rat::zero(), &w).deform(&Rat::int(2));
        for n in 0..=3 {
            assert_eq!(a.act(Gen::Xm(n)), b.act(Gen::Xm(n)));
            assert_eq!(a.act(Gen::Xp(n)), b.act(Gen::Xp(n)));
        }
        for p in 0..=6 {
            assert_eq!(a.act(Gen::Xi(p)), b.act(Gen::Xi(p)));
        }
    }

    #[test]
    fn tensor_square_of_evaluation_module() {
        let w = win(8, 2, 3);
        let m = two_dim(&Rat::zero(), &w);
        let t = tensor(&m, &m).unwrap();
        assert_eq!(t.dim(), 4);
        assert_eq!(t.grading(), &[0, -1, -1, -2]);
        t.check_relations().unwrap();
    }

    #[test]
    fn mixing_coefficient_is_determined() {
        assert_eq!(coproduct_mixed_constant(&win(8, 2, 2)).unwrap(), Rat::int(-2));
    }

    #[test]
    fn tensor_with_one_dim_twists_the_lowering_current() {
        let w = win(8, 4, 3);
        let n = neg_prefund(&w);
        let y = Rat::frac(3, 2);
        let t = tensor_one_dim(&n, &[y.clone()], OneDimSide::Right).unwrap();
        assert_eq!(t.shift(), 0);
        t.check_relations().unwrap();
        // x̃⁻_n = x⁻_{n+1} - y x⁻_n
        for nn in 0..=2i64 {
            let expect = n.act(Gen::Xm(nn + 1)).sub(&n.act(Gen::Xm(nn)).scale(&y));
            assert_eq!(t.act(Gen::Xm(nn)), expect);
        }
        let left = tensor_one_dim(&n, &[y], OneDimSide::Left).unwrap();
        left.check_relations().unwrap();
        assert_eq!(left.act(Gen::Xm(2)), n.act(Gen::Xm(2)));
    }

    #[test]
    fn shift_embedding_pullbacks() {
        let w = win(8, 2, 3);
        let m = two_dim(&Rat::int(2), &w);
        let r = m.restrict_minus();
        assert_eq!(r.shift(), 1);
        r.check_relations().unwrap();
        for n in 0..=2 {
            assert_eq!(r.act(Gen::Xm(n)), m.act(Gen::Xm(n + 1)));
            assert_eq!(r.act(Gen::Xp(n)), m.act(Gen::Xp(n)));
        }
        assert_eq!(r.act(Gen::Xi(-1)), m.act(Gen::Xi(0)));
        let rp = m.restrict_plus();
        rp.check_relations().unwrap();
        assert_eq!(rp.act(Gen::Xp(0)), m.act(Gen::Xp(1)));
    }

    #[test]
    fn verma_mode_cap_marks_lost_columns() {
        let f = inv_prefund_weight();
        let m = verma(&f, &win(8, 2, 2)).unwrap();
        // applying ξ_2 to the column of x⁻_2 x⁻_2 ω overflows the mode cap
        let top_mode_col = bounded_multisets(2, 2)
            .iter()
            .position(|w| w == &vec![2, 2])
            .unwrap();
        assert!(m.lost_cols(Gen::Xi(4)).contains(&top_mode_col));
        // while the plain weight action keeps it
        assert!(!m.lost_cols(Gen::Xi(1)).contains(&top_mode_col));
    }
}
