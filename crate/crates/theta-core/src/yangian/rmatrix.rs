//! Braiding between a deformed two-dimensional module and a chain module,
//! solved exactly as a matrix polynomial in the spectral variable.
//!
//! Source and target carry one-sided tensor structures: the chain factor has
//! its lowering modes raised by one on the source and its raising modes raised
//! by one on the target, so both tensors are unshifted and the missing mode
//! zero acts on a single leg.  The lowering equations determine every slot
//! from the normalized top entry; the result is certified afterwards against
//! every tabulated generator, and composes with the closed one-dimensional
//! twist leg into the three-factor morphism.

use std::collections::{BTreeMap, BTreeSet};

use super::gklo::{cartan_tower, transfer, transfer_from_bottom};
use super::module::{tensor, tensor_one_dim, OneDimSide, YModule};
use super::pbw::Gen;
use crate::arith::linalg::{self, Solve};
use crate::arith::mpoly::{MPoly, Var};
use crate::arith::rat::Rat;
use crate::arith::scalar::Scalar;
use crate::arith::sparse::SpMat;
use crate::error::{Error, Result};

type P = MPoly<Rat>;

/// Solved braiding from (finite ⊗ chain)-indices to (chain ⊗ finite)-indices.
/// Entries are polynomial in `Var::Z`; slots of depth at most `depth_cap` are
/// certified, deeper ones are outside the solved ansatz.
pub struct Braiding {
    mat: SpMat<P>,
    fin: YModule<P>,
    chain: YModule<P>,
    depth_cap: i64,
}

impl Braiding {
    pub fn mat(&self) -> &SpMat<P> {
        &self.mat
    }

    pub fn fin(&self) -> &YModule<P> {
        &self.fin
    }

    pub fn chain(&self) -> &YModule<P> {
        &self.chain
    }

    pub fn depth_cap(&self) -> i64 {
        self.depth_cap
    }

    /// Chain-sized block taking the finite-factor column index `j` to the
    /// finite-factor row index `i`.
    pub fn block(&self, i: usize, j: usize) -> SpMat<P> {
        let df = self.fin.dim();
        let dc = self.chain.dim();
        let mut out = SpMat::zero(dc, dc);
        for r in 0..dc {
            for c in 0..dc {
                let v = self.mat.get(r * df + i, j * dc + c);
                if !v.is_zero() {
                    out.set(r, c, v);
                }
            }
        }
        out
    }
}

fn depths<S: Scalar>(m: &YModule<S>) -> Vec<i64> {
    m.grading().iter().map(|g| -g).collect()
}

/// One generator acting on the paired tensor structures, with the columns
/// each table lost to truncation.
struct GenAction {
    label: Gen,
    a: SpMat<P>,
    a_lost: BTreeSet<usize>,
    b: SpMat<P>,
    b_lost: BTreeSet<usize>,
}

/// Generator actions of the common algebra on the one-sided tensors.  Modes
/// above zero relabel down by one into the unshifted tables; the mode-zero
/// lowering acts on the chain leg alone at the source, the mode-zero raising
/// on the chain leg alone at the target.
fn mixed_generator_actions(
    fin: &YModule<P>,
    chain: &YModule<P>,
    ts: &YModule<P>,
    td: &YModule<P>,
) -> Vec<GenAction> {
    let df = fin.dim();
    let dc = chain.dim();
    let mut out = Vec::new();

    out.push(GenAction {
        label: Gen::Xm(0),
        a: SpMat::identity(df).kron(&chain.act(Gen::Xm(0))),
        a_lost: chain
            .lost_cols(Gen::Xm(0))
            .iter()
            .flat_map(|c| (0..df).map(move |j| j * dc + c))
            .collect(),
        b: td.act(Gen::Xm(0)),
        b_lost: td.lost_cols(Gen::Xm(0)),
    });
    let mut n = 1;
    while ts.has_table(Gen::Xm(n - 1)) && td.has_table(Gen::Xm(n)) {
        out.push(GenAction {
            label: Gen::Xm(n),
            a: ts.act(Gen::Xm(n - 1)),
            a_lost: ts.lost_cols(Gen::Xm(n - 1)),
            b: td.act(Gen::Xm(n)),
            b_lost: td.lost_cols(Gen::Xm(n)),
        });
        n += 1;
    }

    out.push(GenAction {
        label: Gen::Xp(0),
        a: ts.act(Gen::Xp(0)),
        a_lost: ts.lost_cols(Gen::Xp(0)),
        b: chain.act(Gen::Xp(0)).kron(&SpMat::identity(df)),
        b_lost: chain
            .lost_cols(Gen::Xp(0))
            .iter()
            .flat_map(|c| (0..df).map(move |j| c * df + j))
            .collect(),
    });
    let mut n = 1;
    while ts.has_table(Gen::Xp(n)) && td.has_table(Gen::Xp(n - 1)) {
        out.push(GenAction {
            label: Gen::Xp(n),
            a: ts.act(Gen::Xp(n)),
            a_lost: ts.lost_cols(Gen::Xp(n)),
            b: td.act(Gen::Xp(n - 1)),
            b_lost: td.lost_cols(Gen::Xp(n - 1)),
        });
        n += 1;
    }

    let mut p = 1;
    while ts.has_table(Gen::Xi(p - 1)) && td.has_table(Gen::Xi(p - 1)) {
        out.push(GenAction {
            label: Gen::Xi(p),
            a: ts.act(Gen::Xi(p - 1)),
            a_lost: ts.lost_cols(Gen::Xi(p - 1)),
            b: td.act(Gen::Xi(p - 1)),
            b_lost: td.lost_cols(Gen::Xi(p - 1)),
        });
        p += 1;
    }
    out
}

/// Intertwining residuals over the certified region.  A column is skipped for
/// a generator when its source action lost it or the target action lost a row
/// of matching depth.
fn residual_ok(
    mat: &SpMat<P>,
    dsrc: &[i64],
    ddst: &[i64],
    cap: i64,
    gens: &[GenAction],
) -> Result<()> {
    for ga in gens {
        let diff = mat.mul(&ga.a).sub(&ga.b.mul(mat));
        for ((i, c), v) in diff.iter() {
            if v.is_zero() || ddst[*i] > cap || dsrc[*c] > cap {
                continue;
            }
            if ga.a_lost.contains(c) || ga.b_lost.iter().any(|j| ddst[*j] == dsrc[*c]) {
                continue;
            }
            return Err(Error::Inconsistent(format!(
                "braiding residual at ({}, {}) for {:?}",
                i, c, ga.label
            )));
        }
    }
    Ok(())
}

fn z_coeffs(v: &P) -> Result<Vec<(usize, Rat)>> {
    let mut out = Vec::new();
    for (e, p) in v.coeffs_of(Var::Z) {
        let c = p.as_scalar().ok_or_else(|| {
            Error::Invalid("tensor table entry mixes variables beyond the spectral one".into())
        })?;
        if !c.is_zero() {
            out.push((e as usize, c));
        }
    }
    Ok(out)
}

/// Solve for the braiding with entries polynomial in `Var::Z` of degree at
/// most `z_deg`.  The finite factor must be unshifted and the chain factor
/// must carry shift minus one; the top-to-top entry is normalized to one.
pub fn solve_braiding(fin: &YModule<P>, chain: &YModule<P>, z_deg: u16) -> Result<Braiding> {
    if fin.shift() != 0 || chain.shift() != -1 {
        return Err(Error::Invalid(
            "braiding needs an unshifted finite factor and a shift minus-one chain factor".into(),
        ));
    }
    let ts = tensor(fin, &chain.restrict_minus())?;
    let td = tensor(&chain.restrict_plus(), fin)?;
    let dsrc = depths(&ts);
    let ddst = depths(&td);
    // The deepest slot has no sound determining equation; stop one short.
    let cap = dsrc.iter().copied().max().unwrap_or(0) - 1;

    let mut slots: Vec<(usize, usize)> = Vec::new();
    let mut slots_by_src: Vec<Vec<(usize, usize)>> = vec![Vec::new(); dsrc.len()];
    let mut slots_by_dst: Vec<Vec<(usize, usize)>> = vec![Vec::new(); ddst.len()];
    for i in 0..ddst.len() {
        for j in 0..dsrc.len() {
            if ddst[i] == dsrc[j] && dsrc[j] <= cap {
                let s = slots.len();
                slots_by_src[j].push((s, i));
                slots_by_dst[i].push((s, j));
                slots.push((i, j));
            }
        }
    }
    let nd = z_deg as usize + 1;

    let gens = mixed_generator_actions(fin, chain, &ts, &td);
    // The chain-leg lowering and the mode-one mixing lowering reach every
    // slot from the top one; the rest of the list is verification only.
    let solving: Vec<&GenAction> = gens
        .iter()
        .filter(|ga| ga.label == Gen::Xm(0) || ga.label == Gen::Xm(1))
        .collect();

    let col_ok = |ga: &GenAction, c: usize| {
        dsrc[c] <= cap
            && !ga.a_lost.contains(&c)
            && !ga.b_lost.iter().any(|j| ddst[*j] == dsrc[c])
    };

    let mut rows: BTreeMap<(usize, usize, usize, usize), BTreeMap<usize, Rat>> = BTreeMap::new();
    for (gi, ga) in solving.iter().enumerate() {
        for ((j, c), val) in ga.a.iter() {
            if !col_ok(ga, *c) {
                continue;
            }
            for (e, ce) in z_coeffs(val)? {
                for (s, i) in &slots_by_src[*j] {
                    for d in 0..nd {
                        let row = rows.entry((gi, *i, *c, e + d)).or_default();
                        let cur = row.entry(s * nd + d).or_insert_with(Rat::zero);
                        *cur = cur.add(&ce);
                    }
                }
            }
        }
        for ((i, jp), val) in ga.b.iter() {
            if ddst[*i] > cap {
                continue;
            }
            for (e, ce) in z_coeffs(val)? {
                for (s, c) in &slots_by_dst[*jp] {
                    if !col_ok(ga, *c) {
                        continue;
                    }
                    for d in 0..nd {
                        let row = rows.entry((gi, *i, *c, e + d)).or_default();
                        let cur = row.entry(s * nd + d).or_insert_with(Rat::zero);
                        *cur = cur.sub(&ce);
                    }
                }
            }
        }
    }

    let mut eqs: Vec<BTreeMap<usize, Rat>> = rows.into_values().collect();
    let mut rhs = vec![Rat::zero(); eqs.len()];
    let top = slots
        .iter()
        .position(|&(i, j)| i == 0 && j == 0)
        .ok_or_else(|| Error::Invalid("no top-to-top slot in the braiding ansatz".into()))?;
    for d in 0..nd {
        let mut row = BTreeMap::new();
        row.insert(top * nd + d, Rat::one());
        eqs.push(row);
        rhs.push(if d == 0 { Rat::one() } else { Rat::zero() });
    }

    let nunk = slots.len() * nd;
    let mut sys = SpMat::zero(eqs.len(), nunk);
    for (r, row) in eqs.iter().enumerate() {
        for (u, v) in row {
            if !v.is_zero() {
                sys.set(r, *u, v.clone());
            }
        }
    }
    let sol = match linalg::solve(&sys, &rhs)? {
        Solve::Unique(s) => s,
        Solve::None => {
            return Err(Error::Inconsistent(
                "braiding equations have no solution".into(),
            ))
        }
        Solve::Many => {
            return Err(Error::NonUnique(
                "braiding equations leave free slots".into(),
            ))
        }
    };

    let mut mat = SpMat::zero(ddst.len(), dsrc.len());
    for (s, &(i, j)) in slots.iter().enumerate() {
        let mut entry = P::zero();
        for d in 0..nd {
            let c = &sol[s * nd + d];
            if !c.is_zero() {
                entry = entry.add(&P::scalar(c.clone()).mul_var_pow(Var::Z, d as u16));
            }
        }
        if !entry.is_zero() {
            mat.set(i, j, entry);
        }
    }

    residual_ok(&mat, &dsrc, &ddst, cap, &gens)?;
    Ok(Braiding {
        mat,
        fin: fin.clone(),
        chain: chain.clone(),
        depth_cap: cap,
    })
}

/// Re-certify a braiding against every tabulated generator of its one-sided
/// tensor structures.
pub fn check_braiding(b: &Braiding) -> Result<()> {
    let ts = tensor(&b.fin, &b.chain.restrict_minus())?;
    let td = tensor(&b.chain.restrict_plus(), &b.fin)?;
    let gens = mixed_generator_actions(&b.fin, &b.chain, &ts, &td);
    residual_ok(&b.mat, &depths(&ts), &depths(&td), b.depth_cap, &gens)
}

/// Collapse a polynomial operator series into a matrix over `var`: the part
/// at argument power `r` contributes with `var^r`.
fn assemble_poly(op: &crate::arith::opseries::OpSeries<P>, var: Var) -> Result<SpMat<P>> {
    let parts = op.poly_parts()?;
    let mut out = SpMat::zero(op.rows(), op.cols());
    for (k, m) in parts {
        out = out.add(&m.map(|v| v.mul_var_pow(var, k as u16)));
    }
    Ok(out)
}

/// Compose the braiding with the closed one-dimensional twist leg in
/// `Var::W`: the normalized inverse bottom transfer of the finite factor,
/// lifted over the chain leg, then the inverse mixing exponential.  An empty
/// root list means the trivial weight; otherwise only the monic linear weight
/// at the origin arises.
pub fn compose_with_one_dim_twist(b: &Braiding, p_roots: &[P]) -> Result<Braiding> {
    if p_roots.is_empty() {
        return Ok(Braiding {
            mat: b.mat.clone(),
            fin: b.fin.clone(),
            chain: b.chain.clone(),
            depth_cap: b.depth_cap,
        });
    }
    if p_roots.len() != 1 || !p_roots[0].is_zero() {
        return Err(Error::Invalid(
            "one-dimensional twist is supported for the monic linear weight at the origin".into(),
        ));
    }
    let tower = cartan_tower(&b.fin)?;
    // The finite factor is deformed by the spectral variable, so its bottom
    // transfer already carries the shifted argument; assembling in the twist
    // variable yields the operator at twist minus spectral directly.
    let tt = transfer_from_bottom(&b.fin, &tower, p_roots)?.normalized_inverse();
    let lifted = SpMat::identity(b.chain.dim()).kron(&assemble_poly(&tt, Var::W)?);

    // Inverse mixing exponential; the cross term is nilpotent.
    let x = b.chain.act(Gen::Xm(0)).kron(&b.fin.act(Gen::Xp(0)));
    let dim = lifted.rows();
    let mut theta_inv = SpMat::identity(dim);
    let mut term = SpMat::identity(dim);
    let mut k = 1i64;
    loop {
        term = term.mul(&x).map(|v| v.div_int(k)).neg();
        if term.is_zero() {
            break;
        }
        theta_inv = theta_inv.add(&term);
        k += 1;
    }

    Ok(Braiding {
        mat: theta_inv.mul(&lifted).mul(&b.mat),
        fin: b.fin.clone(),
        chain: b.chain.clone(),
        depth_cap: b.depth_cap,
    })
}

fn shared_generator_actions(src: &YModule<P>, dst: &YModule<P>) -> Vec<GenAction> {
    let mut out = Vec::new();
    let mut n = 0;
    while src.has_table(Gen::Xm(n)) && dst.has_table(Gen::Xm(n)) {
        out.push(GenAction {
            label: Gen::Xm(n),
            a: src.act(Gen::Xm(n)),
            a_lost: src.lost_cols(Gen::Xm(n)),
            b: dst.act(Gen::Xm(n)),
            b_lost: dst.lost_cols(Gen::Xm(n)),
        });
        n += 1;
    }
    let mut n = 0;
    while src.has_table(Gen::Xp(n)) && dst.has_table(Gen::Xp(n)) {
        out.push(GenAction {
            label: Gen::Xp(n),
            a: src.act(Gen::Xp(n)),
            a_lost: src.lost_cols(Gen::Xp(n)),
            b: dst.act(Gen::Xp(n)),
            b_lost: dst.lost_cols(Gen::Xp(n)),
        });
        n += 1;
    }
    let mut p = 0;
    while src.has_table(Gen::Xi(p)) && dst.has_table(Gen::Xi(p)) {
        out.push(GenAction {
            label: Gen::Xi(p),
            a: src.act(Gen::Xi(p)),
            a_lost: src.lost_cols(Gen::Xi(p)),
            b: dst.act(Gen::Xi(p)),
            b_lost: dst.lost_cols(Gen::Xi(p)),
        });
        p += 1;
    }
    out
}

/// Certify the composed operator as a morphism between the plain tensor
/// structures against the chain factor twisted by the one-dimensional weight,
/// whose root gains the twist variable.
pub fn check_composed_intertwining(c: &Braiding, p_roots: &[P]) -> Result<()> {
    if p_roots.is_empty() {
        return check_braiding(c);
    }
    let w = P::var(Var::W);
    let n2_roots: Vec<P> = p_roots.iter().map(|r| r.add(&w)).collect();
    let n2 = tensor_one_dim(&c.chain, &n2_roots, OneDimSide::Right)?;
    let src2 = tensor(&c.fin, &n2)?;
    let dst2 = tensor(&n2, &c.fin)?;
    let gens = shared_generator_actions(&src2, &dst2);
    if gens.is_empty() {
        return Err(Error::Invalid("no shared generator tables to certify".into()));
    }
    residual_ok(&c.mat, &depths(&src2), &depths(&dst2), c.depth_cap, &gens)
}

fn entries_match(lhs: &SpMat<P>, rhs: &SpMat<P>, skip: &BTreeSet<usize>, what: &str) -> Result<()> {
    let diff = lhs.sub(rhs);
    for ((i, c), v) in diff.iter() {
        if !v.is_zero() && !skip.contains(c) {
            return Err(Error::Inconsistent(format!(
                "{what} mismatch at ({i}, {c})"
            )));
        }
    }
    Ok(())
}

/// Both bracketings of the one-dimensional weight against the pair agree:
/// twisting the one-sided tensor tables mode-wise equals the plain tensor
/// with the twisted chain factor, on each side.
pub fn check_one_dim_associativity(
    fin: &YModule<P>,
    chain: &YModule<P>,
    p_root: &P,
) -> Result<()> {
    if fin.shift() != 0 || chain.shift() != -1 {
        return Err(Error::Invalid(
            "associativity check needs an unshifted finite factor and a shift minus-one chain"
                .into(),
        ));
    }
    let y = p_root.add(&P::var(Var::W));
    let roots = [y.clone()];
    let df = fin.dim();
    let dc = chain.dim();
    let ts = tensor(fin, &chain.restrict_minus())?;
    let td = tensor(&chain.restrict_plus(), fin)?;

    // Source side: the twist multiplies the lowering and Cartan families of
    // the mixed tables.
    let n2 = tensor_one_dim(chain, &roots, OneDimSide::Right)?;
    let src2 = tensor(fin, &n2)?;
    let mixed_xm = |k: i64| {
        if k == 0 {
            SpMat::identity(df).kron(&chain.act(Gen::Xm(0)))
        } else {
            ts.act(Gen::Xm(k - 1))
        }
    };
    let mixed_xm_lost = |k: i64| -> BTreeSet<usize> {
        if k == 0 {
            chain
                .lost_cols(Gen::Xm(0))
                .iter()
                .flat_map(|c| (0..df).map(move |j| j * dc + c))
                .collect()
        } else {
            ts.lost_cols(Gen::Xm(k - 1))
        }
    };
    let mixed_xi = |k: i64| {
        if k == 0 {
            SpMat::identity(df * dc)
        } else {
            ts.act(Gen::Xi(k - 1))
        }
    };
    let mut n = 0;
    while src2.has_table(Gen::Xm(n)) && ts.has_table(Gen::Xm(n)) {
        let lhs = mixed_xm(n + 1).sub(&mixed_xm(n).map(|v| v.mul(&y)));
        let mut skip = mixed_xm_lost(n + 1);
        skip.extend(mixed_xm_lost(n));
        skip.extend(src2.lost_cols(Gen::Xm(n)));
        entries_match(&lhs, &src2.act(Gen::Xm(n)), &skip, "source lowering")?;
        n += 1;
    }
    let mut n = 0;
    while src2.has_table(Gen::Xp(n)) && ts.has_table(Gen::Xp(n)) {
        let mut skip = ts.lost_cols(Gen::Xp(n));
        skip.extend(src2.lost_cols(Gen::Xp(n)));
        entries_match(&ts.act(Gen::Xp(n)), &src2.act(Gen::Xp(n)), &skip, "source raising")?;
        n += 1;
    }
    let mut p = 0;
    while src2.has_table(Gen::Xi(p)) && ts.has_table(Gen::Xi(p)) {
        let lhs = mixed_xi(p + 1).sub(&mixed_xi(p).map(|v| v.mul(&y)));
        let mut skip = if p >= 1 {
            ts.lost_cols(Gen::Xi(p - 1))
        } else {
            BTreeSet::new()
        };
        skip.extend(ts.lost_cols(Gen::Xi(p)));
        skip.extend(src2.lost_cols(Gen::Xi(p)));
        entries_match(&lhs, &src2.act(Gen::Xi(p)), &skip, "source cartan")?;
        p += 1;
    }

    // Target side mirror: the twist multiplies the raising and Cartan
    // families.
    let m2 = tensor_one_dim(chain, &roots, OneDimSide::Left)?;
    let dst2 = tensor(&m2, fin)?;
    let mixed_xp = |k: i64| {
        if k == 0 {
            chain.act(Gen::Xp(0)).kron(&SpMat::identity(df))
        } else {
            td.act(Gen::Xp(k - 1))
        }
    };
    let mixed_xp_lost = |k: i64| -> BTreeSet<usize> {
        if k == 0 {
            chain
                .lost_cols(Gen::Xp(0))
                .iter()
                .flat_map(|c| (0..df).map(move |j| c * df + j))
                .collect()
        } else {
            td.lost_cols(Gen::Xp(k - 1))
        }
    };
    let mixed_xi_d = |k: i64| {
        if k == 0 {
            SpMat::identity(df * dc)
        } else {
            td.act(Gen::Xi(k - 1))
        }
    };
    let mut n = 0;
    while dst2.has_table(Gen::Xp(n)) && td.has_table(Gen::Xp(n)) {
        let lhs = mixed_xp(n + 1).sub(&mixed_xp(n).map(|v| v.mul(&y)));
        let mut skip = mixed_xp_lost(n + 1);
        skip.extend(mixed_xp_lost(n));
        skip.extend(dst2.lost_cols(Gen::Xp(n)));
        entries_match(&lhs, &dst2.act(Gen::Xp(n)), &skip, "target raising")?;
        n += 1;
    }
    let mut n = 0;
    while dst2.has_table(Gen::Xm(n)) && td.has_table(Gen::Xm(n)) {
        let mut skip = td.lost_cols(Gen::Xm(n));
        skip.extend(dst2.lost_cols(Gen::Xm(n)));
        entries_match(&td.act(Gen::Xm(n)), &dst2.act(Gen::Xm(n)), &skip, "target lowering")?;
        n += 1;
    }
    let mut p = 0;
    while dst2.has_table(Gen::Xi(p)) && td.has_table(Gen::Xi(p)) {
        let lhs = mixed_xi_d(p + 1).sub(&mixed_xi_d(p).map(|v| v.mul(&y)));
        let mut skip = if p >= 1 {
            td.lost_cols(Gen::Xi(p - 1))
        } else {
            BTreeSet::new()
        };
        skip.extend(td.lost_cols(Gen::Xi(p)));
        skip.extend(dst2.lost_cols(Gen::Xi(p)));
        entries_match(&lhs, &dst2.act(Gen::Xi(p)), &skip, "target cartan")?;
        p += 1;
    }
    Ok(())
}

/// Block of the braiding on (chain index, bottom finite index) pairs; weight
/// preservation keeps it depth-diagonal.
pub fn lowest_diagonal_entry(b: &Braiding) -> Result<SpMat<P>> {
    let fd = depths(&b.fin);
    let maxd = *fd.iter().max().unwrap_or(&0);
    let bottoms: Vec<usize> = (0..fd.len()).filter(|&i| fd[i] == maxd).collect();
    if bottoms.len() != 1 {
        return Err(Error::Invalid(
            "finite factor needs a one-dimensional bottom weight space".into(),
        ));
    }
    let bottom = bottoms[0];
    let df = b.fin.dim();
    let dc = b.chain.dim();
    let mut t = SpMat::zero(dc, dc);
    for r in 0..dc {
        for c in 0..dc {
            let v = b.mat.get(r * df + bottom, bottom * dc + c);
            if !v.is_zero() {
                t.set(r, c, v);
            }
        }
    }
    Ok(t)
}

/// The lowest-diagonal block intertwines the chain transfers at the two
/// adjacent one-dimensional weights: t composed with the transfer at root
/// zero equals the top eigenvalue times the transfer at root one, and the
/// eigenvalue is monic in the spectral variable.  Compared on indices up to
/// `max_depth`, which must stay within both the braiding certification and
/// the transfer chain's exact range.  Returns the eigenvalue.
pub fn check_lowest_diagonal_identity(
    b: &Braiding,
    transfer_chain: &YModule<P>,
    max_depth: usize,
) -> Result<P> {
    if transfer_chain.dim() != b.chain.dim() {
        return Err(Error::Invalid(
            "transfer chain must match the braiding chain dimension".into(),
        ));
    }
    let t = lowest_diagonal_entry(b)?;
    let bdepth = *depths(&b.fin).iter().max().unwrap_or(&0);
    let rmax = ((b.depth_cap - bdepth).max(0) as usize).min(max_depth);
    for r in 0..=rmax {
        for c in 0..=rmax {
            if r != c && !t.get(r, c).is_zero() {
                return Err(Error::Inconsistent(
                    "lowest diagonal block mixes chain depths".into(),
                ));
            }
        }
    }
    let eigen = t.get(0, 0);
    let lead = eigen
        .coeffs_of(Var::Z)
        .into_iter()
        .next_back()
        .and_then(|(_, c)| c.as_scalar())
        .ok_or_else(|| Error::Invalid("top eigenvalue is not a spectral polynomial".into()))?;
    if !lead.sub(&Rat::one()).is_zero() {
        return Err(Error::Inconsistent("top eigenvalue is not monic".into()));
    }

    let tower = cartan_tower(transfer_chain)?;
    let tn = assemble_poly(
        &transfer(transfer_chain, &tower, &[P::zero()])?.normalized()?,
        Var::Z,
    )?;
    let tm = assemble_poly(
        &transfer(transfer_chain, &tower, &[P::one()])?.normalized()?,
        Var::Z,
    )?;
    for r in 0..=rmax {
        for c in 0..=rmax {
            let lhs = t.get(r, r).mul(&tn.get(r, c));
            let rhs = eigen.mul(&tm.get(r, c));
            if !lhs.sub(&rhs).is_zero() {
                return Err(Error::Inconsistent(format!(
                    "lowest diagonal transfer identity fails at ({r}, {c})"
                )));
            }
        }
    }
    Ok(eigen)
}

/// Deforming after a one-dimensional twist equals twisting by the shifted
/// roots after deforming, on every shared table and on both sides.
pub fn check_spectral_identification<S: Scalar>(
    v: &YModule<S>,
    roots: &[S],
    step: &S,
) -> Result<()> {
    let shifted: Vec<S> = roots.iter().map(|r| r.sub(step)).collect();
    for side in [OneDimSide::Left, OneDimSide::Right] {
        let lhs = tensor_one_dim(&v.deform(step), roots, side)?;
        let rhs = tensor_one_dim(v, &shifted, side)?.deform(step);
        if lhs.shift() != rhs.shift() || lhs.grading() != rhs.grading() {
            return Err(Error::Inconsistent(
                "spectral identification changes the frame".into(),
            ));
        }
        let mut seen = false;
        for fam in [Gen::Xm as fn(i64) -> Gen, Gen::Xp, Gen::Xi] {
            let mut n = 0;
            while lhs.has_table(fam(n)) && rhs.has_table(fam(n)) {
                let g = fam(n);
                let diff = lhs.act(g).sub(&rhs.act(g));
                let mut skip = lhs.lost_cols(g);
                skip.extend(rhs.lost_cols(g));
                for ((i, c), val) in diff.iter() {
                    if !val.is_zero() && !skip.contains(c) {
                        return Err(Error::Inconsistent(format!(
                            "spectral identification fails for {g:?} at ({i}, {c})"
                        )));
                    }
                }
                seen = true;
                n += 1;
            }
        }
        if !seen {
            return Err(Error::Invalid("no shared tables to compare".into()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::yangian::module::{neg_prefund, two_dim};
    use crate::window::Window;

    fn win(order: i64, depth: usize, cap: i64) -> Window {
        Window::new(order, depth).with_mode_cap(cap)
    }

    fn chain_p(depth: usize, cap: i64) -> YModule<P> {
        neg_prefund(&win(4, depth, cap)).map_scalars(|r| P::scalar(r.clone()))
    }

    fn fin_z(depth: usize, cap: i64) -> YModule<P> {
        two_dim(&P::var(Var::Z), &win(4, depth, cap))
    }

    fn rat(n: i64) -> P {
        P::scalar(Rat::int(n))
    }

    fn golden() -> Braiding {
        solve_braiding(&fin_z(2, 4), &chain_p(12, 4), 2).unwrap()
    }

    #[test]
    fn braiding_matches_the_golden_blocks() {
        let b = golden();
        assert_eq!(b.depth_cap(), 12);
        let z = P::var(Var::Z);
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let blk = b.block(i, j);
            for r in 0..=11usize {
                for c in 0..=11usize {
                    let expect = match (i, j) {
                        (0, 0) => {
                            if r == c {
                                rat(1)
                            } else {
                                P::zero()
                            }
                        }
                        (0, 1) => {
                            if r == c + 1 {
                                rat(c as i64 + 1)
                            } else {
                                P::zero()
                            }
                        }
                        (1, 0) => {
                            if r + 1 == c {
                                rat(1)
                            } else {
                                P::zero()
                            }
                        }
                        _ => {
                            if r == c {
                                z.add(&rat(c as i64))
                            } else {
                                P::zero()
                            }
                        }
                    };
                    assert!(
                        blk.get(r, c).sub(&expect).is_zero(),
                        "block ({i},{j}) entry ({r},{c})"
                    );
                }
            }
        }
    }

    #[test]
    fn braiding_certifies_every_generator() {
        let b = golden();
        check_braiding(&b).unwrap();
    }

    #[test]
    fn cleared_inverse_is_polynomial_on_both_sides() {
        let b = golden();
        let z = P::var(Var::Z);
        let df = 2usize;
        let dc = b.chain().dim();
        // Inverse scaled by (z - 1), from the same block conventions.
        let mut pmat = SpMat::zero(df * dc, dc * df);
        for c in 0..dc {
            for r in 0..dc {
                let set = |m: &mut SpMat<P>, j: usize, i: usize, v: P| {
                    if !v.is_zero() {
                        m.set(j * dc + c, r * df + i, v);
                    }
                };
                if c == r {
                    set(&mut pmat, 0, 0, z.add(&rat(c as i64 - 1)));
                    set(&mut pmat, 1, 1, rat(1));
                }
                if c == r + 1 {
                    set(&mut pmat, 0, 1, rat(-(r as i64 + 1)));
                }
                if c + 1 == r {
                    set(&mut pmat, 1, 0, rat(-1));
                }
            }
        }
        let dsrc = depths(&tensor(b.fin(), &b.chain().restrict_minus()).unwrap());
        let scale = z.sub(&rat(1));
        let left = pmat.mul(b.mat());
        for ((i, c), v) in left.iter() {
            if dsrc[*i] > 12 || dsrc[*c] > 12 {
                continue;
            }
            let expect = if i == c { scale.clone() } else { P::zero() };
            assert!(v.sub(&expect).is_zero(), "left product at ({i}, {c})");
        }
        for s in 0..df * dc {
            if dsrc[s] <= 12 {
                assert!(left.get(s, s).sub(&scale).is_zero());
            }
        }
        let ddst = {
            let td = tensor(&b.chain().restrict_plus(), b.fin()).unwrap();
            depths(&td)
        };
        let right = b.mat().mul(&pmat);
        for ((i, c), v) in right.iter() {
            if ddst[*i] > 12 || ddst[*c] > 12 {
                continue;
            }
            let expect = if i == c { scale.clone() } else { P::zero() };
            assert!(v.sub(&expect).is_zero(), "right product at ({i}, {c})");
        }
        for s in 0..df * dc {
            if ddst[s] <= 12 {
                assert!(right.get(s, s).sub(&scale).is_zero());
            }
        }
    }

    #[test]
    fn composed_matches_the_golden_blocks() {
        let b = golden();
        let comp = compose_with_one_dim_twist(&b, &[P::zero()]).unwrap();
        let z = P::var(Var::Z);
        let w = P::var(Var::W);
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let blk = comp.block(i, j);
            for r in 0..=11usize {
                for c in 0..=11usize {
                    let expect = match (i, j) {
                        (0, 0) => {
                            if r == c {
                                z.sub(&w).sub(&rat(c as i64))
                            } else {
                                P::zero()
                            }
                        }
                        (0, 1) => {
                            if r == c + 1 {
                                rat(-(c as i64 + 1)).mul(&w.add(&rat(c as i64)))
                            } else {
                                P::zero()
                            }
                        }
                        (1, 0) => {
                            if r + 1 == c {
                                rat(1)
                            } else {
                                P::zero()
                            }
                        }
                        _ => {
                            if r == c {
                                z.add(&rat(c as i64))
                            } else {
                                P::zero()
                            }
                        }
                    };
                    assert!(
                        blk.get(r, c).sub(&expect).is_zero(),
                        "composed block ({i},{j}) entry ({r},{c})"
                    );
                }
            }
        }
        check_composed_intertwining(&comp, &[P::zero()]).unwrap();
    }

    #[test]
    fn empty_twist_leaves_the_braiding() {
        let b = golden();
        let comp = compose_with_one_dim_twist(&b, &[]).unwrap();
        assert!(comp.mat().sub(b.mat()).is_zero());
        check_composed_intertwining(&comp, &[]).unwrap();
    }

    #[test]
    fn braiding_rejects_wrong_shifts() {
        let c = chain_p(4, 4);
        assert!(solve_braiding(&c, &c, 1).is_err());
    }

    #[test]
    fn one_dim_weight_associates_on_both_sides() {
        let fin = fin_z(2, 4);
        let chain = chain_p(6, 4);
        check_one_dim_associativity(&fin, &chain, &P::zero()).unwrap();
        check_one_dim_associativity(&fin, &chain, &P::scalar(Rat::frac(1, 2))).unwrap();
    }

    #[test]
    fn lowest_diagonal_matches_the_weighted_transfers() {
        let b = golden();
        let t = lowest_diagonal_entry(&b).unwrap();
        let z = P::var(Var::Z);
        for r in 0..=10usize {
            for c in 0..=10usize {
                let expect = if r == c {
                    z.add(&rat(r as i64))
                } else {
                    P::zero()
                };
                assert!(t.get(r, c).sub(&expect).is_zero(), "t entry ({r}, {c})");
            }
        }
        // Exact polynomial transfers on a depth-d chain need mode cap d + 1.
        let tchain = neg_prefund(&win(8, 12, 13)).map_scalars(|r| P::scalar(r.clone()));
        let eigen = check_lowest_diagonal_identity(&b, &tchain, 10).unwrap();
        assert!(eigen.sub(&z).is_zero());
    }

    #[test]
    fn spectral_shift_commutes_with_the_twist() {
        let v2 = two_dim(&P::var(Var::A), &win(4, 2, 4));
        let roots = [P::var(Var::W)];
        let step = P::var(Var::Z);
        check_spectral_identification(&v2, &roots, &step).unwrap();
        check_spectral_identification(&chain_p(6, 4), &roots, &step).unwrap();
    }
}
