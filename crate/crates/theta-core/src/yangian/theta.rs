//! Mixing operators on tensor products: the correction between the tensor
//! transfer and the product of factor transfers.
//!
//! On M⊗N the tensor transfer factors as T^{M⊗N} = (Id⊗T^N)·Θ·(T^M⊗Id), which
//! defines Θ. Solving that relation with the factorwise inverses gives Θ and
//! Θ⁻¹ directly. Both are polynomial in the inverse variable, preserve the
//! total depth, strictly lower the left-factor depth, act as the identity on
//! the depth-preserving component, and obey a per-component degree bound of
//! the polynomial's degree per step; `check_shape` certifies all of this.
//! For the monic linear polynomial with root zero, Θ collapses to the
//! exponential of minus the lowering⊗raising mixing matrix.

use super::gklo::{cartan_tower, transfer, Transfer};
use super::module::{tensor, YModule};
use super::pbw::Gen;
use crate::arith::opseries::OpSeries;
use crate::arith::scalar::Scalar;
use crate::arith::series::{SVar, ORDER_INF};
use crate::arith::sparse::SpMat;
use crate::error::{Error, Result};

/// Mixing operator on a tensor product, with its inverse and the factor
/// depth data needed to decode components.
///
/// Row and column indices factor as i·dim_right + j; the component of an
/// entry is the left-factor depth drop from column to row.
pub struct Theta<S: Scalar> {
    pub op: OpSeries<S>,
    pub op_inv: OpSeries<S>,
    depth_left: Vec<i64>,
    depth_right: Vec<i64>,
}

/// Build the mixing operator for the monic polynomial with the given roots.
pub fn theta<S: Scalar>(
    left: &YModule<S>,
    right: &YModule<S>,
    roots: &[S],
) -> Result<Theta<S>> {
    let prod = tensor(left, right)?;
    let t_left = transfer(left, &cartan_tower(left)?, roots)?;
    let t_right = transfer(right, &cartan_tower(right)?, roots)?;
    let t_prod = transfer(&prod, &cartan_tower(&prod)?, roots)?;
    Ok(theta_from_transfers(left, right, &t_left, &t_right, &t_prod))
}

/// Assemble Θ and Θ⁻¹ from already-built transfers on the factors and the
/// tensor product.
pub fn theta_from_transfers<S: Scalar>(
    left: &YModule<S>,
    right: &YModule<S>,
    t_left: &Transfer<S>,
    t_right: &Transfer<S>,
    t_prod: &Transfer<S>,
) -> Theta<S> {
    let id_l = OpSeries::identity(SVar::ZInv, left.dim(), ORDER_INF);
    let id_r = OpSeries::identity(SVar::ZInv, right.dim(), ORDER_INF);
    let op = id_l
        .kron(&t_right.op_inv)
        .mul(&t_prod.op)
        .mul(&t_left.op_inv.kron(&id_r));
    let op_inv = t_left
        .op
        .kron(&id_r)
        .mul(&t_prod.op_inv)
        .mul(&id_l.kron(&t_right.op));
    Theta {
        op,
        op_inv,
        depth_left: left.grading().iter().map(|g| -g).collect(),
        depth_right: right.grading().iter().map(|g| -g).collect(),
    }
}

impl<S: Scalar> Theta<S> {
    fn dims(&self) -> (usize, usize) {
        (self.depth_left.len(), self.depth_right.len())
    }

    /// Left-factor depth drop of the entry at (row, col).
    fn jump(&self, row: usize, col: usize) -> (i64, i64) {
        let (_, dr) = self.dims();
        let jl = self.depth_left[row / dr] - self.depth_left[col / dr];
        let jr = self.depth_right[row % dr] - self.depth_right[col % dr];
        (jl, jr)
    }

    /// Entries whose left-factor depth drop equals `jump`, as a series.
    pub fn component(&self, jump: i64) -> OpSeries<S> {
        let (dl, dr) = self.dims();
        let n = dl * dr;
        OpSeries::from_terms(
            SVar::ZInv,
            n,
            n,
            self.op.order(),
            self.op.terms().map(|(k, m)| {
                (
                    *k,
                    SpMat::from_entries(
                        n,
                        n,
                        m.iter().filter_map(|((i, j), c)| {
                            (self.jump(*i, *j).0 == jump).then(|| (*i, *j, c.clone()))
                        }),
                    ),
                )
            }),
        )
    }

    /// Largest component index that could be nonzero.
    pub fn max_jump(&self) -> i64 {
        let top = self.depth_left.iter().max().copied().unwrap_or(0);
        let also = self.depth_right.iter().max().copied().unwrap_or(0);
        top.min(also)
    }

    /// Certify polynomiality and the component structure of Θ and Θ⁻¹:
    /// entries that change the total depth vanish, components are strictly
    /// left-lowering, the depth-preserving component is the identity, and
    /// the component lowering by k has degree at most `per_jump`·k. Returns
    /// the largest component index with a nonzero entry in Θ.
    pub fn check_shape(&self, per_jump: i64) -> Result<i64> {
        let a = self.check_shape_of(&self.op, per_jump)?;
        self.check_shape_of(&self.op_inv, per_jump)?;
        Ok(a)
    }

    fn check_shape_of(&self, op: &OpSeries<S>, per_jump: i64) -> Result<i64> {
        let parts = op.poly_parts()?;
        let (dl, dr) = self.dims();
        let mut seen = 0i64;
        for (r, m) in &parts {
            for ((i, j), c) in m.iter() {
                if c.is_zero() {
                    continue;
                }
                let (jl, jr) = self.jump(*i, *j);
                if jl + jr != 0 {
                    return Err(Error::Inconsistent(format!(
                        "entry ({i}, {j}) changes the total depth"
                    )));
                }
                if jl < 0 {
                    return Err(Error::Inconsistent(format!(
                        "entry ({i}, {j}) raises the left factor"
                    )));
                }
                if jl == 0 && (*r > 0 || i != j) {
                    return Err(Error::Inconsistent(format!(
                        "depth-preserving component is not the identity at ({i}, {j})"
                    )));
                }
                if (*r as i64) > per_jump * jl {
                    return Err(Error::Inconsistent(format!(
                        "entry ({i}, {j}) at component {jl} has degree {r}"
                    )));
                }
                seen = seen.max(jl);
            }
        }
        let c0 = parts.get(&0).cloned().unwrap_or_else(|| SpMat::zero(dl * dr, dl * dr));
        for i in 0..dl * dr {
            if c0.get(i, i) != S::one() {
                return Err(Error::Inconsistent(format!(
                    "diagonal entry {i} of the constant part is not one"
                )));
            }
        }
        Ok(seen)
    }
}

/// Σ_k (x⁻₀⊗x⁺₀)ᵏ/k! on a tensor product; terminates by nilpotency.
pub fn mixing_exponential<S: Scalar>(left: &YModule<S>, right: &YModule<S>) -> SpMat<S> {
    let x = left.act(Gen::Xm(0)).kron(&right.act(Gen::Xp(0)));
    let n = x.rows();
    let mut acc = SpMat::identity(n);
    let mut pow = SpMat::identity(n);
    let mut k = 0i64;
    loop {
        k += 1;
        pow = pow.mul(&x).map(|v| v.div_int(k));
        if pow.is_zero() {
            return acc;
        }
        acc = acc.add(&pow);
    }
}

fn certify_zero<S: Scalar>(label: &str, diff: &OpSeries<S>) -> Result<i64> {
    for (k, m) in diff.terms() {
        for ((i, j), c) in m.iter() {
            if !c.is_zero() {
                return Err(Error::Inconsistent(format!(
                    "{label}: nonzero residual at key {k}, entry ({i}, {j})"
                )));
            }
        }
    }
    Ok(diff.order())
}

/// Splitting a polynomial as p = p_a·p_b splits the mixing operator:
/// Θ_p = Ad_{Id⊗T_b}⁻¹(Θ_a) · Ad_{T_a⊗Id}(Θ_b), with T_a the transfer for
/// p_a on the left factor and T_b the transfer for p_b on the right factor.
/// Returns the certified order.
pub fn check_theta_multiplicativity<S: Scalar>(
    left: &YModule<S>,
    right: &YModule<S>,
    roots_a: &[S],
    roots_b: &[S],
) -> Result<i64> {
    let th_a = theta(left, right, roots_a)?;
    let th_b = theta(left, right, roots_b)?;
    let mut all = roots_a.to_vec();
    all.extend_from_slice(roots_b);
    let th_ab = theta(left, right, &all)?;
    let t_a = transfer(left, &cartan_tower(left)?, roots_a)?;
    let t_b = transfer(right, &cartan_tower(right)?, roots_b)?;
    let id_l = OpSeries::identity(SVar::ZInv, left.dim(), ORDER_INF);
    let id_r = OpSeries::identity(SVar::ZInv, right.dim(), ORDER_INF);
    let first = id_l
        .kron(&t_b.op_inv)
        .mul(&th_a.op)
        .mul(&id_l.kron(&t_b.op));
    let second = t_a
        .op
        .kron(&id_r)
        .mul(&th_b.op)
        .mul(&t_a.op_inv.kron(&id_r));
    certify_zero("mixing multiplicativity", &first.mul(&second).sub(&th_ab.op))
}

/// Component recursion for the monic linear polynomial with root zero:
/// [x⁺₀⊗1, Θₙ] = [Θₙ₋₁, 1⊗(x⁺₁−wx⁺₀)] + Θₙ₋₁·(ξ₀⊗x⁺₀). Checks every
/// component the tensor product supports; returns the least certified order.
pub fn check_theta_recursion<S: Scalar>(left: &YModule<S>, right: &YModule<S>) -> Result<i64> {
    let th = theta(left, right, &[S::zero()])?;
    let order = th.op.order();
    let id_l = SpMat::identity(left.dim());
    let id_r = SpMat::identity(right.dim());
    let xp0_left = OpSeries::constant(SVar::ZInv, left.act(Gen::Xp(0)).kron(&id_r), order);
    let xp1_right = OpSeries::constant(SVar::ZInv, id_l.kron(&right.act(Gen::Xp(1))), order);
    let w_xp0_right = OpSeries::monomial(SVar::ZInv, -1, id_l.kron(&right.act(Gen::Xp(0))))
        .truncate(order);
    let raise = xp1_right.sub(&w_xp0_right);
    let mix = OpSeries::constant(
        SVar::ZInv,
        left.act(Gen::Xi(0)).kron(&right.act(Gen::Xp(0))),
        order,
    );
    let mut certified = i64::MAX;
    let mut prev = th.component(0);
    for n in 1..=th.max_jump() {
        let cur = th.component(n);
        let lhs = xp0_left.mul(&cur).sub(&cur.mul(&xp0_left));
        let rhs = prev
            .mul(&raise)
            .sub(&raise.mul(&prev))
            .add(&prev.mul(&mix));
        let got = certify_zero("mixing recursion", &lhs.sub(&rhs))?;
        certified = certified.min(got);
        prev = cur;
    }
    if certified == i64::MAX {
        return Err(Error::Inconsistent("no components to check".into()));
    }
    Ok(certified)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::Rat;
    use crate::window::Window;
    use crate::yangian::module::{neg_prefund, two_dim};

    #[test]
    fn evaluation_square_mixing_is_the_exponential() {
        let w = Window::new(10, 2);
        let left = two_dim(&Rat::int(2), &w);
        let right = two_dim(&Rat::int(7), &w);
        let th = theta(&left, &right, &[Rat::zero()]).unwrap();
        let parts = th.op.poly_parts().unwrap();
        assert_eq!(parts.len(), 1);
        let mut expect = SpMat::identity(4);
        expect.set(2, 1, Rat::one());
        assert_eq!(parts[&0], expect);
        assert_eq!(parts[&0], mixing_exponential(&left, &right));
        let inv_parts = th.op_inv.poly_parts().unwrap();
        let mut expect_inv = SpMat::identity(4);
        expect_inv.set(2, 1, Rat::int(-1));
        assert_eq!(inv_parts[&0], expect_inv);
        assert_eq!(th.check_shape(1).unwrap(), 1);
    }

    #[test]
    fn nested_tensor_mixing_matches_closed_form() {
        let w = Window::new(8, 3);
        let left = tensor(&two_dim(&Rat::int(1), &w), &two_dim(&Rat::int(4), &w)).unwrap();
        let right = tensor(&two_dim(&Rat::int(6), &w), &two_dim(&Rat::int(9), &w)).unwrap();
        let th = theta(&left, &right, &[Rat::zero()]).unwrap();
        let parts = th.op.poly_parts().unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[&0], mixing_exponential(&left, &right));
        assert_eq!(th.check_shape(1).unwrap(), 2);
    }

    #[test]
    fn quadratic_polynomial_keeps_shape_and_degree_bound() {
        let w = Window::new(10, 2);
        let left = two_dim(&Rat::int(2), &w);
        let right = two_dim(&Rat::int(7), &w);
        let th = theta(&left, &right, &[Rat::int(1), Rat::int(-4)]).unwrap();
        assert_eq!(th.check_shape(2).unwrap(), 1);
    }

    #[test]
    fn mixing_operator_is_multiplicative_in_the_polynomial() {
        let w = Window::new(9, 2);
        let left = two_dim(&Rat::int(3), &w);
        let right = two_dim(&Rat::int(-1), &w);
        let got = check_theta_multiplicativity(
            &left,
            &right,
            &[Rat::zero()],
            &[Rat::int(4)],
        )
        .unwrap();
        assert!(got >= 8);
    }

    #[test]
    fn component_recursion_holds_on_tensor_pairs() {
        let w = Window::new(9, 3);
        let left = tensor(&two_dim(&Rat::int(5), &w), &two_dim(&Rat::int(-3), &w)).unwrap();
        let right = tensor(&two_dim(&Rat::int(2), &w), &two_dim(&Rat::int(8), &w)).unwrap();
        assert!(check_theta_recursion(&left, &right).unwrap() >= 8);
        let w2 = Window::new(9, 2);
        let left2 = two_dim(&Rat::int(5), &w2);
        let right2 = two_dim(&Rat::int(2), &w2);
        assert!(check_theta_recursion(&left2, &right2).unwrap() >= 8);
    }

    #[test]
    fn mixing_components_partition_the_operator() {
        let w = Window::new(9, 2);
        let left = two_dim(&Rat::int(3), &w);
        let right = two_dim(&Rat::int(-2), &w);
        let th = theta(&left, &right, &[Rat::int(2), Rat::int(5)]).unwrap();
        let mut acc = th.component(0);
        for n in 1..=th.max_jump() {
            acc = acc.add(&th.component(n));
        }
        let diff = acc.sub(&th.op.truncate(acc.order()));
        assert!(certify_zero("component partition", &diff).unwrap() >= 8);
    }
}
