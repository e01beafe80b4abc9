//! Exact dense Gaussian elimination over any scalar field.
//!
//! Pivots use `try_inv`, so the routines require scalars that invert
//! (fraction fields; polynomial scalars only when the pivots are constants).

#![allow(clippy::needless_range_loop)]

use super::scalar::Scalar;
use super::sparse::SpMat;
use crate::error::{Error, Result};

/// Solution of A x = b with uniqueness classification.
pub enum Solve<S> {
    Unique(Vec<S>),
    None,
    Many,
}

/// Row-reduce in place; returns pivot column per pivot row.
fn rref<S: Scalar>(m: &mut [Vec<S>]) -> Result<Vec<usize>> {
    let rows = m.len();
    if rows == 0 {
        return Ok(vec![]);
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c]
            .try_inv()
            .ok_or_else(|| Error::NotInvertible(format!("pivot {}", m[r][c])))?;
        for j in c..cols {
            m[r][j] = m[r][j].mul(&inv);
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let t = m[r][j].mul(&f);
                    m[i][j] = m[i][j].sub(&t);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    Ok(pivots)
}

/// Solve A x = b exactly.
pub fn solve<S: Scalar>(a: &SpMat<S>, b: &[S]) -> Result<Solve<S>> {
    assert_eq!(a.rows(), b.len(), "shape mismatch");
    let n = a.cols();
    let mut aug: Vec<Vec<S>> = (0..a.rows())
        .map(|i| {
            let mut row: Vec<S> = (0..n).map(|j| a.get(i, j)).collect();
            row.push(b[i].clone());
            row
        })
        .collect();
    let pivots = rref(&mut aug)?;
    // inconsistent iff a pivot lands in the augmented column
    if pivots.last() == Some(&n) {
        return Ok(Solve::None);
    }
    if pivots.len() < n {
        return Ok(Solve::Many);
    }
    let mut x = vec![S::zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][n].clone();
    }
    Ok(Solve::Unique(x))
}

/// Pivot columns of A under row reduction; they index a basis of the column space.
pub fn column_pivots<S: Scalar>(a: &SpMat<S>) -> Result<Vec<usize>> {
    let mut m: Vec<Vec<S>> = (0..a.rows())
        .map(|i| (0..a.cols()).map(|j| a.get(i, j)).collect())
        .collect();
    rref(&mut m)
}

/// Basis of the kernel of A.
pub fn kernel<S: Scalar>(a: &SpMat<S>) -> Result<Vec<Vec<S>>> {
    let n = a.cols();
    let mut m: Vec<Vec<S>> = (0..a.rows())
        .map(|i| (0..n).map(|j| a.get(i, j)).collect())
        .collect();
    let pivots = rref(&mut m)?;
    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..n {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![S::zero(); n];
        v[free] = S::one();
        for (r, &c) in pivots.iter().enumerate() {
            v[c] = m[r][free].neg();
        }
        basis.push(v);
    }
    Ok(basis)
}

/// Exact inverse of a square matrix.
pub fn invert<S: Scalar>(a: &SpMat<S>) -> Result<SpMat<S>> {
    assert_eq!(a.rows(), a.cols(), "not square");
    let n = a.rows();
    let mut aug: Vec<Vec<S>> = (0..n)
        .map(|i| {
            let mut row: Vec<S> = (0..n).map(|j| a.get(i, j)).collect();
            row.extend((0..n).map(|j| if i == j { S::one() } else { S::zero() }));
            row
        })
        .collect();
    let pivots = rref(&mut aug)?;
    if pivots.len() < n || pivots.iter().enumerate().any(|(r, &c)| r != c) {
        return Err(Error::Inconsistent("singular matrix".into()));
    }
    let mut out = SpMat::zero(n, n);
    for i in 0..n {
        for j in 0..n {
            let v = aug[i][n + j].clone();
            if !v.is_zero() {
                out.set(i, j, v);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::Rat;

    fn m(rows: usize, cols: usize, ent: &[(usize, usize, i64)]) -> SpMat<Rat> {
        SpMat::from_entries(rows, cols, ent.iter().map(|&(i, j, v)| (i, j, Rat::int(v))))
    }

    #[test]
    fn unique_solution() {
        let a = m(2, 2, &[(0, 0, 2), (0, 1, 1), (1, 0, 1), (1, 1, 3)]);
        let b = vec![Rat::int(5), Rat::int(10)];
        match solve(&a, &b).unwrap() {
            Solve::Unique(x) => assert_eq!(x, vec![Rat::int(1), Rat::int(3)]),
            _ => panic!("expected unique"),
        }
    }

    #[test]
    fn classification() {
        let a = m(2, 2, &[(0, 0, 1), (0, 1, 1), (1, 0, 2), (1, 1, 2)]);
        match solve(&a, &[Rat::int(1), Rat::int(3)]).unwrap() {
            Solve::None => {}
            _ => panic!("expected inconsistent"),
        }
        match solve(&a, &[Rat::int(1), Rat::int(2)]).unwrap() {
            Solve::Many => {}
            _ => panic!("expected underdetermined"),
        }
    }

    #[test]
    fn kernel_and_inverse() {
        let a = m(2, 3, &[(0, 0, 1), (0, 2, 1), (1, 1, 1)]);
        let k = kernel(&a).unwrap();
        assert_eq!(k.len(), 1);
        assert_eq!(k[0], vec![Rat::int(-1), Rat::int(0), Rat::int(1)]);

        let b = m(2, 2, &[(0, 0, 1), (0, 1, 2), (1, 1, 1)]);
        let binv = invert(&b).unwrap();
        assert_eq!(b.mul(&binv), SpMat::identity(2));
        assert!(invert(&m(2, 2, &[(0, 0, 1)])).is_err());
    }
}
