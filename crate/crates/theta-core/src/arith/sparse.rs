//! Sparse matrices over a scalar ring, map-backed so iteration order and
//! serialization are deterministic.

use std::collections::BTreeMap;
use std::fmt;

use super::scalar::Scalar;

#[derive(Clone, PartialEq, Eq)]
pub struct SpMat<S: Scalar> {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), S>,
}

impl<S: Scalar> SpMat<S> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        SpMat { rows, cols, entries: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.entries.insert((i, i), S::one());
        }
        m
    }

    pub fn from_entries(rows: usize, cols: usize, it: impl IntoIterator<Item = (usize, usize, S)>) -> Self {
        let mut m = Self::zero(rows, cols);
        for (i, j, v) in it {
            m.add_to(i, j, &v);
        }
        m
    }

    pub fn single(rows: usize, cols: usize, i: usize, j: usize, v: S) -> Self {
        let mut m = Self::zero(rows, cols);
        m.set(i, j, v);
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> S {
        assert!(i < self.rows && j < self.cols, "index out of range");
        self.entries.get(&(i, j)).cloned().unwrap_or_else(S::zero)
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        assert!(i < self.rows && j < self.cols, "index out of range");
        if v.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), v);
        }
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: &S) {
        let cur = self.get(i, j);
        self.set(i, j, cur.add(v));
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize), &S)> {
        self.entries.iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        let mut out = self.clone();
        for ((i, j), v) in &other.entries {
            out.add_to(*i, *j, v);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        SpMat {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|(k, v)| (*k, v.neg())).collect(),
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero(self.rows, self.cols);
        }
        SpMat {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|(k, v)| (*k, v.mul(c))).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = Self::zero(self.rows, other.cols);
        // walk only the right-factor row matching each left-factor column
        for ((i, k), a) in &self.entries {
            for ((k2, j), b) in other.entries.range((*k, 0)..(*k + 1, 0)) {
                debug_assert_eq!(k, k2);
                out.add_to(*i, *j, &a.mul(b));
            }
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.rows * other.rows, self.cols * other.cols);
        for ((i1, j1), a) in &self.entries {
            for ((i2, j2), b) in &other.entries {
                out.set(i1 * other.rows + i2, j1 * other.cols + j2, a.mul(b));
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zero(self.cols, self.rows);
        for ((i, j), v) in &self.entries {
            out.set(*j, *i, v.clone());
        }
        out
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> SpMat<T> {
        let mut out = SpMat::zero(self.rows, self.cols);
        for ((i, j), v) in &self.entries {
            out.set(*i, *j, f(v));
        }
        out
    }

    pub fn apply(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.cols, "shape mismatch");
        let mut out = vec![S::zero(); self.rows];
        for ((i, j), a) in &self.entries {
            out[*i] = out[*i].add(&a.mul(&v[*j]));
        }
        out
    }

    /// Top-left block, rows < r and cols < c.
    pub fn block(&self, r: usize, c: usize) -> Self {
        let mut out = Self::zero(r, c);
        for ((i, j), v) in &self.entries {
            if *i < r && *j < c {
                out.set(*i, *j, v.clone());
            }
        }
        out
    }

    /// Submatrix on arbitrary index sets.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let rpos: BTreeMap<usize, usize> = rows.iter().enumerate().map(|(a, b)| (*b, a)).collect();
        let cpos: BTreeMap<usize, usize> = cols.iter().enumerate().map(|(a, b)| (*b, a)).collect();
        let mut out = Self::zero(rows.len(), cols.len());
        for ((i, j), v) in &self.entries {
            if let (Some(i2), Some(j2)) = (rpos.get(i), cpos.get(j)) {
                out.set(*i2, *j2, v.clone());
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = self
            .entries
            .iter()
            .map(|((i, j), v)| serde_json::json!([i, j, v.to_json()]))
            .collect();
        serde_json::json!({ "rows": self.rows, "cols": self.cols, "entries": entries })
    }
}

impl<S: Scalar> fmt::Debug for SpMat<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SpMat {}x{} [", self.rows, self.cols)?;
        for ((i, j), v) in &self.entries {
            writeln!(f, "  ({},{}) = {}", i, j, v)?;
        }
        write!(f, "]")
    }
}
