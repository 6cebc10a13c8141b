//! Dense exact-arithmetic matrices over the rationals.
//!
//! Rank and positive-definiteness decisions elsewhere in the crate are
//! exact statements, so they are decided here with `BigRational`
//! elimination and fraction-free integer minors; floating point is used
//! only as a cheap pre-check by callers. Sizes are desk scale (a few
//! hundred), so no effort goes into asymptotics beyond cubic
//! elimination.

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::{Error, Result};

/// A row-major matrix of exact rationals.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigRational::one());
        }
        m
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> BigRational,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_i128_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> i128) -> Self {
        Self::from_fn(rows, cols, |i, j| {
            BigRational::from_integer(BigInt::from(f(i, j)))
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn mul(&self, other: &RatMatrix) -> Result<RatMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                context: "matrix product",
                expected: self.cols,
                actual: other.rows,
            });
        }
        let mut out = RatMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &RatMatrix) -> Result<RatMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                context: "matrix difference",
                expected: self.rows * self.cols,
                actual: other.rows * other.cols,
            });
        }
        Ok(RatMatrix::from_fn(self.rows, self.cols, |i, j| {
            self.get(i, j) - other.get(i, j)
        }))
    }

    /// Exact rank by Gaussian elimination with full row pivoting.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            let Some(pivot) = (rank..m.rows).find(|&i| !m.get(i, col).is_zero()) else {
                continue;
            };
            m.swap_rows(rank, pivot);
            let inv = m.get(rank, col).clone();
            for i in (rank + 1)..m.rows {
                if m.get(i, col).is_zero() {
                    continue;
                }
                let factor = m.get(i, col) / &inv;
                for j in col..m.cols {
                    let v = m.get(i, j) - &factor * m.get(rank, j);
                    m.set(i, j, v);
                }
            }
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        rank
    }

    /// Schur complement of the leading `k x k` block: eliminates the
    /// first `k` columns with row operations confined to the first `k`
    /// rows and returns the remaining bottom-right block. Errors out if
    /// the leading block is singular (`step` reports the failing column).
    pub fn schur_complement(&self, k: usize) -> Result<RatMatrix> {
        assert!(k <= self.rows && k <= self.cols, "block exceeds matrix");
        let mut m = self.clone();
        for col in 0..k {
            let Some(pivot) = (col..k).find(|&i| !m.get(i, col).is_zero()) else {
                return Err(Error::SingularBlock { step: col });
            };
            m.swap_rows(col, pivot);
            let inv = m.get(col, col).clone();
            for i in 0..m.rows {
                if i == col || m.get(i, col).is_zero() {
                    continue;
                }
                let factor = m.get(i, col) / &inv;
                for j in col..m.cols {
                    let v = m.get(i, j) - &factor * m.get(col, j);
                    m.set(i, j, v);
                }
            }
        }
        Ok(RatMatrix::from_fn(self.rows - k, self.cols - k, |i, j| {
            m.get(k + i, k + j).clone()
        }))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

/// Leading principal minors of an integer matrix by fraction-free
/// (Bareiss) elimination without row swaps. `minors[k]` is the
/// determinant of the leading `(k+1) x (k+1)` block. Stops after a zero
/// pivot, where fraction-free elimination cannot continue; the zero
/// minor is included.
pub fn leading_principal_minors(m: &RatMatrix) -> Vec<BigInt> {
    assert_eq!(m.rows, m.cols, "minors of a non-square matrix");
    let n = m.rows;
    let mut a: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let v = m.get(i, j);
                    assert!(v.is_integer(), "integer matrix required");
                    v.to_integer()
                })
                .collect()
        })
        .collect();
    let mut minors = Vec::with_capacity(n);
    let mut prev = BigInt::one();
    for k in 0..n {
        let pivot = a[k][k].clone();
        minors.push(pivot.clone());
        if pivot.is_zero() {
            break;
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let num = &a[i][j] * &pivot - &a[i][k] * &a[k][j];
                a[i][j] = num / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = pivot;
    }
    minors
}

/// True iff the symmetric integer matrix is positive-definite, decided
/// by exact leading principal minors.
pub fn is_positive_definite(m: &RatMatrix) -> bool {
    debug_assert!(m.is_symmetric());
    let minors = leading_principal_minors(m);
    minors.len() == m.rows() && minors.iter().all(|d| d.is_positive())
}
