//! Exact rank over the rationals for desk-scale cross-checks.

use num_traits::{One, Zero};
use std::ops::{Div, Mul, Sub};

use crate::error::{Error, Result};

/// Default entry ceiling of the exact oracle (a 500 x 500 matrix).
pub const DEFAULT_ORACLE_LIMIT: usize = 500 * 500;

/// Ring operations needed by fraction-free elimination. `Div` must be exact
/// whenever the dividend is a multiple of the divisor.
pub trait ExactRing: Clone + PartialEq + Zero + One + Mul<Output = Self> + Sub<Output = Self> + Div<Output = Self> {}

impl<T> ExactRing for T where T: Clone + PartialEq + Zero + One + Mul<Output = T> + Sub<Output = T> + Div<Output = T> {}

/// Dense row-major matrix over an integral domain.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegerMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: ExactRing> IntegerMatrix<T> {
    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch("ragged rows".into()));
            }
            data.extend_from_slice(r);
        }
        Ok(IntegerMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        IntegerMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    /// Exact rank, refusing inputs above [`DEFAULT_ORACLE_LIMIT`] entries.
    pub fn rank(&self) -> Result<usize> {
        self.rank_with_limit(DEFAULT_ORACLE_LIMIT)
    }

    pub fn rank_with_limit(&self, limit: usize) -> Result<usize> {
        if self.rows * self.cols > limit {
            return Err(Error::OracleSizeLimit {
                rows: self.rows,
                cols: self.cols,
                limit,
            });
        }
        Ok(bareiss_rank(self.data.clone(), self.rows, self.cols))
    }
}

/// Bareiss fraction-free elimination. After the k-th pivot every active
/// entry is a (k+1)-minor of the input, so the division by the previous
/// pivot is exact.
pub fn bareiss_rank<T: ExactRing>(mut a: Vec<T>, rows: usize, cols: usize) -> usize {
    let mut prev = T::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| !a[i * cols + c].is_zero()) else {
            continue;
        };
        if piv != r {
            for j in 0..cols {
                a.swap(piv * cols + j, r * cols + j);
            }
        }
        let pivot = a[r * cols + c].clone();
        for i in r + 1..rows {
            let lead = a[i * cols + c].clone();
            for j in c + 1..cols {
                let v = pivot.clone() * a[i * cols + j].clone() - lead.clone() * a[r * cols + j].clone();
                a[i * cols + j] = v / prev.clone();
            }
            a[i * cols + c] = T::zero();
        }
        prev = pivot;
        r += 1;
    }
    r
}
