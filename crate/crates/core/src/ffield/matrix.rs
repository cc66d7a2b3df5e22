use std::fmt;

use crate::error::{Error, Result};

use super::modulus::FieldModulus;
use super::rank;

/// Dense row-major matrix over `Z_p`. Every stored entry is reduced.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldMatrix {
    rows: usize,
    cols: usize,
    modulus: FieldModulus,
    data: Vec<u32>,
}

impl FieldMatrix {
    pub fn zeros(rows: usize, cols: usize, modulus: FieldModulus) -> Self {
        FieldMatrix {
            rows,
            cols,
            modulus,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize, modulus: FieldModulus) -> Self {
        let mut m = Self::zeros(n, n, modulus);
        for i in 0..n {
            m.data[i * n + i] = 1 % modulus.get();
        }
        m
    }

    /// Takes ownership of raw row-major data, reducing every entry.
    pub fn from_vec(rows: usize, cols: usize, modulus: FieldModulus, mut data: Vec<u32>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        let p = modulus.get();
        for x in &mut data {
            if *x >= p {
                *x %= p;
            }
        }
        Ok(FieldMatrix { rows, cols, modulus, data })
    }

    /// Builds a matrix from signed integer rows, reducing into `[0, p)`.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R], modulus: FieldModulus) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch("ragged rows".into()));
            }
            data.extend(r.iter().map(|&x| modulus.reduce_signed(x)));
        }
        Ok(FieldMatrix {
            rows: rows.len(),
            cols,
            modulus,
            data,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, modulus: FieldModulus, mut f: impl FnMut(usize, usize) -> u64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(modulus.reduce(f(i, j)));
            }
        }
        FieldMatrix { rows, cols, modulus, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn modulus(&self) -> FieldModulus {
        self.modulus
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u32> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = self.modulus.reduce(v as u64);
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Mutable access to a row. Callers must keep entries reduced.
    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [u32] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<u32> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Keeps the listed rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> FieldMatrix {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &i in rows {
            data.extend_from_slice(self.row(i));
        }
        FieldMatrix {
            rows: rows.len(),
            cols: self.cols,
            modulus: self.modulus,
            data,
        }
    }

    pub fn select_cols(&self, cols: &[usize]) -> FieldMatrix {
        let mut data = Vec::with_capacity(self.rows * cols.len());
        for i in 0..self.rows {
            let r = self.row(i);
            data.extend(cols.iter().map(|&j| r[j]));
        }
        FieldMatrix {
            rows: self.rows,
            cols: cols.len(),
            modulus: self.modulus,
            data,
        }
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hcat(&self, other: &FieldMatrix) -> Result<FieldMatrix> {
        if self.rows != other.rows || self.modulus != other.modulus {
            return Err(Error::DimensionMismatch(format!(
                "cannot concatenate {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(other.row(i));
        }
        Ok(FieldMatrix {
            rows: self.rows,
            cols,
            modulus: self.modulus,
            data,
        })
    }

    pub fn transpose(&self) -> FieldMatrix {
        let mut data = vec![0; self.data.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        FieldMatrix {
            rows: self.cols,
            cols: self.rows,
            modulus: self.modulus,
            data,
        }
    }

    pub fn scale_row(&mut self, i: usize, c: u32) {
        let m = self.modulus;
        let c = m.reduce(c as u64);
        for x in self.row_mut(i) {
            *x = m.mul(*x, c);
        }
    }

    /// Zeroes the listed rows in place.
    pub fn zero_rows(&mut self, rows: &[usize]) {
        for &i in rows {
            self.row_mut(i).fill(0);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    /// Rank over `Z_p`.
    pub fn rank(&self) -> usize {
        rank::rank_mod_p(self)
    }

    /// Rank over `Z_p`, reusing this matrix's storage as the workspace.
    pub fn into_rank(self) -> usize {
        rank::rank_mod_p_owned(self)
    }
}

impl fmt::Debug for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FieldMatrix {}x{} over Z_{}", self.rows, self.cols, self.modulus)?;
        if self.rows * self.cols <= 400 {
            for i in 0..self.rows {
                writeln!(f, "  {:?}", self.row(i))?;
            }
        }
        Ok(())
    }
}
