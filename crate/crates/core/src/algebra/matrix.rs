//! Dense complex matrices, stored row-major.
//!
//! Sizes used throughout the crate are 2, 4 and 8, so no attempt is made at
//! blocking or sparsity. Products of the integer / imaginary-unit matrices
//! built in [`super`] are exact in floating point, which is what lets the
//! algebra checks use plain equality.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::AlgebraError;

pub type ComplexVector = Vec<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(
        rows: usize,
        cols: usize,
        entries: Vec<Complex64>,
    ) -> Result<Self, AlgebraError> {
        if rows * cols != entries.len() {
            return Err(AlgebraError::DimensionMismatch {
                expected: (rows, cols),
                found: (entries.len(), 1),
            });
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    /// Convenience constructor from nested rows of real-or-complex values.
    ///
    /// Panics on ragged input; intended for literal tables.
    pub fn from_rows<T: Into<Complex64> + Copy>(rows: &[&[T]]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.len());
        let mut entries = Vec::with_capacity(n_rows * n_cols);
        for row in rows {
            assert_eq!(row.len(), n_cols, "ragged row in matrix literal");
            entries.extend(row.iter().map(|&x| x.into()));
        }
        Self {
            rows: n_rows,
            cols: n_cols,
            entries,
        }
    }

    /// Assembles `[[a, b], [c, d]]` from four equally sized square blocks.
    pub fn from_blocks(
        a: &ComplexMatrix,
        b: &ComplexMatrix,
        c: &ComplexMatrix,
        d: &ComplexMatrix,
    ) -> Self {
        let n = a.rows;
        for blk in [a, b, c, d] {
            assert!(
                blk.rows == n && blk.cols == n,
                "blocks must be square and of equal size"
            );
        }
        let mut out = Self::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = a[(i, j)];
                out[(i, j + n)] = b[(i, j)];
                out[(i + n, j)] = c[(i, j)];
                out[(i + n, j + n)] = d[(i, j)];
            }
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[ComplexVector]) -> Self {
        let cols = columns.len();
        let rows = columns.first().map_or(0, |c| c.len());
        let mut out = Self::zeros(rows, cols);
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "columns must share a length");
            for (i, &x) in col.iter().enumerate() {
                out[(i, j)] = x;
            }
        }
        out
    }

    pub fn scale(&self, s: impl Into<Complex64>) -> Self {
        let s = s.into();
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&x| x * s).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn checked_mul(&self, rhs: &ComplexMatrix) -> Result<Self, AlgebraError> {
        if self.cols != rhs.rows {
            return Err(AlgebraError::DimensionMismatch {
                expected: (self.cols, rhs.cols),
                found: (rhs.rows, rhs.cols),
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> ComplexVector {
        assert_eq!(self.cols, v.len(), "matrix-vector size mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// Extracts the square submatrix on the given row/column indices.
    pub fn principal_submatrix(&self, indices: &[usize]) -> Self {
        let n = indices.len();
        let mut out = Self::zeros(n, n);
        for (a, &i) in indices.iter().enumerate() {
            for (b, &j) in indices.iter().enumerate() {
                out[(a, b)] = self[(i, j)];
            }
        }
        out
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.entries)
    }

    pub(crate) fn from_nalgebra(m: &DMatrix<Complex64>) -> Self {
        let mut out = Self::zeros(m.nrows(), m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                out[(i, j)] = m[(i, j)];
            }
        }
        out
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &mut self.entries[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.checked_mul(rhs)
            .unwrap_or_else(|e| panic!("matrix product: {e}"))
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.scale(-1.0)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for x in self.row(i) {
                write!(f, "{:>8.4}{:+.4}i ", x.re, x.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}
