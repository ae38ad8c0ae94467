//! Dense row-major matrices over any [`Scalar`].

use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("matrix must have at least one row and one column")]
    Empty,
    #[error("row {row} has {found} entries, expected {expected}")]
    Ragged { row: usize, expected: usize, found: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn new(rows: usize, cols: usize, entries: Vec<T>) -> Result<Self, MatrixError> {
        if rows == 0 || cols == 0 {
            return Err(MatrixError::Empty);
        }
        if entries.len() != rows * cols {
            return Err(MatrixError::DimensionMismatch { expected: rows * cols, found: entries.len() });
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self, MatrixError> {
        let cols = rows.first().map(Vec::len).ok_or(MatrixError::Empty)?;
        let height = rows.len();
        let mut entries = Vec::with_capacity(height * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(MatrixError::Ragged { row: i, expected: cols, found: row.len() });
            }
            entries.extend(row);
        }
        Self::new(height, cols, entries)
    }

    /// Builds a matrix from small integer literals; panics on ragged input.
    pub fn from_ints<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let rows: Vec<Vec<T>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| T::from_i64(x).expect("integer literal")).collect())
            .collect();
        Self::from_rows(rows).expect("well-formed integer literal matrix")
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self { rows, cols, entries: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self { rows, cols, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<T>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &T> {
        self.entries.iter()
    }

    pub fn map<U: Scalar>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(f).collect() }
    }

    /// Matrix product `self · rhs`. Zero entries of `self` are skipped, which
    /// keeps the lower-triangular and permutation-like families cheap.
    pub fn mul(&self, rhs: &Matrix<T>) -> Result<Matrix<T>, MatrixError> {
        if self.cols != rhs.rows {
            return Err(MatrixError::DimensionMismatch { expected: self.cols, found: rhs.rows });
        }
        let mut out = Matrix::<T>::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.entries[idx] = out.entries[idx].clone() + a.clone() * b.clone();
                }
            }
        }
        Ok(out)
    }

    /// Exact matrix-vector product.
    pub fn apply(&self, w: &[T]) -> Result<Vec<T>, MatrixError> {
        if w.len() != self.cols {
            return Err(MatrixError::DimensionMismatch { expected: self.cols, found: w.len() });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(w)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect())
    }

    /// `self^k` for a square matrix; `k = 0` gives the identity.
    pub fn pow(&self, k: u32) -> Result<Matrix<T>, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::DimensionMismatch { expected: self.rows, found: self.cols });
        }
        let mut acc = Matrix::identity(self.rows);
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    pub fn column_sums(&self) -> Vec<T> {
        (0..self.cols).map(|j| (0..self.rows).fold(T::zero(), |acc, i| acc + self.get(i, j).clone())).collect()
    }

    pub fn first_zero_column(&self) -> Option<usize> {
        (0..self.cols).find(|&j| (0..self.rows).all(|i| self.get(i, j).is_zero()))
    }

    pub fn first_zero_row(&self) -> Option<usize> {
        (0..self.rows).find(|&i| self.row(i).iter().all(Zero::is_zero))
    }

    /// First `(row, col)` holding a negative entry.
    pub fn first_negative(&self) -> Option<(usize, usize)> {
        self.entries.iter().position(|x| !x.is_nonnegative()).map(|idx| (idx / self.cols, idx % self.cols))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.first_negative().is_none()
    }

    pub fn is_entrywise_positive(&self) -> bool {
        self.entries.iter().all(Scalar::is_positive_strict)
    }

    /// Rank by Gaussian elimination; exact for rationals.
    pub fn rank(&self) -> usize {
        let mut m = self.to_rows();
        let (rows, cols) = (self.rows, self.cols);
        let mut rank = 0;
        for col in 0..cols {
            let Some(pivot) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
                continue;
            };
            m.swap(rank, pivot);
            let p = m[rank][col].clone();
            let pivot_row = m[rank].clone();
            for (r, row) in m.iter_mut().enumerate() {
                if r == rank || row[col].is_zero() {
                    continue;
                }
                let factor = row[col].clone() / p.clone();
                for (x, y) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *x = x.clone() - factor.clone() * y.clone();
                }
            }
            rank += 1;
            if rank == rows {
                break;
            }
        }
        rank
    }
}

impl<T: Scalar + fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.entries.chunks(self.cols.max(1))).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};
    use crate::Rational;
    use proptest::prelude::*;

    type Q = Matrix<Rational>;

    #[test]
    fn rectangular_apply_to_ones() {
        let m = Q::from_ints(&[[3, 2, 0], [0, 1, 0]]);
        assert_eq!(m.apply(&[int(1), int(1), int(1)]).unwrap(), vec![int(5), int(1)]);
        assert_eq!(m.apply(&[int(0), int(0), int(0)]).unwrap(), vec![int(0), int(0)]);
    }

    #[test]
    fn identity_apply_and_dimension_errors() {
        let w = vec![ratio(1, 3), int(4)];
        assert_eq!(Q::identity(2).apply(&w).unwrap(), w);
        assert!(matches!(
            Q::identity(2).apply(&[int(1)]),
            Err(MatrixError::DimensionMismatch { expected: 2, found: 1 })
        ));
        assert!(Q::identity(2).mul(&Q::identity(3)).is_err());
    }

    #[test]
    fn construction_errors() {
        assert_eq!(Q::from_rows(vec![]), Err(MatrixError::Empty));
        assert_eq!(Q::from_rows(vec![vec![]]), Err(MatrixError::Empty));
        assert!(matches!(
            Q::from_rows(vec![vec![int(1)], vec![int(1), int(2)]]),
            Err(MatrixError::Ragged { row: 1, .. })
        ));
    }

    #[test]
    fn zero_rows_columns_and_sums() {
        let m = Q::from_ints(&[[1, 0, 1], [0, 0, 1]]);
        assert_eq!(m.first_zero_column(), Some(1));
        assert_eq!(m.first_zero_row(), None);
        assert_eq!(m.column_sums(), vec![int(1), int(0), int(2)]);
        assert_eq!(Q::from_ints(&[[1, 1], [0, 0]]).first_zero_row(), Some(1));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(Q::from_ints(&[[1, 2], [2, 4]]).rank(), 1);
        assert_eq!(Q::from_ints(&[[1, 0, 1], [0, 1, 1]]).rank(), 2);
        assert_eq!(Q::from_ints(&[[0, 0], [0, 0]]).rank(), 0);
        assert_eq!(Matrix::<f64>::identity(3).rank(), 3);
    }

    #[test]
    fn generic_over_floats() {
        let m = Matrix::<f64>::from_ints(&[[2, 1], [1, 1]]);
        let p = m.pow(2).unwrap();
        assert_eq!(p.to_rows(), vec![vec![5.0, 3.0], vec![3.0, 2.0]]);
    }

    fn small_matrix(rows: usize, cols: usize) -> impl Strategy<Value = Q> {
        proptest::collection::vec(0i64..4, rows * cols)
            .prop_map(move |v| Q::new(rows, cols, v.into_iter().map(int).collect()).unwrap())
    }

    proptest! {
        #[test]
        fn product_is_associative(a in small_matrix(2, 3), b in small_matrix(3, 4), c in small_matrix(4, 2)) {
            let left = a.mul(&b).unwrap().mul(&c).unwrap();
            let right = a.mul(&b.mul(&c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn apply_is_linear(
            m in small_matrix(3, 3),
            u in proptest::collection::vec(0i64..5, 3),
            v in proptest::collection::vec(0i64..5, 3),
            a in 0i64..4, b in 1i64..4,
        ) {
            let (a, b) = (ratio(a, b), ratio(b, a + 1));
            let u: Vec<Rational> = u.into_iter().map(int).collect();
            let v: Vec<Rational> = v.into_iter().map(int).collect();
            let combo: Vec<Rational> = u.iter().zip(&v).map(|(x, y)| &a * x + &b * y).collect();
            let lhs = m.apply(&combo).unwrap();
            let (mu, mv) = (m.apply(&u).unwrap(), m.apply(&v).unwrap());
            let rhs: Vec<Rational> = mu.iter().zip(&mv).map(|(x, y)| &a * x + &b * y).collect();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
