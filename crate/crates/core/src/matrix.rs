//! Dense matrices over a [`Scalar`] with exact Gauss-Jordan elimination,
//! plus Smith invariant factors over the integers.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone + Zero> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<T>>, cols: usize) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged matrix rows");
            data.extend(row);
        }
        Matrix { rows: n, cols, data }
    }

    pub fn from_columns(columns: &[Vec<T>], rows: usize) -> Self {
        let mut m = Matrix::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "ragged matrix columns");
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn map<U: Clone + Zero>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<T> Matrix<T> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.data[i * self.cols + j])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn mul(&self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "matrix shapes do not compose");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_negligible() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if b.is_negligible() {
                        continue;
                    }
                    let prod = a.clone() * b.clone();
                    let cell: &mut T = &mut out[(i, j)];
                    *cell = cell.clone() + prod;
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for (j, x) in v.iter().enumerate() {
                    let a = &self[(i, j)];
                    if !a.is_negligible() && !x.is_negligible() {
                        acc = acc + a.clone() * x.clone();
                    }
                }
                acc
            })
            .collect()
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.data.iter().all(Scalar::is_negligible)
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_negligible()) else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    self.data.swap(p * self.cols + j, r * self.cols + j);
                }
            }
            let inv = T::one() / self[(r, c)].clone();
            for j in c..self.cols {
                let v = self[(r, j)].clone() * inv.clone();
                self[(r, j)] = v;
            }
            for i in 0..self.rows {
                if i == r || self[(i, c)].is_negligible() {
                    continue;
                }
                let factor = self[(i, c)].clone();
                for j in c..self.cols {
                    if self[(r, j)].is_negligible() {
                        continue;
                    }
                    let v = self[(i, j)].clone() - factor.clone() * self[(r, j)].clone();
                    self[(i, j)] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of the right kernel `{ v : M v = 0 }`.
    pub fn nullspace(&self) -> Vec<Vec<T>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![T::zero(); self.cols];
            v[free] = T::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -m[(row, free)].clone();
            }
            basis.push(v);
        }
        basis
    }
}

/// Rank of a family of vectors of common length `dim`.
pub fn rank_of<T: Scalar>(vectors: &[Vec<T>], dim: usize) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    Matrix::from_rows(vectors.to_vec(), dim).rank()
}

/// Incrementally maintained row-reduced basis of a subspace of `T^dim`.
#[derive(Clone, Debug)]
pub struct RowSpace<T> {
    dim: usize,
    // Each row is normalized with a leading one at `pivots[i]`.
    rows: Vec<Vec<T>>,
    pivots: Vec<usize>,
}

impl<T: Scalar> RowSpace<T> {
    pub fn new(dim: usize) -> Self {
        RowSpace {
            dim,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vec<T>] {
        &self.rows
    }

    fn reduce(&self, v: &mut [T]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v[p].is_negligible() {
                continue;
            }
            let factor = v[p].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_negligible() {
                    *x = x.clone() - factor.clone() * r.clone();
                }
            }
        }
    }

    pub fn contains(&self, v: &[T]) -> bool {
        assert_eq!(v.len(), self.dim);
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(Scalar::is_negligible)
    }

    /// Adds `v`; returns whether the rank grew.
    pub fn insert(&mut self, v: &[T]) -> bool {
        assert_eq!(v.len(), self.dim);
        let mut w = v.to_vec();
        self.reduce(&mut w);
        let Some(p) = w.iter().position(|x| !x.is_negligible()) else {
            return false;
        };
        let inv = T::one() / w[p].clone();
        for x in w.iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for row in self.rows.iter_mut() {
            if row[p].is_negligible() {
                continue;
            }
            let factor = row[p].clone();
            for (x, y) in row.iter_mut().zip(&w) {
                if !y.is_negligible() {
                    *x = x.clone() - factor.clone() * y.clone();
                }
            }
        }
        self.rows.push(w);
        self.pivots.push(p);
        true
    }

    pub fn contains_space(&self, other: &RowSpace<T>) -> bool {
        other.rows.iter().all(|r| self.contains(r))
    }
}

/// Nonzero invariant factors of an integer matrix (Smith normal form).
pub fn smith_invariants(m: &Matrix<BigInt>) -> Vec<BigInt> {
    let mut a = m.clone();
    let (rows, cols) = (a.rows(), a.cols());
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // Smallest nonzero entry in the remaining block becomes the pivot.
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[(i, j)].is_zero()
                    && best.map_or(true, |(bi, bj)| a[(i, j)].abs() < a[(bi, bj)].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        swap_rows(&mut a, t, pi);
        swap_cols(&mut a, t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let q = a[(i, t)].div_floor(&a[(t, t)]);
                for j in t..cols {
                    let v = a[(i, j)].clone() - q.clone() * a[(t, j)].clone();
                    a[(i, j)] = v;
                }
                if !a[(i, t)].is_zero() {
                    swap_rows(&mut a, t, i);
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let q = a[(t, j)].div_floor(&a[(t, t)]);
                for i in t..rows {
                    let v = a[(i, j)].clone() - q.clone() * a[(i, t)].clone();
                    a[(i, j)] = v;
                }
                if !a[(t, j)].is_zero() {
                    swap_cols(&mut a, t, j);
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // Pivot must divide the rest of the block.
            let mut fixed = true;
            'outer: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !a[(i, j)].is_multiple_of(&a[(t, t)]) {
                        for k in t..cols {
                            let v = a[(t, k)].clone() + a[(i, k)].clone();
                            a[(t, k)] = v;
                        }
                        fixed = false;
                        break 'outer;
                    }
                }
            }
            if fixed {
                break;
            }
        }
        diag.push(a[(t, t)].abs());
        t += 1;
    }
    diag.sort();
    debug_assert!(diag.windows(2).all(|w| w[1].is_multiple_of(&w[0])));
    diag
}

fn swap_rows<T: Clone>(a: &mut Matrix<T>, i: usize, k: usize) {
    if i == k {
        return;
    }
    for j in 0..a.cols {
        a.data.swap(i * a.cols + j, k * a.cols + j);
    }
}

fn swap_cols<T: Clone>(a: &mut Matrix<T>, j: usize, k: usize) {
    if j == k {
        return;
    }
    for i in 0..a.rows {
        a.data.swap(i * a.cols + j, i * a.cols + k);
    }
}

/// Converts an integer matrix to any scalar type.
pub fn to_scalar<T: Scalar>(m: &Matrix<i64>) -> Matrix<T> {
    m.map(|&v| T::from_i64(v))
}

pub fn to_bigint(m: &Matrix<i64>) -> Matrix<BigInt> {
    m.map(|&v| BigInt::from(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(v: i64) -> BigRational {
        BigRational::from_i64(v)
    }

    #[test]
    fn rank_and_kernel_of_row_vector() {
        let m = Matrix::from_rows(vec![vec![q(1), q(1)]], 2);
        assert_eq!(m.rank(), 1);
        let ker = m.nullspace();
        assert_eq!(ker, vec![vec![q(-1), q(1)]]);
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let m = Matrix::from_rows(
            vec![
                vec![q(1), q(2), q(3), q(4)],
                vec![q(2), q(4), q(6), q(8)],
                vec![q(0), q(1), q(1), q(0)],
            ],
            4,
        );
        let ker = m.nullspace();
        assert_eq!(ker.len(), 2);
        for v in &ker {
            assert!(m.apply(v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn row_space_membership() {
        let mut s = RowSpace::new(3);
        assert!(s.insert(&[q(1), q(-1), q(0)]));
        assert!(s.insert(&[q(0), q(1), q(-1)]));
        assert!(!s.insert(&[q(1), q(0), q(-1)]));
        assert!(s.contains(&[q(2), q(0), q(-2)]));
        assert!(!s.contains(&[q(1), q(0), q(0)]));
        assert_eq!(s.rank(), 2);
    }

    #[test]
    fn smith_of_diagonal_and_mixed() {
        let m = to_bigint(&Matrix::from_rows(vec![vec![2, 1]], 2));
        assert_eq!(smith_invariants(&m), vec![BigInt::from(1)]);
        let m = to_bigint(&Matrix::from_rows(vec![vec![2, 0], vec![0, 3]], 2));
        assert_eq!(smith_invariants(&m), vec![BigInt::from(1), BigInt::from(6)]);
        let m = to_bigint(&Matrix::from_rows(vec![vec![2, 4], vec![6, 8]], 2));
        assert_eq!(smith_invariants(&m), vec![BigInt::from(2), BigInt::from(4)]);
    }

    #[test]
    fn float_elimination_uses_tolerance() {
        let m = Matrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 4.0 + 1e-12]], 2);
        assert_eq!(m.rank(), 1);
    }
}
