//! Small dense matrices: LU with partial pivoting, determinants, Cholesky.
//!
//! Sizes here are the genus (rarely above a dozen), so everything is a flat
//! row-major `Vec` and the algorithms are the textbook ones.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_traits::{Num, Signed};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

/// Integer matrices (M, N, the basis-change matrix) stay exact.
pub type IntMatrix = Matrix<i64>;

impl<T: Copy> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds from row vectors; all rows must have the same length.
    pub fn from_rows(rows: &[Vec<T>]) -> Option<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return None;
        }
        Some(Matrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        })
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

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn map<U: Copy>(&self, f: impl Fn(T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }
}

impl<T: Copy + Num> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::from_fn(rows, cols, |_, _| T::zero())
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|x| x * s)
    }
}

impl Matrix<i64> {
    /// Lifts an exact integer matrix into a real scalar type.
    pub fn to_real<T: Real>(&self) -> Matrix<T> {
        self.map(T::of_i64)
    }

    /// Exact determinant by fraction-free Bareiss elimination.
    pub fn det_exact(&self) -> i64 {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return 1;
        }
        let mut a: Vec<i128> = self.data.iter().map(|&x| x as i128).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k * n + k] == 0 {
                match (k + 1..n).find(|&r| a[r * n + k] != 0) {
                    Some(r) => {
                        for c in 0..n {
                            a.swap(k * n + c, r * n + c);
                        }
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i * n + j] =
                        (a[i * n + j] * a[k * n + k] - a[i * n + k] * a[k * n + j]) / prev;
                }
            }
            prev = a[k * n + k];
        }
        (sign * a[n * n - 1]) as i64
    }
}

impl<T: Copy + Signed + PartialOrd> Matrix<T> {
    /// Largest absolute entry.
    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |m, &x| if x.abs() > m { x.abs() } else { m })
    }
}

impl<T: Real> Matrix<T> {
    /// Largest absolute entry (real scalars).
    pub fn max_abs_real(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
    }

    /// Infinity norm (maximum absolute row sum).
    pub fn norm_inf(&self) -> T {
        (0..self.rows)
            .map(|i| self.row(i).iter().fold(T::zero(), |s, &x| s + x.abs()))
            .fold(T::zero(), T::max)
    }

    /// One norm (maximum absolute column sum).
    pub fn norm_one(&self) -> T {
        self.transpose().norm_inf()
    }

    /// Entrywise maximum of `|self - other|`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }

    /// `(A + Aᵀ) / 2`.
    pub fn symmetrized(&self) -> Self {
        let t = self.transpose();
        Matrix::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + t[(i, j)]) * T::half()
        })
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(Real::approx_f64)
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Copy + Num> Mul for &Matrix<T> {
    type Output = Matrix<T>;

    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in matrix product");
        Matrix::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).fold(T::zero(), |s, k| s + self[(i, k)] * rhs[(k, j)])
        })
    }
}

impl<T: Copy + Num> Add for &Matrix<T> {
    type Output = Matrix<T>;

    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] + rhs[(i, j)])
    }
}

impl<T: Copy + Num> Sub for &Matrix<T> {
    type Output = Matrix<T>;

    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] - rhs[(i, j)])
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut l = f.debug_list();
        for i in 0..self.rows {
            l.entry(&&self.data[i * self.cols..(i + 1) * self.cols]);
        }
        l.finish()
    }
}

/// LU factorization `P A = L U` with partial pivoting.
#[derive(Clone, Debug)]
pub struct Lu<T> {
    lu: Matrix<T>,
    perm: Vec<usize>,
    sign: i32,
}

impl<T: Real> Lu<T> {
    /// Factors a square matrix. Fails on an exactly zero pivot.
    pub fn new(a: &Matrix<T>) -> Result<Self> {
        assert!(a.is_square(), "LU of a non-square matrix");
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&x, &y| {
                    lu[(x, k)]
                        .abs()
                        .partial_cmp(&lu[(y, k)].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap_or(k);
            if lu[(p, k)] == T::zero() || !lu[(p, k)].is_finite() {
                return Err(Error::Singular {
                    condition: f64::INFINITY,
                });
            }
            if p != k {
                for c in 0..n {
                    let tmp = lu[(k, c)];
                    lu[(k, c)] = lu[(p, c)];
                    lu[(p, c)] = tmp;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let m = lu[(i, k)] / pivot;
                lu[(i, k)] = m;
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= m * u;
                }
            }
        }
        Ok(Lu { lu, perm, sign })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows
    }

    pub fn det(&self) -> T {
        let n = self.dim();
        let mut d = if self.sign < 0 { -T::one() } else { T::one() };
        for i in 0..n {
            d *= self.lu[(i, i)];
        }
        d
    }

    /// Solves `A x = b` for one right-hand side.
    pub fn solve_vec(&self, b: &[T]) -> Vec<T> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                let l = self.lu[(i, k)];
                let xk = x[k];
                x[i] -= l * xk;
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let u = self.lu[(i, k)];
                let xk = x[k];
                x[i] -= u * xk;
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }

    /// Solves `A X = B` column by column.
    pub fn solve(&self, b: &Matrix<T>) -> Matrix<T> {
        assert_eq!(b.rows, self.dim());
        let mut out = Matrix::zeros(b.rows, b.cols);
        for j in 0..b.cols {
            let col: Vec<T> = (0..b.rows).map(|i| b[(i, j)]).collect();
            for (i, v) in self.solve_vec(&col).into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        out
    }

    pub fn inverse(&self) -> Matrix<T> {
        self.solve(&Matrix::identity(self.dim()))
    }

    /// One-norm condition number `‖A‖₁‖A⁻¹‖₁`, using the explicit inverse
    /// (cheap at these sizes).
    pub fn condition_one(&self, a: &Matrix<T>) -> T {
        a.norm_one() * self.inverse().norm_one()
    }
}

/// Cholesky factor `L` with `A = L Lᵀ`, or `None` when `A` is not
/// numerically positive definite. Only the lower triangle is read.
pub fn cholesky<T: Real>(a: &Matrix<T>) -> Option<Matrix<T>> {
    assert!(a.is_square());
    let n = a.rows;
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > T::zero()) || !d.is_finite() {
            return None;
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / djj;
        }
    }
    Some(l)
}

/// Scales each row by a power of two so its largest entry lies in `[1, 2)`.
/// Returns the scaled matrix and the applied exponents. The scaling is exact.
pub fn equilibrate_rows<T: Real>(a: &Matrix<T>) -> (Matrix<T>, Vec<i32>) {
    let mut out = a.clone();
    let mut exps = Vec::with_capacity(a.rows);
    for i in 0..a.rows {
        let m = a
            .row(i)
            .iter()
            .fold(0.0f64, |m, x| m.max(x.approx_f64().abs()));
        let e = if m > 0.0 && m.is_finite() {
            -(m.log2().floor() as i32)
        } else {
            0
        };
        let s = T::of_f64(2f64.powi(e));
        for j in 0..a.cols {
            out[(i, j)] = a[(i, j)] * s;
        }
        exps.push(e);
    }
    (out, exps)
}
