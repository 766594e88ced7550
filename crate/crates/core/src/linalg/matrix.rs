use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{HhlError, Result};
use crate::exec::Exec;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense square complex matrix, row-major.
///
/// Storage is dense regardless of sparsity; sparsity is tracked as metadata
/// on [`ProblemInstance`](crate::linalg::ProblemInstance).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from row-major data; `data.len()` must be a perfect square.
    pub fn from_row_major(data: Vec<Complex64>) -> Result<Self> {
        let dim = (data.len() as f64).sqrt().round() as usize;
        if dim * dim != data.len() {
            return Err(HhlError::Format(format!(
                "{} entries do not form a square matrix",
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    /// Real matrix from nested rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(HhlError::Format("rows must all have length n".into()));
        }
        Ok(Self::from_fn(dim, |i, j| Complex64::new(rows[i][j], 0.0)))
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<_> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diagonal(&d)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        self.matmul_with(other, Exec::default())
    }

    /// Dense product. Rows of the result are independent; each entry is
    /// accumulated in a fixed order so both execution modes agree bit for bit.
    pub fn matmul_with(&self, other: &Self, exec: Exec) -> Self {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        let n = self.dim;
        if self.is_diagonal() {
            return Self::from_fn(n, |i, j| self[(i, i)] * other[(i, j)]);
        }
        if other.is_diagonal() {
            return Self::from_fn(n, |i, j| self[(i, j)] * other[(j, j)]);
        }
        let mut out = Self::zeros(n);
        let exec = if n * n * n < crate::exec::PARALLEL_THRESHOLD * 8 {
            Exec::Sequential
        } else {
            exec
        };
        const ROWS_PER_TASK: usize = 4;
        exec.for_each_chunk(&mut out.data, n * ROWS_PER_TASK, |ci, chunk| {
            let base_row = ci * ROWS_PER_TASK;
            for (r, out_row) in chunk.chunks_mut(n).enumerate() {
                for (k, &a) in self.row(base_row + r).iter().enumerate() {
                    if a == ZERO {
                        continue;
                    }
                    for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                        *o += a * b;
                    }
                }
            }
        });
        out
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `self^power` by repeated squaring.
    pub fn pow(&self, mut power: u64) -> Self {
        let mut result = Self::identity(self.dim);
        let mut base = self.clone();
        while power > 0 {
            if power & 1 == 1 {
                result = result.matmul(&base);
            }
            power >>= 1;
            if power > 0 {
                base = base.matmul(&base);
            }
        }
        result
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        Self::from_fn(n * m, |i, j| self[(i / m, j / m)] * other[(i % m, j % m)])
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// `max |A[i][j] - conj(A[j][i])|`.
    pub fn max_asymmetry(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn check_hermitian(&self) -> Result<()> {
        let max_asymmetry = self.max_asymmetry();
        if max_asymmetry > 1e-12 {
            Err(HhlError::NonHermitian { max_asymmetry })
        } else {
            Ok(())
        }
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim;
        self.data
            .iter()
            .enumerate()
            .all(|(k, x)| k / n == k % n || *x == ZERO)
    }

    /// `max |U^dag U - I|`, entrywise.
    pub fn unitarity_deviation(&self) -> f64 {
        if self.is_diagonal() {
            return self
                .diagonal()
                .iter()
                .map(|d| (d.norm_sqr() - 1.0).abs())
                .fold(0.0, f64::max);
        }
        self.adjoint()
            .matmul(self)
            .max_abs_diff(&Self::identity(self.dim))
    }

    pub fn check_unitary(&self, tol: f64) -> Result<()> {
        let deviation = self.unitarity_deviation();
        if deviation > tol {
            Err(HhlError::NonUnitary { deviation })
        } else {
            Ok(())
        }
    }

    /// Largest number of entries with modulus above `threshold` in any row.
    pub fn max_row_nonzeros(&self, threshold: f64) -> usize {
        (0..self.dim)
            .map(|i| self.row(i).iter().filter(|x| x.norm() > threshold).count())
            .max()
            .unwrap_or(0)
    }

    /// Makes the matrix exactly Hermitian by averaging with its adjoint.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    pub(crate) fn to_nalgebra(&self) -> nalgebra::DMatrix<Complex64> {
        nalgebra::DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

pub fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}
