use num_complex::Complex64;

use super::eigen::{condition_number, hermitian_eigendecomposition, Spectrum};
use super::matrix::{norm2, ComplexMatrix};
use crate::error::{HhlError, Result};

/// Threshold under which a matrix entry counts as zero for sparsity metadata.
pub const NONZERO_THRESHOLD: f64 = 1e-12;

/// A Hermitian system `A x = b` with its sparsity and conditioning.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    pub matrix: ComplexMatrix,
    pub rhs: Vec<Complex64>,
    /// Maximum number of nonzeros in any row.
    pub sparsity: usize,
    pub condition_number: f64,
}

impl ProblemInstance {
    pub fn new(matrix: ComplexMatrix, rhs: Vec<Complex64>) -> Result<Self> {
        let spectrum = hermitian_eigendecomposition(&matrix)?;
        Self::with_spectrum(matrix, rhs, &spectrum)
    }

    pub(crate) fn with_spectrum(
        matrix: ComplexMatrix,
        rhs: Vec<Complex64>,
        spectrum: &Spectrum,
    ) -> Result<Self> {
        if rhs.len() != matrix.dim() {
            return Err(HhlError::DimensionMismatch {
                expected: matrix.dim(),
                found: rhs.len(),
            });
        }
        if norm2(&rhs) == 0.0 {
            return Err(HhlError::ZeroVector);
        }
        let condition_number = condition_number(spectrum)?;
        Ok(Self {
            sparsity: matrix.max_row_nonzeros(NONZERO_THRESHOLD),
            matrix,
            rhs,
            condition_number,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// Direct solve by LU factorisation with partial pivoting.
///
/// Returns the unnormalised solution `x = A⁻¹ b`.
pub fn solve_linear(problem: &ProblemInstance) -> Result<Vec<Complex64>> {
    solve_dense(&problem.matrix, &problem.rhs)
}

pub(crate) fn solve_dense(a: &ComplexMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = a.dim();
    if b.len() != n {
        return Err(HhlError::DimensionMismatch {
            expected: n,
            found: b.len(),
        });
    }
    let scale = a.max_abs();
    let mut lu: Vec<Vec<Complex64>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    let mut x = b.to_vec();

    for k in 0..n {
        let (pivot_row, pivot_abs) =
            (k..n)
                .map(|i| (i, lu[i][k].norm()))
                .fold(
                    (k, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
        if pivot_abs <= 1e-14 * scale || scale == 0.0 {
            return Err(HhlError::SingularMatrix {
                min_abs: pivot_abs.max(0.0),
                max_abs: scale,
            });
        }
        lu.swap(k, pivot_row);
        x.swap(k, pivot_row);
        let (upper, lower) = lu.split_at_mut(k + 1);
        let pivot_vals = &upper[k];
        for row in lower.iter_mut() {
            let factor = row[k] / pivot_vals[k];
            if factor.norm() == 0.0 {
                continue;
            }
            row[k] = factor;
            for j in k + 1..n {
                row[j] -= factor * pivot_vals[j];
            }
        }
        let xk = x[k];
        for (i, row) in lower.iter().enumerate() {
            x[k + 1 + i] -= row[k] * xk;
        }
    }
    for k in (0..n).rev() {
        let s: Complex64 = (k + 1..n).map(|j| lu[k][j] * x[j]).sum();
        x[k] = (x[k] - s) / lu[k][k];
    }
    Ok(x)
}

/// `A⁻¹b / ‖A⁻¹b‖`.
pub fn normalized_solution(problem: &ProblemInstance) -> Result<Vec<Complex64>> {
    let x = solve_linear(problem)?;
    let norm = norm2(&x);
    Ok(x.into_iter().map(|v| v / norm).collect())
}
