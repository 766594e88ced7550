use num_complex::Complex64;

use super::matrix::{inner, norm2, ComplexMatrix, ZERO};
use crate::error::{HhlError, Result};
use crate::TOLERANCE;

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Column `j` is the eigenvector for `eigenvalues[j]`.
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim()).map(|i| self.eigenvectors[(i, j)]).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.abs()).fold(0.0, f64::max)
    }

    pub fn min_abs(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|l| l.abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// `Σ_j f(λ_j) v_j v_j†`.
    pub fn apply_function(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let diag: Vec<Complex64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let v = &self.eigenvectors;
        v.matmul(&ComplexMatrix::from_diagonal(&diag))
            .matmul(&v.adjoint())
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply_function(|l| Complex64::new(l, 0.0))
    }

    /// Coefficients `β_j = ⟨v_j | b⟩` of `b` in the eigenbasis.
    pub fn coefficients(&self, b: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim())
            .map(|j| inner(&self.eigenvector(j), b))
            .collect()
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues come back ascending. Each (near-)degenerate block is given a
/// canonical basis: the canonical basis vectors `e_0, e_1, ...` are projected
/// onto the block's eigenspace and Gram-Schmidt orthonormalised in index
/// order. Non-degenerate eigenvectors get the same treatment, which fixes
/// their phase so the first significant component is real and positive.
pub fn hermitian_eigendecomposition(a: &ComplexMatrix) -> Result<Spectrum> {
    a.check_hermitian()?;
    let n = a.dim();
    if n == 0 {
        return Err(HhlError::DimensionMismatch {
            expected: 1,
            found: 0,
        });
    }

    if a.is_diagonal() {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re).then(i.cmp(&j)));
        let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
        let mut eigenvectors = ComplexMatrix::zeros(n);
        for (col, &row) in order.iter().enumerate() {
            eigenvectors[(row, col)] = Complex64::new(1.0, 0.0);
        }
        return Ok(Spectrum {
            eigenvalues,
            eigenvectors,
        });
    }

    let eig = nalgebra::SymmetricEigen::new(a.hermitian_part().to_nalgebra());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .total_cmp(&eig.eigenvalues[j])
            .then(i.cmp(&j))
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let raw: Vec<Vec<Complex64>> = order
        .iter()
        .map(|&k| eig.eigenvectors.column(k).iter().copied().collect())
        .collect();

    let scale = eigenvalues.iter().map(|l| l.abs()).fold(1.0, f64::max);
    let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eigenvalues[end] - eigenvalues[end - 1] <= TOLERANCE * scale {
            end += 1;
        }
        columns.extend(canonical_block_basis(&raw[start..end], n));
        start = end;
    }

    let eigenvectors = ComplexMatrix::from_fn(n, |i, j| columns[j][i]);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

fn canonical_block_basis(block: &[Vec<Complex64>], n: usize) -> Vec<Vec<Complex64>> {
    let g = block.len();
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(g);
    for i in 0..n {
        if basis.len() == g {
            break;
        }
        // Projection of e_i onto span(block): Σ_k v_k conj(v_k[i]).
        let weights: Vec<Complex64> = block.iter().map(|v| v[i].conj()).collect();
        if weights.iter().all(|w| w.norm() < 1e-9) {
            continue;
        }
        let mut p = vec![ZERO; n];
        for (v, w) in block.iter().zip(&weights) {
            for (pk, vk) in p.iter_mut().zip(v) {
                *pk += vk * w;
            }
        }
        for _ in 0..2 {
            for q in &basis {
                let overlap = inner(q, &p);
                for (pk, qk) in p.iter_mut().zip(q) {
                    *pk -= qk * overlap;
                }
            }
        }
        let norm = norm2(&p);
        if norm > 1e-6 {
            basis.push(p.iter().map(|x| x / norm).collect());
        }
    }
    debug_assert_eq!(basis.len(), g, "degenerate block basis incomplete");
    basis
}

/// `max|λ| / min|λ|`.
pub fn condition_number(spectrum: &Spectrum) -> Result<f64> {
    let max_abs = spectrum.max_abs();
    let min_abs = spectrum.min_abs();
    if min_abs <= 1e-14 * max_abs || max_abs == 0.0 {
        return Err(HhlError::SingularMatrix { min_abs, max_abs });
    }
    Ok(max_abs / min_abs)
}

/// `e^{iAt}` computed through the eigendecomposition.
pub fn unitary_exponential(a: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    a.check_hermitian()?;
    if a.is_diagonal() {
        let d: Vec<Complex64> = a
            .diagonal()
            .iter()
            .map(|l| Complex64::from_polar(1.0, l.re * t))
            .collect();
        return Ok(ComplexMatrix::from_diagonal(&d));
    }
    let spectrum = hermitian_eigendecomposition(a)?;
    Ok(spectral_exponential(&spectrum, t))
}

/// `e^{iAt}` from an already computed spectrum of `A`.
pub fn spectral_exponential(spectrum: &Spectrum, t: f64) -> ComplexMatrix {
    spectrum.apply_function(|l| Complex64::from_polar(1.0, l * t))
}
