use num_complex::Complex64;

use crate::error::{HhlError, Result};
use crate::linalg::{hermitian_eigendecomposition, ComplexMatrix, Spectrum};
use crate::TOLERANCE;

/// Largest truncation order the automatic rule will pick.
pub const MAX_TAYLOR_ORDER: usize = 40;

/// Relative margin added to `‖A‖₂` when choosing the normalisation `α`.
pub const ALPHA_MARGIN: f64 = 1e-9;

/// `A/α` embedded as the top-left block of a `2N × 2N` unitary.
///
/// The block qubit is the most significant index bit: rows/columns `0..N`
/// are its `|0⟩` sector.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockEncoding {
    pub unitary: ComplexMatrix,
    pub alpha: f64,
    pub extra_ancillas: usize,
}

impl BlockEncoding {
    pub fn system_dim(&self) -> usize {
        self.unitary.dim() / 2
    }

    /// `α · ⟨0|U|0⟩`, i.e. the encoded matrix.
    pub fn encoded_matrix(&self) -> ComplexMatrix {
        let n = self.system_dim();
        ComplexMatrix::from_fn(n, |i, j| self.unitary[(i, j)] * self.alpha)
    }
}

/// `U = [[A/α, √(I−(A/α)²)], [√(I−(A/α)²), −A/α]]` with `α = ‖A‖₂ (1 + margin)`.
pub fn block_encode(a: &ComplexMatrix) -> Result<BlockEncoding> {
    let spectrum = hermitian_eigendecomposition(a)?;
    block_encode_with_spectrum(a, &spectrum)
}

pub(crate) fn block_encode_with_spectrum(
    a: &ComplexMatrix,
    spectrum: &Spectrum,
) -> Result<BlockEncoding> {
    let norm = spectrum.max_abs();
    let alpha = if norm == 0.0 {
        1.0
    } else {
        norm * (1.0 + ALPHA_MARGIN)
    };
    let min_eigenvalue = spectrum
        .eigenvalues
        .iter()
        .map(|l| 1.0 - (l / alpha).powi(2))
        .fold(f64::INFINITY, f64::min);
    if min_eigenvalue < -1e-12 {
        return Err(HhlError::NormalizationFailure { min_eigenvalue });
    }
    let complement = spectrum
        .apply_function(|l| Complex64::new((1.0 - (l / alpha).powi(2)).max(0.0).sqrt(), 0.0));

    let n = a.dim();
    let scale = 1.0 / alpha;
    let unitary = ComplexMatrix::from_fn(2 * n, |i, j| match (i < n, j < n) {
        (true, true) => a[(i, j)] * scale,
        (true, false) => complement[(i, j - n)],
        (false, true) => complement[(i - n, j)],
        (false, false) => -a[(i - n, j - n)] * scale,
    });
    Ok(BlockEncoding {
        unitary,
        alpha,
        extra_ancillas: 1,
    })
}

/// `(x)^{K+1} / (K+1)!`, the Taylor remainder bound for `‖At‖ ≤ x`.
pub fn taylor_remainder_bound(alpha_t: f64, order: usize) -> f64 {
    (1..=order + 1).fold(1.0, |acc, j| acc * alpha_t / j as f64)
}

/// Smallest `K ≤ MAX_TAYLOR_ORDER` whose remainder bound is within `tolerance`.
pub fn auto_truncation(alpha_t: f64, tolerance: f64) -> Result<usize> {
    (0..=MAX_TAYLOR_ORDER)
        .find(|&k| taylor_remainder_bound(alpha_t, k) <= tolerance)
        .ok_or(HhlError::TruncationInsufficient {
            order: MAX_TAYLOR_ORDER,
            bound: taylor_remainder_bound(alpha_t, MAX_TAYLOR_ORDER),
            tolerance,
        })
}

/// `Σ_{j=0}^{K} (iAt)^j / j!` with `A` read from the encoding, projected onto
/// the nearest unitary.
pub fn taylor_exponential(
    encoding: &BlockEncoding,
    t: f64,
    order: usize,
    tolerance: f64,
) -> Result<ComplexMatrix> {
    let bound = taylor_remainder_bound(encoding.alpha * t.abs(), order);
    if bound > tolerance {
        return Err(HhlError::TruncationInsufficient {
            order,
            bound,
            tolerance,
        });
    }
    let a = encoding.encoded_matrix();
    let n = a.dim();
    let step = a.scale(Complex64::new(0.0, t));
    let mut term = ComplexMatrix::identity(n);
    let mut sum = term.clone();
    for j in 1..=order {
        term = term
            .matmul(&step)
            .scale(Complex64::new(1.0 / j as f64, 0.0));
        sum = sum.add(&term);
    }
    polar_unitary(&sum)
}

/// Unitary polar factor `M (M†M)^{-1/2}`.
pub fn polar_unitary(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if m.unitarity_deviation() <= 1e-15 {
        return Ok(m.clone());
    }
    let gram = m.adjoint().matmul(m).hermitian_part();
    let spectrum = hermitian_eigendecomposition(&gram)?;
    if spectrum.eigenvalues[0] <= TOLERANCE {
        return Err(HhlError::SingularMatrix {
            min_abs: spectrum.eigenvalues[0].max(0.0),
            max_abs: spectrum.max_abs(),
        });
    }
    let inv_sqrt = spectrum.apply_function(|l| Complex64::new(1.0 / l.sqrt(), 0.0));
    Ok(m.matmul(&inv_sqrt))
}
