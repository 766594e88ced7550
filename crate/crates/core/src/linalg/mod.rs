//! Dense complex linear algebra and the classical reference solver.

mod eigen;
mod matrix;
mod solve;

pub use eigen::{
    condition_number, hermitian_eigendecomposition, spectral_exponential, unitary_exponential,
    Spectrum,
};
pub use matrix::{inner, norm2, ComplexMatrix};
pub use solve::{normalized_solution, solve_linear, ProblemInstance, NONZERO_THRESHOLD};

pub(crate) use matrix::{ONE, ZERO};
