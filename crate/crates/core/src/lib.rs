//! State-vector simulation of the HHL quantum linear-system algorithm.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: dense complex matrices, Hermitian eigendecomposition, matrix
//!   exponentials and the classical direct solver used as ground truth.
//! - [`statevector`]: the `(ancilla, clock, data)` register simulator.
//! - [`hamiltonian`]: exact, product-formula and block-encoded backends for
//!   the controlled `e^{iAt·2^k}` operators.
//! - [`qpe`]: phase estimation and its uncompute.
//! - [`pipeline`]: the end-to-end solver with post-selection and fidelity
//!   scoring.
//! - [`families`]: seeded benchmark matrix generators.
//! - [`io`]: JSON formats for matrices, vectors, problems and results.
//!
//! Hot loops run through [`exec::Exec`], which is rayon-backed when the
//! `parallel` feature (on by default) is enabled.

pub mod error;
pub mod exec;
pub mod families;
pub mod hamiltonian;
pub mod io;
pub mod linalg;
pub mod pipeline;
pub mod qpe;
pub mod statevector;

pub use error::{HhlError, Result};

/// Relative tolerance used for every numerical check in the crate.
pub const TOLERANCE: f64 = 1e-10;
