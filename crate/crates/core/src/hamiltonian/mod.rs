//! Hamiltonian simulation backends producing `U^p = e^{iAtp}` for phase
//! estimation.
//!
//! Three interchangeable routes are provided:
//!
//! - **exact**: `V diag(e^{iλ t p}) V†` from the eigendecomposition;
//! - **trotter**: a first- or second-order product formula over the Pauli
//!   expansion of `A`, with the step size held fixed so the step count scales
//!   with `p`;
//! - **block**: `A` read through a unitary block encoding and exponentiated by
//!   a truncated Taylor series over short time segments.

mod block;
mod pauli;
mod trotter;

use serde::{Deserialize, Serialize};

pub use block::{
    auto_truncation, block_encode, polar_unitary, taylor_exponential, taylor_remainder_bound,
    BlockEncoding, ALPHA_MARGIN, MAX_TAYLOR_ORDER,
};
pub use pauli::{pauli_decompose, PauliTerm, PauliTermList, PauliWord, COEFFICIENT_CUTOFF};
pub use trotter::{trotter_unitary, TrotterOrder, TrotterPlan};

use crate::error::{HhlError, Result};
use crate::linalg::{spectral_exponential, ComplexMatrix, Spectrum};
use num_complex::Complex64;

/// Block-backend time segments are shortened until `α |τ| ≤ SEGMENT_NORM`.
pub const SEGMENT_NORM: f64 = 1.0;

/// Default truncation tolerance for the automatic Taylor order.
pub const DEFAULT_TAYLOR_TOLERANCE: f64 = 1e-12;

/// Backend selection as it appears in configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum MethodConfig {
    #[default]
    Exact,
    Trotter {
        steps: u64,
        #[serde(default = "default_order")]
        order: TrotterOrder,
    },
    Block {
        #[serde(default)]
        taylor_k: Option<usize>,
    },
}

fn default_order() -> TrotterOrder {
    TrotterOrder::Second
}

impl MethodConfig {
    /// Short identifier used in CSV output, e.g. `trotter-o2-r8`.
    pub fn label(&self) -> String {
        match self {
            MethodConfig::Exact => "exact".into(),
            MethodConfig::Trotter { steps, order } => {
                format!("trotter-o{}-r{steps}", order.as_u8())
            }
            MethodConfig::Block { taylor_k: None } => "block".into(),
            MethodConfig::Block { taylor_k: Some(k) } => format!("block-k{k}"),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            MethodConfig::Exact => "exact",
            MethodConfig::Trotter { .. } => "trotter",
            MethodConfig::Block { .. } => "block",
        }
    }

    /// Builds the backend for `a`, whose spectrum has already been computed.
    pub fn build(
        &self,
        a: &ComplexMatrix,
        spectrum: &Spectrum,
        tolerance: f64,
    ) -> Result<HamiltonianBackend> {
        Ok(match *self {
            MethodConfig::Exact => HamiltonianBackend::Exact {
                spectrum: spectrum.clone(),
                diagonal: a
                    .is_diagonal()
                    .then(|| a.diagonal().iter().map(|d| d.re).collect()),
            },
            MethodConfig::Trotter { steps, order } => HamiltonianBackend::Trotter {
                plan: TrotterPlan::new(pauli_decompose(a)?, order, steps)?,
            },
            MethodConfig::Block { taylor_k } => HamiltonianBackend::Block {
                encoding: block::block_encode_with_spectrum(a, spectrum)?,
                truncation: taylor_k,
                tolerance,
            },
        })
    }
}

#[derive(Debug, Clone)]
pub enum HamiltonianBackend {
    Exact {
        spectrum: Spectrum,
        /// Set when `A` is diagonal, so powers skip the eigenbasis change.
        diagonal: Option<Vec<f64>>,
    },
    Trotter {
        plan: TrotterPlan,
    },
    Block {
        encoding: BlockEncoding,
        /// Fixed Taylor order; `None` picks the smallest order meeting `tolerance`.
        truncation: Option<usize>,
        tolerance: f64,
    },
}

/// A backend's approximation of `U^p` and the number of elementary
/// exponentials (or block-encoding queries) it stands for.
#[derive(Debug, Clone)]
pub struct EvolutionOperator {
    pub power: u64,
    pub matrix: ComplexMatrix,
    pub elementary_exponentials: u64,
}

/// `U^power` with `U = e^{iAt}` for the chosen backend.
pub fn controlled_evolution(
    backend: &HamiltonianBackend,
    t: f64,
    power: u64,
) -> Result<EvolutionOperator> {
    if power == 0 {
        return Err(HhlError::InvalidConfig(
            "evolution power must be at least 1".into(),
        ));
    }
    let time = t * power as f64;
    let (matrix, elementary_exponentials) = match backend {
        HamiltonianBackend::Exact { spectrum, diagonal } => {
            let m = match diagonal {
                Some(d) => ComplexMatrix::from_diagonal(
                    &d.iter()
                        .map(|l| Complex64::from_polar(1.0, l * time))
                        .collect::<Vec<_>>(),
                ),
                None => spectral_exponential(spectrum, time),
            };
            (m, power)
        }
        HamiltonianBackend::Trotter { plan } => {
            let total_steps = plan.steps * power;
            let m = plan.step_matrix(plan.step_size(t)).pow(total_steps);
            (m, total_steps * plan.exponentials_per_step())
        }
        HamiltonianBackend::Block {
            encoding,
            truncation,
            tolerance,
        } => {
            let segments = block_segments(encoding.alpha * time.abs());
            let tau = time / segments as f64;
            let (order, tol) = match truncation {
                Some(k) => (*k, f64::INFINITY),
                None => (
                    auto_truncation(encoding.alpha * tau.abs(), *tolerance)?,
                    *tolerance,
                ),
            };
            let segment = taylor_exponential(encoding, tau, order, tol)?;
            (segment.pow(segments), segments * order as u64)
        }
    };
    Ok(EvolutionOperator {
        power,
        matrix,
        elementary_exponentials,
    })
}

fn block_segments(alpha_time: f64) -> u64 {
    let mut s = 1u64;
    while alpha_time / s as f64 > SEGMENT_NORM {
        s *= 2;
    }
    s
}

/// `U^{2^k}` for `k = 0..n_clock`.
///
/// Product-formula and block powers are obtained by squaring the previous
/// rung, which reproduces exactly the same product as rebuilding each power
/// with a proportionally larger step or segment count.
pub fn evolution_ladder(
    backend: &HamiltonianBackend,
    t: f64,
    n_clock: usize,
) -> Result<Vec<EvolutionOperator>> {
    let mut ladder: Vec<EvolutionOperator> = Vec::with_capacity(n_clock);
    for k in 0..n_clock {
        let power = 1u64 << k;
        let op = match (backend, ladder.last()) {
            (HamiltonianBackend::Exact { .. }, _) | (_, None) => {
                controlled_evolution(backend, t, power)?
            }
            (_, Some(prev)) => EvolutionOperator {
                power,
                matrix: prev.matrix.matmul(&prev.matrix),
                elementary_exponentials: prev.elementary_exponentials * 2,
            },
        };
        ladder.push(op);
    }
    Ok(ladder)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{
        hermitian_eigendecomposition, tests_support::random_hermitian, unitary_exponential,
    };

    fn backend(a: &ComplexMatrix, method: MethodConfig) -> HamiltonianBackend {
        let s = hermitian_eigendecomposition(a).unwrap();
        method.build(a, &s, DEFAULT_TAYLOR_TOLERANCE).unwrap()
    }

    #[test]
    fn exact_power_one_is_unitary_exponential() {
        let a = random_hermitian(4, 5);
        let op = controlled_evolution(&backend(&a, MethodConfig::Exact), 0.9, 1).unwrap();
        assert!(
            op.matrix
                .max_abs_diff(&unitary_exponential(&a, 0.9).unwrap())
                <= 1e-12
        );
        assert_eq!(op.elementary_exponentials, 1);
    }

    #[test]
    fn power_zero_rejected() {
        let a = ComplexMatrix::identity(2);
        assert!(matches!(
            controlled_evolution(&backend(&a, MethodConfig::Exact), 1.0, 0),
            Err(HhlError::InvalidConfig(_))
        ));
    }

    #[test]
    fn trotter_power_matches_scaled_steps() {
        let a = random_hermitian(4, 8);
        let method = MethodConfig::Trotter {
            steps: 3,
            order: TrotterOrder::First,
        };
        let b = backend(&a, method);
        let op = controlled_evolution(&b, 0.7, 4).unwrap();
        // Direct product of 12 identical steps, multiplied out one by one.
        let HamiltonianBackend::Trotter { plan } = &b else {
            unreachable!()
        };
        let step = plan.step_matrix(plan.step_size(0.7));
        let mut direct = ComplexMatrix::identity(4);
        for _ in 0..12 {
            direct = direct.matmul(&step);
        }
        assert!(op.matrix.max_abs_diff(&direct) <= 1e-12);
        assert_eq!(
            op.elementary_exponentials,
            12 * plan.terms.term_count() as u64
        );
    }

    #[test]
    fn every_backend_is_unitary() {
        let a = random_hermitian(8, 21);
        for method in [
            MethodConfig::Exact,
            MethodConfig::Trotter {
                steps: 4,
                order: TrotterOrder::Second,
            },
            MethodConfig::Block { taylor_k: None },
            MethodConfig::Block { taylor_k: Some(6) },
        ] {
            let b = backend(&a, method);
            for power in [1, 2, 8] {
                let op = controlled_evolution(&b, 1.1, power).unwrap();
                assert!(
                    op.matrix.unitarity_deviation() <= 1e-9,
                    "{method:?} p={power}"
                );
            }
        }
    }

    #[test]
    fn exact_agrees_with_taylor_k40() {
        for (n, seed) in [(2, 1), (4, 2), (8, 3), (16, 4)] {
            let a = random_hermitian(n, seed);
            let s = hermitian_eigendecomposition(&a).unwrap();
            let t = 4.0 / s.max_abs();
            let enc = block_encode(&a).unwrap();
            let taylor = taylor_exponential(&enc, t, 40, 1e-8).unwrap();
            let exact = unitary_exponential(&a, t).unwrap();
            assert!(taylor.max_abs_diff(&exact) <= 1e-8, "n={n}");
        }
    }

    #[test]
    fn ladder_matches_direct_powers() {
        let a = random_hermitian(4, 13);
        for method in [
            MethodConfig::Exact,
            MethodConfig::Trotter {
                steps: 2,
                order: TrotterOrder::Second,
            },
            MethodConfig::Block { taylor_k: None },
        ] {
            let b = backend(&a, method);
            let ladder = evolution_ladder(&b, 0.6, 4).unwrap();
            for (k, rung) in ladder.iter().enumerate() {
                let direct = controlled_evolution(&b, 0.6, 1 << k).unwrap();
                assert!(
                    rung.matrix.max_abs_diff(&direct.matrix) <= 1e-10,
                    "{method:?} k={k}"
                );
                assert_eq!(rung.elementary_exponentials, direct.elementary_exponentials);
            }
        }
    }

    #[test]
    fn block_backend_tracks_exact() {
        let a = random_hermitian(8, 30);
        let exact = controlled_evolution(&backend(&a, MethodConfig::Exact), 2.0, 16).unwrap();
        let block = controlled_evolution(
            &backend(&a, MethodConfig::Block { taylor_k: None }),
            2.0,
            16,
        )
        .unwrap();
        assert!(block.matrix.max_abs_diff(&exact.matrix) <= 1e-9);
    }

    #[test]
    fn method_config_json() {
        let m: MethodConfig = serde_json::from_str(r#"{"method":"trotter","steps":8}"#).unwrap();
        assert_eq!(
            m,
            MethodConfig::Trotter {
                steps: 8,
                order: TrotterOrder::Second
            }
        );
        assert_eq!(m.label(), "trotter-o2-r8");
        let b: MethodConfig = serde_json::from_str(r#"{"method":"block"}"#).unwrap();
        assert_eq!(b, MethodConfig::Block { taylor_k: None });
        let e: MethodConfig = serde_json::from_str(r#"{"method":"exact"}"#).unwrap();
        assert_eq!(e.kind(), "exact");
        assert!(serde_json::from_str::<MethodConfig>(r#"{"method":"qsp"}"#).is_err());
    }
}
